//! Single-tenant subprocess execution with a wall-clock limit.
//!
//! Every run gets a fresh temporary working directory, a scrubbed
//! environment, its own process group (so a timeout kills grandchildren too)
//! and an address-space cap applied between fork and exec.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use wait_timeout::ChildExt;

/// Limits applied to one sandboxed execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SandboxPolicy {
    /// Per-test wall-clock limit in seconds.
    pub wall_clock_limit: f64,
    /// Address-space cap in bytes; 0 disables the cap.
    pub memory_limit: u64,
    /// Extra time granted to the adapter beyond the summed test limits.
    pub grace: f64,
    /// Scrub proxy variables so the child has no configured route out.
    pub network_disabled: bool,
    /// Parent directory for the per-run temporary working directories.
    pub scratch_root: Option<PathBuf>,
    /// Cap on captured stdout/stderr bytes.
    pub max_output_bytes: usize,
}

impl Default for SandboxPolicy {
    fn default() -> Self {
        Self {
            wall_clock_limit: 30.0,
            memory_limit: 1 << 30,
            grace: 5.0,
            network_disabled: true,
            scratch_root: None,
            max_output_bytes: 8 << 20,
        }
    }
}

impl SandboxPolicy {
    pub fn limit(&self) -> Duration {
        Duration::from_secs_f64(self.wall_clock_limit.max(0.0))
    }

    pub fn grace(&self) -> Duration {
        Duration::from_secs_f64(self.grace.max(0.0))
    }

    /// A fresh working directory for one execution.
    pub fn workdir(&self) -> std::io::Result<tempfile::TempDir> {
        let mut builder = tempfile::Builder::new();
        builder.prefix("testdrift-sbx-");
        match &self.scratch_root {
            Some(root) => {
                std::fs::create_dir_all(root)?;
                builder.tempdir_in(root)
            }
            None => builder.tempdir(),
        }
    }
}

/// Outcome of one sandboxed process.
#[derive(Debug, Clone)]
pub struct SandboxRun {
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
    /// `None` when the process was killed for exceeding its limit.
    pub status: Option<ExitStatus>,
    pub timed_out: bool,
    pub elapsed: Duration,
}

impl SandboxRun {
    pub fn exit_code(&self) -> Option<i32> {
        self.status.and_then(|s| s.code())
    }

    pub fn success(&self) -> bool {
        self.status.is_some_and(|s| s.success())
    }

    pub fn stdout_text(&self) -> String {
        String::from_utf8_lossy(&self.stdout).into_owned()
    }

    pub fn stderr_text(&self) -> String {
        String::from_utf8_lossy(&self.stderr).into_owned()
    }
}

/// Run `argv` inside `workdir`, feeding `stdin` and killing the whole process
/// group once `limit` elapses.
pub fn run(
    argv: &[String],
    workdir: &Path,
    stdin: &[u8],
    limit: Duration,
    policy: &SandboxPolicy,
) -> std::io::Result<SandboxRun> {
    let (program, args) = argv
        .split_first()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty command"))?;
    let mut cmd = Command::new(program);
    cmd.args(args)
        .current_dir(workdir)
        .env_clear()
        .env(
            "PATH",
            std::env::var_os("PATH").unwrap_or_else(|| "/usr/bin:/bin".into()),
        )
        .env("HOME", workdir)
        .env("TMPDIR", workdir)
        .env("LANG", "C.UTF-8")
        .env("PYTHONDONTWRITEBYTECODE", "1")
        .env("PYTHONHASHSEED", "0")
        .env("PYTHONIOENCODING", "utf-8")
        .env("PYTHONNOUSERSITE", "1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if !policy.network_disabled {
        for key in [
            "HTTP_PROXY",
            "HTTPS_PROXY",
            "http_proxy",
            "https_proxy",
            "NO_PROXY",
        ] {
            if let Some(v) = std::env::var_os(key) {
                cmd.env(key, v);
            }
        }
    }
    isolate(&mut cmd, policy.memory_limit);

    let start = Instant::now();
    let mut child = cmd.spawn()?;
    let pid = child.id();

    let mut child_stdin = child.stdin.take().expect("stdin piped");
    let input = stdin.to_vec();
    let writer = thread::spawn(move || {
        // A child that exits without reading stdin closes the pipe; that is not an error here.
        let _ = child_stdin.write_all(&input);
    });
    let cap = policy.max_output_bytes;
    let out = child.stdout.take().expect("stdout piped");
    let err = child.stderr.take().expect("stderr piped");
    let out_reader = thread::spawn(move || drain(out, cap));
    let err_reader = thread::spawn(move || drain(err, cap));

    let (status, timed_out) = match child.wait_timeout(limit)? {
        Some(status) => (Some(status), false),
        None => {
            kill_group(pid);
            let _ = child.kill();
            let _ = child.wait();
            (None, true)
        }
    };
    // Stragglers left in the group would hold the pipes open.
    kill_group(pid);
    let _ = writer.join();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    Ok(SandboxRun {
        stdout,
        stderr,
        status,
        timed_out,
        elapsed: start.elapsed(),
    })
}

fn drain(mut source: impl Read, cap: usize) -> Vec<u8> {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 8192];
    loop {
        match source.read(&mut chunk) {
            Ok(0) | Err(_) => break,
            Ok(n) => {
                let room = cap.saturating_sub(buf.len());
                buf.extend_from_slice(&chunk[..n.min(room)]);
            }
        }
    }
    buf
}

#[cfg(unix)]
fn isolate(cmd: &mut Command, memory_limit: u64) {
    use std::os::unix::process::CommandExt;
    cmd.process_group(0);
    if memory_limit > 0 {
        // SAFETY: setrlimit is async-signal-safe and touches no parent state.
        unsafe {
            cmd.pre_exec(move || {
                let lim = libc::rlimit {
                    rlim_cur: memory_limit as libc::rlim_t,
                    rlim_max: memory_limit as libc::rlim_t,
                };
                if libc::setrlimit(libc::RLIMIT_AS, &lim) != 0 {
                    return Err(std::io::Error::last_os_error());
                }
                Ok(())
            });
        }
    }
}

#[cfg(not(unix))]
fn isolate(_cmd: &mut Command, _memory_limit: u64) {}

#[cfg(unix)]
fn kill_group(pid: u32) {
    // SAFETY: plain syscall; the group id equals the child's pid because of process_group(0).
    unsafe {
        libc::killpg(pid as libc::pid_t, libc::SIGKILL);
    }
}

#[cfg(not(unix))]
fn kill_group(_pid: u32) {}
