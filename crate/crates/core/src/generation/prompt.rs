use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::util::sha256_hex;

/// The three prompt templates. `{{program}}` and `{{error}}` are the only
/// placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    pub version: String,
    pub system: String,
    pub user: String,
    pub repair: String,
}

impl Templates {
    /// The templates shipped in the repository's `templates/` directory.
    pub fn builtin() -> Self {
        Self {
            version: include_str!("../../../../templates/VERSION")
                .trim()
                .to_string(),
            system: include_str!("../../../../templates/system.txt").to_string(),
            user: include_str!("../../../../templates/user.txt").to_string(),
            repair: include_str!("../../../../templates/repair.txt").to_string(),
        }
    }

    pub fn load(dir: &Path) -> std::io::Result<Self> {
        let read = |name: &str| std::fs::read_to_string(dir.join(name));
        Ok(Self {
            version: read("VERSION")?.trim().to_string(),
            system: read("system.txt")?,
            user: read("user.txt")?,
            repair: read("repair.txt")?,
        })
    }

    /// Content hash recorded in every report so runs are comparable.
    pub fn hash(&self) -> String {
        let mut joined = String::new();
        for part in [&self.version, &self.system, &self.user, &self.repair] {
            joined.push_str(&part.len().to_string());
            joined.push(':');
            joined.push_str(part);
        }
        sha256_hex(joined.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub system_text: String,
    pub user_text: String,
    pub attempt: u8,
    pub prior_error: Option<String>,
}

impl Prompt {
    /// Content hash identifying this request for a given model and decoding
    /// temperature.
    pub fn digest(&self, model: &str, temperature: f64) -> String {
        let key = serde_json::json!({
            "model": model,
            "temperature": temperature,
            "system": self.system_text,
            "user": self.user_text,
        });
        sha256_hex(key.to_string().as_bytes())
    }
}

/// Build the prompt for `attempt` (1 or 2). The second attempt appends the
/// repair section carrying `prior_error` verbatim.
pub fn build_prompt(
    templates: &Templates,
    program_source: &str,
    attempt: u8,
    prior_error: Option<&str>,
) -> Prompt {
    assert!(matches!(attempt, 1 | 2), "attempt must be 1 or 2");
    let mut user_text = templates
        .user
        .replace("{{program}}", program_source.trim_end_matches('\n'));
    let prior_error = if attempt == 2 {
        let error = prior_error.expect("a repair attempt needs the previous error");
        user_text.push_str(&templates.repair.replace("{{error}}", error));
        Some(error.to_string())
    } else {
        None
    };
    Prompt {
        system_text: templates.system.clone(),
        user_text,
        attempt,
        prior_error,
    }
}
