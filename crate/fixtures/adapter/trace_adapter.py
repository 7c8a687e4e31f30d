#!/usr/bin/env python3
"""Minimal adapter speaking the testdrift JSON protocol, standard library only.

Per-test line coverage comes from sys.settrace. Branch coverage counts, for
every if/elif/while/for header in the program, how many of its two outcomes
were taken (distinct successor lines in the same frame). It is a test double
for the real adapter, not a replacement for coverage.py.
"""

import ast
import importlib.util
import io
import json
import os
import signal
import sys
import traceback

PROGRAM_MODULE = "program_under_test"


class ProtocolError(Exception):
    pass


class TestTimeout(BaseException):
    pass


def fail_protocol(message):
    sys.stdout.write(json.dumps({"error": message}))
    sys.stdout.flush()
    sys.exit(2)


def case_names(suite_source):
    """Same collection rule as the core: module-level test* functions and
    test* methods of Test* classes, in source order, first position wins."""
    tree = ast.parse(suite_source)
    names = []
    for node in tree.body:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and node.name.startswith("test"):
            names.append(node.name)
        elif isinstance(node, ast.ClassDef) and node.name.startswith("Test"):
            for item in node.body:
                if isinstance(item, (ast.FunctionDef, ast.AsyncFunctionDef)) and item.name.startswith("test"):
                    names.append(f"{node.name}::{item.name}")
    seen = set()
    return [n for n in names if not (n in seen or seen.add(n))]


def executable_lines(source, filename):
    code = compile(source, filename, "exec")
    lines = set()
    stack = [code]
    while stack:
        co = stack.pop()
        for _, _, line in co.co_lines():
            if line is not None and line > 0:
                lines.add(line)
        stack.extend(c for c in co.co_consts if hasattr(c, "co_lines"))
    return lines


def branch_lines(source):
    tree = ast.parse(source)
    out = set()
    for node in ast.walk(tree):
        if isinstance(node, (ast.If, ast.While, ast.For, ast.AsyncFor)):
            out.add(node.lineno)
    return out


class Tracer:
    def __init__(self, filename):
        self.filename = filename
        self.lines = set()
        self.arcs = set()
        self.last = {}

    def global_trace(self, frame, event, arg):
        if frame.f_code.co_filename != self.filename:
            return None
        self.last[id(frame)] = None
        return self.local_trace

    def local_trace(self, frame, event, arg):
        if event == "line":
            line = frame.f_lineno
            self.lines.add(line)
            prev = self.last.get(id(frame))
            if prev is not None:
                self.arcs.add((prev, line))
            self.last[id(frame)] = line
        elif event == "return":
            prev = self.last.pop(id(frame), None)
            if prev is not None:
                self.arcs.add((prev, -1))
        return self.local_trace


def resolve(module, name):
    if "::" in name:
        cls_name, meth = name.split("::", 1)
        cls = getattr(module, cls_name)
        return getattr(cls(), meth)
    return getattr(module, name)


def run_case(module, name, program_path, limit):
    tracer = Tracer(program_path)
    status, message = "pass", ""

    def on_alarm(signum, frame):
        raise TestTimeout()

    old_handler = signal.signal(signal.SIGALRM, on_alarm)
    saved_out, saved_in = sys.stdout, sys.stdin
    sys.modules.pop(PROGRAM_MODULE, None)
    try:
        fn = resolve(module, name)
        params = [p for p in _params(fn)]
        if params:
            raise LookupError(f"fixture '{params[0]}' not found")
        signal.setitimer(signal.ITIMER_REAL, limit)
        sys.settrace(tracer.global_trace)
        try:
            fn()
        finally:
            sys.settrace(None)
            signal.setitimer(signal.ITIMER_REAL, 0)
    except TestTimeout:
        status, message = "timeout", f"exceeded {limit:.1f}s"
    except AssertionError as e:
        status, message = "fail", _describe(e)
    except SystemExit as e:
        status, message = "error", f"SystemExit: {e.code}"
    except BaseException as e:  # noqa: BLE001 - a test may raise anything
        status, message = "error", _describe(e)
    finally:
        sys.stdout, sys.stdin = saved_out, saved_in
        signal.signal(signal.SIGALRM, old_handler)
    return status, message, tracer


def _params(fn):
    import inspect

    try:
        sig = inspect.signature(fn)
    except (TypeError, ValueError):
        return []
    return [p.name for p in sig.parameters.values() if p.default is inspect.Parameter.empty]


def _describe(e):
    text = str(e)
    if isinstance(e, AssertionError) and not text:
        tb = traceback.extract_tb(e.__traceback__)
        text = tb[-1].line if tb else ""
        return f"AssertionError: {text}"
    return f"{type(e).__name__}: {text}"


def main():
    try:
        request = json.loads(sys.stdin.read())
        program_path = os.path.realpath(request["program_path"])
        suite_path = os.path.realpath(request["suite_path"])
        mode = request["mode"]
        limit = float(request["limits"]["wall_clock_seconds"])
    except (ValueError, KeyError, TypeError) as e:
        fail_protocol(f"bad request: {e}")
    if mode not in ("suite", "single"):
        fail_protocol(f"unknown mode {mode!r}")
    try:
        program_source = open(program_path, encoding="utf-8").read()
        suite_source = open(suite_path, encoding="utf-8").read()
    except OSError as e:
        fail_protocol(f"cannot read inputs: {e}")
    if os.path.basename(program_path) != PROGRAM_MODULE + ".py":
        fail_protocol("program must be named program_under_test.py")
    try:
        names = case_names(suite_source)
    except SyntaxError as e:
        fail_protocol(f"suite does not parse: {e}")
    if mode == "single":
        wanted = request.get("case_name")
        if wanted not in names:
            fail_protocol(f"unknown case {wanted!r}")
        names = [wanted]

    sys.path.insert(0, os.path.dirname(program_path))
    sys.path.insert(0, os.path.dirname(suite_path))
    stdout = sys.stdout
    sys.stdout = io.StringIO()
    module, import_error = None, None
    try:
        spec = importlib.util.spec_from_file_location("test_generated", suite_path)
        module = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(module)
    except BaseException as e:  # noqa: BLE001
        import_error = _describe(e)
    sys.stdout = stdout

    executable = executable_lines(program_source, program_path)
    branches = branch_lines(program_source)
    verdicts, all_lines, all_arcs = [], set(), set()
    for name in names:
        if import_error is not None:
            verdicts.append({"name": name, "status": "error", "message": import_error, "covered_lines": []})
            continue
        status, message, tracer = run_case(module, name, program_path, limit)
        all_lines |= tracer.lines
        all_arcs |= tracer.arcs
        verdicts.append({
            "name": name,
            "status": status,
            "message": message,
            "covered_lines": sorted(tracer.lines),
        })

    covered = all_lines & executable
    line_cov = 100.0 * len(covered) / len(executable) if executable else 100.0
    taken = 0
    for b in branches:
        taken += min(2, len({dst for (src, dst) in all_arcs if src == b}))
    branch_cov = 100.0 * taken / (2 * len(branches)) if branches else 100.0
    sys.stdout.write(json.dumps({
        "verdicts": verdicts,
        "suite_line_coverage": round(line_cov, 6),
        "suite_branch_coverage": round(branch_cov, 6),
        "covered_line_set": sorted(covered),
    }))
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
