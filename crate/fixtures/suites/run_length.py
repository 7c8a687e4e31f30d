import importlib
import io
import sys
from contextlib import redirect_stdout


def _import_module_with_input(inputs):
    sys.stdin = io.StringIO("\n".join(inputs) + "\n")
    out = io.StringIO()
    try:
        with redirect_stdout(out):
            sys.modules.pop("program_under_test", None)
            importlib.import_module("program_under_test")
    finally:
        sys.stdin = sys.__stdin__
    return out.getvalue()


def test_single():
    out = _import_module_with_input(['1', 'a'])
    assert out == 'a1\n'


def test_runs():
    out = _import_module_with_input(['2', 'aaabcc', 'abc'])
    assert out == 'a3b1c2\na1b1c1\n'


def test_long_run():
    out = _import_module_with_input(['1', 'zzzzzz'])
    assert out == 'z6\n'


def test_empty_line():
    out = _import_module_with_input(['1', ''])
    assert out == '\n'
