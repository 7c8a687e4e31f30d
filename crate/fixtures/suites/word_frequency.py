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
    assert out == 'a 1\n'


def test_clear_winner():
    out = _import_module_with_input(['4', 'b', 'a', 'b', 'c'])
    assert out == 'b 2\n'


def test_tie_alphabetical():
    out = _import_module_with_input(['4', 'b', 'a', 'a', 'b'])
    assert out == 'a 2\n'
