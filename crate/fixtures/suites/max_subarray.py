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


def test_empty():
    out = _import_module_with_input([])
    assert out == '0\n'


def test_all_negative():
    out = _import_module_with_input(['3', '-3 -1 -2'])
    assert out == '-1\n'


def test_classic():
    out = _import_module_with_input(['9', '-2 1 -3 4 -1 2 1 -5 4'])
    assert out == '6\n'


def test_all_positive():
    out = _import_module_with_input(['3', '1 2 3'])
    assert out == '6\n'
