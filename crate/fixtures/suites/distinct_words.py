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


def test_one():
    out = _import_module_with_input(['1', 'x'])
    assert out == '1\n'


def test_repeats():
    out = _import_module_with_input(['4', 'a', 'b', 'a', 'b'])
    assert out == '2\n'


def test_all_distinct():
    out = _import_module_with_input(['3', 'p', 'q', 'r'])
    assert out == '3\n'


def test_zero():
    out = _import_module_with_input(['0'])
    assert out == '0\n'
