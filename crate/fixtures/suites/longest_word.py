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
    out = _import_module_with_input(['1', 'abc'])
    assert out == 'abc 3\n'


def test_longest_last():
    out = _import_module_with_input(['3', 'a', 'bb', 'ccc'])
    assert out == 'ccc 3\n'


def test_tie_keeps_first():
    out = _import_module_with_input(['3', 'ab', 'cd', 'e'])
    assert out == 'ab 2\n'


def test_zero():
    out = _import_module_with_input(['0'])
    assert out == ' 0\n'
