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


def test_single_char():
    out = _import_module_with_input(['1', 'a'])
    assert out == '1\n'


def test_mixed():
    out = _import_module_with_input(['4', 'abba', 'abc', 'racecar', 'ab'])
    assert out == '2\n'


def test_even_length():
    out = _import_module_with_input(['2', 'aa', 'abab'])
    assert out == '1\n'


def test_empty_line():
    out = _import_module_with_input(['1', ''])
    assert out == '1\n'
