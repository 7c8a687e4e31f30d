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
    assert out == '0 0\n'


def test_mixed():
    out = _import_module_with_input(['5', '1 2 3 4 5'])
    assert out == '2 3\n'


def test_all_even():
    out = _import_module_with_input(['3', '2 4 0'])
    assert out == '3 0\n'


def test_negatives():
    out = _import_module_with_input(['2', '-1 -2'])
    assert out == '1 1\n'
