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
    assert out == '\n'


def test_positives():
    out = _import_module_with_input(['3', '1 2 3'])
    assert out == '1 3 6\n'


def test_negatives():
    out = _import_module_with_input(['4', '5 -2 -3 10'])
    assert out == '5 3 0 10\n'


def test_single():
    out = _import_module_with_input(['1', '7'])
    assert out == '7\n'
