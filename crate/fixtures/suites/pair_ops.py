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
    assert out == '0\n0\n0\n'


def test_small():
    out = _import_module_with_input(['3 4'])
    assert out == '7\n-1\n12\n'


def test_negative_result():
    out = _import_module_with_input(['2 9'])
    assert out == '11\n-7\n18\n'


def test_zero():
    out = _import_module_with_input(['0 5'])
    assert out == '5\n-5\n0\n'
