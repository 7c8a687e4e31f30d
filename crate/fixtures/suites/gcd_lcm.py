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


def test_coprime():
    out = _import_module_with_input(['4 9'])
    assert out == '1 36\n'


def test_common_factor():
    out = _import_module_with_input(['12 18'])
    assert out == '6 36\n'


def test_zero_side():
    out = _import_module_with_input(['0 7'])
    assert out == '7 0\n'


def test_equal():
    out = _import_module_with_input(['6 6'])
    assert out == '6 6\n'
