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
    assert out == ''


def test_several():
    out = _import_module_with_input(['3', '123 45 9'])
    assert out == '6\n9\n9\n'


def test_negative():
    out = _import_module_with_input(['1', '-77'])
    assert out == '14\n'


def test_zero():
    out = _import_module_with_input(['1', '0'])
    assert out == '0\n'
