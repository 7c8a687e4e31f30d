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


def test_simple():
    out = _import_module_with_input(['1', 'abc'])
    assert out == 'bcd\n'


def test_wraps():
    out = _import_module_with_input(['2', 'xyz', 'z'])
    assert out == 'yza\na\n'


def test_non_letters():
    out = _import_module_with_input(['1', 'a-b!'])
    assert out == 'b-c!\n'
