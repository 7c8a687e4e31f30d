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


def test_fifteen():
    out = _import_module_with_input(['15'])
    assert out == '1\n2\nFizz\n4\nBuzz\nFizz\n7\n8\nFizz\nBuzz\n11\nFizz\n13\n14\nFizzBuzz\n'


def test_five():
    out = _import_module_with_input(['5'])
    assert out == '1\n2\nFizz\n4\nBuzz\n'


def test_one():
    out = _import_module_with_input(['1'])
    assert out == '1\n'
