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
    assert out == '0\n'


def test_ten():
    out = _import_module_with_input(['10'])
    assert out == '4\n'


def test_two():
    out = _import_module_with_input(['2'])
    assert out == '1\n'


def test_thirty():
    out = _import_module_with_input(['30'])
    assert out == '10\n'


def test_one():
    out = _import_module_with_input(['1'])
    assert out == '0\n'
