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
    assert out == '-1\n'


def test_distinct():
    out = _import_module_with_input(['4', '3 9 1 7'])
    assert out == '7\n'


def test_duplicates():
    out = _import_module_with_input(['4', '5 5 5 2'])
    assert out == '2\n'


def test_single_value():
    out = _import_module_with_input(['3', '4 4 4'])
    assert out == '-1\n'
