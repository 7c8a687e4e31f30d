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
    assert out == 'no scores\n'


def test_mixed():
    out = _import_module_with_input(['4', '50 60 100 101'])
    assert out == '77 50 101 2\n'


def test_single():
    out = _import_module_with_input(['1', '75'])
    assert out == '75 75 75 1\n'


def test_none_pass():
    out = _import_module_with_input(['2', '10 20'])
    assert out == '15 10 20 0\n'
