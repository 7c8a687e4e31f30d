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
    out = _import_module_with_input(['3', '()', '([]{})', '(]'])
    assert out == 'YES\nYES\nNO\n'


def test_unclosed():
    out = _import_module_with_input(['2', '((', 'a(b)c'])
    assert out == 'NO\nYES\n'


def test_stray_close():
    out = _import_module_with_input(['1', ')('])
    assert out == 'NO\n'


def test_letters():
    out = _import_module_with_input(['1', 'a'])
    assert out == 'YES\n'
