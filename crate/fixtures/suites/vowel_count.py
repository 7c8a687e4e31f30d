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


def test_no_vowels():
    out = _import_module_with_input(['2', 'xyz', 'bcd'])
    assert out == '0\n'


def test_mixed():
    out = _import_module_with_input(['3', 'apple', 'Banana', 'sky'])
    assert out == '5\n'


def test_all_vowels():
    out = _import_module_with_input(['1', 'aeiou'])
    assert out == '5\n'
