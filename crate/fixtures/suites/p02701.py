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


def test_single():
    out = _import_module_with_input(['1', 'a'])
    assert out == '1\n'


def test_duplicates():
    out = _import_module_with_input(['3', 'ab', 'ab', 'ab'])
    assert out == '1\n'


def test_all_lengths_unique():
    out = _import_module_with_input(['10', 'a', 'bb', 'ccc', 'dddd', 'eeeee', 'ffffff', 'ggggggg', 'hhhhhhhh', 'iiiiiiiii', 'jjjjjjjjjj'])
    assert out == '10\n'


def test_mixed_lengths():
    out = _import_module_with_input(['5', 'a', 'b', 'a', 'cc', 'cc'])
    assert out == '3\n'


def test_same_length_distinct():
    out = _import_module_with_input(['4', 'abc', 'abd', 'abe', 'abc'])
    assert out == '3\n'


def test_long_strings():
    out = _import_module_with_input(['3', 'abcdefghij', 'abcdefghij', 'abcdefghi'])
    assert out == '2\n'


def test_zero():
    out = _import_module_with_input(['0'])
    assert out == '0\n'
