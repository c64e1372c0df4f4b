import pytest

from mpcc.errors import LexError
from mpcc.frontend import tokenize


def kinds(source):
    return [t.kind for t in tokenize(source)]


def test_val_declaration_tokens():
    assert kinds("val x : int@{1} := 5;") == [
        "VAL", "IDENT", "COLON", "INT", "AT", "LBRACE", "NUM", "RBRACE",
        "ASSIGN", "NUM", "SEMI"]


def test_empty_input():
    assert tokenize("") == []


def test_while_skip_tokens():
    toks = tokenize("while (i < 4) { skip; }")
    # while ( i < 4 ) { skip ; }
    assert [t.kind for t in toks] == [
        "WHILE", "LPAREN", "IDENT", "LT", "NUM", "RPAREN", "LBRACE", "SKIP",
        "SEMI", "RBRACE"]
    assert [t.kind for t in toks][-2:] == ["SEMI", "RBRACE"]


def test_comments_discarded():
    assert kinds("// nothing here\nskip; // trailing\n") == ["SKIP", "SEMI"]


def test_positions_monotonic():
    toks = tokenize("val x : int := 1;\nval y : int := 2;\n")
    positions = [(t.line, t.col) for t in toks]
    assert positions == sorted(positions)
    assert len(set(positions)) == len(positions)


def test_two_char_operators():
    assert kinds("a := b <= c >= d == e != f && g || h") == [
        "IDENT", "ASSIGN", "IDENT", "LE", "IDENT", "GE", "IDENT", "EQ",
        "IDENT", "NE", "IDENT", "ANDAND", "IDENT", "OROR", "IDENT"]


def test_single_equals_is_equality():
    assert kinds("a = b") == ["IDENT", "EQ", "IDENT"]


def test_illegal_character():
    with pytest.raises(LexError) as exc:
        tokenize("val x := 5 # bad")
    assert exc.value.pos == (1, 12)


def test_number_values():
    toks = tokenize("399 0 7")
    assert [t.value for t in toks] == [399, 0, 7]
