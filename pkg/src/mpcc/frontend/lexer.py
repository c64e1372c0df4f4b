"""Tokenizer for `.hml` source files."""

from dataclasses import dataclass

from ..errors import LexError

KEYWORDS = {
    "val": "VAL", "skip": "SKIP", "while": "WHILE", "if": "IF", "else": "ELSE",
    "output": "OUTPUT", "input": "INPUT", "from": "FROM", "fun": "FUN",
    "bound": "BOUND", "eval": "EVAL", "reduce": "REDUCE", "pow": "POW",
    "arr": "ARR", "int": "INT", "bool": "BOOL", "true": "TRUE", "false": "FALSE",
    "parties": "PARTIES", "max": "MAX", "min": "MIN",
}

# longest match first
SYMBOLS = [
    (":=", "ASSIGN"), ("==", "EQ"), ("!=", "NE"), ("<=", "LE"), (">=", "GE"),
    ("&&", "ANDAND"), ("||", "OROR"),
    ("{", "LBRACE"), ("}", "RBRACE"), ("(", "LPAREN"), (")", "RPAREN"),
    (":", "COLON"), (";", "SEMI"), (",", "COMMA"), ("@", "AT"), (".", "DOT"),
    ("+", "PLUS"), ("-", "MINUS"), ("*", "STAR"), ("/", "SLASH"), ("%", "PERCENT"),
    ("<", "LT"), (">", "GT"), ("=", "EQ"),
]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def pos(self):
        return (self.line, self.col)

    @property
    def value(self) -> int:
        return int(self.text)


def tokenize(source: str) -> list[Token]:
    """Scan source text into tokens; `// ...` comments are discarded."""
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            toks.append(Token("NUM", source[start:i], line, col))
            col += i - start
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            toks.append(Token(KEYWORDS.get(text, "IDENT"), text, line, col))
            col += i - start
            continue
        for sym, kind in SYMBOLS:
            if source.startswith(sym, i):
                toks.append(Token(kind, sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise LexError(f"illegal character {c!r}", (line, col))
    return toks
