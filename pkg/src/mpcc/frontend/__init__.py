from .lexer import Token, tokenize
from .parser import parse, parse_source
from .printer import pretty_print
from . import syntax

__all__ = ["Token", "tokenize", "parse", "parse_source", "pretty_print", "syntax"]
