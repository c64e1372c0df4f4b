import functools
import pathlib
import sys

import pytest

TESTS = pathlib.Path(__file__).resolve().parent
ROOT = TESTS.parent
CORPUS = ROOT / "corpus"
sys.path.insert(0, str(TESTS))

from mpcc.frontend import parse_source  # noqa: E402
from mpcc.lowering import LowerConfig, lower_program  # noqa: E402
from mpcc.optimizer import run_passes  # noqa: E402
from mpcc.sectypes import AdditiveShare, Generic  # noqa: E402
from mpcc.typecheck import check_program  # noqa: E402

CORPUS_NAMES = ["gcd", "auction", "mergesort", "matvec", "pow8", "adder",
                "sum8"]


def corpus_source(name: str) -> str:
    return (CORPUS / f"{name}.hml").read_text(encoding="utf-8")


@functools.lru_cache(maxsize=None)
def build(name: str, bitwidth: int = 64, scheme: str = "generic",
          optimize: bool = False, encoding: str = "auto",
          pow_rewrite: bool = True):
    """Compile one corpus program; cached because tests reuse circuits."""
    sch = AdditiveShare(3) if scheme == "additive" else Generic()
    tp = check_program(parse_source(corpus_source(name)), sch)
    cfg = LowerConfig(bitwidth=bitwidth, scheme=sch,
                      comparison_encoding=encoding, pow_rewrite=pow_rewrite)
    c = lower_program(tp, cfg)
    if optimize:
        c = run_passes(c)
    return c


@pytest.fixture(scope="session")
def corpus_programs():
    return {name: parse_source(corpus_source(name)) for name in CORPUS_NAMES}
