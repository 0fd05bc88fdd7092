"""Shared builders and independent reference implementations for the tests."""

from __future__ import annotations

import random
from pathlib import Path

from hypothesis import strategies as st

from tsa.contracts import BfaTriple, ContractMap
from tsa.frontend import parse_program

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def contract_of(source: str, name: str | None = None):
    from tsa.contracts import build_contract

    program = parse_program(source)
    bases = [c for c in program.classes if c.is_base and (name is None or c.name == name)]
    return build_contract(bases[0])


def raw_contract(width: int, rows, ctor_enable: int, name: str = "R") -> ContractMap:
    """Contract straight from ``(enable, disable)`` masks for methods ``1..width-1``."""
    full = (1 << width) - 1
    entries = [BfaTriple(ctor_enable, (full & ~ctor_enable) | 1, 1, width)]
    for i, (e, d) in enumerate(rows, start=1):
        entries.append(BfaTriple(e, d, 1 << i, width))
    alphabet = ("<init>",) + tuple(f"m{i}" for i in range(1, width))
    return ContractMap(name, alphabet, tuple(entries))


def random_raw_contract(rng: random.Random, width: int) -> ContractMap:
    methods = (1 << width) - 2
    rows = []
    for _ in range(1, width):
        e = rng.getrandbits(width) & methods
        d = rng.getrandbits(width) & methods & ~e
        if rng.random() < 0.3:
            d = 0
        rows.append((e, d))
    ctor = rng.getrandbits(width) & methods
    return raw_contract(width, rows, ctor)


@st.composite
def contracts(draw, min_width: int = 2, max_width: int = 8):
    width = draw(st.integers(min_width, max_width))
    methods = (1 << width) - 2
    rows = []
    for _ in range(1, width):
        e = draw(st.integers(0, methods)) & methods
        d = draw(st.integers(0, methods)) & methods & ~e
        rows.append((e, d))
    ctor = draw(st.integers(0, methods)) & methods
    return raw_contract(width, rows, ctor)


def triples(width: int):
    full = (1 << width) - 1
    return st.builds(
        lambda e, d, p: BfaTriple(e & ~d, d, p, width),
        st.integers(0, full),
        st.integers(0, full),
        st.integers(0, full),
    )


def annotation_valid_positions(contract: ContractMap, seq) -> list[int]:
    """Positions ``k`` (1-based, constructor at 0) where ``seq[k-1]`` is invalid.

    Direct reading of the substring rule: ``x_k`` is invalid when some earlier
    ``x_i`` disables it and no call strictly between re-enables it.
    """
    xs = [0] + [contract.index(m) for m in seq]
    bad = []
    for k in range(1, len(xs)):
        target = 1 << xs[k]
        for i in range(k):
            if contract.entries[xs[i]].disable & target and not any(
                contract.entries[xs[j]].enable & target for j in range(i + 1, k)
            ):
                bad.append(k)
                break
    return bad


CRITERIA: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    CRITERIA.append(line)
    print(line)
    assert ok, line
