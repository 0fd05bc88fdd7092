"""Timing matrix: both analyzers on generated contract/client pairs."""

from __future__ import annotations

import csv
import gc
import io
import math
import statistics
import time
from dataclasses import dataclass, replace
from typing import Iterable

from ..analysis.bfa import BfaAnalyzer
from ..analysis.dfa import DfaAnalyzer
from ..analysis.model import ProgramModel
from ..automata import DEFAULT_STATE_LIMIT
from ..errors import SpecInvalid, StateExplosionLimit
from ..frontend.parser import parse_program
from ..frontend.printer import format_class
from .clients import ClientSpec, GeneratedClient, gen_client
from .contracts import ContractSpec, ContractStats, contract_decl, contract_stats

CSV_HEADER = (
    "contract_id",
    "methods",
    "states_min",
    "annotations_bfa",
    "annotations_dfa",
    "loc",
    "base_classes",
    "analyzer",
    "run",
    "wall_ms",
    "warnings",
    "seed",
)


@dataclass(frozen=True)
class BenchCell:
    contract_id: str
    contract: ContractSpec
    client: ClientSpec
    runs: int = 5
    warmup: int = 1
    state_limit: int = DEFAULT_STATE_LIMIT
    client_ref: str | None = None  # reuse the client code generated for this cell id


_CONTRACT_KEYS = {"methods": "methods", "toggles": "toggle_pairs", "chain": "chain_length", "cseed": "seed"}
_CLIENT_KEYS = {
    "loc": "loc_target",
    "bases": "num_base_classes",
    "depth": "composition_depth",
    "branch": "branch_density",
    "loop": "loop_density",
    "seed": "seed",
}


def parse_matrix(text: str) -> list[BenchCell]:
    """One cell per non-comment line of whitespace-separated ``key=value`` pairs.

    Keys: ``id methods toggles chain cseed`` (contract), ``loc bases depth
    branch loop seed`` (client) and ``runs warmup limit``. ``client=<id>``
    reuses the client code of an earlier cell against this cell's
    contracts, which works when the contract classes share method names.
    """
    cells = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kv = {}
        for item in line.split():
            if "=" not in item:
                raise SpecInvalid(f"matrix line {lineno}: expected key=value, got {item!r}")
            k, v = item.split("=", 1)
            kv[k] = v
        unknown = set(kv) - set(_CONTRACT_KEYS) - set(_CLIENT_KEYS) - {"id", "runs", "warmup", "limit", "client"}
        if unknown:
            raise SpecInvalid(f"matrix line {lineno}: unknown keys {sorted(unknown)}")
        try:
            c_args = {_CONTRACT_KEYS[k]: int(v) for k, v in kv.items() if k in _CONTRACT_KEYS}
            cl_args = {
                _CLIENT_KEYS[k]: (float(v) if k in ("branch", "loop") else int(v))
                for k, v in kv.items()
                if k in _CLIENT_KEYS
            }
            contract = ContractSpec(**{"methods": 4, **c_args})
            ref = kv.get("client")
            if ref is not None:
                earlier = [c for c in cells if c.contract_id == ref]
                if not earlier:
                    raise SpecInvalid(f"matrix line {lineno}: no earlier cell {ref!r}")
                client = earlier[0].client
            else:
                client = ClientSpec(**{"loc_target": 750, **cl_args})
            cell = BenchCell(
                kv.get("id", f"cell{len(cells)}"),
                contract,
                client,
                int(kv.get("runs", 5)),
                int(kv.get("warmup", 1)),
                int(kv.get("limit", DEFAULT_STATE_LIMIT)),
                kv.get("client"),
            )
        except ValueError as exc:
            raise SpecInvalid(f"matrix line {lineno}: {exc}") from None
        contract.validate()
        client.validate()
        cells.append(cell)
    return cells


def _time(fn) -> tuple[float, object]:
    # collector pauses land in random runs otherwise, as with timeit
    gc.collect()
    gc.disable()
    try:
        t0 = time.perf_counter()
        out = fn()
        return (time.perf_counter() - t0) * 1000.0, out
    finally:
        gc.enable()


def prepare_cell(cell: BenchCell, reuse: GeneratedClient | None = None):
    """Generate the cell's contracts and client and parse them.

    Contract classes are named ``Base0``, ``Base1``, ... so that client code
    can be shared between cells.
    """
    decls = [
        contract_decl(replace(cell.contract, seed=cell.contract.seed + j, name=f"Base{j}"))
        for j in range(cell.client.num_base_classes)
    ]
    stats = contract_stats(decls[0], check=True)
    if reuse is None:
        client = gen_client(cell.client, decls)
    else:
        text = "".join(format_class(d) + "\n" for d in decls) + reuse.client_text
        client = replace(reuse, text=text, bug_site=None)
    program = parse_program(client.text, f"{cell.contract_id}.tsl")
    return stats, client, program


def run_cell(cell: BenchCell, reuse: GeneratedClient | None = None, prepared=None) -> list[dict]:
    stats, client, program = prepared or prepare_cell(cell, reuse)
    model = ProgramModel(program)
    common = {
        "contract_id": cell.contract_id,
        "methods": stats.methods,
        "states_min": stats.states_min,
        "annotations_bfa": stats.annotations_bfa,
        "annotations_dfa": stats.annotations_dfa,
        "loc": client.loc,
        "base_classes": cell.client.num_base_classes,
        "seed": cell.client.seed,
    }
    rows = []
    runners = {
        "bfa": lambda: BfaAnalyzer(model).run(),
        "dfa": lambda: DfaAnalyzer(model, cell.state_limit).run(),
    }
    for name, fn in runners.items():
        try:
            for _ in range(cell.warmup):
                fn()
            for r in range(cell.runs):
                ms, warnings = _time(fn)
                rows.append({**common, "analyzer": name, "run": r, "wall_ms": f"{ms:.3f}", "warnings": len(warnings)})
        except StateExplosionLimit:
            rows.append({**common, "analyzer": name, "run": 0, "wall_ms": "", "warnings": "state-limit"})
    return rows


def run_bench(cells: Iterable[BenchCell]) -> list[dict]:
    rows = []
    clients: dict[str, GeneratedClient] = {}
    for cell in cells:
        reuse = None
        if cell.client_ref is not None:
            if cell.client_ref not in clients:
                raise SpecInvalid(f"cell {cell.contract_id}: no earlier cell {cell.client_ref!r}")
            reuse = clients[cell.client_ref]
        prepared = prepare_cell(cell, reuse)
        clients[cell.contract_id] = prepared[1]
        rows += run_cell(cell, prepared=prepared)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def medians(rows: list[dict]) -> dict[tuple[str, str], float]:
    """Median wall time per (contract_id, analyzer); cells that hit the state limit are skipped."""
    groups: dict[tuple[str, str], list[float]] = {}
    for r in rows:
        if r["wall_ms"] == "":
            continue
        groups.setdefault((r["contract_id"], r["analyzer"]), []).append(float(r["wall_ms"]))
    return {k: statistics.median(v) for k, v in groups.items()}


def geometric_mean_speedup(rows: list[dict]) -> float:
    med = medians(rows)
    ratios = [med[(cid, "dfa")] / med[(cid, "bfa")] for cid, a in med if a == "bfa" and (cid, "dfa") in med]
    if not ratios:
        return float("nan")
    return math.exp(sum(map(math.log, ratios)) / len(ratios))


def summarize(rows: list[dict]) -> str:
    med = medians(rows)
    states = {r["contract_id"]: r["states_min"] for r in rows}
    out = ["contract_id\tstates_min\tbfa_ms\tdfa_ms\tspeedup"]
    for cid in dict.fromkeys(r["contract_id"] for r in rows):
        b = med.get((cid, "bfa"))
        d = med.get((cid, "dfa"))
        ratio = f"{d / b:.2f}" if b and d else "-"
        fmt = lambda x: f"{x:.2f}" if x is not None else "-"  # noqa: E731
        out.append(f"{cid}\t{states[cid]}\t{fmt(b)}\t{fmt(d)}\t{ratio}")
    out.append(f"geometric-mean speedup: {geometric_mean_speedup(rows):.2f}")
    return "\n".join(out)


def usability_rows(specs: Iterable[ContractSpec]) -> list[ContractStats]:
    return [contract_stats(contract_decl(s), check=True) for s in specs]


def format_usability(stats: list[ContractStats]) -> str:
    out = ["contract\tmethods\tstates\ttransitions\tBFA_terms\tDFA_terms"]
    for s in stats:
        out.append(
            f"{s.name}\t{s.methods}\t{s.states_min}\t{s.transitions_min}\t{s.annotations_bfa}\t{s.annotations_dfa}"
        )
    return "\n".join(out)
