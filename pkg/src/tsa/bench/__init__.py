from .clients import ClientSpec, GeneratedClient, gen_client, random_program
from .contracts import ContractSpec, ContractStats, contract_decl, contract_stats, gen_contract, random_contract_decl
from .harness import (
    CSV_HEADER,
    BenchCell,
    format_usability,
    geometric_mean_speedup,
    medians,
    parse_matrix,
    rows_to_csv,
    run_bench,
    run_cell,
    summarize,
    usability_rows,
)

__all__ = [
    "CSV_HEADER",
    "BenchCell",
    "ClientSpec",
    "ContractSpec",
    "ContractStats",
    "GeneratedClient",
    "contract_decl",
    "contract_stats",
    "format_usability",
    "gen_client",
    "gen_contract",
    "geometric_mean_speedup",
    "medians",
    "parse_matrix",
    "random_contract_decl",
    "random_program",
    "rows_to_csv",
    "run_bench",
    "run_cell",
    "summarize",
    "usability_rows",
]
