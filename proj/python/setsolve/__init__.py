"""Finite-set constraint solving and machine verification."""

from ._core import (
    SolveError,
    animate,
    evaluate,
    generate_pos,
    negate,
    parse_formula,
    prove,
    solve,
    typecheck,
    verify,
)

__all__ = [
    "SolveError",
    "animate",
    "evaluate",
    "generate_pos",
    "negate",
    "parse_formula",
    "prove",
    "solve",
    "typecheck",
    "verify",
]
