"""Approximate Noether symmetries of perturbed oscillator Lagrangians."""
from .expr import (Expr, diff_partial, eval_numeric, print_canonical, simplify,
                   substitute, total_derivative)
from .parser import parse

__all__ = [
    "Expr", "parse", "print_canonical", "simplify", "diff_partial",
    "total_derivative", "substitute", "eval_numeric",
]
