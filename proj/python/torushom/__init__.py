"""Weighted H-colorings of even discrete tori.

Exact results come back as :class:`fractions.Fraction`; colors are 0-based indices.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from . import _torushom
from ._torushom import Error, splitmix64

__all__ = [
    "Error",
    "conditional_target",
    "exact_occupation",
    "f_q",
    "maximal_pairs",
    "occupation_target",
    "partition_function",
    "run",
    "splitmix64",
]


def _fractions(values):
    return [Fraction(v) for v in values]


def maximal_pairs(h: str, weights: str | None = None):
    """Returns (eta, pairs, equipartition) where pairs are (A, B) tuples of color index lists."""
    eta, pairs, kind = _torushom.maximal_pairs(h, weights)
    return Fraction(eta), [(list(a), list(b)) for a, b in pairs], kind


def partition_function(h: str, m: int, d: int, weights: str | None = None, method: str = "auto") -> Fraction:
    return Fraction(_torushom.partition_function(h, m, d, weights, method))


def exact_occupation(h: str, m: int, d: int, x, pin=None, weights: str | None = None) -> list[Fraction]:
    """p(f(x) = k) for every color k, optionally given f(pin[0]) = pin[1]."""
    if pin is not None:
        pin = (list(pin[0]), int(pin[1]))
    return _fractions(_torushom.exact_occupation(h, m, d, list(x), pin, weights))


def occupation_target(h: str, weights: str | None = None) -> list[Fraction]:
    return _fractions(_torushom.occupation_target(h, weights))


def conditional_target(h: str, relation: str, l: int, weights: str | None = None) -> list[Fraction]:
    """relation is 'same' or 'cross'."""
    return _fractions(_torushom.conditional_target(h, relation, l, weights))


def f_q(q: int, d: int) -> Fraction:
    return Fraction(_torushom.f_q(q, d))


def run(command: str, check: bool = True, **settings: Any) -> dict:
    """Runs a CLI command (analyze, count, sample, influence, conjecture, identities, corpus).

    Keyword names match the CLI settings keys; lists are joined with commas.
    Raises Error on a nonzero exit code when check is true.
    """
    flat = {}
    for key, value in settings.items():
        if isinstance(value, bool):
            flat[key] = "true" if value else "false"
        elif isinstance(value, (list, tuple)):
            flat[key] = ",".join(str(v) for v in value)
        else:
            flat[key] = str(value)
    text, code = _torushom.run(command, flat)
    result = json.loads(text)
    if check and code != 0:
        raise Error("OracleMismatch", f"{command} exited with status {code}")
    return result
