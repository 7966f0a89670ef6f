"""Closed-form steady-state results for the three-site open chain.

All functions accept floats or ``fractions.Fraction``; with fractions the
results are exact.
"""
from __future__ import annotations

import numpy as np

from .errors import FOutOfRange, UnknownLabel, UnknownPair

LABELS = ("eee", "eeg", "ege", "egg", "gee", "geg", "gge", "ggg")
PAIRS = ((1, 2), (2, 3), (1, 3))


def _clean_label(label: str) -> str:
    key = str(label).strip().strip("|>⟩").lower()
    if key not in LABELS:
        raise UnknownLabel(f"unknown three-qubit basis label {label!r}")
    return key


def f_closed_form(label: str, gamma):
    """Steady-state parameter f reached from a computational basis state."""
    key = _clean_label(label)
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    g = gamma
    den = 27 * (8 + 3 * g - 3 * g * g)
    if key == "eee":
        return (24 - 19 * g + 19 * g * g) / (216 + 81 * g - 81 * g * g)
    if key == "eeg":
        return 4 * (4 - 5 * g + g * g) / den
    if key == "ege":
        return 4 * (4 + 5 * g - 5 * g * g) / den
    if key == "gee":
        return 4 * g * (3 + g) / den
    if key == "ggg":
        return 0 * g
    return 1 / (9 + 0 * g)


def _check_f(f) -> None:
    if not 0 <= f <= 1 / 3 + 1e-15:
        raise FOutOfRange(f"f must lie in [0, 1/3], got {f}")


def steady_state_matrix(f) -> np.ndarray:
    """8x8 steady state with weight 3f on the W-like dark state and 1 - 3f on |ggg>."""
    _check_f(f)
    f = float(f)
    rho = np.zeros((8, 8), dtype=complex)
    idx = [3, 5, 6]  # |egg>, |geg>, |gge>
    signs = np.array([1.0, -1.0, 1.0])
    rho[np.ix_(idx, idx)] = f * np.outer(signs, signs)
    rho[7, 7] = 1.0 - 3.0 * f
    return rho


def reduced_pair_matrix(f, pair) -> np.ndarray:
    _check_f(f)
    pair = tuple(pair)
    if pair not in PAIRS:
        raise UnknownPair(f"pair must be one of {PAIRS}, got {pair}")
    f = float(f)
    sign = 1.0 if pair == (1, 3) else -1.0
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = rho[2, 2] = f
    rho[1, 2] = rho[2, 1] = sign * f
    rho[3, 3] = 1.0 - 2.0 * f
    return rho


def steady_concurrence(f):
    _check_f(f)
    return 2 * f
