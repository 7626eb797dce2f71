"""Internal machinery for applying operators to sparse states.

Passive two-mode transformations (beam splitters, wave plates) conserve
total photon number on the target pair, so they act block-diagonally per
total-N sector.  The blocks are built once per (matrix, cutoffs) from the
multinomial expansion of transformed creation operators and cached.

Single-mode operators (displacement) are applied as dense matrices on the
target mode.  Both paths group the sparse state by the occupations of all
*other* modes, transform dense slices, and re-sparsify.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fock import _OCC_DTYPE, PRUNE_THRESHOLD, PureState


def _sqrt_factorial_ratio(j: int, k: int, m: int, n: int) -> float:
    """sqrt(j! k! / (m! n!)), exact integer arithmetic with lgamma fallback."""
    try:
        ratio = Fraction(
            math.factorial(j) * math.factorial(k),
            math.factorial(m) * math.factorial(n),
        )
        return math.sqrt(float(ratio))
    except OverflowError:
        log = 0.5 * (
            math.lgamma(j + 1) + math.lgamma(k + 1)
            - math.lgamma(m + 1) - math.lgamma(n + 1)
        )
        return math.exp(log)


@lru_cache(maxsize=64)
def _two_mode_blocks(matrix_bytes: bytes, c1: int, c2: int):
    """Per-total-N matrices of a passive two-mode transformation.

    The 2x2 matrix S acts on creation operators as
    a1+ -> S[0,0] a1+ + S[1,0] a2+ and a2+ -> S[0,1] a1+ + S[1,1] a2+,
    i.e. single-photon states transform with S itself.  Output occupations
    beyond a cutoff are dropped (the caller monitors the norm).

    Returns a list indexed by N of (occupations-of-mode-1 array, B) where
    B[row, col] = <j, N-j | U | m, N-m>.
    """
    S = np.frombuffer(matrix_bytes, dtype=complex).reshape(2, 2)
    blocks = []
    for N in range(c1 + c2 + 1):
        ms = np.array([m for m in range(min(N, c1) + 1) if N - m <= c2])
        B = np.zeros((ms.size, ms.size), dtype=complex)
        for col, m in enumerate(ms):
            n = N - m
            for row, j in enumerate(ms):
                k = N - j
                acc = 0j
                for p in range(max(0, j - n), min(m, j) + 1):
                    acc += (
                        math.comb(m, p)
                        * math.comb(n, j - p)
                        * S[0, 0] ** p
                        * S[1, 0] ** (m - p)
                        * S[0, 1] ** (j - p)
                        * S[1, 1] ** (n - j + p)
                    )
                B[row, col] = acc * _sqrt_factorial_ratio(j, k, m, n)
        blocks.append((ms, B))
    return blocks


def _group_by_rest(state: PureState, target_cols: list[int]):
    """Split state terms by the occupations of all non-target modes."""
    rest_cols = [i for i in range(state.layout.nmodes) if i not in target_cols]
    if rest_cols:
        rest_keys, rest_inv = np.unique(
            state._keys[:, rest_cols], axis=0, return_inverse=True
        )
        rest_inv = rest_inv.ravel()
    else:
        rest_keys = np.zeros((1, 0), dtype=_OCC_DTYPE)
        rest_inv = np.zeros(state.num_terms, dtype=np.int64)
    return rest_cols, rest_keys, rest_inv


def _reassemble(layout, rest_cols, target_cols, rest_keys, entries):
    """Build a PureState from (rest_index, target occupations..., amplitude) data."""
    rest_idx, occ_cols, vals = entries
    nrows = vals.shape[0]
    keys = np.empty((nrows, layout.nmodes), dtype=_OCC_DTYPE)
    if rest_cols:
        keys[:, rest_cols] = rest_keys[rest_idx]
    for col, occ in zip(target_cols, occ_cols):
        keys[:, col] = occ
    return PureState.from_arrays(layout, keys, vals, dedup=False)


def apply_two_mode(state: PureState, i1: int, i2: int, S: np.ndarray) -> PureState:
    """Apply a passive 2x2 mode transformation to modes (i1, i2)."""
    c1 = state.layout.modes[i1].cutoff
    c2 = state.layout.modes[i2].cutoff
    blocks = _two_mode_blocks(
        np.ascontiguousarray(S, dtype=complex).tobytes(), c1, c2
    )
    target_cols = [i1, i2]
    rest_cols, rest_keys, rest_inv = _group_by_rest(state, target_cols)
    R = rest_keys.shape[0]
    V = np.zeros((R, c1 + 1, c2 + 1), dtype=complex)
    np.add.at(V, (rest_inv, state._keys[:, i1], state._keys[:, i2]), state._vals)
    out = np.zeros_like(V)
    for N, (ms, B) in enumerate(blocks):
        if ms.size == 0:
            continue
        sub = V[:, ms, N - ms]
        if not np.any(sub):
            continue
        out[:, ms, N - ms] = sub @ B.T
    ridx, occ1, occ2 = np.nonzero(np.abs(out) >= PRUNE_THRESHOLD)
    return _reassemble(
        state.layout, rest_cols, target_cols, rest_keys,
        (ridx, (occ1, occ2), out[ridx, occ1, occ2]),
    )


def apply_single_mode(state: PureState, idx: int, matrix: np.ndarray) -> PureState:
    """Apply a dense (cutoff+1)^2 operator to one mode."""
    c = state.layout.modes[idx].cutoff
    if matrix.shape != (c + 1, c + 1):
        raise ValueError(f"operator shape {matrix.shape} != mode dimension {c + 1}")
    rest_cols, rest_keys, rest_inv = _group_by_rest(state, [idx])
    R = rest_keys.shape[0]
    V = np.zeros((R, c + 1), dtype=complex)
    np.add.at(V, (rest_inv, state._keys[:, idx]), state._vals)
    out = V @ matrix.T
    ridx, occ = np.nonzero(np.abs(out) >= PRUNE_THRESHOLD)
    return _reassemble(
        state.layout, rest_cols, [idx], rest_keys, (ridx, (occ,), out[ridx, occ])
    )


def apply_phases(state: PureState, phases: np.ndarray) -> PureState:
    """Multiply each stored amplitude by a per-term phase factor."""
    return PureState.from_arrays(
        state.layout, state._keys, state._vals * phases, dedup=False
    )


def permute_columns(state: PureState, permutation: list[int]) -> PureState:
    """Relabel occupation slots: new column i reads old column permutation[i]."""
    return PureState.from_arrays(
        state.layout, state._keys[:, permutation], state._vals, dedup=False
    )
