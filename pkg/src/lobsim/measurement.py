"""Detector models, exact outcome enumeration, and seeded sampling.

Three detector kinds are modeled, all ideal:

* ``PNR``    -- photon-number resolving: one outcome per count.
* ``ON_OFF`` -- click / no-click (count coarse-grained to n > 0).
* ``PNPD``   -- photon-number parity detector with three classes:
                vacuum, even-and-nonzero, odd.  Vacuum is deliberately its
                own class: a parity analyzer that sees no photons reports
                "no click", not "even".

Coarse-grained detectors (ON_OFF, PNPD) aggregate number-resolved branches
whose post-states share a single ray; aggregation onto a genuinely mixed
post-state raises :class:`MixedBranchError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from .errors import LayoutError
from .fock import (
    BRANCH_PROB_FLOOR,
    ModeLayout,
    PureState,
    _common_direction,
)


class DetectorKind(Enum):
    ON_OFF = "on_off"
    PNR = "pnr"
    PNPD = "pnpd"


class PnpdClass(IntEnum):
    """Parity-detector outcome classes; EVEN means even *and* nonzero."""

    ZERO = 0
    EVEN = 1
    ODD = 2


@dataclass(frozen=True)
class Detector:
    mode: str
    kind: DetectorKind


@dataclass(frozen=True)
class OutcomeRecord:
    """One measurement branch: per-detector values, its exact probability,
    and the normalized post-state on the undetected modes."""

    values: tuple
    probability: float
    post_state: PureState


class OutcomeDistribution:
    """Exhaustive list of measurement branches with exact probabilities."""

    def __init__(self, records: list[OutcomeRecord]):
        self.records = records

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([r.probability for r in self.records])

    def total_probability(self) -> float:
        return float(self.probabilities.sum())

    def probability_of(self, values: tuple) -> float:
        for r in self.records:
            if r.values == values:
                return r.probability
        return 0.0

    def sample(self, seed: int) -> OutcomeRecord:
        """Draw one branch; identical seeds give identical branches."""
        rng = np.random.default_rng(seed)
        p = self.probabilities
        idx = int(rng.choice(len(self.records), p=p / p.sum()))
        return self.records[idx]


def _classify_counts(counts: np.ndarray, kind: DetectorKind) -> np.ndarray:
    if kind is DetectorKind.PNR:
        return counts.astype(np.int64)
    if kind is DetectorKind.ON_OFF:
        return (counts > 0).astype(np.int64)
    # PNPD: 0 -> ZERO, even>0 -> EVEN, odd -> ODD
    codes = np.where(counts % 2 == 1, int(PnpdClass.ODD),
                     np.where(counts > 0, int(PnpdClass.EVEN), int(PnpdClass.ZERO)))
    return codes.astype(np.int64)


def _decode(code: int, kind: DetectorKind):
    if kind is DetectorKind.PNR:
        return int(code)
    if kind is DetectorKind.ON_OFF:
        return bool(code)
    return PnpdClass(code)


def enumerate_outcomes(
    state: PureState, detectors: list[Detector]
) -> OutcomeDistribution:
    """Exhaustive, exact (at the working cutoff) measurement branch list.

    Branch probabilities sum to the squared norm of ``state``; zero-weight
    outcome classes are omitted.  Post-states live on the undetected modes
    in their original order.
    """
    if not detectors:
        raise LayoutError("need at least one detector")
    labels = [d.mode for d in detectors]
    if len(set(labels)) != len(labels):
        raise LayoutError(f"overlapping detector assignments: {labels}")
    cols = [state.layout.index(l) for l in labels]
    rest_cols = [i for i in range(state.layout.nmodes) if i not in cols]
    rest_layout = ModeLayout([state.layout.modes[i] for i in rest_cols])

    counts = state._keys[:, cols]
    codes = np.stack(
        [_classify_counts(counts[:, j], d.kind) for j, d in enumerate(detectors)],
        axis=1,
    )
    class_rows, class_inv = np.unique(codes, axis=0, return_inverse=True)
    class_inv = class_inv.ravel()

    records = []
    for g, class_row in enumerate(class_rows):
        rows = class_inv == g
        vals = state._vals[rows]
        if float(np.vdot(vals, vals).real) < BRANCH_PROB_FLOOR:
            continue  # truncation-leakage noise, not a physical branch
        det_occ = counts[rows]
        rest_keys = state._keys[rows][:, rest_cols]
        occ_u, occ_inv = np.unique(det_occ, axis=0, return_inverse=True)
        occ_inv = occ_inv.ravel()
        if occ_u.shape[0] == 1:
            sub = PureState.from_arrays(rest_layout, rest_keys, vals, prune=0.0)
            prob = sub.norm() ** 2
            post = sub.normalized()
        else:
            groups = [
                (rest_keys[occ_inv == k], vals[occ_inv == k])
                for k in range(occ_u.shape[0])
            ]
            post, prob = _common_direction(groups, rest_layout)
        values = tuple(
            _decode(int(c), d.kind) for c, d in zip(class_row, detectors)
        )
        records.append(OutcomeRecord(values, float(prob), post))
    return OutcomeDistribution(records)


def sample_outcome(
    state: PureState, detectors: list[Detector], seed: int
) -> OutcomeRecord:
    """Draw one branch from the exact outcome distribution, reproducibly."""
    return enumerate_outcomes(state, detectors).sample(seed)


_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(seed: int, index: int) -> int:
    """Per-trial seed: splitmix64 finalizer of seed XOR golden-scaled index.

    Deterministic and collision-resistant, so independent trials can be
    generated (and parallelized) from one experiment seed.
    """
    z = (seed ^ ((index + 1) * _GOLDEN)) & _MASK64
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64
