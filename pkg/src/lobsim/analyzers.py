"""The three Bell-state analyzers and the feed-forward lookup table.

``run_b_p`` simulates the physical polarization analyzer: a 90-degree
plate on the second input, a polarizing beam splitter, one diagonal-basis
analysis plate per output arm, and four photon detectors.  With the plate
in place the separated-click patterns identify Psi+ and Psi- while both
Phi states bunch and fail; removing the plate swaps the roles of the
families.  The plate configuration is certified against the projective
oracle ``b_p_oracle``.

``run_b_alpha`` mixes two field modes on a 50:50 beam splitter and reads
both outputs with photon-number parity detectors; the (parity, parity)
pattern identifies all four entangled-coherent Bell states and fails only
on joint vacuum.

``hybrid_bsm`` chains both on a hybrid input/channel pair and attaches the
feed-forward exponents (j, k) of the Pauli correction X^j Z^k.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .elements import (
    JONES_ANTIDIAGONAL,
    JONES_DIAGONAL,
    JONES_SWAP,
    beam_splitter_5050,
    pbs_route,
    wave_plate,
)
from .encodings import BellIndex, make_polarization_bell
from .errors import InvariantViolationError, LayoutError
from .fock import PureState, partial_inner, rail_labels
from .measurement import (
    Detector,
    DetectorKind,
    PnpdClass,
    enumerate_outcomes,
)


class BPClass(Enum):
    """Click-pattern classes of the polarization analyzer (plate in place):
    separated (H,V)/(V,H) -> PSI_PLUS, separated (H,H)/(V,V) -> PSI_MINUS,
    anything bunched -> FAIL."""

    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"
    FAIL = "fail"


class BAlphaClass(Enum):
    PHI_PLUS = "phi_plus"
    PHI_MINUS = "phi_minus"
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"
    FAIL = "fail"


@dataclass(frozen=True)
class BPOutcome:
    """Classified polarization-analyzer outcome.

    ``clicks`` holds photon counts at the four detectors
    (upper H, upper V, lower H, lower V); ``pattern`` gives the
    (upper, lower) rail labels for separated clicks, or None on failure.
    """

    classification: BPClass
    clicks: tuple[int, int, int, int]

    @property
    def pattern(self) -> tuple[str, str] | None:
        hu, vu, hl, vl = self.clicks
        if hu + vu == 1 and hl + vl == 1:
            return ("H" if hu else "V", "H" if hl else "V")
        return None


@dataclass(frozen=True)
class BAlphaOutcome:
    """Classified parity-analyzer outcome with the raw (upper, lower) classes."""

    classification: BAlphaClass
    parities: tuple[PnpdClass, PnpdClass]


@dataclass(frozen=True)
class FeedForward:
    """Exponents of the Pauli correction X^j Z^k."""

    j: int
    k: int


@dataclass(frozen=True)
class BpBranch:
    outcome: BPOutcome
    probability: float
    post_state: PureState


@dataclass(frozen=True)
class BaBranch:
    outcome: BAlphaOutcome
    probability: float
    post_state: PureState


@dataclass(frozen=True)
class HybridBsmBranch:
    b_alpha: BAlphaOutcome
    b_p: BPOutcome
    feedforward: FeedForward | None  # None = both analyzers failed
    probability: float
    post_state: PureState


def classify_clicks(clicks: tuple[int, int, int, int]) -> BPClass:
    hu, vu, hl, vl = clicks
    if hu + vu == 1 and hl + vl == 1:
        upper = "H" if hu else "V"
        lower = "H" if hl else "V"
        return BPClass.PSI_PLUS if upper != lower else BPClass.PSI_MINUS
    return BPClass.FAIL


def identified_bell(outcome: BPOutcome, include_90_plate: bool = True) -> BellIndex | None:
    """Which Bell state a polarization-analyzer outcome identifies."""
    if outcome.classification is BPClass.FAIL:
        return None
    plus = outcome.classification is BPClass.PSI_PLUS
    if include_90_plate:
        return BellIndex.PSI_PLUS if plus else BellIndex.PSI_MINUS
    return BellIndex.PHI_PLUS if plus else BellIndex.PHI_MINUS


def run_b_p(
    state: PureState,
    pair_1: str,
    pair_2: str,
    *,
    include_90_plate: bool = True,
) -> list[BpBranch]:
    """Run the polarization Bell analyzer on two rail pairs.

    Enumerates every detector click pattern exactly; each branch carries
    the classified outcome, its probability, and the normalized post-state
    on the remaining modes.  Requires exactly two photons on the four
    rails (which also holds inside the hybrid protocol).
    """
    cols = [state.layout.index(l) for p in (pair_1, pair_2) for l in rail_labels(p)]
    totals = state._keys[:, cols].sum(axis=1)
    if state.num_terms and not np.all(totals == 2):
        raise LayoutError(
            "polarization analyzer expects exactly 2 photons on its two pairs"
        )
    out = state
    if include_90_plate:
        out = wave_plate(out, pair_2, JONES_SWAP)
    out = pbs_route(out, pair_1, pair_2)
    out = wave_plate(out, pair_1, JONES_DIAGONAL)
    out = wave_plate(out, pair_2, JONES_ANTIDIAGONAL)
    detectors = [
        Detector(lbl, DetectorKind.PNR)
        for p in (pair_1, pair_2)
        for lbl in rail_labels(p)
    ]
    branches = []
    for record in enumerate_outcomes(out, detectors):
        clicks = tuple(int(v) for v in record.values)
        branches.append(
            BpBranch(BPOutcome(classify_clicks(clicks), clicks),
                     record.probability, record.post_state)
        )
    return branches


def b_p_oracle(state: PureState, pair_1: str, pair_2: str) -> dict[BPClass, float]:
    """Projective reference for ``run_b_p``: Born probabilities of the
    Psi+ and Psi- projectors, with the Phi-spanned remainder as FAIL."""
    probs = {}
    for cls, index in (
        (BPClass.PSI_PLUS, BellIndex.PSI_PLUS),
        (BPClass.PSI_MINUS, BellIndex.PSI_MINUS),
    ):
        bra = make_polarization_bell(index, pairs=(pair_1, pair_2))
        probs[cls] = partial_inner(bra, state).norm() ** 2
    probs[BPClass.FAIL] = max(0.0, 1.0 - probs[BPClass.PSI_PLUS] - probs[BPClass.PSI_MINUS])
    return probs


_EQ5_TABLE = {
    (PnpdClass.EVEN, PnpdClass.ZERO): BAlphaClass.PHI_PLUS,
    (PnpdClass.ODD, PnpdClass.ZERO): BAlphaClass.PHI_MINUS,
    (PnpdClass.ZERO, PnpdClass.EVEN): BAlphaClass.PSI_PLUS,
    (PnpdClass.ZERO, PnpdClass.ODD): BAlphaClass.PSI_MINUS,
    (PnpdClass.ZERO, PnpdClass.ZERO): BAlphaClass.FAIL,
}


def classify_parities(parities: tuple[PnpdClass, PnpdClass]) -> BAlphaClass:
    # Patterns with photons at both ports cannot arise from Bell-basis
    # inputs; treat them as failures so the classifier is total.
    return _EQ5_TABLE.get(parities, BAlphaClass.FAIL)


def run_b_alpha(state: PureState, field_1: str, field_2: str) -> list[BaBranch]:
    """Run the coherent-state Bell analyzer on two field modes."""
    out = beam_splitter_5050(state, field_1, field_2)
    detectors = [
        Detector(field_1, DetectorKind.PNPD),
        Detector(field_2, DetectorKind.PNPD),
    ]
    branches = []
    for record in enumerate_outcomes(out, detectors):
        parities = (record.values[0], record.values[1])
        branches.append(
            BaBranch(BAlphaOutcome(classify_parities(parities), parities),
                     record.probability, record.post_state)
        )
    return branches


def table1_feedforward(
    b_alpha: BAlphaOutcome, b_p: BPOutcome
) -> FeedForward | None:
    """Feed-forward exponents (j, k) of X^j Z^k from the two outcomes.

    When the parity analyzer succeeds, its outcome assigns the base
    exponents and any separated polarization click flips k; when it fails,
    a separated click alone determines (j, k); if both fail, returns None.
    """
    base = {
        BAlphaClass.PHI_PLUS: (0, 0),
        BAlphaClass.PHI_MINUS: (0, 1),
        BAlphaClass.PSI_PLUS: (1, 0),
        BAlphaClass.PSI_MINUS: (1, 1),
    }
    separated = b_p.classification is not BPClass.FAIL
    if b_alpha.classification is not BAlphaClass.FAIL:
        j, k = base[b_alpha.classification]
        if separated:
            k ^= 1
        return FeedForward(j, k)
    if not separated:
        return None
    if b_p.classification is BPClass.PSI_PLUS:  # (H,V) or (V,H)
        return FeedForward(0, 1)
    return FeedForward(1, 1)  # (H,H) or (V,V)


def hybrid_bsm(
    state: PureState,
    input_modes: tuple[str, str],
    channel_a_modes: tuple[str, str],
    *,
    order: str = "balpha_first",
) -> list[HybridBsmBranch]:
    """Joint Bell measurement on a hybrid qubit pair.

    ``input_modes`` and ``channel_a_modes`` are (rail-pair base, field
    label) for the unknown qubit and the sender's half of the channel.
    The parity analyzer acts on the two field modes and the polarization
    analyzer on the two rail pairs; the two commute, and ``order`` only
    controls the evaluation sequence of the branch tree.
    """
    pair_in, field_in = input_modes
    pair_a, field_a = channel_a_modes
    branches: list[HybridBsmBranch] = []
    if order == "balpha_first":
        for ba in run_b_alpha(state, field_in, field_a):
            for bp in run_b_p(ba.post_state, pair_in, pair_a):
                branches.append(
                    HybridBsmBranch(
                        ba.outcome, bp.outcome,
                        table1_feedforward(ba.outcome, bp.outcome),
                        ba.probability * bp.probability, bp.post_state,
                    )
                )
    elif order == "bp_first":
        for bp in run_b_p(state, pair_in, pair_a):
            for ba in run_b_alpha(bp.post_state, field_in, field_a):
                branches.append(
                    HybridBsmBranch(
                        ba.outcome, bp.outcome,
                        table1_feedforward(ba.outcome, bp.outcome),
                        bp.probability * ba.probability, ba.post_state,
                    )
                )
    else:
        raise ValueError("order must be 'balpha_first' or 'bp_first'")
    total = sum(b.probability for b in branches)
    if abs(total - 1.0) > 1e-10:
        raise InvariantViolationError(
            f"hybrid BSM branch probabilities sum to {total:.12f}, expected 1"
        )
    return branches
