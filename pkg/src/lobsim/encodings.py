"""Builders for encoded qubits, Bell states, cat states, and the hybrid channel.

Encodings:

* polarization -- one photon on an (H, V) rail pair, basis {|H>, |V>}.
* coherent     -- one field mode, non-orthogonal basis {|alpha>, |-alpha>}.
* hybrid       -- rail pair (x) field mode, orthonormal basis
                  {|0_L> = |+>|alpha>, |1_L> = |->|-alpha>} with
                  |+-> = (|H> +- |V>)/sqrt(2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

from .errors import DegenerateBasisWarning, DegenerateStateError
from .fock import (
    CutoffPolicy,
    ModeLayout,
    PureState,
    coherent_state,
    fock_state,
    pol_pair,
    superpose,
    tensor,
)


class Encoding(str, Enum):
    POLARIZATION = "polarization"
    COHERENT = "coherent"
    HYBRID = "hybrid"


class BellIndex(Enum):
    """The four Bell states: family Phi/Psi and sign +/-."""

    PHI_PLUS = ("phi", +1)
    PHI_MINUS = ("phi", -1)
    PSI_PLUS = ("psi", +1)
    PSI_MINUS = ("psi", -1)

    @property
    def family(self) -> str:
        return self.value[0]

    @property
    def sign(self) -> int:
        return self.value[1]


@dataclass(frozen=True)
class LogicalAmplitudes:
    """Logical qubit coefficients (a, b) with |a|^2 + |b|^2 = 1.

    For the coherent encoding these are the coefficients *before* the
    Fock-space renormalization that the non-orthogonal basis requires.
    """

    a: complex
    b: complex

    def __post_init__(self):
        total = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"|a|^2 + |b|^2 = {total:.12f}, expected 1")

    @classmethod
    def normalized(cls, a: complex, b: complex) -> "LogicalAmplitudes":
        scale = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if scale < 1e-300:
            raise DegenerateStateError("(a, b) = (0, 0) is not a qubit")
        return cls(complex(a) / scale, complex(b) / scale)


@dataclass(frozen=True)
class EncodingParams:
    """Encoding choice, coherent amplitude (real, >= 0), and cutoff policy."""

    encoding: Encoding
    alpha: float = 1.0
    policy: CutoffPolicy = field(default_factory=CutoffPolicy)

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0 (phase conventions assume real alpha)")
        if self.alpha == 0 and self.encoding is not Encoding.POLARIZATION:
            warnings.warn(
                "alpha = 0 collapses the coherent basis to the vacuum",
                DegenerateBasisWarning,
                stacklevel=2,
            )

    def field_cutoff(self) -> int:
        return self.policy.cutoff_for_qubit(self.alpha)


# ---------------------------------------------------------------------------
# single-pair / single-mode building blocks
# ---------------------------------------------------------------------------


def polarization_state(pair: str, amp_h: complex, amp_v: complex) -> PureState:
    """One photon on a rail pair: amp_h |H> + amp_v |V> (not renormalized)."""
    layout = ModeLayout(pol_pair(pair))
    return superpose(
        [(amp_h, fock_state(layout, (1, 0))), (amp_v, fock_state(layout, (0, 1)))]
    )


def plus_state(pair: str) -> PureState:
    return polarization_state(pair, 1 / math.sqrt(2), 1 / math.sqrt(2))


def minus_state(pair: str) -> PureState:
    return polarization_state(pair, 1 / math.sqrt(2), -1 / math.sqrt(2))


def hybrid_basis_state(
    logical: int, params: EncodingParams, pair: str, field_label: str
) -> PureState:
    """|0_L> = |+>|alpha> or |1_L> = |->|-alpha> on (pair, field_label)."""
    cutoff = params.field_cutoff()
    if logical == 0:
        return tensor(
            plus_state(pair),
            coherent_state(params.alpha, params.policy, label=field_label, cutoff=cutoff),
        )
    if logical == 1:
        return tensor(
            minus_state(pair),
            coherent_state(-params.alpha, params.policy, label=field_label, cutoff=cutoff),
        )
    raise ValueError("logical index must be 0 or 1")


# ---------------------------------------------------------------------------
# Bell states
# ---------------------------------------------------------------------------


def make_polarization_bell(
    index: BellIndex, pairs: tuple[str, str] = ("q1", "q2")
) -> PureState:
    """Two-photon polarization Bell state on two rail pairs.

    Phi+- = (|H>|H> +- |V>|V>)/sqrt(2), Psi+- = (|H>|V> +- |V>|H>)/sqrt(2).
    """
    p1, p2 = pairs
    layout = ModeLayout(pol_pair(p1) + pol_pair(p2))
    if index.family == "phi":
        first, second = (1, 0, 1, 0), (0, 1, 0, 1)  # HH, VV
    else:
        first, second = (1, 0, 0, 1), (0, 1, 1, 0)  # HV, VH
    coeff = 1 / math.sqrt(2)
    return superpose(
        [
            (coeff, fock_state(layout, first)),
            (coeff * index.sign, fock_state(layout, second)),
        ]
    )


def coherent_bell_normalization(sign: int, alpha: float) -> float:
    """N_+- = (2 +- 2 exp(-4 alpha^2))^(-1/2)."""
    return (2.0 + 2.0 * sign * math.exp(-4.0 * alpha * alpha)) ** -0.5


def make_coherent_bell(
    index: BellIndex,
    params: EncodingParams,
    labels: tuple[str, str] = ("f1", "f2"),
) -> PureState:
    """Entangled-coherent-state Bell state on two field modes.

    Phi+- = N_+-(|a>|a> +- |-a>|-a>), Psi+- = N_+-(|a>|-a> +- |-a>|a>),
    with the analytic normalization N_+-; the truncated norm is 1 up to
    the cutoff policy's tail epsilon.
    """
    if params.alpha == 0:
        raise DegenerateStateError("alpha = 0 degenerates the coherent Bell basis")
    a = params.alpha
    cutoff = params.field_cutoff()

    def coh(sign_: int, label: str) -> PureState:
        return coherent_state(sign_ * a, params.policy, label=label, cutoff=cutoff)

    l1, l2 = labels
    if index.family == "phi":
        first = tensor(coh(+1, l1), coh(+1, l2))
        second = tensor(coh(-1, l1), coh(-1, l2))
    else:
        first = tensor(coh(+1, l1), coh(-1, l2))
        second = tensor(coh(-1, l1), coh(+1, l2))
    norm = coherent_bell_normalization(index.sign, a)
    return superpose([(norm, first), (norm * index.sign, second)])


def scs_state(
    parity: str,
    beta: float,
    policy: CutoffPolicy,
    label: str = "f",
) -> PureState:
    """Superposed coherent state N_+-(|beta> +- |-beta>).

    The even state carries only even photon numbers (vacuum included); the
    odd state only odd ones, so its vacuum amplitude is exactly zero.
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    sign = +1 if parity == "even" else -1
    if beta == 0:
        if parity == "odd":
            raise DegenerateStateError("odd cat state vanishes at beta = 0")
        warnings.warn("beta = 0 cat state is the vacuum", DegenerateBasisWarning,
                      stacklevel=2)
    norm = (2.0 + 2.0 * sign * math.exp(-2.0 * beta * beta)) ** -0.5
    cutoff = policy.cutoff_for_qubit(beta) if beta else 1
    return superpose(
        [
            (norm, coherent_state(beta, policy, label=label, cutoff=cutoff)),
            (norm * sign, coherent_state(-beta, policy, label=label, cutoff=cutoff)),
        ]
    )


# ---------------------------------------------------------------------------
# qubits and channels
# ---------------------------------------------------------------------------


def make_polarization_qubit(amps: LogicalAmplitudes, pair: str = "q") -> PureState:
    """a |H> + b |V> on one rail pair."""
    return polarization_state(pair, amps.a, amps.b)


def make_coherent_qubit(
    amps: LogicalAmplitudes, params: EncodingParams, label: str = "f"
) -> PureState:
    """a |alpha> + b |-alpha>, renormalized in Fock space.

    The basis is non-orthogonal, so (a, b) are pre-normalization
    coefficients; raises if the combination is (numerically) zero.
    """
    cutoff = params.field_cutoff()
    raw = superpose(
        [
            (amps.a, coherent_state(params.alpha, params.policy, label=label, cutoff=cutoff)),
            (amps.b, coherent_state(-params.alpha, params.policy, label=label, cutoff=cutoff)),
        ]
    )
    if raw.norm() < 1e-6:
        raise DegenerateStateError(
            "a|alpha> + b|-alpha> is numerically the zero vector"
        )
    return raw.normalized()


def make_hybrid_qubit(
    amps: LogicalAmplitudes,
    params: EncodingParams,
    labels: tuple[str, str] = ("p", "f"),
) -> PureState:
    """a |0_L> + b |1_L> on (rail pair, field mode); exactly normalized."""
    pair, field_label = labels
    return superpose(
        [
            (amps.a, hybrid_basis_state(0, params, pair, field_label)),
            (amps.b, hybrid_basis_state(1, params, pair, field_label)),
        ]
    )


def make_hybrid_channel(
    params: EncodingParams,
    labels: tuple[str, str, str, str] = ("A", "fA", "B", "fB"),
) -> PureState:
    """Equal-weight hybrid channel (|0_L>_A |0_L>_B + |1_L>_A |1_L>_B)/sqrt(2)."""
    pa, fa, pb, fb = labels
    coeff = 1 / math.sqrt(2)
    branch0 = tensor(
        hybrid_basis_state(0, params, pa, fa), hybrid_basis_state(0, params, pb, fb)
    )
    branch1 = tensor(
        hybrid_basis_state(1, params, pa, fa), hybrid_basis_state(1, params, pb, fb)
    )
    return superpose([(coeff, branch0), (coeff, branch1)])
