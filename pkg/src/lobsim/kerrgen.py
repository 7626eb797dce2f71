"""Resource-state generation: weak-cross-Kerr hybrid pairs and ECS splitting.

A hybrid pair |H>|alpha> + |V>|-alpha> is produced from a single photon in
|+> and a coherent state |alpha + i gamma| by an arbitrarily weak
cross-Kerr phase theta, provided gamma * tan(theta/2) = alpha: the Kerr
rotation then carries alpha + i gamma exactly onto -alpha + i gamma, and a
displacement D(-i gamma) recenters both branches onto +-alpha.

The displacement adds a branch-relative Weyl phase exp(2 i gamma alpha);
by default a compensating phase on the V rail removes it so the output is
the canonical pair.  Entangled coherent states are produced independently
by splitting a cat state of amplitude sqrt(2) beta on a beam splitter.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .elements import (
    JONES_DIAGONAL,
    beam_splitter_5050,
    conditional_kerr,
    displacement,
    phase_shift,
    wave_plate,
)
from .encodings import scs_state
from .errors import InvariantViolationError
from .fock import (
    CutoffPolicy,
    Mode,
    ModeKind,
    ModeLayout,
    PureState,
    coherent_state,
    field_mode,
    pol_pair,
    superpose,
    tensor,
    vacuum,
)


@dataclass(frozen=True)
class KerrGenParams:
    """Target amplitude alpha, auxiliary amplitude gamma, Kerr angle theta.

    ``theta`` defaults to 2 atan(alpha / gamma), the unique angle with
    gamma * tan(theta/2) = alpha; pass it explicitly only to study
    constraint violations.
    """

    alpha: float
    gamma: float
    theta: float | None = None

    def __post_init__(self):
        if self.alpha < 0 or self.gamma <= 0:
            raise ValueError("need alpha >= 0 and gamma > 0")
        if self.theta is None:
            object.__setattr__(self, "theta", 2.0 * math.atan2(self.alpha, self.gamma))

    def constraint_residual(self) -> float:
        """|gamma * tan(theta/2) - alpha|."""
        return abs(self.gamma * math.tan(self.theta / 2.0) - self.alpha)


def rotation_exactness_check(params: KerrGenParams) -> float:
    """Amplitude-geometry mismatch |e^{i theta}(alpha + i gamma) - (-alpha + i gamma)|.

    Zero (to rounding) exactly when gamma * tan(theta/2) = alpha, for any
    gamma; this validates the weak-nonlinearity construction analytically
    where Fock simulation is out of reach.
    """
    z = complex(params.alpha, params.gamma)
    return abs(cmath.exp(1j * params.theta) * z - complex(-params.alpha, params.gamma))


def expected_uncompensated_fidelity(params: KerrGenParams) -> float:
    """Closed-form fidelity of the uncompensated pair to the canonical one.

    The two branches end up with relative Weyl phase exp(2 i gamma alpha),
    so the overlap with the phase-free target is (1 + cos(2 gamma alpha))/2.
    """
    return (1.0 + math.cos(2.0 * params.gamma * params.alpha)) / 2.0


def hybrid_pair_target(
    alpha: float,
    cutoff: int,
    labels: tuple[str, str] = ("p", "f"),
    *,
    diagonal_basis: bool = False,
) -> PureState:
    """The canonical pair (|H>|a> + |V>|-a>)/sqrt(2), or its |+->|+-a> form."""
    pair, field_label = labels
    layout = ModeLayout(pol_pair(pair))
    h = PureState(layout, {(1, 0): 1.0})
    v = PureState(layout, {(0, 1): 1.0})
    policy = CutoffPolicy()
    coeff = 1 / math.sqrt(2)
    state = superpose(
        [
            (coeff, tensor(h, coherent_state(alpha, policy, label=field_label, cutoff=cutoff))),
            (coeff, tensor(v, coherent_state(-alpha, policy, label=field_label, cutoff=cutoff))),
        ]
    )
    if diagonal_basis:
        state = wave_plate(state, pair, JONES_DIAGONAL)
    return state


def generate_hybrid_pair(
    params: KerrGenParams,
    policy: CutoffPolicy,
    *,
    compensate: bool = True,
    diagonal_basis: bool = False,
    labels: tuple[str, str] = ("p", "f"),
) -> PureState:
    """Produce a hybrid pair with a weak cross-Kerr phase and a displacement.

    Steps: prepare |+> (x) |alpha + i gamma|; apply the conditional Kerr
    phase theta (V branch only); displace by -i gamma.  With ``compensate``
    a phase on the V rail cancels the relative Weyl phase exp(2 i gamma
    alpha).  With ``diagonal_basis`` a final plate maps {|H>, |V>} onto
    {|+>, |->}, giving the pair in the teleportation-basis form.

    The field cutoff must cover |alpha + i gamma|, so large gamma is
    capped by ``policy.hard_limit``; use ``rotation_exactness_check`` for
    the analytically tractable large-gamma regime.
    """
    if params.constraint_residual() > 1e-9:
        raise InvariantViolationError(
            "gamma * tan(theta/2) != alpha; the Kerr rotation would miss the target"
        )
    pair, field_label = labels
    z = complex(params.alpha, params.gamma)
    cutoff = policy.cutoff_for(z)  # no headroom: the displacement only shrinks |z|
    layout = ModeLayout(pol_pair(pair))
    plus = PureState(layout, {(1, 0): 1 / math.sqrt(2), (0, 1): 1 / math.sqrt(2)})
    state = tensor(plus, coherent_state(z, policy, label=field_label, cutoff=cutoff))
    state = conditional_kerr(state, pair, field_label, params.theta)
    state = displacement(state, field_label, -1j * params.gamma)
    if compensate:
        v_label = f"{pair}.V"
        state = phase_shift(state, v_label, -2.0 * params.gamma * params.alpha)
    if diagonal_basis:
        state = wave_plate(state, pair, JONES_DIAGONAL)
    return state.normalized()


def generate_ecs_via_bs(
    beta: float,
    parity: str,
    policy: CutoffPolicy,
    labels: tuple[str, str] = ("f1", "f2"),
) -> PureState:
    """Split a cat state of amplitude sqrt(2) beta into an entangled pair.

    An even (odd) cat on a 50:50 beam splitter with vacuum yields
    N_+-(|beta>|beta> +- |-beta>|-beta>), the Phi+ (Phi-) entangled
    coherent state, matching the direct constructor to truncation accuracy.
    """
    l1, l2 = labels
    cat = scs_state(parity, math.sqrt(2.0) * beta, policy, label=l1)
    cutoff = cat.layout.mode(l1).cutoff
    ancilla = vacuum(ModeLayout([field_mode(l2, cutoff)]))
    return beam_splitter_5050(tensor(cat, ancilla), l1, l2)
