"""Linear-optical elements and encoded Pauli operations.

Sign conventions, fixed once and used everywhere:

* 50:50 beam splitter: a -> (a + b)/sqrt(2), b -> (a - b)/sqrt(2), so that
  |alpha>|alpha> -> |sqrt(2) alpha>|0> and |alpha>|-alpha> -> |0>|sqrt(2) alpha>.
* Polarizing beam splitter: transmits H, reflects (swaps) V between the
  two spatial modes.
* Displacement D(beta) = exp(beta a+ - beta* a) carries the Weyl phase:
  D(beta)|z> = exp((beta z* - beta* z)/2) |beta + z>.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.linalg import expm

from . import _engine
from .errors import (
    CutoffSaturationError,
    CutoffSaturationWarning,
    LayoutError,
    NonPhysicalOperationError,
)
from .fock import (
    ModeKind,
    PureState,
    inner_product,
    number_marginal,
    partial_inner,
    superpose,
    tensor,
)

#: Default threshold for cutoff-saturation checks (top-of-mode probability
#: mass, or fractional norm loss under truncation).
SATURATION_TOL = 1e-9

BS_5050 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)

#: Jones matrix of the 90-degree plate: swaps H and V.
JONES_SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])

#: Diagonal-basis analysis plate: H -> (H+V)/sqrt(2), V -> (H-V)/sqrt(2).
JONES_DIAGONAL = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)

#: Diagonal-basis plate at the orthogonal orientation:
#: H -> (H+V)/sqrt(2), V -> (-H+V)/sqrt(2).
JONES_ANTIDIAGONAL = np.array([[1.0, -1.0], [1.0, 1.0]]) / math.sqrt(2)


def _require_unitary(matrix: np.ndarray, what: str):
    gram = matrix.conj().T @ matrix
    if not np.allclose(gram, np.eye(matrix.shape[0]), atol=1e-12):
        raise ValueError(f"{what} must be unitary to 1e-12")


def beam_splitter_5050(
    state: PureState,
    mode_a: str,
    mode_b: str,
    *,
    saturation_tol: float = SATURATION_TOL,
) -> PureState:
    """50:50 beam splitter on two field modes.

    Warns with :class:`CutoffSaturationWarning` when truncation at the mode
    cutoffs costs more than ``saturation_tol`` of the squared norm.
    """
    if mode_a == mode_b:
        raise LayoutError("beam splitter needs two distinct modes")
    ia, ib = state.layout.index(mode_a), state.layout.index(mode_b)
    out = _engine.apply_two_mode(state, ia, ib, BS_5050)
    loss = abs(state.norm() ** 2 - out.norm() ** 2)
    if loss > saturation_tol:
        warnings.warn(
            f"beam splitter truncated {loss:.3e} of squared norm on "
            f"({mode_a}, {mode_b}); raise the cutoffs",
            CutoffSaturationWarning,
            stacklevel=2,
        )
    return out


def phase_shift(state: PureState, mode: str, theta: float) -> PureState:
    """Multiply the amplitude of each n-photon component by exp(i n theta)."""
    col = state.layout.index(mode)
    phases = np.exp(1j * theta * state._keys[:, col].astype(float))
    return _engine.apply_phases(state, phases)


def displacement(
    state: PureState,
    mode: str,
    beta: complex,
    *,
    saturation_tol: float = SATURATION_TOL,
) -> PureState:
    """Displacement D(beta) via the truncated matrix exponential.

    Raises :class:`CutoffSaturationError` if the displaced state leaves
    more than ``saturation_tol`` probability on the top Fock level of the
    mode (the truncation is then no longer faithful).
    """
    idx = state.layout.index(mode)
    cutoff = state.layout.modes[idx].cutoff
    beta = complex(beta)
    n = np.arange(cutoff)
    ladder = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    ladder[n, n + 1] = np.sqrt(n + 1.0)  # annihilation operator
    generator = beta * ladder.conj().T - np.conj(beta) * ladder
    out = _engine.apply_single_mode(state, idx, expm(generator))
    top_mass = float(number_marginal(out, mode)[cutoff])
    if top_mass > saturation_tol:
        raise CutoffSaturationError(
            f"displacement by {beta:.4g} saturates mode {mode!r} "
            f"(top-level mass {top_mass:.3e}); raise the cutoff"
        )
    return out


def wave_plate(state: PureState, pair: str, jones: np.ndarray) -> PureState:
    """Act with a 2x2 Jones unitary on the (H, V) rails of one pair."""
    jones = np.asarray(jones, dtype=complex)
    if jones.shape != (2, 2):
        raise ValueError("Jones matrix must be 2x2")
    _require_unitary(jones, "Jones matrix")
    ih, iv = state.layout.rail_pair(pair)
    return _engine.apply_two_mode(state, ih, iv, jones)


def pbs_route(state: PureState, pair_1: str, pair_2: str) -> PureState:
    """Polarizing beam splitter between two pairs: transmit H, swap V rails."""
    ih1, iv1 = state.layout.rail_pair(pair_1)
    ih2, iv2 = state.layout.rail_pair(pair_2)
    if state.layout.modes[iv1].cutoff != state.layout.modes[iv2].cutoff:
        raise LayoutError("pbs_route requires matching V-rail cutoffs")
    perm = list(range(state.layout.nmodes))
    perm[iv1], perm[iv2] = iv2, iv1
    return _engine.permute_columns(state, perm)


def conditional_kerr(
    state: PureState, pair: str, field: str, theta: float
) -> PureState:
    """Cross-Kerr phase between the V rail of a pair and a field mode.

    The amplitude of each component picks up exp(i theta m n) where m is
    the V-rail occupation and n the field occupation; the H branch is
    untouched, and |V>|beta> -> |V>|beta e^{i theta}>.
    """
    _, iv = state.layout.rail_pair(pair)
    jf = state.layout.index(field)
    if state.layout.modes[jf].kind is not ModeKind.FIELD:
        raise LayoutError(f"{field!r} is not a field mode")
    mn = state._keys[:, iv].astype(float) * state._keys[:, jf].astype(float)
    return _engine.apply_phases(state, np.exp(1j * theta * mn))


# ---------------------------------------------------------------------------
# encoded Pauli operations
# ---------------------------------------------------------------------------


def pauli_x(state: PureState, encoding: str, target) -> PureState:
    """Logical bit flip.

    polarization: H <-> V swap on the pair (``target`` = pair base).
    coherent: pi phase rotation, |alpha> <-> |-alpha> (``target`` = field label).
    hybrid: ``target`` = (pair, field); flips both halves, |0_L> <-> |1_L>.
    """
    encoding = str(getattr(encoding, "value", encoding))
    if encoding == "polarization":
        return wave_plate(state, target, JONES_SWAP)
    if encoding == "coherent":
        return phase_shift(state, target, math.pi)
    if encoding == "hybrid":
        pair, field = target
        # pi on the V rail maps |+> <-> |->; pi on the field maps |a> <-> |-a>.
        _, v_label = _rail_labels_of(state, pair)
        out = phase_shift(state, v_label, math.pi)
        return phase_shift(out, field, math.pi)
    raise ValueError(f"unknown encoding {encoding!r}")


def pauli_z(
    state: PureState,
    encoding: str,
    target,
    *,
    ideal: bool = False,
    alpha: float | None = None,
) -> PureState:
    """Logical phase flip.

    polarization: pi phase on the V rail.
    hybrid: |+><+| - |-><-| on the pair, i.e. an H <-> V swap; field untouched.
    coherent: no deterministic linear-optics realization exists; with
    ``ideal=True`` (and the basis amplitude ``alpha``) the |-alpha>
    component is negated by dual-basis decomposition and the state is
    renormalized.  This variant is bookkeeping, not an optical element.
    """
    encoding = str(getattr(encoding, "value", encoding))
    if encoding == "polarization":
        _, v_label = _rail_labels_of(state, target)
        return phase_shift(state, v_label, math.pi)
    if encoding == "hybrid":
        pair, _field = target if isinstance(target, tuple) else (target, None)
        return wave_plate(state, pair, JONES_SWAP)
    if encoding == "coherent":
        if not ideal:
            raise NonPhysicalOperationError(
                "coherent-basis Z is not deterministically implementable with "
                "linear optics; pass ideal=True for the non-physical variant"
            )
        if alpha is None:
            raise ValueError("ideal coherent Z needs the basis amplitude alpha")
        return ideal_coherent_z(state, target, alpha)
    raise ValueError(f"unknown encoding {encoding!r}")


def _rail_labels_of(state: PureState, pair: str) -> tuple[str, str]:
    ih, iv = state.layout.rail_pair(pair)
    return state.layout.modes[ih].label, state.layout.modes[iv].label


def ideal_coherent_z(state: PureState, field: str, alpha: float) -> PureState:
    """Negate the |-alpha> component of one mode (non-physical reference op).

    Decomposes the mode in the non-orthogonal {|alpha>, |-alpha>} basis via
    the dual (reciprocal) basis, flips the sign of the |-alpha> part, and
    renormalizes.  Requires the mode to lie in that span.
    """
    from .fock import CutoffPolicy, coherent_state  # local import, no cycle

    idx = state.layout.index(field)
    cutoff = state.layout.modes[idx].cutoff
    plus = coherent_state(alpha, CutoffPolicy(), label=field, cutoff=cutoff)
    minus = coherent_state(-alpha, CutoffPolicy(), label=field, cutoff=cutoff)
    s = inner_product(plus, minus).real
    u = partial_inner(plus, state)   # <alpha|psi>  = A + s B
    v = partial_inner(minus, state)  # <-alpha|psi> = s A + B
    det = 1.0 - s * s
    if det < 1e-12:
        raise NonPhysicalOperationError(
            "coherent basis is degenerate (alpha too small) for ideal Z"
        )
    comp_a = superpose([(1.0 / det, u), (-s / det, v)])
    comp_b = superpose([(-s / det, u), (1.0 / det, v)])
    rebuilt = superpose(
        [(1.0, _embed(plus, comp_a, state, idx)), (-1.0, _embed(minus, comp_b, state, idx))]
    )
    # Consistency: the input must have been in the span.
    original = superpose(
        [(1.0, _embed(plus, comp_a, state, idx)), (1.0, _embed(minus, comp_b, state, idx))]
    )
    mismatch = superpose([(1.0, original), (-1.0, state)]).norm()
    if mismatch > 1e-8 * max(state.norm(), 1e-300):
        raise NonPhysicalOperationError(
            f"state is not in the span of |+alpha>, |-alpha> (residual {mismatch:.3e})"
        )
    return rebuilt.normalized()


def _embed(mode_state: PureState, rest: PureState, template: PureState, idx: int) -> PureState:
    """Tensor a single-mode state back into position ``idx`` of a layout."""
    joined = tensor(mode_state, rest)
    # joined column order: [mode] + rest; restore the template's order
    order = []
    rest_labels = list(rest.layout.labels)
    for i, m in enumerate(template.layout.modes):
        if i == idx:
            order.append(0)
        else:
            order.append(1 + rest_labels.index(m.label))
    keys = joined._keys[:, order]
    return PureState.from_arrays(template.layout, keys, joined._vals, dedup=False)
