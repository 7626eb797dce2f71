"""Sparse multimode Fock-space pure states.

States are stored as a sparse map from photon-occupation tuples to complex
amplitudes, one occupation entry per mode.  Polarization qubits live on
(H, V) rail pairs with small cutoffs; coherent fields live on single modes
whose cutoff is chosen so the neglected Poisson tail stays below a
configurable epsilon.

All states are immutable: every operation returns a new ``PureState``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    CutoffSaturationError,
    DegenerateStateError,
    LayoutError,
    MixedBranchError,
)

#: Amplitudes below this magnitude are dropped after each operation.  Kept
#: far below the 1e-10 probability tolerances used throughout.
PRUNE_THRESHOLD = 1e-14

#: Measurement branches below this probability are numerical noise at the
#: default cutoff policy (truncation leakage enters at ~1e-16) and are
#: dropped from enumerations.
BRANCH_PROB_FLOOR = 1e-14

_OCC_DTYPE = np.int16


class ModeKind(Enum):
    RAIL = "rail"    # one arm of a polarization (H, V) pair
    FIELD = "field"  # generic bosonic field mode


@dataclass(frozen=True)
class Mode:
    """A single bosonic mode: label, kind, and Fock cutoff (max photon number)."""

    label: str
    kind: ModeKind
    cutoff: int

    def __post_init__(self):
        if self.cutoff < 1:
            raise LayoutError(f"mode {self.label!r}: cutoff must be >= 1")


def rail_labels(base: str) -> tuple[str, str]:
    """Labels of the H and V rails belonging to polarization pair ``base``."""
    return f"{base}.H", f"{base}.V"


def pol_pair(base: str, cutoff: int = 2) -> list[Mode]:
    """The two rail modes of a polarization pair.

    The default cutoff of 2 admits photon bunching on a single rail, which
    occurs inside Bell analyzers even when each pair carries one photon.
    """
    h, v = rail_labels(base)
    return [Mode(h, ModeKind.RAIL, cutoff), Mode(v, ModeKind.RAIL, cutoff)]


def field_mode(label: str, cutoff: int) -> Mode:
    return Mode(label, ModeKind.FIELD, cutoff)


class ModeLayout:
    """Ordered registry of modes; identifies each occupation-tuple slot."""

    __slots__ = ("modes", "_index")

    def __init__(self, modes: Sequence[Mode]):
        modes = tuple(modes)
        labels = [m.label for m in modes]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate mode labels in {labels}")
        # Rails must come in (H, V) pairs sharing a base label.
        bases = {}
        for m in modes:
            if m.kind is ModeKind.RAIL:
                base, _, suffix = m.label.rpartition(".")
                if suffix not in ("H", "V") or not base:
                    raise LayoutError(f"rail label {m.label!r} must end in '.H' or '.V'")
                bases.setdefault(base, set()).add(suffix)
        for base, suffixes in bases.items():
            if suffixes != {"H", "V"}:
                raise LayoutError(f"polarization pair {base!r} is missing a rail")
        self.modes = modes
        self._index = {m.label: i for i, m in enumerate(modes)}

    @property
    def nmodes(self) -> int:
        return len(self.modes)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(m.label for m in self.modes)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise LayoutError(f"no mode labeled {label!r} in layout {self.labels}") from None

    def mode(self, label: str) -> Mode:
        return self.modes[self.index(label)]

    def rail_pair(self, base: str) -> tuple[int, int]:
        """Indices of the (H, V) rails of polarization pair ``base``."""
        h, v = rail_labels(base)
        return self.index(h), self.index(v)

    def cutoffs(self) -> np.ndarray:
        return np.array([m.cutoff for m in self.modes], dtype=_OCC_DTYPE)

    def concat(self, other: "ModeLayout") -> "ModeLayout":
        return ModeLayout(self.modes + other.modes)

    def drop(self, labels: Iterable[str]) -> "ModeLayout":
        gone = set(labels)
        return ModeLayout([m for m in self.modes if m.label not in gone])

    def compatible(self, other: "ModeLayout") -> bool:
        """Same mode labels, kinds, and order; cutoffs may differ."""
        return self.labels == other.labels and all(
            a.kind is b.kind for a, b in zip(self.modes, other.modes)
        )

    def __eq__(self, other):
        return isinstance(other, ModeLayout) and self.modes == other.modes

    def __hash__(self):
        return hash(self.modes)

    def __repr__(self):
        return f"ModeLayout({list(self.modes)!r})"


@dataclass(frozen=True)
class CutoffPolicy:
    """Rule for choosing per-mode Fock cutoffs from coherent amplitudes.

    ``cutoff_for(beta)`` returns the smallest n_max whose Poisson tail
    (mean ``|beta|**2``) is below ``tail_epsilon``.  ``headroom_factor``
    is applied by state builders to the nominal qubit amplitude so that
    downstream amplitude growth (e.g. ``sqrt(2)*alpha`` after a 50:50
    beam splitter) stays inside the cutoff.
    """

    tail_epsilon: float = 1e-12
    headroom_factor: float = math.sqrt(2)
    hard_limit: int = 256

    def __post_init__(self):
        if not 0.0 < self.tail_epsilon < 1.0:
            raise ValueError("tail_epsilon must lie in (0, 1)")
        if self.headroom_factor < math.sqrt(2) - 1e-12:
            raise ValueError("headroom_factor must be >= sqrt(2)")

    def cutoff_for(self, beta: complex) -> int:
        """Smallest cutoff with Poisson tail below tail_epsilon at amplitude beta."""
        lam = abs(beta) ** 2
        if not math.isfinite(lam):
            raise ValueError("amplitude must be finite")
        if lam == 0.0:
            return 1
        term = math.exp(-lam)
        cumulative = term
        n = 0
        while 1.0 - cumulative >= self.tail_epsilon:
            n += 1
            if n > self.hard_limit:
                raise CutoffSaturationError(
                    f"amplitude {abs(beta):.4g} needs cutoff > hard limit {self.hard_limit}"
                )
            term *= lam / n
            cumulative += term
        return max(n, 1)

    def cutoff_for_qubit(self, alpha: complex) -> int:
        """Cutoff for a mode nominally holding |alpha|, with headroom applied."""
        return self.cutoff_for(abs(alpha) * self.headroom_factor)


class PureState:
    """Sparse pure state over a :class:`ModeLayout`.

    The amplitude data is held as a lexicographically sorted array of
    occupation rows plus a complex amplitude vector; a dict view is built
    lazily for point lookups.  Instances are immutable.
    """

    __slots__ = ("layout", "_keys", "_vals", "_map")

    def __init__(self, layout: ModeLayout, amplitudes: Mapping[tuple, complex]):
        keys = np.array(list(amplitudes.keys()), dtype=_OCC_DTYPE).reshape(
            len(amplitudes), layout.nmodes
        )
        vals = np.fromiter(amplitudes.values(), dtype=complex, count=len(amplitudes))
        other = PureState.from_arrays(layout, keys, vals)
        self.layout = layout
        self._keys = other._keys
        self._vals = other._vals
        self._map = None

    @classmethod
    def from_arrays(
        cls,
        layout: ModeLayout,
        keys: np.ndarray,
        vals: np.ndarray,
        *,
        dedup: bool = True,
        prune: float = PRUNE_THRESHOLD,
    ) -> "PureState":
        self = object.__new__(cls)
        self.layout = layout
        vals = np.asarray(vals, dtype=complex).reshape(-1)
        if layout.nmodes == 0:
            keys = np.zeros((vals.shape[0], 0), dtype=_OCC_DTYPE)
        else:
            keys = np.asarray(keys, dtype=_OCC_DTYPE).reshape(-1, layout.nmodes)
        if keys.shape[0] != vals.shape[0]:
            raise ValueError("keys/vals length mismatch")
        if keys.size:
            if keys.min() < 0:
                raise LayoutError("negative occupation number")
            over = keys.max(axis=0) > layout.cutoffs()
            if over.any():
                bad = [layout.modes[i].label for i in np.nonzero(over)[0]]
                raise LayoutError(f"occupation exceeds cutoff on modes {bad}")
        if dedup and keys.shape[0] > 0:
            uniq, inv = np.unique(keys, axis=0, return_inverse=True)
            merged = np.zeros(uniq.shape[0], dtype=complex)
            np.add.at(merged, inv.ravel(), vals)
            keys, vals = uniq, merged
        if prune and vals.size:
            keep = np.abs(vals) >= prune
            keys, vals = keys[keep], vals[keep]
        self._keys = keys
        self._vals = vals
        self._map = None
        return self

    # -- sparse-map view ---------------------------------------------------

    def _ensure_map(self):
        if self._map is None:
            self._map = {
                tuple(int(x) for x in row): complex(v)
                for row, v in zip(self._keys, self._vals)
            }
        return self._map

    @property
    def amplitudes(self) -> dict[tuple, complex]:
        """Copy of the sparse occupation -> amplitude map."""
        return dict(self._ensure_map())

    def amplitude(self, occupation: Sequence[int]) -> complex:
        return self._ensure_map().get(tuple(int(x) for x in occupation), 0j)

    def items(self) -> Iterator[tuple[tuple, complex]]:
        return iter(self._ensure_map().items())

    @property
    def num_terms(self) -> int:
        return int(self._vals.shape[0])

    # -- algebra -----------------------------------------------------------

    def norm(self) -> float:
        return float(np.linalg.norm(self._vals))

    def normalized(self) -> "PureState":
        n = self.norm()
        if n < 1e-300:
            raise DegenerateStateError("cannot normalize a zero state")
        return PureState.from_arrays(
            self.layout, self._keys, self._vals / n, dedup=False, prune=0.0
        )

    def pruned(self, threshold: float = PRUNE_THRESHOLD) -> "PureState":
        return PureState.from_arrays(
            self.layout, self._keys, self._vals, dedup=False, prune=threshold
        )

    def scaled(self, factor: complex) -> "PureState":
        return PureState.from_arrays(
            self.layout, self._keys, self._vals * factor, dedup=False
        )

    def __repr__(self):
        return f"PureState({self.layout.labels}, {self.num_terms} terms, norm={self.norm():.6f})"


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def vacuum(layout: ModeLayout) -> PureState:
    keys = np.zeros((1, layout.nmodes), dtype=_OCC_DTYPE)
    return PureState.from_arrays(layout, keys, np.ones(1, dtype=complex), dedup=False)


def fock_state(layout: ModeLayout, occupation: Sequence[int]) -> PureState:
    keys = np.array([occupation], dtype=_OCC_DTYPE)
    return PureState.from_arrays(layout, keys, np.ones(1, dtype=complex), dedup=False)


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Truncated coherent amplitudes c_n = exp(-|a|^2/2) a^n / sqrt(n!)."""
    c = np.empty(cutoff + 1, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff + 1):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c

def coherent_state(
    alpha: complex,
    policy: CutoffPolicy,
    *,
    label: str = "f",
    cutoff: int | None = None,
) -> PureState:
    """Single-mode coherent state, truncated per ``policy``.

    The cutoff covers ``|alpha| * headroom_factor`` so the state survives
    one beam-splitter pass without re-truncation; pass ``cutoff`` to
    override.
    """
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise ValueError("alpha must be finite")
    if cutoff is None:
        cutoff = policy.cutoff_for_qubit(alpha)
    layout = ModeLayout([field_mode(label, cutoff)])
    amps = coherent_amplitudes(alpha, cutoff)
    keys = np.arange(cutoff + 1, dtype=_OCC_DTYPE).reshape(-1, 1)
    return PureState.from_arrays(layout, keys, amps, dedup=False)


def superpose(terms: Sequence[tuple[complex, PureState]]) -> PureState:
    """Linear combination sum(c_i * psi_i); layouts must match exactly."""
    if not terms:
        raise ValueError("superpose needs at least one term")
    layout = terms[0][1].layout
    for _, s in terms[1:]:
        if s.layout != layout:
            raise LayoutError("superpose requires identical layouts")
    keys = np.vstack([s._keys for _, s in terms])
    vals = np.concatenate([c * s._vals for c, s in terms])
    return PureState.from_arrays(layout, keys, vals)


def tensor(a: PureState, b: PureState) -> PureState:
    """Tensor product; mode labels must be disjoint."""
    layout = a.layout.concat(b.layout)  # raises LayoutError on collision
    na, nb = a.num_terms, b.num_terms
    keys = np.hstack(
        [np.repeat(a._keys, nb, axis=0), np.tile(b._keys, (na, 1))]
    )
    vals = np.outer(a._vals, b._vals).ravel()
    return PureState.from_arrays(layout, keys, vals, dedup=False)


# ---------------------------------------------------------------------------
# inner products, projections, fidelity
# ---------------------------------------------------------------------------


def _check_compatible(a: PureState, b: PureState):
    if not a.layout.compatible(b.layout):
        raise LayoutError(
            f"incompatible layouts: {a.layout.labels} vs {b.layout.labels}"
        )


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in the first argument.

    Layouts must agree in labels, kinds, and order; differing cutoffs are
    allowed (missing amplitudes count as zero).
    """
    _check_compatible(a, b)
    if a.num_terms > b.num_terms:
        return complex(np.conj(inner_product(b, a)))
    bmap = b._ensure_map()
    acc = 0j
    for occ, amp in a.items():
        other = bmap.get(occ)
        if other is not None:
            acc += amp.conjugate() * other
    return acc


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2 for normalized states (checked to 1e-8)."""
    _check_compatible(a, b)
    for s, name in ((a, "first"), (b, "second")):
        if abs(s.norm() - 1.0) > 1e-8:
            raise ValueError(f"{name} state is not normalized (norm={s.norm():.3e})")
    return min(abs(inner_product(a, b)) ** 2, 1.0)


def partial_inner(bra: PureState, state: PureState) -> PureState:
    """Contract ``state`` with ``<bra|`` on the bra's modes.

    Returns the (unnormalized) state left on the remaining modes; its
    squared norm is the Born probability of the projection onto |bra>.
    """
    cols = [state.layout.index(lbl) for lbl in bra.layout.labels]
    rest_cols = [i for i in range(state.layout.nmodes) if i not in cols]
    rest_layout = ModeLayout([state.layout.modes[i] for i in rest_cols])
    bmap = bra._ensure_map()
    det = state._keys[:, cols]
    rest = state._keys[:, rest_cols]
    out_keys, out_vals = [], []
    for row in range(state.num_terms):
        amp = bmap.get(tuple(int(x) for x in det[row]))
        if amp is not None:
            out_keys.append(rest[row])
            out_vals.append(amp.conjugate() * state._vals[row])
    if not out_keys:
        return PureState.from_arrays(
            rest_layout,
            np.zeros((0, rest_layout.nmodes), dtype=_OCC_DTYPE),
            np.zeros(0, dtype=complex),
        )
    return PureState.from_arrays(
        rest_layout, np.array(out_keys, dtype=_OCC_DTYPE), np.array(out_vals), prune=0.0
    )


def _common_direction(
    groups: list[tuple[np.ndarray, np.ndarray]],
    rest_layout: ModeLayout,
    purity_tol: float = 1e-10,
) -> tuple[PureState, float]:
    """Collapse sub-branches that must share one post-measurement ray.

    ``groups`` holds (rest_keys, vals) for each detected occupation in a
    coarse-grained outcome class.  The class density matrix must be pure
    up to ``purity_tol`` in infidelity; otherwise the detector class
    genuinely mixes the undetected modes and MixedBranchError is raised.
    """
    probability = float(sum(np.vdot(v, v).real for _, v in groups))
    norms = [float(np.linalg.norm(v)) for _, v in groups]
    ref = int(np.argmax(norms))
    ref_state = PureState.from_arrays(
        rest_layout, groups[ref][0], groups[ref][1], prune=0.0
    )
    ref_norm2 = norms[ref] ** 2
    ref_map = ref_state._ensure_map()
    residual2 = 0.0
    for g, (keys, vals) in enumerate(groups):
        if g == ref or norms[g] == 0.0:
            continue
        overlap = 0j
        for row, v in zip(keys, vals):
            a = ref_map.get(tuple(int(x) for x in row))
            if a is not None:
                overlap += a.conjugate() * v
        residual2 += max(0.0, norms[g] ** 2 - abs(overlap) ** 2 / ref_norm2)
    if residual2 > purity_tol * probability:
        raise MixedBranchError(
            "coarse-grained outcome class does not leave a pure post-state "
            f"(infidelity {residual2 / probability:.3e}); use photon-number-"
            "resolving detection, or raise the mode cutoffs"
        )
    return ref_state.normalized(), probability


def project(
    state: PureState,
    pattern: Mapping[str, int | Iterable[int]],
) -> tuple[PureState | None, float]:
    """Project onto given occupations of a mode subset.

    ``pattern`` maps mode labels either to one occupation number or to a
    collection of allowed occupations (a Fock-diagonal subspace).  Returns
    the renormalized conditional state on the remaining modes and the
    branch probability ``||P psi||^2``.  A zero-probability branch returns
    ``(None, 0.0)``.
    """
    if not pattern:
        raise LayoutError("projection needs a non-empty mode subset")
    cols, allowed = [], []
    for label, occ in pattern.items():
        cols.append(state.layout.index(label))
        occ_set = (occ,) if isinstance(occ, (int, np.integer)) else tuple(occ)
        if not occ_set:
            raise ValueError(f"empty occupation set for mode {label!r}")
        allowed.append(np.array(sorted(int(o) for o in occ_set)))
    mask = np.ones(state.num_terms, dtype=bool)
    for c, vals in zip(cols, allowed):
        mask &= np.isin(state._keys[:, c], vals)
    if not mask.any():
        return None, 0.0
    sel_keys = state._keys[mask]
    sel_vals = state._vals[mask]
    probability = float(np.vdot(sel_vals, sel_vals).real)
    rest_cols = [i for i in range(state.layout.nmodes) if i not in cols]
    rest_layout = ModeLayout([state.layout.modes[i] for i in rest_cols])
    det = sel_keys[:, cols]
    uniq, inv = np.unique(det, axis=0, return_inverse=True)
    inv = inv.ravel()
    if uniq.shape[0] == 1:
        post = PureState.from_arrays(
            rest_layout, sel_keys[:, rest_cols], sel_vals, prune=0.0
        )
        return post.normalized(), probability
    groups = [
        (sel_keys[inv == g][:, rest_cols], sel_vals[inv == g])
        for g in range(uniq.shape[0])
    ]
    post, probability = _common_direction(groups, rest_layout)
    return post, probability


def number_marginal(state: PureState, label: str) -> np.ndarray:
    """Photon-number probability distribution P(n) of one mode."""
    col = state.layout.index(label)
    cutoff = state.layout.mode(label).cutoff
    probs = np.zeros(cutoff + 1)
    np.add.at(probs, state._keys[:, col], np.abs(state._vals) ** 2)
    return probs


def mean_occupation_amplitude(state: PureState, label: str) -> complex:
    """<a> of one mode; locates the center of a coherent branch."""
    col = state.layout.index(label)
    amap = state._ensure_map()
    acc = 0j
    for occ, amp in amap.items():
        n = occ[col]
        raised = list(occ)
        raised[col] = n + 1
        upper = amap.get(tuple(raised))
        if upper is not None:
            acc += math.sqrt(n + 1) * amp.conjugate() * upper
    return acc
