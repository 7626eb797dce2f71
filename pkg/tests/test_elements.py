"""Optical element tests: unitarity, fixed conventions, encoded Paulis."""

import math

import numpy as np
import pytest

from lobsim.elements import (
    JONES_DIAGONAL,
    JONES_SWAP,
    beam_splitter_5050,
    conditional_kerr,
    displacement,
    ideal_coherent_z,
    pauli_x,
    pauli_z,
    pbs_route,
    phase_shift,
    wave_plate,
)
from lobsim.encodings import (
    Encoding,
    EncodingParams,
    LogicalAmplitudes,
    make_coherent_qubit,
    make_hybrid_qubit,
    make_polarization_qubit,
    minus_state,
    plus_state,
)
from lobsim.errors import (
    CutoffSaturationError,
    CutoffSaturationWarning,
    LayoutError,
    NonPhysicalOperationError,
)
from lobsim.fock import (
    CutoffPolicy,
    ModeLayout,
    PureState,
    coherent_state,
    fidelity,
    field_mode,
    fock_state,
    inner_product,
    number_marginal,
    pol_pair,
    superpose,
    tensor,
    vacuum,
)

POLICY = CutoffPolicy()


def random_state(layout, seed, max_occ=None):
    rng = np.random.default_rng(seed)
    cutoffs = [m.cutoff if max_occ is None else min(m.cutoff, max_occ)
               for m in layout.modes]
    amps = {}
    for _ in range(30):
        occ = tuple(int(rng.integers(0, c + 1)) for c in cutoffs)
        amps[occ] = complex(*rng.normal(size=2))
    return PureState(layout, amps).normalized()


class TestBeamSplitter:
    def test_coherent_pair_merges(self):
        # |a>|a> -> |sqrt(2) a>|0>
        cutoff = POLICY.cutoff_for_qubit(1.0)
        state = tensor(
            coherent_state(1.0, POLICY, label="a", cutoff=cutoff),
            coherent_state(1.0, POLICY, label="b", cutoff=cutoff),
        )
        out = beam_splitter_5050(state, "a", "b")
        target = tensor(
            coherent_state(math.sqrt(2), POLICY, label="a", cutoff=cutoff),
            coherent_state(0.0, POLICY, label="b", cutoff=cutoff),
        )
        assert fidelity(out.normalized(), target.normalized()) >= 1 - 1e-10

    def test_antisymmetric_pair_routes_to_second_port(self):
        cutoff = POLICY.cutoff_for_qubit(1.0)
        state = tensor(
            coherent_state(1.0, POLICY, label="a", cutoff=cutoff),
            coherent_state(-1.0, POLICY, label="b", cutoff=cutoff),
        )
        out = beam_splitter_5050(state, "a", "b")
        target = tensor(
            coherent_state(0.0, POLICY, label="a", cutoff=cutoff),
            coherent_state(math.sqrt(2), POLICY, label="b", cutoff=cutoff),
        )
        assert fidelity(out.normalized(), target.normalized()) >= 1 - 1e-10

    def test_vacuum_fixed_point(self):
        layout = ModeLayout([field_mode("a", 3), field_mode("b", 3)])
        out = beam_splitter_5050(vacuum(layout), "a", "b")
        assert out.amplitude([0, 0]) == pytest.approx(1.0)

    def test_single_photon_splits(self):
        layout = ModeLayout([field_mode("a", 2), field_mode("b", 2)])
        out = beam_splitter_5050(fock_state(layout, (1, 0)), "a", "b")
        r = 1 / math.sqrt(2)
        assert out.amplitude([1, 0]) == pytest.approx(r, abs=1e-14)
        assert out.amplitude([0, 1]) == pytest.approx(r, abs=1e-14)

    def test_applied_twice_is_identity(self):
        # support kept inside half the cutoff so no truncation occurs
        state = random_state(
            ModeLayout([field_mode("a", 6), field_mode("b", 6)]), 3, max_occ=3
        )
        twice = beam_splitter_5050(beam_splitter_5050(state, "a", "b"), "a", "b")
        assert fidelity(twice.normalized(), state) >= 1 - 1e-9

    @pytest.mark.parametrize("seed", range(4))
    def test_unitarity(self, seed):
        state = random_state(
            ModeLayout([field_mode("a", 8), field_mode("b", 8)]), seed, max_occ=4
        )
        out = beam_splitter_5050(state, "a", "b")
        assert abs(out.norm() - 1.0) < 1e-10

    def test_unitarity_on_coherent_data(self):
        cutoff = POLICY.cutoff_for_qubit(1.5)
        state = tensor(
            coherent_state(1.5, POLICY, label="a", cutoff=cutoff),
            coherent_state(-1.5, POLICY, label="b", cutoff=cutoff),
        )
        out = beam_splitter_5050(state, "a", "b")
        assert abs(out.norm() - 1.0) < 1e-10

    @pytest.mark.parametrize("a,b", [(2.0, 2.0), (2.5, -2.5), (1.5, 2.5)])
    def test_precision_at_large_amplitudes(self, a, b):
        # the multinomial blocks stay accurate at the largest cutoffs the
        # package exercises (|amplitude| <= 2.5 per mode)
        cutoff = POLICY.cutoff_for(math.sqrt(2) * 2.5)
        state = tensor(
            coherent_state(a, POLICY, label="x", cutoff=cutoff),
            coherent_state(b, POLICY, label="y", cutoff=cutoff),
        )
        out = beam_splitter_5050(state, "x", "y")
        target = tensor(
            coherent_state((a + b) / math.sqrt(2), POLICY, label="x", cutoff=cutoff),
            coherent_state((a - b) / math.sqrt(2), POLICY, label="y", cutoff=cutoff),
        )
        assert fidelity(out.normalized(), target.normalized()) >= 1 - 1e-10
        assert abs(out.norm() - 1.0) < 1e-10

    def test_same_mode_rejected(self):
        state = vacuum(ModeLayout([field_mode("a", 3)]))
        with pytest.raises(LayoutError):
            beam_splitter_5050(state, "a", "a")

    def test_saturation_warning(self):
        # cutoff sized for alpha, not sqrt(2) alpha: the merge must warn
        state = tensor(
            coherent_state(1.5, POLICY, label="a", cutoff=8),
            coherent_state(1.5, POLICY, label="b", cutoff=8),
        )
        with pytest.warns(CutoffSaturationWarning):
            beam_splitter_5050(state, "a", "b")


class TestPhaseShift:
    def test_zero_is_identity(self):
        state = coherent_state(1.0, POLICY)
        out = phase_shift(state, "f", 0.0)
        assert fidelity(out, state) == pytest.approx(1.0)

    def test_pi_flips_coherent_sign(self):
        cutoff = POLICY.cutoff_for_qubit(1.0)
        state = coherent_state(1.0, POLICY, cutoff=cutoff)
        target = coherent_state(-1.0, POLICY, cutoff=cutoff)
        assert fidelity(phase_shift(state, "f", math.pi), target) >= 1 - 1e-10

    def test_pi_on_single_photon_via_interference(self):
        # apply the shift inside one arm of (|10> + |01>)/sqrt(2): the
        # relative phase flips the superposition sign
        layout = ModeLayout([field_mode("a", 2), field_mode("b", 2)])
        r = 1 / math.sqrt(2)
        state = PureState(layout, {(1, 0): r, (0, 1): r})
        out = phase_shift(state, "b", math.pi)
        target = PureState(layout, {(1, 0): r, (0, 1): -r})
        assert fidelity(out, target) >= 1 - 1e-12
        assert inner_product(target, out).real == pytest.approx(1.0, abs=1e-12)


class TestDisplacement:
    def test_displaces_vacuum(self):
        beta = 1 + 0.5j
        cutoff = POLICY.cutoff_for_qubit(abs(beta))
        layout = ModeLayout([field_mode("f", cutoff)])
        out = displacement(vacuum(layout), "f", beta)
        target = coherent_state(beta, POLICY, cutoff=cutoff)
        assert fidelity(out.normalized(), target.normalized()) >= 1 - 1e-9

    def test_zero_displacement_is_identity(self):
        state = coherent_state(0.7, POLICY)
        out = displacement(state, "f", 0.0)
        assert fidelity(out.normalized(), state) >= 1 - 1e-12

    def test_weyl_phase_between_branches(self):
        # D(-i g)(|a + i g> + |-a + i g>) = e^{-i g a}|a> + e^{+i g a}|-a>:
        # the branches acquire relative phase e^{2 i g a}
        a, g = 0.8, 6.0
        z = complex(a, g)
        cutoff = POLICY.cutoff_for(abs(z) + 1.0)
        plus = coherent_state(z, POLICY, cutoff=cutoff)
        minus = coherent_state(complex(-a, g), POLICY, cutoff=cutoff)
        state = superpose([(1.0, plus), (1.0, minus)]).normalized()
        out = displacement(state, "f", -1j * g).normalized()
        phased = superpose(
            [
                (np.exp(-1j * g * a), coherent_state(a, POLICY, cutoff=cutoff)),
                (np.exp(+1j * g * a), coherent_state(-a, POLICY, cutoff=cutoff)),
            ]
        ).normalized()
        unphased = superpose(
            [
                (1.0, coherent_state(a, POLICY, cutoff=cutoff)),
                (1.0, coherent_state(-a, POLICY, cutoff=cutoff)),
            ]
        ).normalized()
        assert fidelity(out, phased) >= 1 - 1e-9
        assert fidelity(out, unphased) < 0.9  # the phase is not optional

    def test_norm_conservation(self):
        state = coherent_state(0.5, POLICY, cutoff=40)
        out = displacement(state, "f", 1.0 - 0.5j)
        assert abs(out.norm() - 1.0) < 1e-9

    def test_saturation_raises(self):
        layout = ModeLayout([field_mode("f", 4)])
        with pytest.raises(CutoffSaturationError):
            displacement(vacuum(layout), "f", 3.0)


class TestWavePlate:
    def test_swap_plate(self):
        layout = ModeLayout(pol_pair("p"))
        h = PureState(layout, {(1, 0): 1.0})
        out = wave_plate(h, "p", JONES_SWAP)
        assert out.amplitude([0, 1]) == pytest.approx(1.0)

    def test_identity_plate(self):
        state = random_state(ModeLayout(pol_pair("p")), 5)
        out = wave_plate(state, "p", np.eye(2))
        assert fidelity(out.normalized(), state) >= 1 - 1e-12

    def test_diagonal_plate_maps_plus_to_h(self):
        out = wave_plate(plus_state("p"), "p", JONES_DIAGONAL)
        assert abs(out.amplitude([1, 0])) == pytest.approx(1.0, abs=1e-12)

    def test_nonunitary_rejected(self):
        state = plus_state("p")
        with pytest.raises(ValueError):
            wave_plate(state, "p", np.array([[1.0, 0.0], [0.0, 2.0]]))


class TestPbsRoute:
    def test_h_transmitted(self):
        layout = ModeLayout(pol_pair("p1") + pol_pair("p2"))
        state = PureState(layout, {(1, 0, 1, 0): 1.0})
        out = pbs_route(state, "p1", "p2")
        assert out.amplitude([1, 0, 1, 0]) == pytest.approx(1.0)

    def test_v_reflected(self):
        layout = ModeLayout(pol_pair("p1") + pol_pair("p2"))
        state = PureState(layout, {(0, 1, 0, 0): 1.0})
        out = pbs_route(state, "p1", "p2")
        assert out.amplitude([0, 0, 0, 1]) == pytest.approx(1.0)

    def test_hv_bunches(self):
        layout = ModeLayout(pol_pair("p1") + pol_pair("p2"))
        state = PureState(layout, {(1, 0, 0, 1): 1.0})
        out = pbs_route(state, "p1", "p2")
        assert out.amplitude([1, 1, 0, 0]) == pytest.approx(1.0)


class TestConditionalKerr:
    def test_h_branch_untouched(self):
        params = EncodingParams(Encoding.HYBRID, 1.0)
        state = tensor(
            PureState(ModeLayout(pol_pair("p")), {(1, 0): 1.0}),
            coherent_state(1.0, POLICY, label="f"),
        )
        out = conditional_kerr(state, "p", "f", 0.7)
        assert fidelity(out, state) >= 1 - 1e-12

    def test_v_branch_rotates_coherent_amplitude(self):
        theta = 0.3
        cutoff = POLICY.cutoff_for_qubit(1.0)
        state = tensor(
            PureState(ModeLayout(pol_pair("p")), {(0, 1): 1.0}),
            coherent_state(1.0, POLICY, label="f", cutoff=cutoff),
        )
        out = conditional_kerr(state, "p", "f", theta)
        target = tensor(
            PureState(ModeLayout(pol_pair("p")), {(0, 1): 1.0}),
            coherent_state(np.exp(1j * theta), POLICY, label="f", cutoff=cutoff),
        )
        assert fidelity(out, target.normalized()) >= 1 - 1e-9

    def test_pi_phase_on_single_photon(self):
        layout = ModeLayout(pol_pair("p") + [field_mode("f", 2)])
        state = PureState(layout, {(0, 1, 1): 1.0})
        out = conditional_kerr(state, "p", "f", math.pi)
        assert out.amplitude([0, 1, 1]) == pytest.approx(-1.0, abs=1e-14)

    def test_photon_number_distribution_preserved(self):
        state = tensor(plus_state("p"), coherent_state(1.2, POLICY, label="f"))
        out = conditional_kerr(state, "p", "f", 1.1)
        np.testing.assert_allclose(
            number_marginal(out, "f"), number_marginal(state, "f"), atol=1e-14
        )


def random_amps(seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=2) + 1j * rng.normal(size=2)
    return LogicalAmplitudes.normalized(raw[0], raw[1])


class TestEncodedPaulis:
    """X^2 = Z^2 = I and ZX = -XZ on the logical span, all encodings."""

    def _logical_states(self, encoding, seed=11):
        params = EncodingParams(encoding, 1.0)
        one = LogicalAmplitudes(1.0, 0.0)
        zero_b = LogicalAmplitudes(0.0, 1.0)
        r = 1 / math.sqrt(2)
        plus = LogicalAmplitudes(r, r)
        minus = LogicalAmplitudes(r, -r)
        if encoding is Encoding.POLARIZATION:
            build = lambda amps: make_polarization_qubit(amps, pair="q")
            target = "q"
        elif encoding is Encoding.COHERENT:
            build = lambda amps: make_coherent_qubit(amps, params, label="q")
            target = "q"
        else:
            build = lambda amps: make_hybrid_qubit(amps, params, labels=("q", "fq"))
            target = ("q", "fq")
        return [build(a) for a in (one, zero_b, plus, minus)], target

    def _x(self, state, encoding, target):
        return pauli_x(state, encoding, target)

    def _z(self, state, encoding, target):
        if encoding is Encoding.COHERENT:
            return pauli_z(state, encoding, target, ideal=True, alpha=1.0)
        return pauli_z(state, encoding, target)

    @pytest.mark.parametrize("encoding", list(Encoding))
    def test_involutions(self, encoding):
        states, target = self._logical_states(encoding)
        for st in states:
            xx = self._x(self._x(st, encoding, target), encoding, target)
            zz = self._z(self._z(st, encoding, target), encoding, target)
            assert fidelity(xx.normalized(), st) >= 1 - 1e-10
            assert fidelity(zz.normalized(), st) >= 1 - 1e-10

    @pytest.mark.parametrize("encoding", list(Encoding))
    def test_anticommutation(self, encoding):
        states, target = self._logical_states(encoding)
        for st in states:
            zx = self._z(self._x(st, encoding, target), encoding, target).normalized()
            xz = self._x(self._z(st, encoding, target), encoding, target).normalized()
            # same ray with opposite sign: <zx|xz> = -1
            assert inner_product(zx, xz).real == pytest.approx(-1.0, abs=1e-9)

    def test_hybrid_z_signs(self):
        params = EncodingParams(Encoding.HYBRID, 1.0)
        one_l = make_hybrid_qubit(LogicalAmplitudes(0.0, 1.0), params)
        zero_l = make_hybrid_qubit(LogicalAmplitudes(1.0, 0.0), params)
        z_one = pauli_z(one_l, Encoding.HYBRID, ("p", "f"))
        z_zero = pauli_z(zero_l, Encoding.HYBRID, ("p", "f"))
        assert inner_product(one_l, z_one).real == pytest.approx(-1.0, abs=1e-12)
        assert inner_product(zero_l, z_zero).real == pytest.approx(1.0, abs=1e-12)

    def test_hybrid_x_swaps_logical_basis(self):
        params = EncodingParams(Encoding.HYBRID, 1.0)
        amps = random_amps(3)
        state = make_hybrid_qubit(amps, params)
        flipped = pauli_x(state, Encoding.HYBRID, ("p", "f"))
        target = make_hybrid_qubit(LogicalAmplitudes(amps.b, amps.a), params)
        assert fidelity(flipped.normalized(), target) >= 1 - 1e-10

    def test_coherent_x(self):
        cutoff = POLICY.cutoff_for_qubit(1.0)
        state = coherent_state(1.0, POLICY, cutoff=cutoff)
        out = pauli_x(state, Encoding.COHERENT, "f")
        assert fidelity(out, coherent_state(-1.0, POLICY, cutoff=cutoff)) >= 1 - 1e-10

    def test_physical_coherent_z_rejected(self):
        state = coherent_state(1.0, POLICY)
        with pytest.raises(NonPhysicalOperationError):
            pauli_z(state, Encoding.COHERENT, "f")

    def test_ideal_z_flips_minus_component(self):
        params = EncodingParams(Encoding.COHERENT, 1.0)
        amps = LogicalAmplitudes.normalized(0.6, 0.8)
        state = make_coherent_qubit(amps, params, label="f")
        out = ideal_coherent_z(state, "f", 1.0)
        target = make_coherent_qubit(
            LogicalAmplitudes.normalized(0.6, -0.8), params, label="f"
        )
        assert fidelity(out, target) >= 1 - 1e-10
