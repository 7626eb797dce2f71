"""End-to-end teleportation tests: success laws, branch fidelities,
correction-table derivations, and exact-vs-sampled agreement."""

import math

import numpy as np
import pytest

from lobsim.analyzers import BAlphaClass, BPClass, FeedForward, run_b_alpha, run_b_p
from lobsim.elements import pauli_x, pauli_z
from lobsim.encodings import (
    BellIndex,
    Encoding,
    EncodingParams,
    LogicalAmplitudes,
    make_coherent_bell,
    make_coherent_qubit,
    make_polarization_bell,
    make_polarization_qubit,
)
from lobsim.fock import CutoffPolicy, fidelity, tensor
from lobsim.teleport import (
    COHERENT_CORRECTIONS,
    POLARIZATION_CORRECTIONS,
    TeleportConfig,
    TeleportStatus,
    analytic_success,
    hybrid_success_law,
    sweep_alpha,
    teleport,
    teleport_coherent,
    teleport_hybrid,
    teleport_polarization,
)

POLICY = CutoffPolicy()


def random_amps(seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=2) + 1j * rng.normal(size=2)
    return LogicalAmplitudes.normalized(raw[0], raw[1])


def config(encoding, alpha, amps, **kw):
    return TeleportConfig(encoding=encoding, alpha=alpha, amps=amps,
                          policy=POLICY, **kw)


class TestHybrid:
    @pytest.mark.parametrize("alpha", [0.6, 1.0])
    def test_success_matches_law(self, alpha):
        for seed in range(3):
            metrics = teleport_hybrid(
                config(Encoding.HYBRID, alpha, random_amps(seed))
            )
            assert metrics.success_probability == pytest.approx(
                hybrid_success_law(alpha), abs=1e-6
            )

    def test_named_operating_point(self):
        metrics = teleport_hybrid(
            config(Encoding.HYBRID, 1.4, LogicalAmplitudes.normalized(0.6, 0.8))
        )
        assert metrics.success_probability == pytest.approx(0.990080, abs=1e-6)

    def test_small_alpha_limit(self):
        metrics = teleport_hybrid(
            config(Encoding.HYBRID, 0.05, LogicalAmplitudes.normalized(0.6, 0.8))
        )
        assert metrics.success_probability == pytest.approx(
            hybrid_success_law(0.05), abs=1e-6
        )
        assert abs(metrics.success_probability - 0.5) < 3e-3

    @pytest.mark.parametrize("alpha", [0.6, 1.0, 1.4])
    def test_every_success_branch_exact(self, alpha):
        for seed in range(5):
            metrics = teleport_hybrid(
                config(Encoding.HYBRID, alpha, random_amps(seed + 100))
            )
            for run in metrics.branches:
                if run.status is TeleportStatus.SUCCESS:
                    assert run.fidelity >= 1 - 1e-9
                else:
                    assert run.fidelity is None

    def test_input_independence(self):
        values = [
            teleport_hybrid(
                config(Encoding.HYBRID, 0.9, random_amps(seed))
            ).success_probability
            for seed in range(20)
        ]
        assert max(values) - min(values) < 1e-9

    def test_corrections_are_not_vacuous(self):
        amps = LogicalAmplitudes.normalized(0.6, 0.8)
        cfg = config(Encoding.HYBRID, 1.0, amps)
        params = cfg.params()
        from lobsim.encodings import make_hybrid_channel, make_hybrid_qubit
        from lobsim.analyzers import hybrid_bsm

        psi_in = make_hybrid_qubit(amps, params, labels=("in", "f_in"))
        channel = make_hybrid_channel(params, labels=("A", "f_A", "B", "f_B"))
        target = make_hybrid_qubit(amps, params, labels=("B", "f_B"))
        state = tensor(psi_in, channel)
        saw_nontrivial = False
        for branch in hybrid_bsm(state, ("in", "f_in"), ("A", "f_A")):
            ff = branch.feedforward
            if ff is None or (ff.j, ff.k) == (0, 0):
                continue
            saw_nontrivial = True
            uncorrected = fidelity(branch.post_state, target)
            assert uncorrected < 1 - 1e-3
        assert saw_nontrivial

    def test_phase_covariance(self):
        # phasing b phases the output identically on every success branch
        phase = np.exp(1j * 0.77)
        base = LogicalAmplitudes.normalized(0.6, 0.8)
        phased = LogicalAmplitudes.normalized(0.6, 0.8 * phase)
        metrics = teleport_hybrid(config(Encoding.HYBRID, 1.0, phased))
        for run in metrics.branches:
            if run.status is TeleportStatus.SUCCESS:
                assert run.fidelity >= 1 - 1e-9

    def test_sampled_mode_agrees(self):
        amps = LogicalAmplitudes.normalized(0.6, 0.8)
        trials = 100_000
        metrics = teleport_hybrid(
            config(Encoding.HYBRID, 1.0, amps, trials=trials, seed=99)
        )
        p = hybrid_success_law(1.0)
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(metrics.success_probability - p) < 3 * sigma
        assert metrics.sampled_trials == trials


class TestPolarization:
    @pytest.mark.parametrize("seed", range(20))
    def test_half_success_and_exact_fidelity(self, seed):
        metrics = teleport_polarization(
            config(Encoding.POLARIZATION, 0.0, random_amps(seed))
        )
        assert metrics.success_probability == pytest.approx(0.5, abs=1e-10)
        for run in metrics.branches:
            if run.status is TeleportStatus.SUCCESS:
                assert run.fidelity >= 1 - 1e-10

    def test_h_input_reproduced_on_both_branches(self):
        metrics = teleport_polarization(
            config(Encoding.POLARIZATION, 0.0, LogicalAmplitudes(1.0, 0.0))
        )
        target = make_polarization_qubit(LogicalAmplitudes(1.0, 0.0), pair="B")
        for run in metrics.branches:
            if run.status is TeleportStatus.SUCCESS:
                assert fidelity(run.bob_state.normalized(), target) >= 1 - 1e-10

    def test_correction_table_is_the_unique_fixer(self):
        # brute-force derivation of the frozen table: for each heralded
        # outcome exactly one of {I, X, Z, XZ} restores a generic input
        amps = LogicalAmplitudes.normalized(0.6, 0.8j)
        psi_in = make_polarization_qubit(amps, pair="in")
        channel = make_polarization_bell(BellIndex.PHI_PLUS, pairs=("A", "B"))
        state = tensor(psi_in, channel)
        target = make_polarization_qubit(amps, pair="B")
        candidates = {
            (0, 0): lambda s: s,
            (1, 0): lambda s: pauli_x(s, Encoding.POLARIZATION, "B"),
            (0, 1): lambda s: pauli_z(s, Encoding.POLARIZATION, "B"),
            (1, 1): lambda s: pauli_x(
                pauli_z(s, Encoding.POLARIZATION, "B"), Encoding.POLARIZATION, "B"
            ),
        }
        for branch in run_b_p(state, "in", "A"):
            cls = branch.outcome.classification
            if cls is BPClass.FAIL:
                continue
            fixers = [
                jk
                for jk, op in candidates.items()
                if fidelity(op(branch.post_state).normalized(), target) >= 1 - 1e-10
            ]
            frozen = POLARIZATION_CORRECTIONS[cls]
            assert fixers == [(frozen.j, frozen.k)]


def coherent_failure_oracle(alpha):
    """Exact joint-vacuum weight for the |alpha> input, from the overlap
    algebra: s(1+s)/(1+s^2) with s = exp(-2 alpha^2)."""
    s = math.exp(-2 * alpha * alpha)
    return s * (1 + s) / (1 + s * s)


class TestCoherent:
    def test_ideal_z_all_heralded_branches_exact(self):
        for seed in range(5):
            metrics = teleport_coherent(
                config(Encoding.COHERENT, 1.0, random_amps(seed + 7), ideal_z=True)
            )
            for run in metrics.branches:
                if run.status is TeleportStatus.SUCCESS:
                    assert run.fidelity >= 1 - 1e-9
            assert metrics.success_probability == pytest.approx(
                metrics.bsm_success_probability
            )

    def test_failure_weight_matches_oracle(self):
        metrics = teleport_coherent(
            config(Encoding.COHERENT, 1.0, LogicalAmplitudes(1.0, 0.0), ideal_z=True)
        )
        p_fail = sum(
            r.probability for r in metrics.branches
            if r.status is TeleportStatus.FAILURE
        )
        assert p_fail == pytest.approx(coherent_failure_oracle(1.0), abs=1e-10)

    def test_z_gap_strict_without_ideal_z(self):
        metrics = teleport_coherent(
            config(Encoding.COHERENT, 1.0,
                   LogicalAmplitudes.normalized(0.6, 0.8), ideal_z=False)
        )
        assert metrics.success_probability < metrics.bsm_success_probability - 1e-6
        incomplete = [
            r for r in metrics.branches
            if r.status is TeleportStatus.CORRECTION_INCOMPLETE
        ]
        assert incomplete
        for run in incomplete:
            assert run.feedforward.k == 1
            assert run.fidelity is None

    def test_correction_table_is_the_unique_fixer(self):
        amps = LogicalAmplitudes.normalized(0.6, 0.8)
        params = EncodingParams(Encoding.COHERENT, 1.0, POLICY)
        psi_in = make_coherent_qubit(amps, params, label="f_in")
        channel = make_coherent_bell(BellIndex.PHI_PLUS, params, labels=("f_A", "f_B"))
        state = tensor(psi_in, channel)
        target = make_coherent_qubit(amps, params, label="f_B")
        candidates = {
            (0, 0): lambda s: s,
            (1, 0): lambda s: pauli_x(s, Encoding.COHERENT, "f_B"),
            (0, 1): lambda s: pauli_z(s, Encoding.COHERENT, "f_B",
                                      ideal=True, alpha=1.0),
            (1, 1): lambda s: pauli_z(
                pauli_x(s, Encoding.COHERENT, "f_B"), Encoding.COHERENT, "f_B",
                ideal=True, alpha=1.0,
            ),
        }
        for branch in run_b_alpha(state, "f_in", "f_A"):
            cls = branch.outcome.classification
            if cls is BAlphaClass.FAIL:
                continue
            fixers = [
                jk
                for jk, op in candidates.items()
                if fidelity(op(branch.post_state).normalized(), target) >= 1 - 1e-9
            ]
            frozen = COHERENT_CORRECTIONS[cls]
            assert fixers == [(frozen.j, frozen.k)]


class TestSweep:
    def test_hybrid_grid_tracks_law(self):
        points = sweep_alpha(
            Encoding.HYBRID, [0.5, 1.0, 1.4, 2.0],
            LogicalAmplitudes.normalized(0.6, 0.8), policy=POLICY,
        )
        for pt in points:
            assert pt.abs_dev < 1e-6
        probs = [pt.metrics.success_probability for pt in points]
        assert all(b > a for a, b in zip(probs, probs[1:]))  # monotone in alpha

    def test_polarization_grid_constant_half(self):
        points = sweep_alpha(
            Encoding.POLARIZATION, [0.5, 1.0, 1.5],
            LogicalAmplitudes.normalized(0.6, 0.8), policy=POLICY,
        )
        for pt in points:
            assert pt.metrics.success_probability == pytest.approx(0.5, abs=1e-10)
            assert pt.analytic == 0.5

    def test_coherent_grid_matches_completion_law(self):
        points = sweep_alpha(
            Encoding.COHERENT, [0.7, 1.0, 1.3],
            LogicalAmplitudes.normalized(0.6, 0.8), policy=POLICY,
        )
        for pt in points:
            assert pt.abs_dev < 1e-9

    def test_bad_grids_rejected(self):
        amps = LogicalAmplitudes.normalized(0.6, 0.8)
        with pytest.raises(ValueError):
            sweep_alpha(Encoding.HYBRID, [], amps)
        with pytest.raises(ValueError):
            sweep_alpha(Encoding.HYBRID, [1.0, 0.5], amps)

    def test_dispatch(self):
        metrics = teleport(config(Encoding.POLARIZATION, 0.0,
                                  LogicalAmplitudes(1.0, 0.0)))
        assert metrics.success_probability == pytest.approx(0.5, abs=1e-10)

    def test_runs_carry_raw_outcomes(self):
        amps = LogicalAmplitudes.normalized(0.6, 0.8)
        hybrid = teleport_hybrid(config(Encoding.HYBRID, 1.0, amps))
        assert all(r.b_alpha is not None and r.b_p is not None
                   for r in hybrid.branches)
        pol = teleport_polarization(config(Encoding.POLARIZATION, 0.0, amps))
        assert all(r.b_p is not None and r.b_alpha is None
                   for r in pol.branches)
        coh = teleport_coherent(config(Encoding.COHERENT, 1.0, amps,
                                       ideal_z=True))
        assert all(r.b_alpha is not None and r.b_p is None
                   for r in coh.branches)
