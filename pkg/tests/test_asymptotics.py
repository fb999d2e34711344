import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from rbfcka.alignment import cka
from rbfcka.asymptotics import (
    DEFAULT_GRID,
    SweepConfig,
    convergence_onset,
    eccentricity,
    predicted_asymptote,
    sweep,
    tail_slope,
)
from rbfcka.errors import DataError, DegenerateRepresentation, InsufficientTail, ZeroLinearCKA
from rbfcka.kernels import KernelSpec, gram
from rbfcka.synth import SynthSpec, generate_pair


def dependent_pair(seed, n=100, d=10, noise=0.5):
    r = np.random.default_rng(seed)
    x = r.standard_normal((n, d))
    return x, x @ r.standard_normal((d, d)) + noise * r.standard_normal((n, d))


class TestEccentricity:
    def test_regular_simplex(self):
        g = eccentricity(np.eye(5), np.eye(5))
        assert g.rho == 1.0 and g.diam_x == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_simplex_both(self):
        assert eccentricity(np.eye(6), 3.0 * np.eye(6)).rho == 1.0

    def test_collinear(self):
        x = np.array([[0.0], [1.0], [10.0]])
        g = eccentricity(x, np.eye(3))
        assert g.diam_x == 10.0 and g.median_x == 9.0
        assert g.rho_x == pytest.approx(10 / 9, rel=1e-15)
        assert g.rho == g.rho_x

    def test_high_dimensional_concentration(self, rng):
        x, y = rng.standard_normal((60, 512)), rng.standard_normal((60, 512))
        assert eccentricity(x, y).rho < 2

    def test_degenerate(self, rng):
        with pytest.raises(DegenerateRepresentation):
            eccentricity(np.ones((5, 2)), rng.standard_normal((5, 2)))

    def test_diagonal_inclusive_median_raises_rho(self, rng):
        x, y = rng.standard_normal((9, 3)), rng.standard_normal((9, 3))
        assert eccentricity(x, y, True).rho >= eccentricity(x, y).rho

    @settings(max_examples=50, deadline=None)
    @given(st.integers(3, 15), st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_rho_at_least_one(self, n, d, seed):
        r = np.random.default_rng(seed)
        x, y = r.standard_normal((n, d)), r.standard_normal((n, d))
        g = eccentricity(x, y)
        assert g.rho >= 1.0
        dist = oracles.distances(x.tolist())
        assert g.rho_x == pytest.approx(
            max(max(row) for row in dist) / oracles.off_diagonal_median(dist), rel=1e-12
        )


class TestPredictedAsymptote:
    @pytest.mark.parametrize("log2_sigma, expected", [(8, -20.0), (6, -16.0), (7, -18.0)])
    def test_substitution(self, log2_sigma, expected):
        assert predicted_asymptote(2.0**-20, log2_sigma) == expected

    def test_custom_anchor(self):
        assert predicted_asymptote(2.0**-10, 3, anchor=5) == -6.0


class TestTailSlope:
    def test_exact_minus_two(self):
        curve = [(s, 3.0 - 2.0 * s) for s in DEFAULT_GRID]
        assert tail_slope(curve) == pytest.approx(-2.0, abs=1e-12)

    def test_exact_minus_one(self):
        curve = [(s, -1.0 * s + 0.3) for s in DEFAULT_GRID]
        assert tail_slope(curve) == pytest.approx(-1.0, abs=1e-12)

    def test_uses_last_finite_points(self):
        curve = [(s, 5.0 * s) for s in range(5)] + [(s, -2.0 * s) for s in range(5, 9)] + [(9, None)]
        assert tail_slope(curve) == pytest.approx(-2.0, abs=1e-12)

    def test_matches_ols_oracle(self, rng):
        ys = rng.standard_normal(6).tolist()
        curve = list(zip(range(6), ys))
        assert tail_slope(curve, 5) == pytest.approx(oracles.ols_slope(list(range(1, 6)), ys[1:]), rel=1e-12)

    def test_insufficient(self):
        with pytest.raises(InsufficientTail):
            tail_slope([(0, 1.0), (1, None), (2, 0.5)], 4)


class TestConvergenceOnset:
    def test_on_asymptote_everywhere(self):
        r8 = 2.0**-20
        curve = [(s, predicted_asymptote(r8, s)) for s in DEFAULT_GRID]
        assert convergence_onset(curve, r8) == -4.0

    def test_deviation_below_three(self):
        r8 = 2.0**-20
        curve = []
        for s in DEFAULT_GRID:
            dev = 1.0 if s == 2 else (5.0 if s < 2 else 0.2)
            curve.append((s, predicted_asymptote(r8, s) + dev))
        curve[-1] = (8.0, math.log2(r8))
        assert convergence_onset(curve, r8) == 3.0

    def test_anchor_alone_is_not_reached(self):
        # a flat curve matches its own anchor and nothing else
        curve = [(s, -2.0) for s in DEFAULT_GRID]
        assert convergence_onset(curve, 2.0**-2) is None

    def test_floor_points_count_as_tracking(self):
        curve = [(s, None) for s in DEFAULT_GRID]
        assert convergence_onset(curve, None) == -4.0

    def test_threshold_is_strict(self):
        r8 = 2.0**-20
        curve = [(s, predicted_asymptote(r8, s) + (0.25 if s == 7 else 0.0)) for s in DEFAULT_GRID]
        assert convergence_onset(curve, r8, 0.25) == 8.0 or convergence_onset(curve, r8, 0.25) is None
        assert convergence_onset(curve, r8, 0.5) == -4.0

    @pytest.mark.parametrize("threshold", [1.0, 0.5, 0.25, 0.1])
    def test_larger_threshold_never_later(self, threshold):
        x, y = dependent_pair(3)
        curve = sweep(x, y).curve()
        anchor = 2.0 ** curve[-1][1]
        loose = convergence_onset(curve, anchor, threshold)
        tight = convergence_onset(curve, anchor, threshold / 2)
        if tight is not None:
            assert loose is not None and loose <= tight


class TestSweepConfig:
    def test_defaults(self):
        cfg = SweepConfig()
        assert cfg.log2_sigmas == tuple(float(p) for p in range(-4, 9))
        assert cfg.threshold == 0.25 and cfg.centering.value == "column"

    def test_grid_must_increase(self):
        with pytest.raises(DataError):
            SweepConfig(log2_sigmas=(0, 1, 1, 2))

    def test_grid_min_length(self):
        with pytest.raises(DataError):
            SweepConfig(log2_sigmas=(0, 1, 2))


class TestSweep:
    def test_identical_representations(self, rng):
        x = rng.standard_normal((30, 4))
        res = sweep(x, x)
        assert res.cka_linear == pytest.approx(1.0, abs=1e-12)
        for p in res.points:
            assert p.cka_gaussian == pytest.approx(1.0, abs=1e-12)
            assert p.below_floor and p.log_rel_diff is None
        assert res.onset_log2_sigma == -4.0
        assert res.tail_slope is None

    def test_two_point_pair_centered_is_flat(self, two_point_pair):
        # two points span a one-dimensional centered feature space, so every
        # centered CKA of the pair is 1
        res = sweep(*two_point_pair)
        assert res.cka_linear == pytest.approx(1.0, abs=1e-15)
        assert all(p.below_floor for p in res.points)
        assert res.onset_log2_sigma == -4.0

    @pytest.mark.xfail(strict=True, reason="N = 2 centered CKA is identically 1; there is no residual to decay")
    def test_two_point_pair_centered_slope_minus_two(self, two_point_pair):
        res = sweep(*two_point_pair)
        assert res.tail_slope == pytest.approx(-2.0, abs=0.1)

    def test_two_point_pair_uncentered(self, two_point_pair):
        res = sweep(*two_point_pair, SweepConfig(centering="none"))
        assert res.cka_linear == pytest.approx(3 / math.sqrt(14), abs=1e-12)
        assert res.tail_slope >= -0.1
        assert res.onset_log2_sigma is None
        for p in res.points:
            assert p.cka_gaussian == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_eccentricity_bound_on_dependent_pair(self, seed):
        x, y = dependent_pair(seed)
        rho = eccentricity(x, y).rho
        res = sweep(x, y)
        for p in res.points:
            if 2.0**p.log2_sigma > rho:
                assert p.rel_diff < 0.01

    @pytest.mark.parametrize("seed", range(3))
    def test_tail_slope_random_pair(self, seed):
        x, y = dependent_pair(seed)
        assert -2.1 <= sweep(x, y).tail_slope <= -1.9

    def test_matches_direct_cka(self, rng):
        x, y = rng.standard_normal((20, 3)), rng.standard_normal((20, 2))
        res = sweep(x, y, SweepConfig(log2_sigmas=(-1, 0, 1, 2)))
        for p in res.points:
            s = 2.0**p.log2_sigma
            direct = cka(gram(x, KernelSpec.gaussian(s)), gram(y, KernelSpec.gaussian(s))).value
            assert p.cka_gaussian == direct
        lin = cka(gram(x, KernelSpec.linear()), gram(y, KernelSpec.linear())).value
        assert res.cka_linear == lin

    def test_fixed_kernel_arrangement(self):
        x, y = dependent_pair(11)
        res = sweep(x, y, SweepConfig(fixed_kernel=KernelSpec.linear()))
        base = cka(gram(x, KernelSpec.linear()), gram(y, KernelSpec.linear())).value
        assert res.cka_linear == base
        assert -2.1 <= res.tail_slope <= -1.9

    def test_fixed_euclidean_baseline_is_negative(self):
        # squared distances flip the sign of linear CKA, so the baseline is
        # negative and the relative difference is refused
        x, y = dependent_pair(11)
        with pytest.raises(ZeroLinearCKA):
            sweep(x, y, SweepConfig(fixed_kernel=KernelSpec.euclidean()))

    def test_mixed_bandwidths(self):
        x, y = dependent_pair(5)
        res = sweep(x, y, SweepConfig(bandwidth_ratio=4.0))
        assert -2.2 <= res.tail_slope <= -1.8
        tail = [p.rel_diff for p in res.points][-5:]
        for a, b in zip(tail, tail[1:]):
            assert a / b >= 3.5

    def test_zero_linear_cka(self):
        x = np.array([[1.0], [-1.0], [1.0], [-1.0]])
        y = np.array([[1.0], [1.0], [-1.0], [-1.0]])
        with pytest.raises(ZeroLinearCKA):
            sweep(x, y)

    def test_row_mismatch(self, rng):
        with pytest.raises(DataError):
            sweep(rng.standard_normal((5, 2)), rng.standard_normal((6, 2)))

    def test_workers_do_not_change_results(self):
        x, y = dependent_pair(2)
        assert sweep(x, y, workers=4).points == sweep(x, y).points

    @pytest.mark.parametrize("mode", ["row", "double"])
    def test_other_centerings_converge(self, mode):
        x, y = dependent_pair(8)
        assert -2.1 <= sweep(x, y, SweepConfig(centering=mode)).tail_slope <= -1.9

    def test_heuristic_bound(self):
        for seed in range(3):
            x, y = dependent_pair(seed, n=60, d=4)
            rho = eccentricity(x, y).rho
            for p in sweep(x, y).points:
                sigma = 2.0**p.log2_sigma
                if sigma >= 4 * rho:
                    assert p.rel_diff <= (rho / sigma) ** 2

    def test_outliers_delay_onset(self):
        for seed in range(3):
            base = SynthSpec(seed=seed, n=120)
            plain = sweep(*generate_pair(base))
            ball = sweep(*generate_pair(SynthSpec(seed=seed, n=120, outlier_count=8)))
            assert ball.onset_log2_sigma is not None
            assert plain.onset_log2_sigma is not None
            assert ball.onset_log2_sigma >= plain.onset_log2_sigma
