import math

import numpy as np
import pytest
from scipy.integrate import quad

from alphaeuler import (
    AlphaParam,
    BoundParams,
    Grid,
    ModulusEstimate,
    besov_modulus_fit,
    disc_patch,
    flow_rate_bound,
    gamma0,
    max_admissible_alpha,
    osgood_bound,
    sample,
    shear,
    to_physical,
    to_spectral,
    velocity_rate_K,
    vorticity_rate_bound,
)
from alphaeuler.bounds import osgood_M

# frozen against 50-digit arithmetic (mpmath) on the closed forms
K_001_T1 = 1.6176565479800037
ADMISSIBLE_T01 = 65.659776862226637
FLOW_BOUND_001 = 1.3011400786205628
VORT_BOUND_EXAMPLE = 0.9259238636929719


class TestGamma0:
    def test_matching_data_alpha_zero(self):
        g = Grid(16)
        q = shear(g)
        assert gamma0(q, q, AlphaParam(0.0)) == pytest.approx(0.0, abs=1e-14)

    def test_single_mode_value(self):
        # q = omega = cos x1, alpha = 1: both terms equal pi sqrt(2)/2
        g = Grid(16)
        q = shear(g)
        val = gamma0(q, q, AlphaParam(1.0))
        assert val == pytest.approx(np.pi * np.sqrt(2), rel=1e-12)

    def test_vanishes_monotonically(self):
        g = Grid(32)
        q = to_spectral(sample(g, lambda x1, x2: np.cos(x1) + 0.5 * np.cos(3 * x2)))
        vals = [gamma0(q, q, AlphaParam(2.0**-k)) for k in range(0, 14)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-3 * vals[0]


class TestVelocityRateK:
    def test_t_zero_collapses(self):
        p = BoundParams(c1=1.0, c2=1.0, c=1.0, gamma0=0.0, horizon=1.0)
        assert velocity_rate_K(AlphaParam(0.04), 0.0, p) == pytest.approx(0.4, rel=1e-12)

    def test_frozen_value(self):
        p = BoundParams(horizon=1.0)
        assert velocity_rate_K(AlphaParam(0.01), 1.0, p) == pytest.approx(
            K_001_T1, rel=1e-12
        )

    def test_alpha_zero_gives_zero(self):
        p = BoundParams(gamma0=0.0, horizon=1.0)
        for t in (0.0, 0.3, 1.0):
            assert velocity_rate_K(AlphaParam(0.0), t, p) == 0.0

    def test_outside_horizon_rejected(self):
        with pytest.raises(ValueError):
            velocity_rate_K(AlphaParam(0.1), 2.0, BoundParams(horizon=1.0))

    def test_monotone_in_alpha_t_gamma0(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            c1, c2, c = rng.uniform(0.1, 3.0, size=3)
            horizon = rng.uniform(0.2, 2.0)
            base = BoundParams(c1=c1, c2=c2, c=c, gamma0=rng.uniform(0.0, 0.4), horizon=horizon)
            a_lo, a_hi = np.sort(rng.uniform(0.0, 0.3, size=2))
            t_lo, t_hi = np.sort(rng.uniform(0.0, horizon, size=2))
            g_lo, g_hi = np.sort(rng.uniform(0.0, 0.4, size=2))
            t = rng.uniform(0.0, horizon)
            a = rng.uniform(0.0, 0.3)
            assert velocity_rate_K(AlphaParam(a_lo), t, base) <= velocity_rate_K(
                AlphaParam(a_hi), t, base
            ) + 1e-14
            if base.c1 * math.sqrt(a) * horizon + base.gamma0 < 1.0:
                assert velocity_rate_K(AlphaParam(a), t_lo, base) <= velocity_rate_K(
                    AlphaParam(a), t_hi, base
                ) + 1e-14
            lo = BoundParams(c1=c1, c2=c2, c=c, gamma0=g_lo, horizon=horizon)
            hi = BoundParams(c1=c1, c2=c2, c=c, gamma0=g_hi, horizon=horizon)
            assert velocity_rate_K(AlphaParam(a), t, lo) <= velocity_rate_K(
                AlphaParam(a), t, hi
            ) + 1e-14


class TestMaxAdmissibleAlpha:
    def test_frozen_value(self):
        p = BoundParams(c1=1.0, c2=1.0, gamma0=0.0, horizon=0.1, alpha_bar=1e9)
        assert max_admissible_alpha(p) == pytest.approx(ADMISSIBLE_T01, rel=1e-12)

    def test_caps_at_alpha_bar(self):
        p = BoundParams(c1=1.0, c2=1.0, gamma0=0.0, horizon=0.1, alpha_bar=0.5)
        assert max_admissible_alpha(p) == 0.5

    def test_none_when_gamma0_large(self):
        p = BoundParams(c2=1.0, gamma0=1.0, horizon=1.0)
        assert max_admissible_alpha(p) is None

    def test_none_at_long_horizon(self):
        p = BoundParams(gamma0=0.01, horizon=50.0)
        assert max_admissible_alpha(p) is None

    def test_zero_horizon_rejected(self):
        with pytest.raises(ValueError):
            BoundParams(horizon=0.0)

    def test_equality_when_plugged_back(self):
        for horizon in (0.1, 0.5, 1.0):
            p = BoundParams(c1=1.3, c2=0.7, gamma0=0.05, horizon=horizon, alpha_bar=1e12)
            alpha_star = max_admissible_alpha(p)
            if alpha_star is None:
                continue
            lhs = alpha_star * (p.c1 * horizon) ** 2 + p.gamma0
            rhs = math.exp(2.0 * (2.0 - 2.0 * math.exp(p.c2 * horizon)))
            assert lhs == pytest.approx(rhs, rel=1e-12)


class TestOsgood:
    def test_t_zero_returns_eta(self):
        assert osgood_bound(0.3, 1.0, 0.0) == pytest.approx(0.3, rel=1e-14)

    def test_eta_near_one_limit(self):
        val = osgood_bound(1.0 - 1e-13, 2.0, 0.7)
        assert val == pytest.approx(math.exp(2.0 - 2.0 * math.exp(-1.4)), rel=1e-10)

    def test_rejects_eta_at_or_above_one(self):
        for eta in (1.0, 1.5):
            with pytest.raises(ValueError):
                osgood_bound(eta, 1.0, 1.0)

    def test_M_at_exp_minus_two(self):
        val, err = quad(lambda r: 1.0 / (r * (2.0 - math.log(r))), math.exp(-2.0), 1.0)
        assert err < 1e-10
        assert osgood_M(math.exp(-2.0)) == pytest.approx(math.log(2.0), rel=1e-12)
        assert val == pytest.approx(math.log(2.0), abs=1e-8)

    def test_bound_closes_the_comparison_identity(self):
        # M(eta) - M(rho) must equal c2*t when rho is the returned bound
        for eta in (0.05, 0.4, 0.9):
            for t in (0.1, 0.7, 2.0):
                rho = osgood_bound(eta, 1.3, t)
                integral, _ = quad(
                    lambda r: 1.0 / (r * (2.0 - math.log(r))), eta, rho
                )
                assert integral == pytest.approx(1.3 * t, abs=1e-8)


class TestFlowRateBound:
    def test_zero_k(self):
        assert flow_rate_bound(0.0, 1.0, 0.0, 1.0, 1.0) == 0.0

    def test_t_equals_s(self):
        k = 0.3
        val = flow_rate_bound(k, 2.0, 2.0, 1.5, 1.0)
        assert val == pytest.approx(2.0 * k ** math.exp(-1.5), rel=1e-12)

    def test_frozen_value(self):
        assert flow_rate_bound(0.01, 1.0, 0.0, 1.0, 1.0) == pytest.approx(
            FLOW_BOUND_001, rel=1e-12
        )

    def test_backward_rejected(self):
        with pytest.raises(ValueError):
            flow_rate_bound(0.1, 0.0, 1.0, 1.0, 1.0)


class TestVorticityRateBound:
    def test_zero_k(self):
        mod = ModulusEstimate(kind="besov", s=0.5)
        assert vorticity_rate_bound(0.0, mod, 2.0, BoundParams()) == 0.0

    def test_branch_selection_at_T_zero_like(self):
        # for K < 1 and tiny horizon the max picks the smaller exponent
        mod = ModulusEstimate(kind="besov", s=0.5)
        params = BoundParams(c=1.0, m=1.0, horizon=1e-12)
        k = 0.0001
        val = vorticity_rate_bound(k, mod, 2.0, params)
        assert val == pytest.approx(k**0.25, rel=1e-6)

    def test_frozen_value(self):
        mod = ModulusEstimate(kind="besov", s=0.5)
        params = BoundParams(c=1.0, m=2.0, horizon=1.0)
        assert vorticity_rate_bound(0.01, mod, 2.0, params) == pytest.approx(
            VORT_BOUND_EXAMPLE, rel=1e-12
        )

    def test_branches_cross_at_half_inverse_2p(self):
        params = BoundParams(c=1.0, m=1.0, horizon=1e-300)
        for p in (1.5, 2.0, 4.0):
            s = 1.0 / (2.0 * p)
            mod = ModulusEstimate(kind="besov", s=s)
            k = 0.01
            assert mod(k) == pytest.approx(k ** (1.0 / (2.0 * p)), rel=1e-12)
            val = vorticity_rate_bound(k, mod, p, params)
            assert val == pytest.approx(k**s, rel=1e-9)

    def test_p_range_validated(self):
        mod = ModulusEstimate(kind="besov", s=0.5)
        for p in (1.0, math.inf):
            with pytest.raises(ValueError):
                vorticity_rate_bound(0.1, mod, p, BoundParams())


class TestModulusEstimate:
    def test_generic_interpolation(self):
        table = np.array([[0.1, 0.2], [0.2, 0.4], [0.4, 0.5]])
        mod = ModulusEstimate(kind="generic", table=table)
        assert mod(0.15) == pytest.approx(0.3, rel=1e-12)
        assert mod(0.0) == 0.0

    def test_generic_out_of_range(self):
        mod = ModulusEstimate(kind="generic", table=np.array([[0.1, 0.2], [0.2, 0.4]]))
        with pytest.raises(ValueError):
            mod(0.5)

    def test_generic_must_be_monotone(self):
        with pytest.raises(ValueError):
            ModulusEstimate(kind="generic", table=np.array([[0.1, 0.5], [0.2, 0.4]]))

    def test_besov_needs_s(self):
        with pytest.raises(ValueError):
            ModulusEstimate(kind="besov")


class TestBesovFit:
    def test_lipschitz_saturates_near_one(self):
        g = Grid(128)
        f = sample(g, lambda x1, x2: np.cos(x1))
        fit = besov_modulus_fit(f, 2.0)
        assert fit.slope == pytest.approx(1.0, abs=0.05)
        assert fit.s <= 1.0

    def test_disc_patch_half(self):
        g = Grid(128)
        patch = disc_patch((np.pi, np.pi), 1.0, 1.0, g)
        fit = besov_modulus_fit(to_physical(patch), 2.0)
        assert fit.s == pytest.approx(0.5, abs=0.15)

    def test_zero_field_degenerate(self):
        g = Grid(32)
        f = sample(g, lambda x1, x2: np.zeros_like(x1))
        with pytest.raises(ValueError):
            besov_modulus_fit(f, 2.0)

    def test_too_few_shifts(self):
        g = Grid(32)
        f = sample(g, lambda x1, x2: np.cos(x1))
        with pytest.raises(ValueError):
            besov_modulus_fit(f, 2.0, shifts=[(1, 0), (2, 0)])

    def test_table_is_nondecreasing(self):
        g = Grid(64)
        f = sample(g, lambda x1, x2: np.cos(x1) + np.sin(2 * x2))
        fit = besov_modulus_fit(f, 2.0)
        assert np.all(np.diff(fit.table[:, 1]) >= 0)
