import math

import pytest

from bagsim.bounds import (
    alpha_lower,
    alpha_upper,
    gamma_star,
    lambert_w_minus1,
    ratio_function_f,
    ratio_grid_max,
    thresholds,
    worst_case_ratio,
)

# Reference threshold pairs for delta = 0.1 .. 1.0.
TABLE = {
    0.1: (1.0485, 1.0170),
    0.2: (1.0946, 1.0335),
    0.3: (1.1388, 1.0497),
    0.4: (1.1816, 1.0656),
    0.5: (1.2232, 1.0811),
    0.6: (1.2637, 1.0964),
    0.7: (1.3033, 1.1114),
    0.8: (1.3422, 1.1261),
    0.9: (1.3804, 1.1405),
    1.0: (1.4181, 1.1547),
}


def bisect_w_minus1(x: float) -> float:
    """Independent root finder for w*exp(w) = x on [-700, -1]."""
    lo, hi = -700.0, -1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) > x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestLambertW:
    def test_branch_point(self):
        assert lambert_w_minus1(-math.exp(-1.0)) == -1.0

    def test_known_root(self):
        assert lambert_w_minus1(-2.0 * math.exp(-2.0)) == pytest.approx(
            -2.0, abs=1e-13
        )

    def test_against_bisection(self):
        w = lambert_w_minus1(-0.1)
        assert w == pytest.approx(bisect_w_minus1(-0.1), abs=1e-12)
        assert w == pytest.approx(-3.577152, abs=1e-6)

    def test_residual_over_sweep(self):
        for i in range(1, 500):
            x = -math.exp(-1.0) * i / 500.0
            w = lambert_w_minus1(x)
            assert w <= -1.0
            assert abs(w * math.exp(w) - x) <= 1e-13 * abs(x)

    def test_far_tail(self):
        x = -2.0 * math.exp(-52.0)
        w = lambert_w_minus1(x)
        assert abs(w * math.exp(w) - x) <= 1e-13 * abs(x)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            lambert_w_minus1(0.0)
        with pytest.raises(ValueError):
            lambert_w_minus1(0.5)
        with pytest.raises(ValueError):
            lambert_w_minus1(-0.4)


class TestAlphaUpper:
    @pytest.mark.parametrize("delta", [0.1, 0.5, 1.0])
    def test_reference_values(self, delta):
        assert alpha_upper(delta) == pytest.approx(TABLE[delta][0], abs=5e-5)

    def test_domain(self):
        with pytest.raises(ValueError):
            alpha_upper(0.0)
        with pytest.raises(ValueError):
            alpha_upper(-1.0)

    def test_monotone_and_tends_to_one(self):
        values = [alpha_upper(d / 100.0) for d in range(1, 101)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert 1.0 < alpha_upper(1e-4) < 1.01


class TestAlphaLower:
    @pytest.mark.parametrize("delta", [0.1, 0.9, 1.0])
    def test_reference_values(self, delta):
        assert alpha_lower(delta) == pytest.approx(TABLE[delta][1], abs=5e-5)

    def test_delta_one_closed_form(self):
        assert alpha_lower(1.0) == pytest.approx(2.0 / math.sqrt(3.0), abs=1e-12)

    def test_singular_at_quarter(self):
        with pytest.raises(ValueError):
            alpha_lower(0.25)

    def test_domain(self):
        with pytest.raises(ValueError):
            alpha_lower(0.0)

    def test_ordering_below_upper(self):
        for delta in TABLE:
            assert alpha_lower(delta) < alpha_upper(delta)

    def test_monotone_on_unit_interval(self):
        values = [alpha_lower(d / 50.0) for d in range(1, 51) if d != 50 * 0.25]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestThresholds:
    @pytest.mark.parametrize("delta", sorted(TABLE))
    def test_w_satisfies_defining_equation(self, delta):
        t = thresholds(delta)
        assert t.w > 1.0
        big_w = -2.0 * t.w
        target = -2.0 * math.exp(-delta - 2.0)
        assert abs(big_w * math.exp(big_w) - target) <= 1e-12
        assert t.alpha_upper >= t.alpha_lower >= 1.0


class TestRatioFunction:
    def test_identity_at_gamma_equals_delta(self):
        for delta in (0.2, 0.7, 1.3):
            assert ratio_function_f(delta, delta) == pytest.approx(1.0)

    def test_maximum_hits_lower_threshold(self):
        g0 = gamma_star(0.5)
        assert ratio_function_f(0.5, g0) == pytest.approx(
            alpha_lower(0.5), abs=5e-5
        )

    def test_explicit_value(self):
        assert ratio_function_f(0.5, 0.25) == pytest.approx(14.0 / 13.0, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            ratio_function_f(0.0, 0.1)
        with pytest.raises(ValueError):
            ratio_function_f(0.5, 0.0)


def golden_section_argmax(f, lo, hi, tol=1e-12):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


class TestGammaStar:
    def test_against_golden_section(self):
        g0 = golden_section_argmax(
            lambda g: ratio_function_f(0.5, g), 1e-9, 0.5
        )
        assert gamma_star(0.5) == pytest.approx(g0, abs=1e-7)
        assert gamma_star(0.5) == pytest.approx(0.193713, abs=1e-6)

    def test_closed_form_delta_one(self):
        assert gamma_star(1.0) == pytest.approx(
            (math.sqrt(3.0) - 1.0) / 2.0, abs=1e-14
        )

    @pytest.mark.parametrize("delta", [0.1, 0.3, 0.5, 0.8, 1.0, 2.0])
    def test_is_local_maximum_inside_domain(self, delta):
        g0 = gamma_star(delta)
        assert 0.0 < g0 < delta
        f0 = ratio_function_f(delta, g0)
        assert ratio_function_f(delta, g0 + 1e-4) <= f0
        assert ratio_function_f(delta, g0 - 1e-4) <= f0

    def test_is_argmax_on_grid(self):
        delta = 0.7
        f0 = ratio_function_f(delta, gamma_star(delta))
        for k in range(1, 400):
            assert ratio_function_f(delta, delta * k / 400.0) <= f0 + 1e-12


class TestWorstCaseRatio:
    def test_under_capacity_is_one(self):
        assert worst_case_ratio(0.5, 1.0, 0.5, 0.5) == 1.0
        assert worst_case_ratio(0.5, 1.0, 0.2, 0.3) == 1.0

    def test_others_at_capacity(self):
        for delta in (0.3, 0.5, 1.0):
            expected = (1.0 + delta) * math.log(1.0 + delta) / delta
            assert worst_case_ratio(delta, 1.0, 1.0, delta) == pytest.approx(expected)
            assert expected <= alpha_upper(delta) + 1e-12

    def test_analytic_maximiser_attains_alpha_upper(self):
        for delta in (0.1, 0.5, 1.0):
            t = thresholds(delta)
            r = worst_case_ratio(delta, 1.0, t.w - delta, delta)
            assert r == pytest.approx(t.alpha_upper, abs=1e-9)

    def test_branch_continuity(self):
        left = worst_case_ratio(0.5, 1.0, 1.0 - 1e-9, 0.5)
        right = worst_case_ratio(0.5, 1.0, 1.0 + 1e-9, 0.5)
        assert left == pytest.approx(right, abs=1e-7)

    def test_capacity_scale_invariance(self):
        r1 = worst_case_ratio(0.5, 1.0, 0.9, 0.5)
        r2 = worst_case_ratio(0.5, 3.0, 2.7, 1.5)
        assert r1 == pytest.approx(r2, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            worst_case_ratio(0.5, 1.0, -0.1, 0.5)
        with pytest.raises(ValueError):
            worst_case_ratio(0.5, 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            worst_case_ratio(0.5, 1.0, 1.0, 0.6)  # above delta*b

    def test_grid_never_exceeds_alpha_upper(self):
        for delta in (0.2, 0.6, 1.0):
            gm = ratio_grid_max(delta, n_t=400, n_s=100)
            assert gm <= alpha_upper(delta) + 1e-9
            assert gm == pytest.approx(alpha_upper(delta), abs=1e-3)
