import numpy as np
import pytest
from hypothesis import given, strategies as st

from ceilsim.norms import (
    NormsParams,
    compute_level_norms,
    constant_level_norms,
    effective_r2,
    meso_norm,
)

from conftest import make_company, make_level


def company_with_male_share(share: float, size: int = 10):
    n_men = int(round(size * share))
    levels = []
    for i in range(8):
        is_woman = np.array([False] * n_men + [True] * (size - n_men))
        levels.append(make_level(np.arange(i * size, (i + 1) * size), is_woman, [50.0] * size))
    return make_company(levels)


class TestMesoNorm:
    def test_parity_above_means_no_meso_norm(self):
        assert meso_norm(0.5, 0.7, 0.01) == 0.0

    def test_matching_societal_expectation_mirrors_macro(self):
        assert meso_norm(0.7, 0.7, 0.01) == pytest.approx(0.01)

    def test_women_dominated_goes_negative(self):
        assert meso_norm(0.2, 0.7, 0.01) == pytest.approx(-0.015)


class TestEffectiveR2:
    def test_macro_only(self):
        assert effective_r2(0.0, -123.0, 0.01) == 0.01

    def test_meso_only(self):
        assert effective_r2(1.0, -0.015, 0.01) == pytest.approx(-0.015)

    def test_balanced_cancellation(self):
        assert effective_r2(0.4, -0.015, 0.01) == pytest.approx(0.0, abs=1e-15)

    def test_defensive_clamp(self):
        assert effective_r2(1.0, 5.0, 0.0) == 0.99
        assert effective_r2(1.0, -5.0, 0.0) == -0.99

    @given(
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=-0.4, max_value=0.4),
        st.floats(min_value=-0.4, max_value=0.4),
        st.floats(min_value=-0.1, max_value=0.1),
    )
    def test_affine_in_meso_and_macro(self, w, b_meso, b_macro, delta):
        base = effective_r2(w, b_meso, b_macro)
        assert effective_r2(w, b_meso + delta, b_macro) == pytest.approx(
            base + w * delta, abs=1e-9
        )
        assert effective_r2(w, b_meso, b_macro + delta) == pytest.approx(
            base + (1 - w) * delta, abs=1e-9
        )

    def test_monotone_in_male_share_above(self):
        params = NormsParams(enabled=True, b_macro=0.01, p_m=0.7)
        values = [
            effective_r2(0.6, meso_norm(p, params.p_m, params.b_macro), params.b_macro)
            for p in np.linspace(0.0, 1.0, 11)
        ]
        assert all(a < b for a, b in zip(values, values[1:]))


class TestComputeLevelNorms:
    def test_parity_fixed_point_with_top_level_exception(self):
        # All levels exactly 50/50 at w=1: no bias anywhere below the top;
        # the top level mirrors society and keeps the macro value exactly.
        company = company_with_male_share(0.5)
        norms = compute_level_norms(company, NormsParams(enabled=True), 1.0)
        assert norms.r2[:7] == (0.0,) * 7
        assert norms.r2[7] == 0.01
        assert norms.r2_group[7] == 0.01

    def test_macro_only_ignores_composition(self):
        company = company_with_male_share(0.9)
        norms = compute_level_norms(company, NormsParams(enabled=True), 0.0)
        assert all(v == pytest.approx(0.01) for v in norms.r2)

    def test_women_dominated_reverse_discrimination(self):
        company = company_with_male_share(0.2)
        norms = compute_level_norms(company, NormsParams(enabled=True), 1.0)
        assert all(v == pytest.approx(-0.015) for v in norms.r2[:7])
        assert norms.r2[7] == 0.01

    def test_group_channel_uses_its_own_macro(self):
        company = company_with_male_share(0.7)
        params = NormsParams(enabled=True, b_macro=0.01, b_macro_group=0.02)
        norms = compute_level_norms(company, params, 1.0)
        assert norms.r2[0] == pytest.approx(0.01)
        assert norms.r2_group[0] == pytest.approx(0.02)


def test_constant_level_norms():
    norms = constant_level_norms(0.022, 0.03, 8)
    assert norms.r2 == (0.022,) * 8
    assert norms.r2_group == (0.03,) * 8
