import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phaselab import (
    ParameterError,
    SpectralField,
    make_grid,
    random_field,
    read_field_csv,
    sobolev_norm,
    synthesize,
    write_field_csv,
)


def one_mode(grid, xi, c):
    coeffs = np.zeros(grid.num_modes, dtype=complex)
    hits = np.flatnonzero(np.all(grid.modes == np.atleast_1d(xi), axis=1))
    assert hits.size == 1
    coeffs[hits[0]] = c
    return SpectralField(grid, coeffs)


class TestMakeGrid:
    def test_three_point_lattice(self):
        g = make_grid(1, 1, 1)
        assert g.num_modes == 3
        assert g.weight == 1.0
        np.testing.assert_array_equal(g.modes.ravel(), [-1.0, 0.0, 1.0])

    def test_3x3_lattice(self):
        g = make_grid(2, 1, 1)
        assert g.num_modes == 9
        assert g.weight == 1.0

    def test_fine_lattice_count(self):
        g = make_grid(1, 10, 0.25)
        assert g.num_modes == 81
        assert g.weight == 0.25

    def test_symmetric_and_duplicate_free(self):
        g = make_grid(2, 2, 0.5)
        as_tuples = {tuple(m) for m in g.modes}
        assert len(as_tuples) == g.num_modes
        for m in g.modes:
            assert tuple(-m) in as_tuples

    def test_lexicographic_order(self):
        g = make_grid(2, 1, 1)
        rows = [tuple(m) for m in g.modes]
        assert rows == sorted(rows)

    @pytest.mark.parametrize(
        "args", [(0, 1, 1), (4, 1, 1), (1, -1, 1), (1, 1, 0), (1, 1, 2), (1, 0, 0.5)]
    )
    def test_invalid_parameters(self, args):
        with pytest.raises(ParameterError):
            make_grid(*args)


class TestSobolevNorm:
    def test_zero_mode_any_s(self):
        g = make_grid(1, 1, 1)
        f = one_mode(g, [0.0], 3.0 - 4.0j)
        for s in (0.0, 0.5, 1.0, 2.0):
            assert sobolev_norm(f, s) == pytest.approx(5.0, rel=1e-15)

    def test_weight_at_radius_sqrt3(self):
        # |xi|^2 = 3 with unit coefficient and s=1 gives (1+3)^(1/2) = 2
        g = make_grid(3, 1, 1)
        f = one_mode(g, [1.0, 1.0, 1.0], 1.0)
        assert sobolev_norm(f, 1.0) == pytest.approx(2.0, rel=1e-15)

    def test_gaussian_profile_matches_refined_quadrature(self):
        # oracle: the same weighted sum on a 10x finer lattice
        dxi = 2.0**-6
        g = make_grid(1, 8, dxi)
        f = SpectralField(g, np.exp(-g.modes[:, 0] ** 2))
        value = sobolev_norm(f, 0.5)

        g10 = make_grid(1, 8, dxi / 10)
        xi = g10.modes[:, 0]
        oracle = math.sqrt(
            math.fsum((1 + xi**2) ** 0.5 * np.exp(-2 * xi**2)) * g10.weight
        )
        assert abs(value - oracle) <= 1e-6 * oracle

    def test_plancherel_is_the_fixed_order_reduction(self):
        rng = np.random.default_rng(11)
        g = make_grid(1, 4, 0.5)
        f = random_field(g, rng)
        c = f.coefficients
        expected = math.sqrt(
            math.fsum((c.real * c.real + c.imag * c.imag) * (1.0 + g.radii**2) ** 0.0)
            * g.weight
        )
        assert sobolev_norm(f, 0.0) == expected  # bitwise

    def test_zero_iff_zero_field(self):
        g = make_grid(1, 2, 1)
        assert sobolev_norm(SpectralField(g, np.zeros(5)), 0.7) == 0.0
        f = one_mode(g, [2.0], 1e-30)
        assert sobolev_norm(f, 0.7) > 0.0

    @settings(max_examples=60, deadline=None)
    @given(
        values=st.lists(
            st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
            min_size=5,
            max_size=5,
        ),
        s_pair=st.tuples(st.floats(-2, 3), st.floats(-2, 3)),
    )
    def test_monotone_in_s(self, values, s_pair):
        g = make_grid(1, 2, 1)
        f = SpectralField(g, np.asarray(values))
        s1, s2 = min(s_pair), max(s_pair)
        assert sobolev_norm(f, s1) <= sobolev_norm(f, s2) * (1 + 1e-12)


class TestSynthesize:
    def test_single_mode_at_origin(self):
        g = make_grid(1, 3, 1)
        f = one_mode(g, [2.0], 1.5 + 0.5j)
        assert synthesize(f, 0.0) == pytest.approx((1.5 + 0.5j) / (2 * math.pi), rel=1e-15)

    def test_unit_phase(self):
        g = make_grid(1, 1, 1)
        f = one_mode(g, [1.0], 1.0)
        assert synthesize(f, math.pi) == pytest.approx(-1.0 / (2 * math.pi), abs=1e-15)

    def test_conjugate_pair_is_cosine(self):
        g = make_grid(1, 1, 1)
        coeffs = np.array([0.5, 0.0, 0.5], dtype=complex)
        f = SpectralField(g, coeffs)
        rng = np.random.default_rng(5)
        for x in rng.uniform(-10, 10, size=100):
            want = math.cos(x) / (2 * math.pi)  # direct trigonometric oracle
            got = synthesize(f, x)
            assert abs(got - want) <= 1e-12 * max(1.0, abs(want))

    def test_linear_in_coefficients(self):
        rng = np.random.default_rng(17)
        g = make_grid(1, 4, 0.5)
        f, h = random_field(g, rng), random_field(g, rng)
        alpha, beta = 1.3 - 0.2j, -0.7 + 2.1j
        combo = SpectralField(g, alpha * f.coefficients + beta * h.coefficients)
        for x in rng.uniform(-3, 3, size=10):
            lhs = synthesize(combo, x)
            rhs = alpha * synthesize(f, x) + beta * synthesize(h, x)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))

    def test_zero_field(self):
        g = make_grid(2, 1, 1)
        assert synthesize(SpectralField(g, np.zeros(9)), [0.4, -0.2]) == 0


class TestFieldValidation:
    def test_wrong_length(self):
        g = make_grid(1, 1, 1)
        with pytest.raises(ParameterError):
            SpectralField(g, np.ones(4))

    def test_nonfinite(self):
        g = make_grid(1, 1, 1)
        with pytest.raises(ParameterError):
            SpectralField(g, np.array([1.0, np.nan, 0.0]))

    def test_immutable(self):
        g = make_grid(1, 1, 1)
        f = SpectralField(g, np.ones(3))
        with pytest.raises(ValueError):
            f.coefficients[0] = 2.0


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(23)
        g = make_grid(2, 2, 0.5)
        f = random_field(g, rng)
        path = tmp_path / "field.csv"
        write_field_csv(f, path)
        assert path.with_suffix(".json").exists()
        back = read_field_csv(path)
        np.testing.assert_array_equal(back.grid.modes, g.modes)
        np.testing.assert_array_equal(back.coefficients, f.coefficients)

    def test_header_written(self, tmp_path):
        g = make_grid(2, 1, 1)
        write_field_csv(SpectralField(g, np.zeros(9)), tmp_path / "f.csv")
        first = (tmp_path / "f.csv").read_text().splitlines()[0]
        assert first == "xi_1,xi_2,re,im"

    def test_missing_sidecar(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("xi_1,re,im\n0.0,1.0,0.0\n")
        with pytest.raises(ParameterError):
            read_field_csv(p)
