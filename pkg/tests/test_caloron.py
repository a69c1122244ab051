"""Sampled connections, curvature, curving, and representation scaling.

Oracles, each independent of the code under test:
  * the abelian preset's curvature in closed form,
    F_01 = amp * 2 pi * cos(2 pi x0) T3, evaluated on the grid directly;
  * the 4th-order stencil's leading error term h^4 f^(5)/30 for the
    winding-gauge law (f = exp(2 pi i theta), so |f^(5)| = (2 pi)^5);
  * su(2) ladder weights and su(3) root values for Dynkin indices, as
    Cartan-eigenvalue square sums normalized by the defining module;
  * trace ratios tr_rho(X^2)/tr(X^2) through the adjoint matrix images.
Convergence tolerances are frozen from two-grid measurements quoted in the
assertions.
"""

import math

import numpy as np
import pytest

from gerbetool.caloron import (
    GaugeLoop,
    LatticeConnection,
    LoopHiggsPair,
    b_field,
    curvature,
    from_caloron,
    higgs_gauge_law_check,
    index_curvature,
    ms_identity_check,
    pontryagin_density,
    rho_scaling_check,
    sample_connection,
    to_caloron,
)
from gerbetool.errors import (
    ArgumentError,
    ConsistencyError,
    DimensionError,
    ValidationError,
)
from gerbetool.grids import GridForm, central_diff4, spectral_theta_derivative
from gerbetool.liealg import Representation, dynkin_index
from gerbetool.presets import (
    connection_preset,
    connection_preset_names,
    constant_gauge,
    winding_gauge,
)

TWO_PI = 2.0 * math.pi
T1 = 1j * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
T3 = 1j * np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def su2_ladder_index(dim):
    """Dynkin index of the spin-(dim-1)/2 module from its Cartan weights."""
    k = dim - 1
    weight_sq = sum((k - 2 * j) ** 2 for j in range(dim))
    fund_sq = 2  # weights +1, -1 of the defining module
    return weight_sq / fund_sq


def su3_adjoint_index():
    """Adjoint index of su(3) from root values on h = diag(1, -1, 0)."""
    roots = [2, 1, -1, -2, -1, 1]  # (e_i - e_j)(h) over i != j
    fund = [1, -1, 0]
    return sum(r * r for r in roots) / sum(w * w for w in fund)


def trace_index(rho, x):
    img = rho.matrix_image(x)
    return np.trace(img @ img).real / np.trace(x @ x).real


class TestPresetCatalog:
    def test_names(self):
        assert connection_preset_names() == [
            "abelian",
            "flat",
            "su2-axial",
            "su2-family",
            "zero",
        ]

    def test_unknown_preset_rejected(self):
        with pytest.raises(ArgumentError, match="unknown connection preset"):
            connection_preset("instanton")


class TestCurvature:
    def test_zero_preset_is_exactly_flat(self):
        cur = curvature(connection_preset("zero", theta_points=8, base_points=8))
        assert cur.max_norm() == 0.0

    @pytest.mark.parametrize("base_points,bound", [(16, 5e-3), (32, 5e-4)])
    def test_abelian_matches_closed_form(self, base_points, bound):
        conn = connection_preset("abelian", theta_points=12, base_points=base_points)
        cur = curvature(conn)
        xs = np.arange(base_points) / base_points
        want = (0.7 * TWO_PI * np.cos(TWO_PI * xs))[None, :, None, None, None, None] * T3
        assert np.abs(cur.base[(0, 1)] - want).max() <= bound
        for key, arr in cur.base.items():
            if key != (0, 1):
                assert np.abs(arr).max() <= 1e-12
        for arr in cur.mixed.values():
            assert np.abs(arr).max() <= 1e-12

    def test_abelian_error_contracts_at_fourth_order(self):
        errs = {}
        for m in (16, 32):
            conn = connection_preset("abelian", theta_points=12, base_points=m)
            xs = np.arange(m) / m
            want = (0.7 * TWO_PI * np.cos(TWO_PI * xs))[None, :, None, None, None, None] * T3
            errs[m] = np.abs(curvature(conn).base[(0, 1)] - want).max()
        assert math.log2(errs[16] / errs[32]) >= 3.5

    def test_flat_preset_contracts_at_fourth_order(self):
        # measured 0.9305 at M=16 and 0.06145 at M=32, order 3.92
        res = {}
        for m in (16, 32):
            conn = connection_preset("flat", theta_points=12, base_points=m)
            res[m] = curvature(conn).max_norm()
        assert res[16] <= 1.0
        assert res[32] <= 0.07
        assert math.log2(res[16] / res[32]) >= 3.5


class TestRebagging:
    def test_round_trip_shares_arrays(self):
        conn = connection_preset("su2-family", theta_points=8, base_points=8)
        back = from_caloron(to_caloron(conn))
        assert back.phi is conn.phi
        assert back.a is conn.a
        assert back.family is conn.family

    def test_resample_needs_a_family(self):
        conn = connection_preset("zero", theta_points=8, base_points=8)
        bare = LatticeConnection(
            conn.n, conn.base_dim, conn.theta_points, conn.base_points, conn.phi, conn.a
        )
        with pytest.raises(ArgumentError, match="analytic family"):
            bare.resample(base_points=16)

    def test_too_few_circle_points_rejected(self):
        with pytest.raises(ValidationError, match="circle points"):
            connection_preset("zero", theta_points=4, base_points=8)

    def test_bad_base_dimension_rejected(self):
        with pytest.raises(DimensionError):
            connection_preset("zero", theta_points=8, base_points=8, base_dim=4)

    def test_mismatched_shapes_rejected(self):
        conn = connection_preset("zero", theta_points=8, base_points=8)
        with pytest.raises(ArgumentError, match="shape"):
            LatticeConnection(2, 3, 8, 8, conn.phi[:4], conn.a)


class TestBField:
    def test_zero_preset(self):
        pair = to_caloron(connection_preset("zero", theta_points=8, base_points=8))
        assert b_field(pair).max_norm() == 0.0

    def test_abelian_preset_has_no_curving(self):
        # no theta dependence and no Higgs, so both integrand terms vanish
        pair = to_caloron(connection_preset("abelian", theta_points=12, base_points=16))
        assert b_field(pair).max_norm() == 0.0

    def test_axial_family_is_structurally_zero(self):
        # T1 and T2 never meet in the pairing, so every term is exactly zero
        pair = to_caloron(connection_preset("su2-axial", theta_points=12, base_points=16))
        assert b_field(pair).max_norm() == 0.0

    def test_generic_family_has_nonzero_curving(self):
        pair = to_caloron(connection_preset("su2-family", theta_points=12, base_points=16))
        assert b_field(pair).max_norm() > 1e-2

    def test_ghost_sampling_rejected(self):
        conn = connection_preset("su2-family", theta_points=8, base_points=8)
        ghosted = sample_connection(conn.family, 3, 8, 8, ghost_margin=2)
        with pytest.raises(ArgumentError, match="periodic"):
            b_field(to_caloron(ghosted))

    def test_complex_integrand_rejected(self):
        # a Hermitian (not anti-Hermitian) component leaks an imaginary part
        p, m = 8, 8
        th = (np.arange(p) / p).reshape(p, 1, 1)
        shape = (p, m, m, 2, 2)
        a = np.zeros((2,) + shape, dtype=complex)
        a[0] = np.broadcast_to(np.sin(TWO_PI * th)[..., None, None] * T1, shape)
        a[1] = np.broadcast_to(
            np.cos(TWO_PI * th)[..., None, None] * np.array([[0, 1], [1, 0]]), shape
        )
        pair = LoopHiggsPair(2, 2, p, m, np.zeros(shape, dtype=complex), a)
        with pytest.raises(ConsistencyError, match="imaginary"):
            b_field(pair)


class TestDensityAndIdentity:
    def test_zero_preset_density_vanishes(self):
        conn = connection_preset("zero", theta_points=8, base_points=8)
        assert pontryagin_density(conn).max_norm() == 0.0

    def test_density_needs_three_dimensions(self):
        conn = connection_preset("zero", theta_points=8, base_points=8, base_dim=2)
        with pytest.raises(DimensionError):
            pontryagin_density(conn)

    def test_identity_on_generic_family(self):
        # measured residual 3.28e-3 at (P=12, M=16), order 3.87 under 2x refinement
        conn = connection_preset("su2-family", theta_points=12, base_points=16)
        res, order = ms_identity_check(conn, refine_factor=2)
        assert res <= 5e-3
        assert order >= 3.5

    def test_identity_on_zero_preset_is_exact(self):
        conn = connection_preset("zero", theta_points=8, base_points=8)
        res, order = ms_identity_check(conn)
        assert res == 0.0
        assert order == math.inf

    def test_identity_needs_periodic_sampling(self):
        conn = connection_preset("su2-family", theta_points=8, base_points=8)
        ghosted = sample_connection(conn.family, 3, 8, 8, ghost_margin=2)
        with pytest.raises(ArgumentError, match="periodic"):
            ms_identity_check(ghosted)


class TestGaugeLaw:
    def test_constant_gauge_routes_agree_exactly(self):
        pair = to_caloron(connection_preset("su2-family", theta_points=12, base_points=12))
        gauge = constant_gauge(12, np.diag([1j, -1j]))
        assert higgs_gauge_law_check(pair, gauge) == 0.0

    def test_winding_gauge_matches_stencil_error_oracle(self):
        # leading stencil error h^4 |f^(5)| / 30 with f = exp(2 pi i theta)
        for p in (12, 24):
            pair = to_caloron(
                connection_preset("su2-family", theta_points=p, base_points=12)
            )
            res = higgs_gauge_law_check(pair, winding_gauge(p))
            pred = TWO_PI**5 * (1.0 / p) ** 4 / 30.0
            assert 0.9 <= res / pred <= 1.05

    def test_winding_gauge_error_contracts_at_fourth_order(self):
        res = {}
        for p in (12, 24):
            pair = to_caloron(
                connection_preset("su2-family", theta_points=p, base_points=12)
            )
            res[p] = higgs_gauge_law_check(pair, winding_gauge(p))
        assert math.log2(res[12] / res[24]) >= 3.5

    def test_mismatched_grid_rejected(self):
        pair = to_caloron(connection_preset("su2-family", theta_points=12, base_points=12))
        with pytest.raises(ArgumentError, match="different grid"):
            higgs_gauge_law_check(pair, winding_gauge(16))

    def test_non_unitary_loop_rejected(self):
        samples = np.stack([2.0 * np.eye(2, dtype=complex)] * 8)
        with pytest.raises(ValidationError, match="non-unitary"):
            GaugeLoop(samples, np.zeros_like(samples))

    def test_fractional_winding_rejected(self):
        with pytest.raises(ArgumentError, match="integer"):
            winding_gauge(12, winding=1.5)


class TestDynkinIndex:
    def test_su2_modules_match_ladder_oracle(self):
        assert Representation.fundamental(2).index == su2_ladder_index(2) == 1
        assert Representation.adjoint(2).index == su2_ladder_index(3) == 4
        assert Representation.trivial(2).index == 0
        assert dynkin_index(2, (4,)) == su2_ladder_index(5) == 20

    def test_larger_fundamentals(self):
        assert Representation.fundamental(3).index == 1
        assert Representation.fundamental(4).index == 1

    def test_su3_adjoint_matches_root_oracle(self):
        assert dynkin_index(3, (2, 1)) == su3_adjoint_index() == 6

    @pytest.mark.parametrize("n", [2, 3])
    def test_adjoint_trace_ratio(self, n):
        x = np.zeros((n, n), dtype=complex)
        x[0, 0], x[1, 1] = 1j, -1j
        got = trace_index(Representation.adjoint(n), x)
        assert abs(got - float(Representation.adjoint(n).index)) <= 1e-12

    def test_adjoint_image_is_a_homomorphism(self):
        rng = np.random.default_rng(3)
        rho = Representation.adjoint(2)
        for _ in range(5):
            c1, c2 = rng.standard_normal(3), rng.standard_normal(3)
            sig = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
            x = 1j * sum(c * s for c, s in zip(c1, sig))
            y = 1j * sum(c * s for c, s in zip(c2, sig))
            lhs = rho.matrix_image(x @ y - y @ x)
            img_x, img_y = rho.matrix_image(x), rho.matrix_image(y)
            assert np.abs(lhs - (img_x @ img_y - img_y @ img_x)).max() <= 1e-12


class TestRhoScaling:
    def test_fundamental_route_is_bitwise_neutral(self):
        pair = to_caloron(connection_preset("su2-family", theta_points=12, base_points=16))
        assert rho_scaling_check(pair, Representation.fundamental(2)) == 0.0

    def test_adjoint_scales_by_its_index(self):
        # measured 8.2e-15; the identity is pointwise in the samples
        pair = to_caloron(connection_preset("su2-family", theta_points=12, base_points=16))
        assert rho_scaling_check(pair, Representation.adjoint(2)) <= 1e-10

    def test_trivial_representation_kills_everything(self):
        pair = to_caloron(connection_preset("su2-family", theta_points=12, base_points=16))
        assert rho_scaling_check(pair, Representation.trivial(2)) == 0.0

    def test_zero_connection(self):
        pair = to_caloron(connection_preset("zero", theta_points=8, base_points=8))
        assert rho_scaling_check(pair, Representation.adjoint(2)) == 0.0


class TestIndexCurvature:
    def test_fundamental_equals_plain_density(self):
        conn = connection_preset("su2-family", theta_points=12, base_points=16)
        diff = index_curvature(conn, Representation.fundamental(2)) - pontryagin_density(conn)
        assert diff.max_norm() == 0.0

    def test_adjoint_is_four_times_fundamental(self):
        # measured 2.7e-15 against a density of max norm 0.84
        conn = connection_preset("su2-family", theta_points=12, base_points=16)
        diff = index_curvature(conn, Representation.adjoint(2)) - 4.0 * pontryagin_density(conn)
        assert diff.max_norm() <= 1e-10

    def test_zero_connection(self):
        conn = connection_preset("zero", theta_points=8, base_points=8)
        assert index_curvature(conn, Representation.adjoint(2)).max_norm() == 0.0


class TestGrids:
    def test_spectral_derivative_exact_on_harmonics(self):
        p = 12
        th = np.arange(p) / p
        for k in (1, 2, 5):
            got = spectral_theta_derivative(np.sin(TWO_PI * k * th))
            want = TWO_PI * k * np.cos(TWO_PI * k * th)
            assert np.abs(got - want).max() <= 1e-11

    def test_central_diff4_is_exact_on_cubics(self):
        m = 16
        xs = np.arange(m, dtype=float)
        # cubic in the index is reproduced exactly up to wraparound cells
        arr = xs**3
        got = central_diff4(arr, 0, 1.0)[3 : m - 3]
        want = (3 * xs**2)[3 : m - 3]
        assert np.abs(got - want).max() <= 1e-9

    def test_double_exterior_derivative_vanishes(self):
        m = 16
        xs = np.arange(m) / m
        g0, g1, g2 = np.meshgrid(xs, xs, xs, indexing="ij")
        comps = {
            (0,): np.sin(TWO_PI * g0) * np.cos(TWO_PI * g1),
            (1,): np.cos(TWO_PI * 2 * g2),
            (2,): np.sin(TWO_PI * (g0 + g2)),
        }
        w = GridForm(1, 3, comps)
        dd = w.exterior_derivative().exterior_derivative()
        assert dd.max_norm() <= 1e-9

    def test_form_validation(self):
        m = 8
        arr = np.zeros((m, m))
        with pytest.raises(ValidationError, match="component keys"):
            GridForm(1, 2, {(0, 1): arr})
        with pytest.raises(ArgumentError, match="degree"):
            GridForm(3, 2, {})
        with pytest.raises(DimensionError):
            GridForm(1, 2, {(0,): arr, (1,): arr}).integrate()

    def test_top_form_integral_is_mean(self):
        m = 8
        vals = np.arange(m * m, dtype=float).reshape(m, m)
        form = GridForm(2, 2, {(0, 1): vals})
        assert form.integrate() == pytest.approx(vals.mean())

    def test_ghost_margin_is_skipped_by_norms(self):
        m, g = 8, 2
        arr = np.zeros((m + 2 * g, m + 2 * g))
        arr[0, 0] = 7.0  # ghost cell, must not count
        form = GridForm(0, 2, {(): arr}, ghost_margin=g)
        assert form.max_norm() == 0.0
