"""Sampled connections on S1 x T^d and their loop-space counterparts.

A connection is stored as matrix samples: the dtheta component (the would-be
Higgs field after the correspondence) and d base components.  The
correspondence maps are componentwise rebags of the same arrays, so the
round trip is exact.  Curvature splits into base-base components
F_ab = d_a A_b - d_b A_a + [A_a, A_b] and mixed components
G_a = dtheta A_a - d_a Phi + [Phi, A_a]; theta-derivatives are spectral,
base derivatives 4th-order central.

The degree-2 curving integrates (1/4 pi^2) (<F, Phi> - 1/2 <A, dtheta A>)
over the circle and its discrete exterior derivative reproduces the
circle-integrated Pontryagin density -(1/8 pi^2) <F~ ^ F~> exactly in the
continuum; the pair of pipelines is the identity checked by
ms_identity_check.  Pairing throughout is <X, Y> = -trace(XY); every
produced form is checked to be real to 1e-10 before the imaginary part is
discarded.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .errors import (
    ArgumentError,
    ConsistencyError,
    DimensionError,
    ValidationError,
)
from .grids import GridForm, central_diff4, spectral_theta_derivative
from .liealg import (
    LieAlgebraSpec,
    Representation,
    dynkin_index,
    inner,
    su_algebra,
    su_basis,
)

FOUR_PI_SQ = 4.0 * math.pi * math.pi


@dataclass(frozen=True)
class AnalyticConnection:
    """Closed-form sampler backing a LatticeConnection, used for resampling.

    phi(theta, xs) and base(theta, xs, axis) take broadcastable coordinate
    arrays and return matrix sample arrays; n is the matrix size.
    """

    n: int
    phi: object
    base: object
    label: str = ""


@dataclass
class LatticeConnection:
    """Connection samples on a uniform grid over S1 x T^d.

    phi has shape (P, M', ..., M', n, n) and a has shape (d, P, M', ..., M', n, n)
    where M' = base_points + 2*ghost_margin.  A nonzero ghost margin means
    the base arrays were sampled from a covering-space formula: edge cells
    are valid samples, not periodic wraps, and derived forms carry the
    margin so that norms and integrals skip stencil-polluted cells.
    """

    n: int
    base_dim: int
    theta_points: int
    base_points: int
    phi: np.ndarray
    a: np.ndarray
    family: AnalyticConnection = None
    ghost_margin: int = 0

    def __post_init__(self):
        if self.theta_points < 8:
            raise ValidationError(f"need at least 8 circle points, got {self.theta_points}")
        if self.base_dim not in (2, 3):
            raise DimensionError(f"base dimension must be 2 or 3, got {self.base_dim}")
        ext = self.base_points + 2 * self.ghost_margin
        want_phi = (self.theta_points,) + (ext,) * self.base_dim + (self.n, self.n)
        self.phi = np.asarray(self.phi, dtype=complex)
        self.a = np.asarray(self.a, dtype=complex)
        if self.phi.shape != want_phi:
            raise ArgumentError(f"phi shape {self.phi.shape}, expected {want_phi}")
        if self.a.shape != (self.base_dim,) + want_phi:
            raise ArgumentError(
                f"base components shape {self.a.shape}, expected {(self.base_dim,) + want_phi}"
            )

    def spacing(self):
        return 1.0 / self.base_points

    def resample(self, theta_points=None, base_points=None):
        if self.family is None:
            raise ArgumentError("connection has no analytic family to resample from")
        return sample_connection(
            self.family,
            self.base_dim,
            theta_points or self.theta_points,
            base_points or self.base_points,
            ghost_margin=self.ghost_margin,
        )


@dataclass
class LoopHiggsPair:
    """The caloron-side data: base gauge field samples and a Higgs field.

    Arrays are shared with the source connection; a(x, axis) at fixed theta
    is the loop-algebra value of the base component, phi the Higgs field.
    """

    n: int
    base_dim: int
    theta_points: int
    base_points: int
    phi: np.ndarray
    a: np.ndarray
    family: AnalyticConnection = None
    ghost_margin: int = 0


def to_caloron(conn):
    """Read the connection as (gauge field, Higgs field); exact rebag."""
    return LoopHiggsPair(
        conn.n,
        conn.base_dim,
        conn.theta_points,
        conn.base_points,
        conn.phi,
        conn.a,
        conn.family,
        conn.ghost_margin,
    )


def from_caloron(pair):
    """Inverse rebag; from_caloron(to_caloron(c)) shares c's arrays."""
    return LatticeConnection(
        pair.n,
        pair.base_dim,
        pair.theta_points,
        pair.base_points,
        pair.phi,
        pair.a,
        pair.family,
        pair.ghost_margin,
    )


def _grid_coords(base_dim, theta_points, base_points, ghost_margin):
    thetas = np.arange(theta_points) / theta_points
    ext = base_points + 2 * ghost_margin
    xs = (np.arange(ext) - ghost_margin) / base_points
    axes = [thetas.reshape((-1,) + (1,) * base_dim)]
    for d in range(base_dim):
        shape = [1] * (base_dim + 1)
        shape[d + 1] = ext
        axes.append(xs.reshape(shape))
    return axes


def sample_connection(family, base_dim, theta_points, base_points, ghost_margin=0):
    """Evaluate an analytic family on the (theta, base) grid."""
    coords = _grid_coords(base_dim, theta_points, base_points, ghost_margin)
    th, xs = coords[0], coords[1:]
    ext = base_points + 2 * ghost_margin
    shape = (theta_points,) + (ext,) * base_dim + (family.n, family.n)
    phi = np.broadcast_to(np.asarray(family.phi(th, xs), dtype=complex), shape).copy()
    comps = [
        np.broadcast_to(np.asarray(family.base(th, xs, axis), dtype=complex), shape).copy()
        for axis in range(base_dim)
    ]
    return LatticeConnection(
        family.n,
        base_dim,
        theta_points,
        base_points,
        phi,
        np.stack(comps),
        family=family,
        ghost_margin=ghost_margin,
    )


def _commutator(x, y):
    return x @ y - y @ x


def _pair_trace(x, y):
    """<X, Y> = -trace(XY), vectorized over leading axes."""
    return -np.einsum("...ij,...ji->...", x, y)


@dataclass
class CurvatureSamples:
    """Curvature components of a sampled connection.

    mixed[a] holds F_{theta a} = dtheta A_a - d_a Phi + [Phi, A_a];
    base[(a, b)] holds F_ab for a < b.
    """

    conn: LatticeConnection
    mixed: dict
    base: dict

    def max_norm(self):
        worst = 0.0
        g = self.conn.ghost_margin
        trim = (slice(None),) + tuple(
            slice(g, -g) if g else slice(None) for _ in range(self.conn.base_dim)
        )
        for arr in itertools.chain(self.mixed.values(), self.base.values()):
            worst = max(worst, float(np.abs(arr[trim]).max()))
        return worst


def curvature(conn):
    """All curvature components by spectral/4th-order differentiation."""
    h = conn.spacing()
    d = conn.base_dim
    d_theta_a = [spectral_theta_derivative(conn.a[x], axis=0) for x in range(d)]
    mixed = {}
    for x in range(d):
        mixed[x] = (
            d_theta_a[x]
            - central_diff4(conn.phi, 1 + x, h)
            + _commutator(conn.phi, conn.a[x])
        )
    base = {}
    for x, y in itertools.combinations(range(d), 2):
        base[(x, y)] = (
            central_diff4(conn.a[y], 1 + x, h)
            - central_diff4(conn.a[x], 1 + y, h)
            + _commutator(conn.a[x], conn.a[y])
        )
    return CurvatureSamples(conn, mixed, base)


def _realize(arrays, where):
    """Check an array (or dict of arrays) is real to 1e-10 and strip imag."""
    if isinstance(arrays, dict):
        return {k: _realize(v, where) for k, v in arrays.items()}
    worst = float(np.abs(arrays.imag).max()) if arrays.size else 0.0
    if worst > 1e-10:
        raise ConsistencyError(
            f"{where}: imaginary residue {worst:.3e} exceeds 1e-10"
        )
    return arrays.real


def b_field(pair):
    """Degree-2 curving on the base from the loop-space data.

    B_ab = -(1/4 pi^2) Int_0^1 [ 1/2 (<A_a, A_b'> - <A_b, A_a'>)
                                 - <F_ab, Phi> ] dtheta,
    with A' the circle derivative; the circle integral is the grid mean
    (trapezoid rule on a periodic grid).  Requires periodic sampling.
    """
    if pair.ghost_margin:
        raise ArgumentError("curving needs a periodic (ghost-free) sampling")
    conn = from_caloron(pair)
    h = conn.spacing()
    d = conn.base_dim
    a_prime = [spectral_theta_derivative(conn.a[x], axis=0) for x in range(d)]
    comps = {}
    for x, y in itertools.combinations(range(d), 2):
        f_xy = (
            central_diff4(conn.a[y], 1 + x, h)
            - central_diff4(conn.a[x], 1 + y, h)
            + _commutator(conn.a[x], conn.a[y])
        )
        integrand = 0.5 * (
            _pair_trace(conn.a[x], a_prime[y]) - _pair_trace(conn.a[y], a_prime[x])
        ) - _pair_trace(f_xy, conn.phi)
        comps[(x, y)] = -np.mean(integrand, axis=0) / FOUR_PI_SQ
    comps = _realize(comps, "b_field")
    return GridForm(2, d, comps, conn.ghost_margin)


def _density_from_components(mixed, base):
    """Circle-mean density -(1/4 pi^2) Int <F ^ G> dtheta from component arrays."""
    total = (
        _pair_trace(base[(0, 1)], mixed[2])
        - _pair_trace(base[(0, 2)], mixed[1])
        + _pair_trace(base[(1, 2)], mixed[0])
    )
    return -np.mean(total, axis=0) / FOUR_PI_SQ


def pontryagin_density(conn, rho=None):
    """Circle-integrated first-Pontryagin-type 3-form of the connection.

    With rho omitted (or fundamental) this is -(1/8 pi^2) Int <F~ ^ F~>;
    with a representation it is the same density of the pushed-forward
    curvature with the trace in the representation space, i.e.
    (1/8 pi^2) Int tr_rho(F^rho ^ F^rho).
    """
    if conn.base_dim != 3:
        raise DimensionError("the density is a 3-form; need a 3-dimensional base")
    curv = curvature(conn)
    mixed, base = curv.mixed, curv.base
    if rho is not None and not rho.is_fundamental():
        mixed = {k: rho.matrix_image(v) for k, v in mixed.items()}
        base = {k: rho.matrix_image(v) for k, v in base.items()}
    comp = _density_from_components(mixed, base)
    comp = _realize(comp, "pontryagin_density")
    return GridForm(3, 3, {(0, 1, 2): comp}, conn.ghost_margin)


def index_curvature(conn, rho):
    """Representation-space curvature density (Pontryagin side pushed through rho)."""
    return pontryagin_density(conn, rho=rho)


def ms_identity_check(conn, refine_factor=2):
    """Pointwise residual of [circle-integrated Pontryagin density] = d(curving).

    Returns (residual at the input resolution, measured convergence order
    between base grids M and refine_factor*M).  The identity is exact in
    the continuum, so the residual is pure discretization error and the
    order reflects the base stencils.  Needs an analytic family to resample.
    """
    if conn.base_dim != 3:
        raise DimensionError("the identity compares 3-forms; need a 3-dimensional base")
    if conn.ghost_margin:
        raise ArgumentError("identity check needs a periodic sampling")

    def residual(c):
        lhs = pontryagin_density(c)
        rhs = b_field(to_caloron(c)).exterior_derivative()
        return (lhs - rhs).max_norm()

    res_coarse = residual(conn)
    fine = conn.resample(base_points=refine_factor * conn.base_points)
    res_fine = residual(fine)
    if res_fine <= 1e-13:
        order = math.inf
    else:
        order = math.log(res_coarse / res_fine, refine_factor)
    return res_coarse, order


@dataclass(frozen=True)
class GaugeLoop:
    """Loop-group element sampled on the circle grid with its exact derivative.

    samples[k] = gamma(k / P); derivative[k] = gamma'(k / P) from the
    closed form, used as the reference route in the transformation-law check.
    """

    samples: np.ndarray
    derivative: np.ndarray
    tolerance: float = 1e-10

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        d = np.asarray(self.derivative, dtype=complex)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "derivative", d)
        if s.ndim != 3 or s.shape[1] != s.shape[2] or s.shape != d.shape:
            raise ArgumentError("gauge loop needs matching (P, n, n) sample arrays")
        eye = np.eye(s.shape[1])
        worst = float(np.abs(np.swapaxes(s.conj(), 1, 2) @ s - eye).max())
        if worst > self.tolerance:
            raise ValidationError(f"gauge samples non-unitary by {worst:.3e}")


def higgs_gauge_law_check(pair, gauge):
    """Residual between the two routes to the transformed Higgs field.

    Route one transforms the underlying connection, differentiating the
    gauge samples with the 4th-order circle stencil, and re-extracts the
    Higgs field; route two applies conj(gamma) Phi gamma + gamma^-1 gamma'
    with the loop's closed-form derivative.  The gap is the stencil error,
    contracting at 4th order in the circle spacing.
    """
    p = pair.theta_points
    if gauge.samples.shape[0] != p or gauge.samples.shape[1] != pair.n:
        raise ArgumentError("gauge loop sampled on a different grid than the pair")
    extra = (1,) * pair.base_dim
    g = gauge.samples.reshape((p,) + extra + (pair.n, pair.n))
    g_inv = np.swapaxes(g.conj(), -1, -2)
    numeric = central_diff4(gauge.samples, 0, 1.0 / p).reshape(g.shape)
    exact = gauge.derivative.reshape(g.shape)
    transported = g_inv @ pair.phi @ g
    route_one = transported + g_inv @ numeric
    route_two = transported + g_inv @ exact
    return float(np.abs(route_one - route_two).max())


def rho_scaling_check(pair, rho):
    """Max residual of (curving, 3-curvature) scaling under a representation.

    Pushes the pair through the representation's matrix images, rebuilds
    the curving B_rho and (on a 3-dimensional base) H_rho = d B_rho, and
    compares with dynkin_index(rho) times the fundamental-route forms.
    The identity holds pointwise in the samples, so the residual is
    roundoff-level.
    """
    iota = float(rho.index)
    pushed = LoopHiggsPair(
        rho.matrix_image(np.zeros((pair.n, pair.n))).shape[-1],
        pair.base_dim,
        pair.theta_points,
        pair.base_points,
        rho.matrix_image(pair.phi),
        np.stack([rho.matrix_image(pair.a[x]) for x in range(pair.base_dim)]),
        ghost_margin=pair.ghost_margin,
    )
    b_fund = b_field(pair)
    b_rho = b_field(pushed)
    worst = (b_rho - iota * b_fund).max_norm()
    if pair.base_dim == 3:
        h_fund = b_fund.exterior_derivative()
        h_rho = b_rho.exterior_derivative()
        worst = max(worst, (h_rho - iota * h_fund).max_norm())
    return worst
