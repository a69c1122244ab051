"""Named analytic connection families for the sampled-geometry pipelines.

Every preset is a closed-form periodic field on S1 x T^d, so connections
can be resampled at any resolution for convergence studies.  All su(2)
presets use the anti-Hermitian generators T_j = i * sigma_j, normalized to
<T_a, T_b> = 2 delta_ab.

Preset catalog:
  zero        vanishing connection.
  abelian     single diagonal generator, curvature known in closed form.
  flat        pure-gauge g^-1 dg for a product of winding rotations; the
              analytic curvature vanishes identically.
  su2-axial   the two-generator axial family sin(2 pi theta) a(x) T1 dx1
              + b(x) T2 dtheta; its curving and 3-curvature vanish
              identically (the generators never meet in the pairing), so
              it serves as an exact-zero fixture.
  su2-family  a three-generator family with theta dependence in every
              slot; generic, used for convergence-order measurements.
"""

import math

import numpy as np

from .caloron import AnalyticConnection, GaugeLoop, sample_connection
from .errors import ArgumentError

SIGMA = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1j], [1j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)
T1, T2, T3 = (1j * s for s in SIGMA)
_EYE2 = np.eye(2, dtype=complex)

TWO_PI = 2.0 * math.pi


def _mat(coeff, gen):
    """coefficient field (broadcast array) times a fixed generator."""
    return np.asarray(coeff)[..., None, None] * gen


def _rotation(t, gen):
    """exp(2 pi t K) for K with K^2 = -1: cos(2 pi t) I + sin(2 pi t) K."""
    t = np.asarray(t)[..., None, None]
    return np.cos(TWO_PI * t) * _EYE2 + np.sin(TWO_PI * t) * gen


def _adjoint_transport(u, x):
    """u^-1 x u for unitary sample arrays."""
    u_inv = np.swapaxes(u.conj(), -1, -2)
    return u_inv @ x @ u


def _zero_family():
    def phi(th, xs):
        return np.zeros(np.broadcast_shapes(th.shape, xs[0].shape) + (2, 2), complex)

    def base(th, xs, axis):
        return phi(th, xs)

    return AnalyticConnection(2, phi, base, "zero")


def _abelian_family(amplitude):
    def phi(th, xs):
        return np.zeros(np.broadcast_shapes(th.shape, xs[0].shape) + (2, 2), complex)

    def base(th, xs, axis):
        if axis == 1:
            return _mat(amplitude * np.sin(TWO_PI * xs[0]) + 0.0 * th, T3)
        return phi(th, xs)

    return AnalyticConnection(2, phi, base, "abelian")


def _flat_family():
    gens = {0: T1, 1: T2, 2: T3}

    def phi(th, xs):
        u = _rotation(xs[0], T1) @ _rotation(xs[1], T2) @ _rotation(xs[2], T3)
        out = _adjoint_transport(u, TWO_PI * T3)
        return out + 0.0 * th[..., None, None]

    def base(th, xs, axis):
        if axis == 0:
            u = _rotation(xs[1], T2) @ _rotation(xs[2], T3)
        elif axis == 1:
            u = _rotation(xs[2], T3)
        else:
            u = np.broadcast_to(_EYE2, xs[2].shape + (2, 2))
        out = _adjoint_transport(u, TWO_PI * gens[axis])
        return out + 0.0 * (th + xs[0])[..., None, None]

    return AnalyticConnection(2, phi, base, "flat")


def _axial_family(amplitude):
    def phi(th, xs):
        return _mat(amplitude * np.cos(TWO_PI * xs[2]) + 0.0 * th, T2)

    def base(th, xs, axis):
        if axis == 0:
            return _mat(amplitude * np.sin(TWO_PI * th) * np.sin(TWO_PI * xs[1]), T1)
        return np.zeros(np.broadcast_shapes(th.shape, xs[axis].shape) + (2, 2), complex)

    return AnalyticConnection(2, phi, base, "su2-axial")


def _generic_family(amplitude):
    # Circle harmonics share generators across components on purpose: the
    # theta-averaged products <a_a, a_b'> and <F_ab, Phi> must survive, or
    # the curving degenerates to a constant and the density to zero.
    s, c = np.sin, np.cos

    def phi(th, xs):
        return amplitude * (
            _mat(s(TWO_PI * xs[0]) + 0.0 * th, T3)
            + _mat(c(TWO_PI * th) * s(TWO_PI * xs[1]), T1)
            + _mat(s(TWO_PI * th) * c(TWO_PI * xs[2]), T2)
        )

    def base(th, xs, axis):
        if axis == 0:
            return amplitude * (
                _mat(s(TWO_PI * th) * s(TWO_PI * xs[1]), T1)
                + _mat(c(TWO_PI * th) * c(TWO_PI * xs[2]), T2)
                + _mat(c(TWO_PI * xs[1]) + 0.0 * th, T3)
            )
        if axis == 1:
            return amplitude * (
                _mat(c(TWO_PI * th) * s(TWO_PI * xs[2]), T1)
                + _mat(s(TWO_PI * th) * s(TWO_PI * xs[0]), T3)
                + _mat(s(TWO_PI * xs[2]) + 0.0 * th, T2)
            )
        return amplitude * (
            _mat(s(TWO_PI * th) * c(TWO_PI * xs[0]), T2)
            + _mat(c(TWO_PI * th) * c(TWO_PI * xs[1]), T3)
            + _mat(s(TWO_PI * xs[0]) + 0.0 * th, T1)
        )

    return AnalyticConnection(2, phi, base, "su2-family")


_FAMILIES = {
    "zero": lambda amp: _zero_family(),
    "abelian": _abelian_family,
    "flat": lambda amp: _flat_family(),
    "su2-axial": _axial_family,
    "su2-family": _generic_family,
}


def connection_preset(name, theta_points=12, base_points=16, base_dim=3, amplitude=0.7):
    """Sample a named analytic family; the result carries it for resampling."""
    try:
        factory = _FAMILIES[name]
    except KeyError:
        raise ArgumentError(
            f"unknown connection preset {name!r}; choose from {sorted(_FAMILIES)}"
        ) from None
    return sample_connection(factory(amplitude), base_dim, theta_points, base_points)


def connection_preset_names():
    return sorted(_FAMILIES)


def winding_gauge(theta_points, winding=1, n=2):
    """Periodic gauge loop exp(2 pi theta w K) with K = diag(i, -i, 0, ...).

    Carries both the samples and the closed-form derivative
    2 pi w K gamma(theta) for the transformation-law check.
    """
    if int(winding) != winding:
        raise ArgumentError(f"winding must be an integer, got {winding}")
    thetas = np.arange(theta_points) / theta_points
    k = np.zeros((n, n), dtype=complex)
    k[0, 0], k[1, 1] = 1j, -1j
    phases = TWO_PI * winding * thetas
    samples = np.stack([np.eye(n, dtype=complex)] * theta_points)
    samples[:, 0, 0] = np.exp(1j * phases)
    samples[:, 1, 1] = np.exp(-1j * phases)
    derivative = TWO_PI * winding * np.einsum("ij,tjk->tik", k, samples)
    return GaugeLoop(samples, derivative)


def constant_gauge(theta_points, matrix):
    """Constant gauge loop (derivative identically zero)."""
    samples = np.broadcast_to(
        np.asarray(matrix, dtype=complex), (theta_points,) + np.shape(matrix)
    ).copy()
    return GaugeLoop(samples, np.zeros_like(samples))
