"""su(n) structure: orthogonal bases, representations, exact Dynkin indices.

Conventions: algebra elements are anti-Hermitian traceless n x n matrices,
paired by <X, Y> = -trace(XY).  The standard basis below is normalized to
<T_a, T_b> = 2 delta_ab, which gives the coroot h = i diag(1, -1, 0, ...)
squared length 2 (long roots have length sqrt 2).

The Dynkin index of an irreducible representation with highest weight
given by a partition is computed exactly over the rationals from the
weight system (Freudenthal recursion), as tr_rho(H^2) / <H, H> on a test
coroot, cross-checked on a second coroot.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math

import numpy as np

from .errors import ArgumentError, CapabilityError, ConsistencyError, ValidationError

_DIM_CAP = 200


def su_basis(n):
    """Anti-Hermitian basis of su(n) with -tr(T_a T_b) = 2 delta_ab."""
    if n < 2:
        raise ArgumentError("su(n) needs n >= 2")
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            x = np.zeros((n, n), dtype=complex)
            x[i, j], x[j, i] = 1.0, -1.0
            out.append(x)
            y = np.zeros((n, n), dtype=complex)
            y[i, j], y[j, i] = 1j, 1j
            out.append(y)
    for k in range(1, n):
        d = np.zeros((n, n), dtype=complex)
        scale = math.sqrt(2.0 / (k * (k + 1)))
        for t in range(k):
            d[t, t] = 1j * scale
        d[k, k] = -1j * k * scale
        out.append(d)
    return out


def inner(x, y):
    """Pairing <X, Y> = -trace(XY)."""
    return -np.trace(x @ y)


@dataclass(frozen=True)
class LieAlgebraSpec:
    """su(n) with a fixed orthogonal basis and the -trace pairing."""

    n: int
    basis: tuple
    tolerance: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        if len(self.basis) != self.n * self.n - 1:
            raise ValidationError(
                f"su({self.n}) basis needs {self.n * self.n - 1} elements"
            )
        worst = 0.0
        for a, ta in enumerate(self.basis):
            if np.abs(ta + ta.conj().T).max() > self.tolerance:
                raise ValidationError(f"basis element {a} is not anti-Hermitian")
            if abs(np.trace(ta)) > self.tolerance:
                raise ValidationError(f"basis element {a} is not traceless")
            for b, tb in enumerate(self.basis):
                want = 2.0 if a == b else 0.0
                worst = max(worst, abs(inner(ta, tb) - want))
        if worst > self.tolerance:
            raise ValidationError(f"basis orthogonality residual {worst:.3e}")
        coroot = np.zeros((self.n, self.n), dtype=complex)
        coroot[0, 0], coroot[1, 1] = 1j, -1j
        if abs(inner(coroot, coroot) - 2.0) > self.tolerance:
            raise ValidationError("coroot squared length is not 2")


def su_algebra(n):
    return LieAlgebraSpec(n, su_basis(n))


def _pad_partition(n, part):
    part = tuple(int(p) for p in part)
    if len(part) > n:
        raise CapabilityError(f"partition longer than n = {n}")
    if any(p < 0 for p in part) or any(
        part[i] < part[i + 1] for i in range(len(part) - 1)
    ):
        raise CapabilityError(f"not a partition: {part}")
    return part + (0,) * (n - len(part))


def weyl_dimension(n, part):
    """Dimension of the su(n) irrep with the given highest-weight partition."""
    lam = _pad_partition(n, part)
    num = den = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    return num // den


def _majorizes(lam, mu):
    s1 = s2 = 0
    for a, b in zip(lam, mu):
        s1 += a
        s2 += b
        if s2 > s1:
            return False
    return True


def _inner_su(n, x, y):
    dot = sum(Fraction(a) * b for a, b in zip(x, y))
    return dot - Fraction(sum(x) * sum(y), n)


def weight_multiplicities(n, part):
    """All weights (epsilon coordinates) with multiplicities, by Freudenthal.

    The weight set of the irrep is exactly the integer tuples with the same
    coordinate sum whose decreasing rearrangement is majorized by the
    highest weight; multiplicities are computed on dominant representatives
    and extended by Weyl (permutation) invariance.
    """
    lam = _pad_partition(n, part)
    dim = weyl_dimension(n, lam)
    if dim > _DIM_CAP:
        raise CapabilityError(f"dimension {dim} exceeds supported cap {_DIM_CAP}")
    total = sum(lam)
    lo, hi = lam[-1], lam[0]
    all_weights = [
        mu
        for mu in itertools.product(range(lo, hi + 1), repeat=n)
        if sum(mu) == total and _majorizes(lam, tuple(sorted(mu, reverse=True)))
    ]
    dominant = sorted({tuple(sorted(mu, reverse=True)) for mu in all_weights})

    def level(mu):
        acc = run = 0
        for a, b in zip(lam, mu):
            run += a - b
            acc += run
        return acc

    dominant.sort(key=level)
    rho = tuple(range(n - 1, -1, -1))
    pos_roots = []
    for i in range(n):
        for j in range(i + 1, n):
            alpha = [0] * n
            alpha[i], alpha[j] = 1, -1
            pos_roots.append(tuple(alpha))
    weight_set = set(all_weights)
    mult = {lam: 1}
    lam_rho = tuple(a + b for a, b in zip(lam, rho))
    norm_top = _inner_su(n, lam_rho, lam_rho)
    for mu in dominant:
        if mu == lam:
            continue
        num = Fraction(0)
        for alpha in pos_roots:
            k = 1
            while True:
                nu = tuple(a + k * b for a, b in zip(mu, alpha))
                if nu not in weight_set:
                    break
                num += 2 * mult[tuple(sorted(nu, reverse=True))] * _inner_su(n, nu, alpha)
                k += 1
        mu_rho = tuple(a + b for a, b in zip(mu, rho))
        den = norm_top - _inner_su(n, mu_rho, mu_rho)
        value = num / den
        if value.denominator != 1 or value <= 0:
            raise ConsistencyError(f"non-integral multiplicity {value} at {mu}")
        mult[mu] = int(value)
    out = {mu: mult[tuple(sorted(mu, reverse=True))] for mu in all_weights}
    if sum(out.values()) != dim:
        raise ConsistencyError(
            f"weight multiplicities sum to {sum(out.values())}, expected {dim}"
        )
    return out


def dynkin_index(n, highest_weight):
    """Exact index: tr_rho(H^2) / <H, H> on the coroot H = diag(1,-1,0,...).

    Returns a Fraction in lowest terms; the same value must come out on the
    highest-root coroot diag(1,0,...,-1), otherwise ConsistencyError.
    """
    weights = weight_multiplicities(n, highest_weight)
    s_simple = sum(m * (mu[0] - mu[1]) ** 2 for mu, m in weights.items())
    s_long = sum(m * (mu[0] - mu[-1]) ** 2 for mu, m in weights.items())
    if s_simple != s_long:
        raise ConsistencyError(
            f"index differs between coroots: {s_simple}/2 vs {s_long}/2"
        )
    return Fraction(s_simple, 2)


@dataclass(frozen=True)
class Representation:
    """A representation of su(n) named by its highest-weight partition.

    Matrix images are available for the trivial, fundamental, and adjoint
    cases (all the sampled-connection pipelines need); the Dynkin index is
    available for any partition within the dimension cap.
    """

    n: int
    partition: tuple

    def __post_init__(self):
        object.__setattr__(self, "partition", _pad_partition(self.n, self.partition))

    @classmethod
    def trivial(cls, n):
        return cls(n, ())

    @classmethod
    def fundamental(cls, n):
        return cls(n, (1,))

    @classmethod
    def adjoint(cls, n):
        return cls(n, (2,) + (1,) * (n - 2))

    @property
    def dim(self):
        return weyl_dimension(self.n, self.partition)

    @property
    def index(self):
        return dynkin_index(self.n, self.partition)

    def is_trivial(self):
        return all(p == 0 for p in self.partition)

    def is_fundamental(self):
        return self.partition == (1,) + (0,) * (self.n - 1)

    def is_adjoint(self):
        return self.partition == (2,) + (1,) * (self.n - 2) + (0,)

    def matrix_image(self, samples):
        """Image of su(n)-valued sample arrays (..., n, n) under the representation.

        Vectorized over leading axes.  Supported: trivial (1x1 zeros),
        fundamental (identity), adjoint (real ad-matrices in the normalized
        su_basis frame); anything else raises CapabilityError.
        """
        samples = np.asarray(samples, dtype=complex)
        if samples.shape[-2:] != (self.n, self.n):
            raise ArgumentError(
                f"samples have trailing shape {samples.shape[-2:]}, "
                f"expected ({self.n}, {self.n})"
            )
        if self.is_trivial():
            return np.zeros(samples.shape[:-2] + (1, 1), dtype=complex)
        if self.is_fundamental():
            return samples.copy()
        if self.is_adjoint():
            frame = np.stack(su_basis(self.n)) / math.sqrt(2.0)
            # ad(X)_{ab} = <T_a, [X, T_b]> = -tr(T_a X T_b) + tr(T_a T_b X)
            first = np.einsum("aij,...jk,bki->...ab", frame, samples, frame)
            second = np.einsum("aij,bjk,...ki->...ab", frame, frame, samples)
            return second - first
        raise CapabilityError(
            f"matrix images not implemented for partition {self.partition}"
        )
