"""Truncated fermionic Fock space with a movable normal-ordering cut.

Modes live on a window |m| <= N with n_colors internal labels.  Slot (i, m)
is occupied in the reference vacuum exactly when m < lambda (the cut, a
non-integer rational).  psi^i_m creates slot (i, m); psibar^i_n destroys
slot (i, -n), so {psi^i_m, psibar^j_n} = delta^{ij} delta_{m+n,0} holds
exactly on the whole window space.  States are stored as particle/hole data
relative to the vacuum; signs follow the canonical slot order (modes
ascending, colors ascending within a mode).

Current operators sigma(e^{ij}_n) are truncated sums of normal-ordered
pairs.  Identities that fail near the window edge are checked on the safe
subspace: states whose excitations keep a declared margin from the
boundary, where the truncated operators agree with the untruncated ones.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import itertools
import math

import numpy as np
import scipy.sparse as sp

from .errors import (
    ArgumentError,
    ConsistencyError,
    PrecisionError,
    RangeError,
    ResolutionError,
    ValidationError,
)
from .spectral import rational

PSI = "psi"
PSIBAR = "psibar"

_ZERO_TOL = 1e-14


@dataclass(frozen=True)
class FockWindow:
    """Mode window |m| <= N, n_colors colors, normal-ordering cut lambda."""

    n_colors: int
    N: int
    cut: Fraction

    def __post_init__(self):
        if self.n_colors < 1:
            raise ValidationError("need at least one color")
        if self.N < 1:
            raise ValidationError("window size N must be >= 1")
        lam = rational(self.cut)
        object.__setattr__(self, "cut", lam)
        if lam.denominator == 1:
            raise ValidationError(f"cut must be non-integer, got {lam}")
        if not (-self.N < lam < self.N):
            raise RangeError(f"cut {lam} outside the open window (-{self.N}, {self.N})")

    @property
    def n_slots(self):
        return (2 * self.N + 1) * self.n_colors

    def slot(self, color, mode):
        """Canonical slot index: modes ascending, colors ascending within a mode."""
        if not 1 <= color <= self.n_colors:
            raise RangeError(f"color {color} outside 1..{self.n_colors}")
        if not -self.N <= mode <= self.N:
            raise RangeError(f"mode {mode} outside window |m| <= {self.N}")
        return (mode + self.N) * self.n_colors + (color - 1)

    def slot_label(self, s):
        mode, c = divmod(s, self.n_colors)
        return (c + 1, mode - self.N)

    def sea_count(self, cut=None):
        """Number of window modes strictly below the cut (per color)."""
        lam = self.cut if cut is None else rational(cut)
        return min(max(math.floor(lam) + self.N + 1, 0), 2 * self.N + 1)

    def sea_mask(self, cut=None):
        lam = self.cut if cut is None else rational(cut)
        mask = 0
        for m in range(-self.N, self.N + 1):
            if m < lam:
                for c in range(1, self.n_colors + 1):
                    mask |= 1 << self.slot(c, m)
        return mask

    def above_slots(self):
        return [
            self.slot(c, m)
            for m in range(math.ceil(self.cut), self.N + 1)
            for c in range(1, self.n_colors + 1)
        ]

    def below_slots(self):
        return [
            self.slot(c, m)
            for m in range(-self.N, math.floor(self.cut) + 1)
            for c in range(1, self.n_colors + 1)
        ]


@dataclass(frozen=True)
class FockState:
    """Occupation relative to the vacuum: particles above the cut, holes below."""

    window: FockWindow
    particles: frozenset
    holes: frozenset

    def __post_init__(self):
        object.__setattr__(self, "particles", frozenset(self.particles))
        object.__setattr__(self, "holes", frozenset(self.holes))
        w = self.window
        for c, m in self.particles:
            w.slot(c, m)
            if not m > w.cut:
                raise ValidationError(f"particle mode {m} not above the cut {w.cut}")
        for c, m in self.holes:
            w.slot(c, m)
            if not m < w.cut:
                raise ValidationError(f"hole mode {m} not below the cut {w.cut}")

    @property
    def pair_count(self):
        return len(self.particles) + len(self.holes)

    @cached_property
    def mask(self):
        m = self.window.sea_mask()
        for c, mode in self.holes:
            m ^= 1 << self.window.slot(c, mode)
        for c, mode in self.particles:
            m |= 1 << self.window.slot(c, mode)
        return m

    @classmethod
    def from_mask(cls, window, mask):
        sea = window.sea_mask()
        particles, holes = [], []
        for s in range(window.n_slots):
            bit = 1 << s
            if mask & bit and not sea & bit:
                particles.append(window.slot_label(s))
            elif sea & bit and not mask & bit:
                holes.append(window.slot_label(s))
        return cls(window, frozenset(particles), frozenset(holes))


def vacuum(window):
    return FockState(window, frozenset(), frozenset())


class FockVector:
    """Sparse complex linear combination of FockStates on one window.

    Amplitudes with |a| <= 1e-14 are treated as exact zeros and dropped.
    """

    __slots__ = ("window", "amps")

    def __init__(self, window, amps=None):
        self.window = window
        self.amps = {}
        if amps:
            for key, val in amps.items():
                mask = key.mask if isinstance(key, FockState) else int(key)
                if abs(val) > _ZERO_TOL:
                    self.amps[mask] = self.amps.get(mask, 0j) + complex(val)

    @classmethod
    def from_state(cls, state, amplitude=1.0):
        return cls(state.window, {state.mask: amplitude})

    def amplitude(self, state):
        mask = state.mask if isinstance(state, FockState) else int(state)
        return self.amps.get(mask, 0j)

    def terms(self):
        """(FockState, amplitude) pairs in deterministic mask order."""
        w = self.window
        return [(FockState.from_mask(w, m), a) for m, a in sorted(self.amps.items())]

    def norm_max(self):
        return max((abs(a) for a in self.amps.values()), default=0.0)

    def norm2(self):
        return math.sqrt(sum(abs(a) ** 2 for a in self.amps.values()))

    def __add__(self, other):
        out = dict(self.amps)
        for m, a in other.amps.items():
            out[m] = out.get(m, 0j) + a
        return FockVector(self.window, out)

    def __sub__(self, other):
        out = dict(self.amps)
        for m, a in other.amps.items():
            out[m] = out.get(m, 0j) - a
        return FockVector(self.window, out)

    def __rmul__(self, scalar):
        return FockVector(self.window, {m: scalar * a for m, a in self.amps.items()})

    def prune(self):
        self.amps = {m: a for m, a in self.amps.items() if abs(a) > _ZERO_TOL}
        return self


@dataclass(frozen=True)
class ModeOperator:
    """psi (creator of slot (color, mode)) or psibar (destroyer of (color, -mode))."""

    kind: str
    color: int
    mode: int

    def __post_init__(self):
        if self.kind not in (PSI, PSIBAR):
            raise ArgumentError(f"kind must be '{PSI}' or '{PSIBAR}', got {self.kind!r}")

    def slot_mode(self):
        return self.mode if self.kind == PSI else -self.mode


def psi(color, mode):
    return ModeOperator(PSI, color, mode)


def psibar(color, mode):
    return ModeOperator(PSIBAR, color, mode)


def _parity(bits):
    return -1.0 if bits.bit_count() & 1 else 1.0


def apply_mode(op, vec):
    """Apply a single mode operator; fermionic sign from slots preceding the target."""
    if isinstance(vec, FockState):
        vec = FockVector.from_state(vec)
    w = vec.window
    s = w.slot(op.color, op.slot_mode())
    bit = 1 << s
    below = bit - 1
    out = {}
    if op.kind == PSI:
        for mask, amp in vec.amps.items():
            if mask & bit:
                continue
            out[mask | bit] = _parity(mask & below) * amp
    else:
        for mask, amp in vec.amps.items():
            if not mask & bit:
                continue
            out[mask ^ bit] = _parity(mask & below) * amp
    return FockVector(w, out)


class SparseOperator:
    """Quadratic operator: sum of hops amp * c^dag(slot_to) c(slot_from) + scalar.

    The hop list plus scalar is the exact (window-truncated) operator; the
    matrix() view compresses it onto the graded basis enumeration.
    safe_margin records how far truncation artifacts can reach (in modes)
    from the window boundary.
    """

    __slots__ = ("window", "hops", "scalar", "safe_margin")

    def __init__(self, window, hops=(), scalar=0j, safe_margin=0):
        self.window = window
        merged = {}
        for amp, s_to, s_from in hops:
            key = (s_to, s_from)
            merged[key] = merged.get(key, 0j) + complex(amp)
        self.hops = tuple(
            (a, s_to, s_from) for (s_to, s_from), a in sorted(merged.items()) if a != 0
        )
        self.scalar = complex(scalar)
        self.safe_margin = safe_margin

    def apply_masks(self, amps):
        """Hot path: dict mask->amp in, dict mask->amp out (exact arithmetic)."""
        out = {}
        scalar = self.scalar
        for mask, amp in amps.items():
            for a, s_to, s_from in self.hops:
                bf = 1 << s_from
                if not mask & bf:
                    continue
                m1 = mask ^ bf
                bt = 1 << s_to
                if m1 & bt:
                    continue
                sign = 1.0
                if (mask & (bf - 1)).bit_count() & 1:
                    sign = -sign
                if (m1 & (bt - 1)).bit_count() & 1:
                    sign = -sign
                m2 = m1 | bt
                out[m2] = out.get(m2, 0j) + a * sign * amp
            if scalar:
                out[mask] = out.get(mask, 0j) + scalar * amp
        return out

    def apply(self, vec):
        if isinstance(vec, FockState):
            vec = FockVector.from_state(vec)
        return FockVector(self.window, self.apply_masks(vec.amps))

    def __add__(self, other):
        self._check_window(other)
        return SparseOperator(
            self.window,
            self.hops + other.hops,
            self.scalar + other.scalar,
            max(self.safe_margin, other.safe_margin),
        )

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        return SparseOperator(
            self.window,
            tuple((scalar * a, t, f) for a, t, f in self.hops),
            scalar * self.scalar,
            self.safe_margin,
        )

    def _check_window(self, other):
        if other.window != self.window:
            raise ArgumentError("operators live on different windows")

    @classmethod
    def identity(cls, window, scalar=1.0):
        return cls(window, (), scalar)

    def matrix(self, basis, index=None):
        """Compression onto an enumerated basis as a scipy CSR matrix.

        Image components outside the basis are dropped; columns whose exact
        image stays inside the basis are represented exactly.
        """
        if index is None:
            index = {st.mask: k for k, st in enumerate(basis)}
        rows, cols, data = [], [], []
        for col, st in enumerate(basis):
            for mask, amp in self.apply_masks({st.mask: 1.0}).items():
                row = index.get(mask)
                if row is not None:
                    rows.append(row)
                    cols.append(col)
                    data.append(amp)
        dim = len(basis)
        return sp.csr_matrix(
            sp.coo_matrix((data, (rows, cols)), shape=(dim, dim), dtype=complex)
        )

    def boundary_states(self, basis, margin=None):
        """Basis states whose support violates the safety margin."""
        margin = self.safe_margin if margin is None else margin
        return [st for st in basis if not _is_safe(st, margin)]


def _is_safe(state, margin):
    w = state.window
    for _, m in state.particles:
        if w.N - m < margin:
            return False
    for _, m in state.holes:
        if m + w.N < margin:
            return False
    return True


def enumerate_states(window, pair_cap):
    """Graded basis: particle+hole count ascending, then lexicographic slots."""
    above = window.above_slots()
    below = window.below_slots()
    out = []
    for total in range(pair_cap + 1):
        for n_p in range(total, -1, -1):
            n_h = total - n_p
            if n_p > len(above) or n_h > len(below):
                continue
            for ps in itertools.combinations(above, n_p):
                for hs in itertools.combinations(below, n_h):
                    out.append(
                        FockState(
                            window,
                            frozenset(window.slot_label(s) for s in ps),
                            frozenset(window.slot_label(s) for s in hs),
                        )
                    )
    return out


def safe_states(window, pair_cap, margin):
    """Graded basis states whose excitations keep `margin` modes from the edge."""
    return [st for st in enumerate_states(window, pair_cap) if _is_safe(st, margin)]


def _require_interior(window, margin):
    lam = window.cut
    if math.ceil(lam) + margin > window.N or math.floor(lam) - margin < -window.N:
        raise ResolutionError(
            f"window N={window.N} too small for margin {margin} around cut {lam}; "
            "increase N"
        )


def normal_ordered_pair(i, j, m, n, window):
    """Normal-ordered pair :psi^i_m psibar^j_n: at the window's cut.

    Equal to psi^i_m psibar^j_n for m > cut and -psibar^j_n psi^i_m for
    m < cut; as a quadratic operator this is a single hop minus a scalar
    delta^{ij} delta_{m,-n} when m < cut.
    """
    s_to = window.slot(i, m)
    s_from = window.slot(j, -n)
    scalar = 0j
    if m < window.cut and i == j and m == -n:
        scalar = -1.0 + 0j
    return SparseOperator(
        window, ((1.0, s_to, s_from),), scalar, safe_margin=abs(m + n)
    )


def sigma(i, j, n, window, cut=None):
    """Truncated current sigma(e^{ij}_n) = sum_m :psi^i_m psibar^j_{-n-m}: .

    The sum keeps every m with both mode labels inside the window; as a
    hop operator the current moves fermion modes DOWN by n.  This fixes
    the loop orientation so that positive-transfer currents annihilate the
    vacuum, the normalization under which the commutator's central term is
    +m delta_{m+n,0} (the opposite orientation flips its sign).  The
    normal-ordering cut defaults to the window's cut; passing mu builds the
    mu-ordered current on the same window (used by the cut-shift identity).
    """
    N = window.N
    if abs(n) > 2 * N:
        raise RangeError(f"transfer index |{n}| exceeds 2N = {2 * N}")
    lam = window.cut if cut is None else rational(cut)
    if lam.denominator == 1:
        raise ValidationError(f"normal-ordering cut must be non-integer, got {lam}")
    hops = []
    for m in range(max(-N, -n - N), min(N, N - n) + 1):
        hops.append((1.0, window.slot(i, m), window.slot(j, m + n)))
    scalar = 0j
    if i == j and n == 0:
        scalar = -float(window.sea_count(lam))
    return SparseOperator(window, tuple(hops), scalar, safe_margin=abs(n))


def elementary_action(i, j, n, color, mode):
    """Action e^{ij}_n(psi^k_m) = delta^{jk} psi^i_{m+n} on single-particle labels."""
    if color != j:
        return None
    return (i, mode + n)


def commutator_check(i, j, k, l, m, n, window, pair_cap=2):
    """Max-norm residual of the central-extension commutator on the safe subspace.

    [sigma(e^{ij}_m), sigma(e^{kl}_n)] - delta^{jk} sigma(e^{il}_{m+n})
    + delta^{il} sigma(e^{kj}_{m+n}) - delta^{jk} delta^{il} m delta_{m+n,0}
    must vanish exactly (amplitudes are signed integers) on states whose
    excitations stay |m|+|n| modes clear of the window boundary.  The probe
    basis caps the excitation count at pair_cap; the identity itself is
    count-independent.
    """
    margin = abs(m) + abs(n)
    _require_interior(window, margin)
    states = safe_states(window, pair_cap, margin)
    if not states:
        raise ResolutionError(
            f"safe subspace empty for margin {margin} at N={window.N}; increase N"
        )
    op_a = sigma(i, j, m, window)
    op_b = sigma(k, l, n, window)
    rhs = SparseOperator(window)
    if j == k:
        rhs = rhs + sigma(i, l, m + n, window)
    if i == l:
        rhs = rhs - sigma(k, j, m + n, window)
    central = float(m) if (j == k and i == l and m + n == 0) else 0.0
    residual = 0.0
    for st in states:
        x = {st.mask: 1.0}
        lhs = op_a.apply_masks(op_b.apply_masks(x))
        for mask, amp in op_b.apply_masks(op_a.apply_masks(x)).items():
            lhs[mask] = lhs.get(mask, 0j) - amp
        for mask, amp in rhs.apply_masks(x).items():
            lhs[mask] = lhs.get(mask, 0j) - amp
        if central:
            lhs[st.mask] = lhs.get(st.mask, 0j) - central
        bad = max((abs(a) for a in lhs.values()), default=0.0)
        if bad > residual:
            residual = bad
    return residual


def _transport_modes(window, mu):
    lam = window.cut
    mu = rational(mu)
    if mu.denominator == 1:
        raise ValidationError(f"target cut must be non-integer, got {mu}")
    if not mu > lam:
        raise ArgumentError(f"target cut {mu} must exceed the window cut {lam}")
    modes = list(range(math.ceil(lam), math.floor(mu) + 1))
    if modes and modes[-1] > window.N:
        raise RangeError(
            f"band ({lam}, {mu}] exits the window: mode {modes[-1]} > N = {window.N}"
        )
    return mu, modes


def bogoliubov_vacuum(window, mu):
    """Transported vacuum |mu> = (prod_{lam<n<=mu} prod_i psi^i_n)|lam>.

    The operator string is ordered modes ascending, colors ascending within
    a mode, and applied right to left.  The result is verified to satisfy
    both mu-vacuum annihilation properties before being returned.
    """
    mu, modes = _transport_modes(window, mu)
    string = [(c, m) for m in modes for c in range(1, window.n_colors + 1)]
    vec = FockVector.from_state(vacuum(window))
    for c, m in reversed(string):
        vec = apply_mode(psi(c, m), vec)
    if len(vec.amps) != 1 or abs(abs(next(iter(vec.amps.values()))) - 1.0) > 1e-12:
        raise ConsistencyError("transported vacuum is not a unit product state")
    for c in range(1, window.n_colors + 1):
        for kmode in range(-window.N, window.N + 1):
            if kmode < mu and apply_mode(psi(c, kmode), vec).norm_max() > 0:
                raise ConsistencyError(
                    f"transported vacuum not annihilated by psi^{c}_{kmode}"
                )
            if kmode <= -mu and apply_mode(psibar(c, kmode), vec).norm_max() > 0:
                raise ConsistencyError(
                    f"transported vacuum not annihilated by psibar^{c}_{kmode}"
                )
    return vec


def cut_shift_check(i, j, n, window, mu, pair_cap=2):
    """Residual of sigma_mu = sigma_lam - n_{lam,mu} delta^{ij} delta_{n,0} Id.

    Returns (max-norm residual on the safe subspace, n_{lam,mu}) where
    n_{lam,mu} counts integers in (lam, mu].  Exact zero expected: the two
    truncated currents share every hop and differ only in the scalar.
    """
    mu, modes = _transport_modes(window, mu)
    n_shift = len(modes)
    op_mu = sigma(i, j, n, window, cut=mu)
    op_lam = sigma(i, j, n, window)
    diff = op_mu - op_lam
    if i == j and n == 0:
        diff = diff + SparseOperator.identity(window, float(n_shift))
    margin = abs(n)
    _require_interior(window, margin)
    states = safe_states(window, pair_cap, margin)
    if not states:
        raise ResolutionError("safe subspace empty; increase N")
    residual = 0.0
    for st in states:
        out = diff.apply_masks({st.mask: 1.0})
        bad = max((abs(a) for a in out.values()), default=0.0)
        residual = max(residual, bad)
    return residual, n_shift


def _expm_multiply(mat, vec, t, tol=1e-12):
    """exp(t*mat) @ vec by scaling plus truncated Taylor series.

    The scaling s keeps theta = |t| * ||mat||_1 / 2^s <= 0.5, the series is
    summed until its a-priori tail bound theta^(K+1)/((K+1)!(1-theta)) drops
    below tol; failure to reach that bound raises PrecisionError.
    """
    if t == 0:
        return vec.copy()
    norm1 = float(np.max(np.abs(mat).sum(axis=0))) if mat.nnz else 0.0
    theta_target = 0.5
    scale = max(0, math.ceil(math.log2(max(abs(t) * norm1, 1e-300) / theta_target)))
    if scale > 64:
        raise PrecisionError(
            f"series tail bound {tol} unreachable: operator norm {norm1:.3e} too large"
        )
    theta = abs(t) * norm1 / 2**scale
    n_terms, bound = 1, theta
    while bound / (1.0 - theta) > tol:
        n_terms += 1
        bound *= theta / n_terms
        if n_terms > 60:
            raise PrecisionError("series tail bound not met within 60 terms")
    step = t / 2**scale
    out = vec.astype(complex)
    for _ in range(2**scale):
        term = out
        acc = out.copy()
        for k in range(1, n_terms + 1):
            term = mat.dot(term) * (step / k)
            acc = acc + term
        out = acc
    return out


def projective_equality_check(terms, t, window, mu, pair_cap=3, tail_tol=1e-12):
    """Residual of exp(t sigma_mu(K)) = exp(t sigma_lam(K)) exp(-t n_{lam,mu} Tr K).

    K is a finite combination [(coeff, i, j, n), ...] of elementary loop
    generators; Tr uses the window-independent convention Tr e^{ii}_0 = 1.
    Both exponentials act on the graded-basis compression (identical bases,
    so the matrices differ exactly by the scalar) applied to safe states.
    """
    mu, modes = _transport_modes(window, mu)
    n_shift = len(modes)
    trace_k = sum(c for c, i, j, n in terms if i == j and n == 0)
    op_lam = SparseOperator(window)
    op_mu = SparseOperator(window)
    max_n = 0
    for c, i, j, n in terms:
        op_lam = op_lam + c * sigma(i, j, n, window)
        op_mu = op_mu + c * sigma(i, j, n, window, cut=mu)
        max_n = max(max_n, abs(n))
    basis = enumerate_states(window, pair_cap)
    index = {st.mask: kk for kk, st in enumerate(basis)}
    mat_lam = op_lam.matrix(basis, index)
    mat_mu = op_mu.matrix(basis, index)
    factor = np.exp(-t * n_shift * trace_k)
    _require_interior(window, max_n)
    probes = safe_states(window, min(2, pair_cap), max_n)
    residual = 0.0
    for st in probes:
        e = np.zeros(len(basis), dtype=complex)
        e[index[st.mask]] = 1.0
        lhs = _expm_multiply(mat_mu, e, t, tail_tol)
        rhs = factor * _expm_multiply(mat_lam, e, t, tail_tol)
        residual = max(residual, float(np.abs(lhs - rhs).max()))
    return residual


def mode_operator_matrix(op, basis, index=None):
    """Matrix of a single mode operator on an enumerated basis (CSR)."""
    window = basis[0].window
    if index is None:
        index = {st.mask: k for k, st in enumerate(basis)}
    rows, cols, data = [], [], []
    for col, st in enumerate(basis):
        out = apply_mode(op, FockVector(window, {st.mask: 1.0}))
        for mask, amp in out.amps.items():
            row = index.get(mask)
            if row is not None:
                rows.append(row)
                cols.append(col)
                data.append(amp)
    dim = len(basis)
    return sp.csr_matrix(sp.coo_matrix((data, (rows, cols)), shape=(dim, dim), dtype=complex))
