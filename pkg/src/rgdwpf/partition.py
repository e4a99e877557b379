"""Domain-wall boundary partition functions and their determinant form.

A system here is one spin of length S = two_s/2 sitting at the first
inhomogeneity plus N-1 spins 1/2, traversed by Omega = two_s + N - 1
rapidities.  The partition function Z is computed along two independent
routes:

* the permanent route: the defining sum over all ways of attaching two_s
  rapidities to the first inhomogeneity and bijecting the rest onto the
  others (equivalently, the permanent of the Omega x Omega Cauchy-type
  matrix whose first column block repeats the first inhomogeneity);
  exponential cost, guarded at Omega <= 14;
* the determinant route: an N x N matrix contracted from structure
  coefficients (multiset sums over the inhomogeneities) and the
  log-derivative hierarchy of the rapidity polynomial; polynomial cost.

Exact mode makes "the two routes agree" a plain ``==`` on canonical
rationals.  Supporting identities for the pure spin-1/2 case (Borchardt's
identity and the sum-of-permanents determinant used for bosonic
realizations) live here as well.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import factorial

from .errors import (
    CardinalityMismatch,
    CostGuard,
    DegenerateEpsilons,
    NonFiniteEntry,
    PoleAtEvaluationPoint,
)
from .gamma import GammaTable, build_gamma_table
from .linalg import (
    Scalar,
    SquareMatrix,
    _finite,
    canonical,
    determinant,
    is_exact,
    permanent,
    values_agree,
)

#: The permanent route refuses systems with more rapidities than this.
PERMANENT_MAX_OMEGA = 14
#: The sum-of-permanents identity check refuses larger rapidity sets.
BOSON_MAX_RAPIDITIES = 12


@dataclass(frozen=True)
class SpinSystem:
    """One spin of length two_s/2 at ``epsilons[0]`` plus spins 1/2 at the rest."""

    two_s: int
    epsilons: tuple

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(canonical(e) for e in self.epsilons))
        if self.two_s < 0:
            raise ValueError("two_s must be >= 0")
        if len(set(self.epsilons)) != len(self.epsilons):
            raise DegenerateEpsilons("inhomogeneities must be pairwise distinct")
        if self.n < 1:
            raise CardinalityMismatch("at least one spin required")
        if self.two_s >= 2 and self.n < 2:
            raise CardinalityMismatch(
                "a single spin with two_s >= 2 is outside the supported family")
        if self.omega < 1:
            raise CardinalityMismatch("system carries no excitations")

    @property
    def n(self) -> int:
        return len(self.epsilons)

    @property
    def omega(self) -> int:
        return self.two_s + self.n - 1


@dataclass(frozen=True)
class PartitionValue:
    """Partition-function value together with the route that produced it."""

    value: Scalar
    method: str
    system: SpinSystem
    rapidities: tuple


@dataclass(frozen=True)
class StructureCoefficients:
    """Rapidity-independent coefficients of the N x N determinant matrix.

    ``c11[n]`` multiplies the order-n hierarchy value in the (1,1) entry.
    ``c1j[j][n]`` (spin index j = 2..N) carries the sign prefactor
    1/(eps_j - eps_1), i.e. it is the negative of the bare multiset sum,
    matching the convention of the worked spin-3/2 listing.  ``c0_diag[i]``
    is the constant part of row i's diagonal and ``c1_diag`` (always 1)
    multiplies its hierarchy term; ``c0_off[(i, j)]`` = 1/(eps_j - eps_i).
    """

    c11: tuple
    c1j: dict
    c0_diag: dict
    c0_off: dict
    c1_diag: int = 1


def multisets_with_repetition(items, m: int):
    """Size-m multisets from ``items`` as nondecreasing-index tuples."""
    return combinations_with_replacement(tuple(items), m)


def cauchy_matrix(nu, eps) -> SquareMatrix:
    """Matrix with entries 1/(nu_i - eps_j)."""
    nu = tuple(canonical(v) for v in nu)
    eps = tuple(canonical(e) for e in eps)
    if len(nu) != len(eps):
        raise CardinalityMismatch(f"{len(nu)} rapidities vs {len(eps)} inhomogeneities")
    _check_no_poles(nu, eps)
    return SquareMatrix([[1 / (v - e) for e in eps] for v in nu])


def _check_no_poles(nu, eps):
    for v in nu:
        if v in eps:
            raise PoleAtEvaluationPoint(f"rapidity {v} equals an inhomogeneity")


def z_permanent(system: SpinSystem, nu) -> PartitionValue:
    """Partition function as the defining sum over rapidity attachments.

    Sums (2S)! / prod(A - eps_1) over all two_s-subsets A of the
    rapidities, times the permanent of the Cauchy matrix pairing the
    remaining rapidities with the spin-1/2 inhomogeneities.  For two_s = 1
    this is the permanent of the plain Cauchy matrix.
    """
    nu = tuple(canonical(v) for v in nu)
    if len(nu) != system.omega:
        raise CardinalityMismatch(
            f"need {system.omega} rapidities for this system, got {len(nu)}")
    if system.omega > PERMANENT_MAX_OMEGA:
        raise CostGuard(
            f"permanent route refused for omega = {system.omega} > {PERMANENT_MAX_OMEGA}")
    eps = system.epsilons
    _check_no_poles(nu, eps)
    two_s = system.two_s
    fact = canonical(factorial(two_s))
    others = eps[1:]
    total = 0
    for a_idx in combinations(range(system.omega), two_s):
        denom = 1
        for i in a_idx:
            denom *= nu[i] - eps[0]
        chosen = set(a_idx)
        rest = [nu[i] for i in range(system.omega) if i not in chosen]
        if others:
            inner = permanent(SquareMatrix([[1 / (v - e) for e in others] for v in rest]))
        else:
            inner = 1
        total += fact / denom * inner
    if isinstance(total, (float, complex)) and not _finite(total):
        raise NonFiniteEntry("partition function overflowed to a non-finite value")
    return PartitionValue(value=total, method="permanent", system=system, rapidities=nu)


def _inv_prod(eps1, multiset):
    term = 1
    for e in multiset:
        term /= eps1 - e
    return term


def structure_coefficients(system: SpinSystem) -> StructureCoefficients:
    """Multiset sums over the spin-1/2 inhomogeneities entering the determinant."""
    eps = system.epsilons
    two_s = system.two_s
    n = system.n
    e1 = eps[0]
    ground = eps[1:]

    c11 = tuple(
        sum(_inv_prod(e1, ms) for ms in multisets_with_repetition(ground, two_s - k))
        for k in range(two_s + 1)
    )

    c1j = {}
    for j in range(2, n + 1):
        ej = eps[j - 1]
        ground_j = tuple(e for e in ground if e != ej)
        col = []
        for k in range(two_s):
            acc = 0
            for p in range(k, two_s):
                weight = (two_s - p) / (e1 - ej) ** (two_s - p)
                for ms in multisets_with_repetition(ground_j, p - k):
                    acc += weight * _inv_prod(e1, ms)
            col.append(-acc)
        c1j[j] = tuple(col)

    c0_diag = {}
    c0_off = {}
    for i in range(2, n + 1):
        ei = eps[i - 1]
        c0_diag[i] = two_s / (ei - e1) + sum(
            1 / (ei - eps[k - 1]) for k in range(2, n + 1) if k != i)
        for j in range(1, n + 1):
            if j != i:
                c0_off[(i, j)] = 1 / (eps[j - 1] - ei)

    return StructureCoefficients(c11=c11, c1j=c1j, c0_diag=c0_diag, c0_off=c0_off)


def build_J_spin_half(eps, nu) -> SquareMatrix:
    """N x N determinant matrix for a pure spin-1/2 system.

    Its determinant equals the permanent of the Cauchy matrix for
    arbitrary rapidities.
    """
    eps = tuple(canonical(e) for e in eps)
    nu = tuple(canonical(v) for v in nu)
    if len(eps) != len(nu):
        raise CardinalityMismatch(f"{len(nu)} rapidities vs {len(eps)} inhomogeneities")
    if len(set(eps)) != len(eps):
        raise DegenerateEpsilons("inhomogeneities must be pairwise distinct")
    _check_no_poles(nu, eps)
    n = len(eps)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                diag = sum(1 / (eps[i] - eps[k]) for k in range(n) if k != i)
                diag -= sum(1 / (eps[i] - v) for v in nu)
                row.append(diag)
            else:
                row.append(1 / (eps[j] - eps[i]))
        rows.append(row)
    return SquareMatrix(rows)


def _taylor_tower(gammas):
    # Rescale G_n -> (-1)^(n+1) G_n / n!, whose order-0 value is +1.  Row 1
    # must contract against this normalization; contracting the raw G_n
    # values breaks the equality with the permanent route.
    tower = []
    for k, g in enumerate(gammas):
        term = (-1) ** (k + 1) * g
        fact = factorial(k)
        tower.append(Fraction(term, fact) if is_exact(term) else term / fact)
    return tuple(tower)


def build_J_higher(system: SpinSystem, gamma: GammaTable) -> SquareMatrix:
    """N x N determinant matrix for one higher spin plus N-1 spins 1/2.

    With two_s = 1 this is entrywise identical to
    :func:`build_J_spin_half`.
    """
    if gamma.system != system:
        raise CardinalityMismatch("gamma table was built for a different system")
    if len(gamma.gammas_at_eps1) != system.two_s + 1:
        raise CardinalityMismatch("gamma table too short for this spin length")
    n = system.n
    two_s = system.two_s
    fact = factorial(two_s)
    coeffs = structure_coefficients(system)
    tower = _taylor_tower(gamma.gammas_at_eps1)

    rows = [[0] * n for _ in range(n)]
    rows[0][0] = fact * sum(coeffs.c11[k] * tower[k] for k in range(two_s + 1))
    for j in range(2, n + 1):
        rows[0][j - 1] = fact * sum(coeffs.c1j[j][k] * tower[k] for k in range(two_s))
    for i in range(2, n + 1):
        rows[i - 1][i - 1] = coeffs.c0_diag[i] + coeffs.c1_diag * gamma.gamma1_at_others[i]
        for j in range(1, n + 1):
            if j != i:
                rows[i - 1][j - 1] = coeffs.c0_off[(i, j)]
    return SquareMatrix(rows)


def build_J_limit(system: SpinSystem) -> SquareMatrix:
    """Rapidity-independent limit of the determinant matrix (all rapidities large).

    Only the order-0 hierarchy terms survive; the determinant of this
    matrix vanishes identically, which is what forces the partition
    function to zero in the limit.
    """
    n = system.n
    fact = factorial(system.two_s)
    coeffs = structure_coefficients(system)
    rows = [[0] * n for _ in range(n)]
    rows[0][0] = fact * coeffs.c11[0]
    for j in range(2, n + 1):
        rows[0][j - 1] = fact * coeffs.c1j[j][0] if system.two_s else 0
    for i in range(2, n + 1):
        rows[i - 1][i - 1] = coeffs.c0_diag[i]
        for j in range(1, n + 1):
            if j != i:
                rows[i - 1][j - 1] = coeffs.c0_off[(i, j)]
    return SquareMatrix(rows)


def z_determinant(system: SpinSystem, nu) -> PartitionValue:
    """Partition function via the N x N determinant; polynomial cost.

    Builds the hierarchy table, assembles the matrix and evaluates its
    determinant.  No size guard: this is the route that stays cheap when
    the permanent is out of reach.
    """
    nu = tuple(nu)
    table = build_gamma_table(system, nu)
    j_matrix = build_J_higher(system, table)
    return PartitionValue(value=determinant(j_matrix), method="determinant",
                          system=system, rapidities=nu)


@dataclass(frozen=True)
class BorchardtResult:
    det_c: Scalar
    perm_c: Scalar
    det_m: Scalar
    holds: bool


def borchardt_check(nu, eps) -> BorchardtResult:
    """Check det(C) * perm(C) == det(M) with M the entrywise square of C."""
    c = cauchy_matrix(nu, eps)
    m = SquareMatrix([[x * x for x in row] for row in c.entries])
    det_c = determinant(c)
    perm_c = permanent(c)
    det_m = determinant(m)
    return BorchardtResult(det_c=det_c, perm_c=perm_c, det_m=det_m,
                           holds=values_agree(det_c * perm_c, det_m, c.exact))


@dataclass(frozen=True)
class BosonSumResult:
    sum_of_permanents: Scalar
    det_j_tilde: Scalar
    holds: bool


def boson_sum_determinant(nu, eps) -> BosonSumResult:
    """Sum of Cauchy permanents over all N-subsets of an oversized rapidity set.

    The N x N comparison matrix keeps the spin-1/2 structure but its
    diagonal subtracts the simple-pole sum over the whole rapidity set.
    """
    nu = tuple(canonical(v) for v in nu)
    eps = tuple(canonical(e) for e in eps)
    n = len(eps)
    if len(nu) < n:
        raise CardinalityMismatch("need at least as many rapidities as inhomogeneities")
    if len(nu) > BOSON_MAX_RAPIDITIES:
        raise CostGuard(
            f"subset sum refused for {len(nu)} > {BOSON_MAX_RAPIDITIES} rapidities")
    if len(set(eps)) != len(eps):
        raise DegenerateEpsilons("inhomogeneities must be pairwise distinct")
    _check_no_poles(nu, eps)

    lhs = 0
    for subset in combinations(nu, n):
        lhs += permanent(cauchy_matrix(subset, eps))

    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                diag = sum(1 / (eps[i] - eps[k]) for k in range(n) if k != i)
                diag -= sum(1 / (eps[i] - v) for v in nu)
                row.append(diag)
            else:
                row.append(1 / (eps[i] - eps[j]))
        rows.append(row)
    j_tilde = SquareMatrix(rows)
    rhs = determinant(j_tilde)
    return BosonSumResult(sum_of_permanents=lhs, det_j_tilde=rhs,
                          holds=values_agree(lhs, rhs, j_tilde.exact))


def random_instance(two_s: int, n: int, rng) -> tuple[SpinSystem, tuple]:
    """Well-separated random exact instance for identity sweeps.

    Inhomogeneities are the integers 0..n-1; rapidities are rationals p/q
    with p in [-999, 999], q in [1, 64], redrawn on collision with an
    inhomogeneity.  Exactly representable, so exact and float runs see the
    same instance.
    """
    eps = tuple(Fraction(i) for i in range(n))
    system = SpinSystem(two_s=two_s, epsilons=eps)
    nu = []
    while len(nu) < system.omega:
        x = Fraction(rng.randint(-999, 999), rng.randint(1, 64))
        if x not in eps:
            nu.append(x)
    return system, tuple(nu)
