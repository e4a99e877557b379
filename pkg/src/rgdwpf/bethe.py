"""Bethe equations for the spin-1/2 pairing model, in two formulations.

The traditional rapidity equations couple M unknowns through pair
interaction terms 2/(lam_i - lam_j) and are singular whenever rapidities
approach each other or a level.  The eigenvalue-based variables

    L_i = sum_k 1/(eps_i - lam_k)

turn the same spectral problem into N coupled *quadratic* equations that
stay real and regular even where rapidities collide into complex
conjugate pairs, which is what makes them the preferred numerical route.
Both solvers here continue solutions in the coupling g from the trivially
solvable weak-coupling limit (homotopy), and a solution of one route must
match the other after conversion.

The dual description (lowering operators on the fully polarized state)
shifts every eigenvalue-based variable by -2/g; the dual rapidities solve
the rapidity equations with N - M unknowns at coupling -g.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CardinalityMismatch, DegenerateEpsilons, NoConvergence, PoleAtEvaluationPoint

#: Accepted homotopy steps must reach this Newton residual before advancing.
RESIDUAL_TOL = 1e-12
#: Failed continuation steps halve the increment at most this many times.
MAX_STEP_HALVINGS = 40
#: The starting coupling satisfies |g0| <= this fraction of the smallest level gap.
START_GAP_FRACTION = 0.05
#: Geometric substeps per doubling of the coupling.
SUBSTEPS_PER_DOUBLING = 4


@dataclass(frozen=True)
class CouplingModel:
    """N spin-1/2 levels at ``eps`` with pairing coupling g and M excitations."""

    g: float
    eps: tuple
    m: int

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        if self.g == 0:
            raise ValueError("coupling g must be nonzero")
        if len(set(self.eps)) != len(self.eps):
            raise DegenerateEpsilons("levels must be pairwise distinct")
        if not 0 <= self.m <= self.n:
            raise CardinalityMismatch(f"excitation count {self.m} outside 0..{self.n}")

    @property
    def n(self) -> int:
        return len(self.eps)

    @property
    def min_gap(self) -> float:
        if self.n < 2:
            return float("inf")
        e = sorted(self.eps)
        return min(b - a for a, b in zip(e, e[1:]))


@dataclass(frozen=True)
class LambdaVars:
    """Eigenvalue-based variables, one per level."""

    values: tuple


@dataclass(frozen=True)
class RapidityState:
    """Rapidities of a Bethe state; complex conjugate pairs are expected."""

    lambdas: tuple


def lambdas_from_rapidities(state: RapidityState, eps) -> LambdaVars:
    """Evaluate L_i = sum_k 1/(eps_i - lam_k)."""
    lams = state.lambdas
    for lam in lams:
        if lam in eps:
            raise PoleAtEvaluationPoint(f"rapidity {lam} sits on a level")
    return LambdaVars(values=tuple(sum(1 / (e - lam) for lam in lams) for e in eps))


def richardson_residuals(state: RapidityState, model: CouplingModel) -> np.ndarray:
    """Defects of the rapidity equations, one per rapidity.

    residual_i = 2/g - sum_{j != i} 2/(lam_i - lam_j)
                 - sum_k 1/(eps_k - lam_i).
    """
    lams = np.asarray(state.lambdas, dtype=complex)
    m = len(lams)
    for lam in state.lambdas:
        if lam in model.eps:
            raise PoleAtEvaluationPoint(f"rapidity {lam} sits on a level")
    if len(set(state.lambdas)) != m:
        raise PoleAtEvaluationPoint("coincident rapidities make the equations singular")
    return _richardson_residuals_arr(lams, model.g, np.asarray(model.eps))


def _richardson_residuals_arr(lams, g, eps):
    m = len(lams)
    out = np.empty(m, dtype=complex)
    for i in range(m):
        pair = sum(2 / (lams[i] - lams[j]) for j in range(m) if j != i)
        out[i] = 2 / g - pair - np.sum(1 / (eps - lams[i]))
    return out


def _richardson_jacobian(lams, g, eps):
    m = len(lams)
    jac = np.zeros((m, m), dtype=complex)
    for i in range(m):
        jac[i, i] = (sum(2 / (lams[i] - lams[j]) ** 2 for j in range(m) if j != i)
                     - np.sum(1 / (eps - lams[i]) ** 2))
        for j in range(m):
            if j != i:
                jac[i, j] = -2 / (lams[i] - lams[j]) ** 2
    return jac


def quad_residuals(lv: LambdaVars, model: CouplingModel) -> np.ndarray:
    """Defects of the quadratic equations in the eigenvalue-based variables.

    residual_i = L_i^2 - sum_{j != i} (L_i - L_j)/(eps_i - eps_j)
                 - (2/g) L_i.
    """
    vals = np.asarray(lv.values)
    eps = model.eps
    n = model.n
    out = np.empty(n, dtype=vals.dtype)
    for i in range(n):
        cross = sum((vals[i] - vals[j]) / (eps[i] - eps[j]) for j in range(n) if j != i)
        out[i] = vals[i] ** 2 - cross - (2 / model.g) * vals[i]
    return out


def quad_jacobian(lv: LambdaVars, model: CouplingModel) -> np.ndarray:
    """Analytic Jacobian of :func:`quad_residuals` with respect to the variables."""
    vals = np.asarray(lv.values)
    eps = model.eps
    n = model.n
    jac = np.zeros((n, n), dtype=vals.dtype)
    for i in range(n):
        jac[i, i] = 2 * vals[i] - 2 / model.g
        for j in range(n):
            if j != i:
                inv = 1 / (eps[i] - eps[j])
                jac[i, i] -= inv
                jac[i, j] = inv
    return jac


def _newton(residual, jacobian, x0, tol=RESIDUAL_TOL, max_iter=200):
    x = np.array(x0)
    r = residual(x)
    best = np.max(np.abs(r))
    for _ in range(max_iter):
        if best < tol:
            return x, True
        try:
            dx = np.linalg.solve(jacobian(x), -r)
        except np.linalg.LinAlgError:
            return x, False
        step = 1.0
        for _ in range(30):
            xn = x + step * dx
            rn = residual(xn)
            if np.max(np.abs(rn)) < best:
                x, r = xn, rn
                best = np.max(np.abs(r))
                break
            step *= 0.5
        else:
            return x, False
    return x, bool(best < tol)


def _g_start(model: CouplingModel) -> float:
    g0 = model.g
    while abs(g0) > START_GAP_FRACTION * model.min_gap:
        g0 /= 2
    return g0


def _continue_in_g(residual_of_g, jacobian_of_g, x, g0, g_target, extra_seeds=None):
    """Follow a solution branch from g0 to g_target along a geometric path.

    Accepted steps end with Newton residual below :data:`RESIDUAL_TOL`;
    failed steps halve the path increment, at most
    :data:`MAX_STEP_HALVINGS` times in total.
    """
    if g0 == g_target:
        return x
    ratio = g_target / g0
    doublings = np.log(abs(ratio)) / np.log(2)
    du0 = 1.0 / max(1, round(doublings * SUBSTEPS_PER_DOUBLING))
    u, du = 0.0, du0
    halvings = 0
    while u < 1.0:
        u_next = min(u + du, 1.0)
        g = g0 * ratio ** u_next
        seeds = [x]
        if extra_seeds is not None:
            seeds += extra_seeds(x)
        converged = False
        for seed in seeds:
            xn, converged = _newton(residual_of_g(g), jacobian_of_g(g), seed)
            if converged:
                break
        if converged:
            u, x = u_next, xn
            du = min(du * 2, du0)
        else:
            du /= 2
            halvings += 1
            if halvings > MAX_STEP_HALVINGS:
                g_reached = g0 * ratio ** u
                raise NoConvergence(
                    f"continuation stalled at g = {g_reached:.6g}", g_reached=g_reached)
    return x


def solve_quadratic_bethe(model: CouplingModel, occupation) -> LambdaVars:
    """Solve the quadratic equations for the state selected by ``occupation``.

    Parameters
    ----------
    model : CouplingModel
    occupation : sequence of 0/1, length N
        Weak-coupling level occupations; must contain exactly ``model.m``
        ones.  The homotopy seed is L_i = (2/g0) * occupation_i, which is
        the leading weak-coupling behaviour of occupied levels.

    Returns
    -------
    LambdaVars with max |residual| below 1e-12.
    """
    occupation = tuple(int(b) for b in occupation)
    if len(occupation) != model.n or any(b not in (0, 1) for b in occupation):
        raise CardinalityMismatch("occupation must be N bits")
    if sum(occupation) != model.m:
        raise CardinalityMismatch(
            f"occupation has {sum(occupation)} excitations, model declares {model.m}")
    if model.m == 0:
        return LambdaVars(values=(0.0,) * model.n)

    g0 = _g_start(model)

    def _at(g):
        return CouplingModel(g=g, eps=model.eps, m=model.m)

    def res(g):
        return lambda v: quad_residuals(LambdaVars(tuple(v)), _at(g))

    def jac(g):
        return lambda v: quad_jacobian(LambdaVars(tuple(v)), _at(g))

    x0 = (2 / g0) * np.asarray(occupation, dtype=float)
    x, ok = _newton(res(g0), jac(g0), x0)
    if not ok:
        raise NoConvergence(f"weak-coupling solve failed at g = {g0:.6g}", g_reached=g0)
    x = _continue_in_g(res, jac, x, g0, model.g)
    return LambdaVars(values=tuple(float(v) for v in x))


def _pair_rotations(lams):
    # Reseed the closest rapidity pairs as vertical complex pairs about
    # their midpoint: past a pair collision the true roots are conjugate
    # pairs, which a real-line seed can never reach.
    m = len(lams)
    seeds = []
    if m < 2:
        return seeds
    dists = sorted(
        (abs(lams[i] - lams[j]), i, j) for i in range(m) for j in range(i + 1, m))
    for _, i, j in dists[:3]:
        centre = (lams[i] + lams[j]) / 2
        half = max(abs(lams[i] - lams[j]) / 2, 1e-3)
        out = np.array(lams, dtype=complex)
        out[i] = centre + 1j * half
        out[j] = centre - 1j * half
        seeds.append(out)
    return seeds


def solve_richardson(model: CouplingModel, initial_levels) -> RapidityState:
    """Solve the rapidity equations by continuation from the weak-coupling limit.

    Parameters
    ----------
    model : CouplingModel
    initial_levels : sequence of M distinct level indices (0-based)
        At weak coupling each rapidity sits just below its level,
        lam_k = eps_{i_k} - g0/2; a tiny imaginary jitter lets pairs leave
        the real axis where the branch requires it.

    Returns
    -------
    RapidityState with max |residual| below 1e-12.
    """
    levels = tuple(initial_levels)
    if len(set(levels)) != len(levels) or len(levels) != model.m:
        raise CardinalityMismatch("initial_levels must be M distinct indices")
    if any(not 0 <= i < model.n for i in levels):
        raise CardinalityMismatch("initial level index out of range")
    if model.m == 0:
        return RapidityState(lambdas=())

    g0 = _g_start(model)
    eps = np.asarray(model.eps)
    m = model.m
    jitter = 1j * 1e-6 * np.array([(k + 1) * (-1) ** k for k in range(m)])

    def res(g):
        return lambda lam: _richardson_residuals_arr(lam, g, eps)

    def jac(g):
        return lambda lam: _richardson_jacobian(lam, g, eps)

    def fallback(lam):
        return [lam + jitter] + _pair_rotations(lam)

    x0 = np.array([model.eps[i] - g0 / 2 for i in levels], dtype=complex) + jitter
    x, ok = _newton(res(g0), jac(g0), x0)
    if not ok:
        raise NoConvergence(f"weak-coupling solve failed at g = {g0:.6g}", g_reached=g0)
    x = _continue_in_g(res, jac, x, g0, model.g, extra_seeds=fallback)
    return RapidityState(lambdas=tuple(complex(v) for v in x))


def dual_transform(lv: LambdaVars, model: CouplingModel) -> LambdaVars:
    """Eigenvalue-based variables of the dual state: a rigid shift by -2/g."""
    shift = 2 / model.g
    return LambdaVars(values=tuple(v - shift for v in lv.values))
