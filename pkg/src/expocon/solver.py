"""Numeric solution of order-condition systems.

A float64 batched Newton search locates candidate roots quickly; every
candidate is then re-converged with arbitrary-precision damped Newton (30
digits first, then the target precision) so reported residuals are meaningful
at the requested number of digits.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import mpmath
import numpy as np
from mpmath import mp

from .conditions import residual_of_scheme
from .magnus import (
    assemble_scheme_expression,
    eighth_order_condition_sets,
    magnus_alphabet,
)
from .ncexpr import build_self_adjoint_ansatz, parse_expression, substitute_parameters
from .poly import PolyRational, differentiate
from .rings import GUARD_DIGITS, NotRationalError, mpc_str, rationalize
from .wcoeff import wcoeff
from .words import GradedAlphabet

__all__ = [
    "PolySystem",
    "NewtonResult",
    "SolveReport",
    "Solution",
    "StagedResult",
    "SolverError",
    "SingularJacobianError",
    "NewtonDivergenceError",
    "NewtonMaxIterError",
    "StageSingularError",
    "RationalizationError",
    "differentiate",
    "newton_solve",
    "multistart_search",
    "staged_solve_magnus8",
    "solve_splitting_example",
    "build_magnus8_stage1",
    "magnus8_stage1_variables",
]


class SolverError(RuntimeError):
    pass


class SingularJacobianError(SolverError):
    pass


class NewtonDivergenceError(SolverError):
    pass


class NewtonMaxIterError(SolverError):
    pass


class StageSingularError(SolverError):
    def __init__(self, message, stage, assignment):
        super().__init__(message)
        self.stage = stage
        self.assignment = assignment


class RationalizationError(SolverError):
    pass


# -- polynomial systems --------------------------------------------------------


@dataclass
class PolySystem:
    """Square polynomial system with its symbolic Jacobian."""

    equations: list[PolyRational]
    variables: list[str]
    jacobian: list[list[PolyRational]] = field(default_factory=list)

    def __post_init__(self):
        self.equations = [p.with_variables(self.variables) for p in self.equations]
        if not self.jacobian:
            self.jacobian = [
                [differentiate(eq, v).with_variables(self.variables) for v in self.variables]
                for eq in self.equations
            ]
        self._terms = None
        self._mp_coeff_cache = {}

    # compiled term lists: [(((var_index, exponent), ...), Fraction), ...]
    def _compiled(self):
        if self._terms is None:
            def compile_poly(p):
                out = []
                for expo, coeff in sorted(p.terms.items()):
                    pairs = tuple((i, e) for i, e in enumerate(expo) if e)
                    out.append((pairs, coeff))
                return out

            self._terms = {
                "eqs": [compile_poly(p) for p in self.equations],
                "jac": [[compile_poly(p) for p in row] for row in self.jacobian],
            }
        return self._terms

    def _mp_coeffs(self, dps):
        cached = self._mp_coeff_cache.get(dps)
        if cached is None:
            compiled = self._compiled()

            def convert(polys):
                return [
                    [mpmath.mpf(c.numerator) / c.denominator for _, c in terms]
                    for terms in polys
                ]

            cached = {
                "eqs": convert(compiled["eqs"]),
                "jac": [convert(row) for row in compiled["jac"]],
            }
            self._mp_coeff_cache[dps] = cached
        return cached

    def _powers(self, values):
        compiled = self._compiled()
        maxdeg = [0] * len(self.variables)
        for terms in compiled["eqs"]:
            for pairs, _ in terms:
                for i, e in pairs:
                    maxdeg[i] = max(maxdeg[i], e)
        pw = []
        for i, x in enumerate(values):
            row = [mpmath.mpc(1)]
            for _ in range(maxdeg[i]):
                row.append(row[-1] * x)
            pw.append(row)
        return pw

    def _eval_terms(self, terms, coeffs, pw):
        total = mpmath.mpc(0)
        for (pairs, _), c in zip(terms, coeffs):
            term = c
            for i, e in pairs:
                row = pw[i]
                term = term * (row[e] if e < len(row) else pw[i][1] ** e)
            total += term
        return total

    def evaluate(self, values: Sequence) -> list:
        """Equation values at a point (mp arithmetic at the ambient precision)."""
        compiled = self._compiled()
        coeffs = self._mp_coeffs(mp.dps)
        pw = self._powers([mpmath.mpc(v) for v in values])
        return [
            self._eval_terms(terms, cs, pw)
            for terms, cs in zip(compiled["eqs"], coeffs["eqs"])
        ]

    def evaluate_jacobian(self, values: Sequence) -> list[list]:
        compiled = self._compiled()
        coeffs = self._mp_coeffs(mp.dps)
        pw = self._powers([mpmath.mpc(v) for v in values])
        return [
            [self._eval_terms(t, c, pw) for t, c in zip(trow, crow)]
            for trow, crow in zip(compiled["jac"], coeffs["jac"])
        ]

    def assignment(self, values: Sequence) -> dict:
        return dict(zip(self.variables, values))

    def residual(self, values: Sequence):
        return max(abs(v) for v in self.evaluate(values))


# -- arbitrary-precision Newton -------------------------------------------------


@dataclass
class NewtonResult:
    assignment: dict
    values: list
    residual: object
    iterations: int
    residual_history: list

    def vector(self, variables) -> list:
        return [self.assignment[v] for v in variables]


def _merit(values):
    """Least-squares merit; damping decisions use this, reporting uses max-norm."""
    return mpmath.sqrt(sum((abs(v)) ** 2 for v in values))


def _lm_step(jac, fx, mu):
    """Levenberg-Marquardt direction: (J^H J + mu I) dx = -J^H F."""
    n = len(jac)
    m = len(jac[0])
    normal = [[mpmath.mpc(0)] * m for _ in range(m)]
    rhs = [mpmath.mpc(0)] * m
    for i in range(m):
        for j in range(m):
            normal[i][j] = sum(mpmath.conj(jac[k][i]) * jac[k][j] for k in range(n))
        normal[i][i] += mu
        rhs[i] = -sum(mpmath.conj(jac[k][i]) * fx[k] for k in range(n))
    return mpmath.lu_solve(mpmath.matrix(normal), mpmath.matrix(rhs))


def newton_solve(
    system: PolySystem,
    start,
    digits: int = 64,
    max_iter: int = 80,
) -> NewtonResult:
    """Damped Newton at the requested precision.

    ``start`` is a mapping or a vector aligned with the system variables.
    Success means a residual max-norm below 10^-(digits-8).  The step is
    halved up to 30 times when the least-squares merit would increase; if no
    halving helps (the systems here can have Jacobian condition numbers
    beyond 1e8 at their roots), a regularized least-squares step is tried
    before giving up.
    """
    n = len(system.variables)
    if len(system.equations) != n:
        raise ValueError("newton_solve needs a square system")
    if isinstance(start, Mapping):
        start = [start[v] for v in system.variables]
    if len(start) != n:
        raise ValueError("start vector does not match the system variables")
    with mp.workdps(digits + GUARD_DIGITS):
        x = [mpmath.mpc(v) for v in start]
        tol = mpmath.mpf(10) ** (-(digits - 8))
        history = []
        fx = system.evaluate(x)
        res = max(abs(v) for v in fx)
        phi = _merit(fx)
        for iteration in range(1, max_iter + 1):
            history.append(res)
            if res < tol:
                return NewtonResult(system.assignment(x), fx, res, iteration - 1, history)
            jac = system.evaluate_jacobian(x)
            try:
                dx = mpmath.lu_solve(mpmath.matrix(jac), mpmath.matrix([-v for v in fx]))
            except ZeroDivisionError as exc:
                raise SingularJacobianError(f"singular Jacobian after {iteration} steps") from exc
            step_norm = max(abs(v) for v in dx)
            if not mpmath.isfinite(step_norm) or step_norm > mpmath.mpf(10) ** 10:
                raise NewtonDivergenceError(f"step norm {step_norm} diverged")
            accepted = False
            lam = mpmath.mpf(1)
            for _ in range(31):
                x_new = [xi + lam * di for xi, di in zip(x, dx)]
                f_new = system.evaluate(x_new)
                phi_new = _merit(f_new)
                if phi_new < phi or max(abs(v) for v in f_new) < tol:
                    accepted = True
                    break
                lam = lam / 2
            if not accepted:
                # regularized fallback for nearly singular Jacobians
                scale = max(max(abs(v) for v in row) for row in jac) ** 2
                mu = scale * mpmath.mpf(10) ** (-12)
                for _ in range(26):
                    dx = _lm_step(jac, fx, mu)
                    x_new = [xi + di for xi, di in zip(x, dx)]
                    f_new = system.evaluate(x_new)
                    phi_new = _merit(f_new)
                    if phi_new < phi:
                        accepted = True
                        break
                    mu = mu * 10
                if not accepted:
                    raise NewtonDivergenceError("no progress from damping or regularization")
            x, fx = x_new, f_new
            phi = phi_new
            res = max(abs(v) for v in fx)
        if res < tol:
            history.append(res)
            return NewtonResult(system.assignment(x), fx, res, max_iter, history)
    raise NewtonMaxIterError(f"no convergence within {max_iter} iterations (residual {res})")


# -- float64 batched pre-search --------------------------------------------------


def _compile_float(system: PolySystem):
    compiled = system._compiled()
    V = len(system.variables)
    monomials = {}
    for group in [compiled["eqs"]] + [row for row in compiled["jac"]]:
        for terms in group:
            for pairs, _ in terms:
                monomials.setdefault(pairs, len(monomials))
    expo = np.zeros((len(monomials), V), dtype=np.int64)
    for pairs, idx in monomials.items():
        for i, e in pairs:
            expo[idx, i] = e

    def compile_terms(terms):
        idx = np.array([monomials[pairs] for pairs, _ in terms], dtype=np.int64)
        coeffs = np.array([complex(c) for _, c in terms], dtype=np.complex128)
        return idx, coeffs

    eqs = [compile_terms(t) for t in compiled["eqs"]]
    jac = [[compile_terms(t) for t in row] for row in compiled["jac"]]
    maxdeg = int(expo.max()) if len(monomials) else 0
    return expo, maxdeg, eqs, jac


def _monomial_values(expo, maxdeg, X):
    P, V = X.shape
    powers = np.ones((P, V, maxdeg + 1), dtype=np.complex128)
    for d in range(1, maxdeg + 1):
        powers[:, :, d] = powers[:, :, d - 1] * X
    vals = np.ones((P, expo.shape[0]), dtype=np.complex128)
    for v in range(V):
        vals *= powers[:, v, :][:, expo[:, v]]
    return vals


def _eval_float(compiled_terms, mono):
    idx, coeffs = compiled_terms
    if len(idx) == 0:
        return np.zeros(mono.shape[0], dtype=np.complex128)
    return mono[:, idx] @ coeffs


def _float_presearch(system: PolySystem, starts: np.ndarray, iterations: int = 70):
    """Plain batched Newton in double precision; returns rough candidate roots."""
    expo, maxdeg, eqs, jac = _compile_float(system)
    E, V = len(eqs), len(system.variables)
    X = starts.copy()
    alive = np.ones(len(X), dtype=bool)
    for _ in range(iterations):
        idx_alive = np.flatnonzero(alive)
        if len(idx_alive) == 0:
            break
        Xa = X[idx_alive]
        mono = _monomial_values(expo, maxdeg, Xa)
        F = np.stack([_eval_float(c, mono) for c in eqs], axis=1)
        res = np.abs(F).max(axis=1)
        J = np.empty((len(Xa), E, V), dtype=np.complex128)
        for i in range(E):
            for j in range(V):
                J[:, i, j] = _eval_float(jac[i][j], mono)
        det = np.linalg.det(J)
        good = np.isfinite(det) & (np.abs(det) > 1e-280) & np.isfinite(res)
        dx = np.zeros_like(Xa)
        if good.any():
            dx[good] = np.linalg.solve(J[good], -F[good, :, None])[:, :, 0]
        # crude backtracking: halve steps that made things worse
        lam = np.ones(len(Xa))
        for _ in range(6):
            X_try = Xa + lam[:, None] * dx
            mono_try = _monomial_values(expo, maxdeg, X_try)
            F_try = np.stack([_eval_float(c, mono_try) for c in eqs], axis=1)
            res_try = np.abs(F_try).max(axis=1)
            worse = np.isfinite(res) & ((~np.isfinite(res_try)) | (res_try > res)) & (res > 1e-12)
            if not worse.any():
                break
            lam[worse] *= 0.5
        Xa = Xa + lam[:, None] * dx
        dead = ~np.isfinite(Xa).all(axis=1) | (np.abs(Xa).max(axis=1) > 1e8) | ~good
        X[idx_alive] = np.where(dead[:, None], X[idx_alive], Xa)
        alive_idx_dead = idx_alive[dead]
        alive[alive_idx_dead] = False
    mono = _monomial_values(expo, maxdeg, X)
    F = np.stack([_eval_float(c, mono) for c in eqs], axis=1)
    res = np.abs(F).max(axis=1)
    ok = np.isfinite(res) & (res < 1e-6)
    return X[ok]


# -- multistart ------------------------------------------------------------------


@dataclass
class Solution:
    assignment: dict
    residual: object
    is_real: bool

    def vector(self, variables):
        return [self.assignment[v] for v in variables]


@dataclass
class SolveReport:
    solutions: list[Solution]
    starts_tried: int
    precision: int

    def to_json_dict(self) -> dict:
        return {
            "precision": self.precision,
            "starts_tried": self.starts_tried,
            "solutions": [
                {
                    "assignment": {
                        k: mpc_str(v, self.precision) for k, v in s.assignment.items()
                    },
                    "residual": mpmath.nstr(s.residual, 8),
                    "is_real": s.is_real,
                }
                for s in self.solutions
            ],
        }


def _dedup(vectors, tol):
    reps = []
    for vec in vectors:
        if all(max(abs(a - b) for a, b in zip(vec, rep)) > tol for rep in reps):
            reps.append(vec)
    return reps


def multistart_search(
    system: PolySystem,
    n_starts: int,
    start_box: float = 2.0,
    digits: int = 50,
    dedup_tol: float = 1e-10,
    seed: int = 0,
    residual_threshold=None,
) -> SolveReport:
    """Randomized global search: seeded complex starts, Newton, deduplication.

    Starts are uniform in the complex box [-b, b] + [-b, b]i per variable.  A
    double-precision batched Newton pass locates candidate basins; survivors
    are polished at 30 digits and then at the target precision.  The report is
    deterministic for a fixed seed.
    """
    V = len(system.variables)
    if len(system.equations) != V:
        raise ValueError("multistart_search needs a square system")
    if residual_threshold is None:
        residual_threshold = mpmath.mpf(10) ** (-(digits - 8))
    rng = random.Random(seed)
    starts = np.array(
        [
            [
                complex(rng.uniform(-start_box, start_box), rng.uniform(-start_box, start_box))
                for _ in range(V)
            ]
            for _ in range(n_starts)
        ],
        dtype=np.complex128,
    )
    rough = _float_presearch(system, starts)
    rough_sorted = sorted(
        (tuple(row) for row in rough),
        key=lambda row: tuple((round(z.real, 8), round(z.imag, 8)) for z in row),
    )
    candidates = _dedup(rough_sorted, 1e-6)

    polished = []
    for cand in candidates:
        try:
            coarse = newton_solve(system, [complex(z) for z in cand], digits=30, max_iter=60)
            fine = newton_solve(
                system, coarse.vector(system.variables), digits=digits, max_iter=60
            )
        except SolverError:
            continue
        try:
            # a few extra digits of headroom so downstream stages keep margin
            fine = newton_solve(
                system, fine.vector(system.variables), digits=digits + 6, max_iter=100
            )
        except SolverError:
            pass
        if fine.residual < residual_threshold:
            polished.append(fine.vector(system.variables))

    with mp.workdps(digits + GUARD_DIGITS):
        polished.sort(key=lambda vec: tuple(mpc_str(z, 20) for z in vec))
        unique = _dedup(polished, dedup_tol)
        solutions = []
        for vec in unique:
            res = system.residual(vec)
            is_real = all(abs(z.imag) < dedup_tol for z in vec)
            solutions.append(Solution(system.assignment(vec), res, is_real))
    return SolveReport(solutions, n_starts, digits)


# -- the staged eighth-order construction ----------------------------------------


def magnus8_stage1_variables() -> list[str]:
    """Unknowns of the first stage: grade-1 then grade-2 columns, row by row."""
    return ["f11", "f21", "f31", "f41", "f12", "f22", "f32", "f42"]


@lru_cache(maxsize=1)
def build_magnus8_stage1():
    """Ansatz and the 8x8 polynomial system on the first two generator columns.

    The eight conditions involve only words over the first two generators, so
    the equations are polynomials in the eight stage-1 parameters.
    """
    alphabet = magnus_alphabet(4)
    ansatz = build_self_adjoint_ansatz(8, alphabet)
    (w12, rhs12), _, _ = eighth_order_condition_sets(alphabet)
    equations = [wcoeff(w, ansatz.expression) - r for w, r in zip(w12, rhs12)]
    system = PolySystem(equations, magnus8_stage1_variables())
    return ansatz, system


@dataclass
class StagedResult:
    parameters: dict
    residual: object
    digits: int

    def half_rows(self) -> list[list]:
        return [
            [self.parameters[f"f{j}{k}"] for k in range(1, 5)] for j in range(1, 5)
        ]


def _linear_stage(ansatz, base, unknowns, words, rhs, digits, stage_name):
    """Solve a stage whose selected conditions are affine in the unknowns."""
    from .rings import MPComplexRing

    ring = MPComplexRing(digits)

    def residuals(update):
        assignment = dict(base)
        assignment.update(update)
        expr = substitute_parameters(ansatz.expression, assignment)
        return [
            wcoeff(w, expr, ring) - ring.from_rational(r) for w, r in zip(words, rhs)
        ]

    zero = {name: mpmath.mpc(0) for name in unknowns}
    constant = residuals(zero)
    columns = []
    for name in unknowns:
        probe = dict(zero)
        probe[name] = mpmath.mpc(1)
        column = [a - b for a, b in zip(residuals(probe), constant)]
        columns.append(column)
    matrix = mpmath.matrix(
        [[columns[k][i] for k in range(len(unknowns))] for i in range(len(words))]
    )
    try:
        solution = mpmath.lu_solve(matrix, mpmath.matrix([-v for v in constant]))
    except ZeroDivisionError as exc:
        raise StageSingularError(
            f"{stage_name} stage is singular", stage_name, dict(base)
        ) from exc
    return {name: solution[i] for i, name in enumerate(unknowns)}


def staged_solve_magnus8(f12_solution: Mapping, digits: int = 50) -> StagedResult:
    """Extend a stage-1 solution to all 16 parameters and verify all 22 conditions.

    The third-column unknowns come from the four selected single-A3 words
    (linear system), then the fourth-column unknowns from the four selected
    single-A4 words; the returned residual is over every condition, including
    the ones not used in the solve.
    """
    alphabet = magnus_alphabet(4)
    ansatz, _ = build_magnus8_stage1()
    (w12, rhs12), (w3, rhs3), (w4, rhs4) = eighth_order_condition_sets(alphabet)
    with mp.workdps(digits + GUARD_DIGITS):
        base = {name: mpmath.mpc(v) for name, v in f12_solution.items()}
        for j in range(1, 5):
            base.setdefault(f"f{j}3", mpmath.mpc(0))
            base.setdefault(f"f{j}4", mpmath.mpc(0))
        stage3 = _linear_stage(
            ansatz,
            base,
            [f"f{j}3" for j in range(1, 5)],
            w3[1:5],
            rhs3[1:5],
            digits,
            "third-column",
        )
        base.update(stage3)
        stage4 = _linear_stage(
            ansatz,
            base,
            [f"f{j}4" for j in range(1, 5)],
            w4[0:4],
            rhs4[0:4],
            digits,
            "fourth-column",
        )
        base.update(stage4)
        expr = substitute_parameters(ansatz.expression, base)
        words = list(w12) + list(w3) + list(w4)
        rhs = list(rhs12) + list(rhs3) + list(rhs4)
        residual = residual_of_scheme(expr, words, rhs, digits)
    return StagedResult(dict(base), residual, digits)


# -- the exact fourth-order splitting --------------------------------------------


SPLITTING4_ANSATZ = "exp(b*B)*exp(a*A)*exp(c*B + d*[B,[A,B]])*exp(a*A)*exp(b*B)"


def build_splitting4_system():
    """Order conditions for the five-exponential splitting ansatz."""
    from .conditions import order_conditions

    alphabet = GradedAlphabet(("A", "B"), (1, 1))
    S = parse_expression(SPLITTING4_ANSATZ, alphabet, ("a", "b", "c", "d"))
    E = parse_expression("exp(A+B)", alphabet)
    system = order_conditions(S, E, p=4, self_adjoint=True)
    return S, E, system


def solve_splitting_example(digits: int = 64) -> dict[str, Fraction]:
    """Solve the four-parameter splitting conditions and recover exact values.

    Newton converges from a fixed interior start, each component is
    rationalized by continued fractions, and the exact values are verified by
    substitution into the condition polynomials before being returned.
    """
    _, _, oc = build_splitting4_system()
    polys = oc.condition_polynomials()
    system = PolySystem(polys, ["a", "b", "c", "d"])
    start = {"a": 0.4, "b": 0.2, "c": 0.7, "d": 0.01}
    result = newton_solve(system, start, digits=digits)
    exact: dict[str, Fraction] = {}
    with mp.workdps(digits + GUARD_DIGITS):
        for name in system.variables:
            value = result.assignment[name]
            try:
                exact[name] = rationalize(value, max_denominator=10**6, digits=digits)
            except NotRationalError as exc:
                raise RationalizationError(
                    f"component {name} = {mpc_str(value, digits)} is not rational"
                ) from exc
    for p in polys:
        residual = p.substitute(exact)
        if not residual.is_zero():
            raise RationalizationError(
                f"exact verification failed: {p} -> {residual} at {exact}"
            )
    return exact
