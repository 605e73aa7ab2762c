"""Functional-equation solving and singularity analysis for tree families.

Three layers:

* series solvers for the class generating functions -- the unrestricted
  family P(x,t) (automorphism weights |Aut|^-t), its leaf/degree-marked
  variants, and the degree-restricted family P_D(x,t) built from the
  partition expansion over root degrees;
* singular-point location -- a one-dimensional root-find for equations of
  exponential type y = x exp(y + g(x)) (whose characteristic condition
  collapses to y0 = 1), and a 2x2 Newton iteration with the exact Jacobian
  of the truncated system for polynomial equations y = x sum_m c_m(x) y^m;
* constant extraction -- square-root singularity coefficient asymptotics
  plus quasi-power cumulants: move the dominant singularity along a marking
  parameter and take Richardson-extrapolated central differences of log x0.

Nested occurrences P(x^j, jt) are analytic well beyond the dominant
singularity of the j=1 level, so they enter every point evaluation as
truncated polynomials; truncation depths are configurable and each reported
constant carries stability diagnostics (order doubling, step halving).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction

import mpmath as mp

from .fields import RATIONAL, RealField
from .partitions import c_coeff_table, enumerate_partitions
from .series import TruncSeries
from .trees import DegreeModel


class SolverError(RuntimeError):
    """Singularity solver failure (bad bracket, divergence, degeneracy)."""


@dataclass(frozen=True)
class AsymConfig:
    """Knobs for the constant-extraction pipeline.

    order: default series order for whole-expansion requests;
    j_max: cutoff of the j-sum in exponential-type equations (terms decay
      geometrically like (2x)^j);
    nested_order: truncation of nested factors evaluated pointwise;
    trunc_order: polynomial truncation inside 2x2 Newton systems;
    fd_step: base step for the quasi-power central differences.
    """

    order: int = 64
    prec_bits: int = 192
    j_max: int = 64
    nested_order: int = 48
    trunc_order: int = 48
    fd_step: Fraction = Fraction(1, 1000)
    solver_tol: float = 1e-20
    newton_max_iter: int = 200

    def real_field(self) -> RealField:
        return RealField(self.prec_bits)

    def scaled(self, factor: int) -> "AsymConfig":
        return replace(
            self,
            order=self.order * factor,
            j_max=self.j_max * factor,
            nested_order=self.nested_order * factor,
            trunc_order=self.trunc_order * factor,
        )


DEFAULT_CONFIG = AsymConfig()


def _embed_power(sub: TruncSeries, j: int, order: int, field) -> TruncSeries:
    """sub(x^j) as a series of the given (larger) order."""
    return TruncSeries.from_coeffs(field, sub.coeffs, order).substitute_power(j)


# ---------------------------------------------------------------------------
# Series families
# ---------------------------------------------------------------------------


class PolyaFamily:
    """The unrestricted family P(x,t) = sum_P x^|P| / |Aut P|^t and its
    marked variants, as truncated series over one scalar field.

    P satisfies P = x exp(P + sum_{j>=2} c(j,t)/j P(x^j, jt)); the solver is
    a single O(N^2) pass through the exp recurrence, recursing into nested
    parameters at order N // j. Solves are memoized per (t, N); a solve at a
    higher order extends a lower one coefficientwise (bit-equal prefixes in
    the exact field).
    """

    def __init__(self, field):
        self.field = field
        self._memo: dict = {}
        self._lock = threading.RLock()

    def _cached(self, key, build):
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        value = build()
        with self._lock:
            self._memo[key] = value
        return value

    # -- plain series ------------------------------------------------------

    def series(self, t, N: int) -> TruncSeries:
        f = self.field
        t = f.coerce(t)
        return self._cached(("p", str(t), N), lambda: self._solve_series(t, N))

    def _solve_series(self, t, N: int) -> TruncSeries:
        f = self.field
        with f.context():
            g = self._nested_sum(t, N, lambda j, nj: self.series(j * t, nj))
            return self._solve_exp(g, N, extra_x1=f.zero)

    # -- leaf-marked series (scalar u) --------------------------------------

    def leaf_marked_series(self, t, u, N: int) -> TruncSeries:
        f = self.field
        t, u = f.coerce(t), f.coerce(u)
        return self._cached(("pl", str(t), str(u), N), lambda: self._solve_leaf_marked(t, u, N))

    def _solve_leaf_marked(self, t, u, N: int) -> TruncSeries:
        f = self.field
        with f.context():
            g = self._nested_sum(t, N, lambda j, nj: self.leaf_marked_series(j * t, u**j, nj))
            return self._solve_exp(g, N, extra_x1=u - f.one)

    # -- derivative in the mark at u = 1 ------------------------------------

    def mark_derivative_series(self, d: int, t, N: int) -> TruncSeries:
        """d/du P(x,t,u) at u=1 when u marks out-degree-d vertices.

        Differentiating the marked equation at u=1 and collecting the j=1
        term gives the linear relation
        P_u (1 - P) = P * sum_{j>=2} c(j,t) P_u(x^j,jt) + x D_d(x),
        solved bottom-up through the nested parameters.
        """
        f = self.field
        t = f.coerce(t)
        return self._cached(("pd", d, str(t), N), lambda: self._solve_mark_derivative(d, t, N))

    def _solve_mark_derivative(self, d: int, t, N: int) -> TruncSeries:
        f = self.field
        with f.context():
            P = self.series(t, N)
            ctab = c_coeff_table(max(N, 2), t, f)
            S = TruncSeries.zero(f, N)
            for j in range(2, N + 1):
                nj = N // j
                if nj < 1:
                    break
                sub = _embed_power(self.mark_derivative_series(d, j * t, nj), j, N, f)
                S = S + sub.scale(ctab[j])
            source = self.degree_slice_series(d, t, N).shift(1)
            return (P * S + source) / (TruncSeries.one(f, N) - P)

    def degree_slice_series(self, d: int, t, N: int) -> TruncSeries:
        """D_d(x): the root-degree-d slice, sum over partitions of d of
        prod_j (c(j,t) P(x^j,jt))^lambda_j / (j^lambda_j lambda_j!)."""
        f = self.field
        t = f.coerce(t)
        with f.context():
            if d == 0:
                return TruncSeries.one(f, N)
            nested = {1: self.series(t, N)}
            for j in range(2, d + 1):
                nested[j] = _embed_power(self.series(j * t, max(N // j, 1)), j, N, f)
            return self._slice_from_parts(d, t, N, nested)

    def _slice_from_parts(self, d: int, t, N: int, nested: dict) -> TruncSeries:
        f = self.field
        ctab = c_coeff_table(max(d, 2), t, f)
        total = TruncSeries.zero(f, N)
        for lam in enumerate_partitions(d):
            term = TruncSeries.one(f, N)
            scal = f.one
            for j, lam_j in lam.multiplicities().items():
                term = term * nested[j].pow_int(lam_j)
                cj = ctab[j] if j > 1 else f.one
                scal = scal * f.power(cj, lam_j) / (f.coerce(j) ** lam_j * math.factorial(lam_j))
            total = total + term.scale(scal)
        return total

    # -- fully marked series for scalar mark vectors ------------------------

    def degree_marked_series(self, marks: dict[int, object], t, N: int) -> TruncSeries:
        """P(x,t,u) for scalar marks {degree: u_d}; leaf-only mark vectors
        take the one-pass path, anything else iterates the fixed point."""
        f = self.field
        t = f.coerce(t)
        marks = {d: f.coerce(u) for d, u in sorted(marks.items())}
        if set(marks) == {0}:
            return self.leaf_marked_series(t, marks[0], N)
        key = ("pm", tuple((d, str(u)) for d, u in marks.items()), str(t), N)
        return self._cached(key, lambda: self._solve_degree_marked(marks, t, N))

    def _solve_degree_marked(self, marks, t, N: int) -> TruncSeries:
        f = self.field
        with f.context():
            ctab = c_coeff_table(max(max(marks), N, 2), t, f)
            nested = {}
            for j in range(2, N + 1):
                nj = N // j
                if nj < 1:
                    break
                sub = self.degree_marked_series({d: u**j for d, u in marks.items()}, j * t, nj)
                nested[j] = _embed_power(sub, j, N, f)
            for j in range(2, max(marks) + 1):
                if j not in nested:
                    nested[j] = TruncSeries.zero(f, N)
            P = TruncSeries.zero(f, N)
            one = TruncSeries.one(f, N)
            for _ in range(N + 1):
                expo = P
                for j, sub in nested.items():
                    expo = expo + sub.scale(ctab[j] / j)
                rhs = expo.exp().shift(1)
                for d, u in marks.items():
                    if u != f.one:
                        parts = dict(nested)
                        parts[1] = P
                        slice_d = one if d == 0 else self._slice_from_parts(d, t, N, parts)
                        rhs = rhs + slice_d.shift(1).scale(u - f.one)
                P = rhs
            return P

    # -- internals -----------------------------------------------------------

    def _nested_sum(self, t, N, solve_j):
        """sum_{j>=2} c(j,t)/j * (nested series)(x^j), to order N."""
        f = self.field
        ctab = c_coeff_table(max(N, 2), t, f)
        g = TruncSeries.zero(f, N)
        for j in range(2, N + 1):
            nj = N // j
            if nj < 1:
                break
            g = g + _embed_power(solve_j(j, nj), j, N, f).scale(ctab[j] / j)
        return g

    def _solve_exp(self, g: TruncSeries, N: int, extra_x1) -> TruncSeries:
        """One-pass solve of P = x exp(P + g) + extra_x1 * x.

        With E = exp(P + g): P_n = E_{n-1} (+ extra at n=1), and the exp
        recurrence n E_n = sum k A_k E_{n-k} only consumes lower-order data.
        """
        f = self.field
        zero = f.zero
        A = [zero] * (N + 1)
        E = [zero] * (N + 1)
        P = [zero] * (N + 1)
        E[0] = f.one
        gc = g.coeffs
        for n in range(1, N + 1):
            P[n] = E[n - 1] + (extra_x1 if n == 1 else zero)
            A[n] = P[n] + gc[n]
            acc = zero
            for k in range(1, n + 1):
                if A[k] != 0:
                    acc += k * A[k] * E[n - k]
            E[n] = acc / n
        return TruncSeries(f, tuple(P))


class DegreeFamily:
    """P_D(x,t) for a finite degree set D with weights, via the root-degree
    expansion x sum_{k in D} (w_k k!)^t sum_{lam |- k} prod_j
    (c(j,t) P_D(x^j,jt))^lambda_j / (j^lambda_j lambda_j!)."""

    def __init__(self, model: DegreeModel, field):
        if model.unbounded:
            raise ValueError("DegreeFamily needs a finite degree set")
        self.model = model
        self.field = field
        self._memo: dict = {}
        self._lock = threading.RLock()
        self._structure = {
            k: [lam.multiplicities() for lam in enumerate_partitions(k)] if k else [{}]
            for k in sorted(model.degrees)
        }

    def series(self, t, N: int) -> TruncSeries:
        f = self.field
        t = f.coerce(t)
        key = (str(t), N)
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        maxd = self.model.max_degree
        with f.context():
            ctab = c_coeff_table(max(maxd, 2), t, f)
            nested = {}
            for j in range(2, maxd + 1):
                nj = N // j
                sub = self.series(j * t, nj) if nj >= 1 else TruncSeries.zero(f, 0)
                nested[j] = _embed_power(sub, j, N, f)
            P = TruncSeries.zero(f, N)
            for _ in range(N + 1):
                P = self._rhs(P, nested, ctab, t, N)
        with self._lock:
            self._memo[key] = P
        return P

    def _rhs(self, P, nested, ctab, t, N) -> TruncSeries:
        f = self.field
        total = TruncSeries.zero(f, N)
        for k in sorted(self.model.degrees):
            wk = self.model.weight(k)
            if wk == 0 and k != 0:
                continue
            coef_k = f.power(f.coerce(wk) * math.factorial(k), t)
            if k == 0:
                total = total + TruncSeries.one(f, N).scale(coef_k)
                continue
            block = TruncSeries.zero(f, N)
            for mult in self._structure[k]:
                term = TruncSeries.one(f, N)
                scal = f.one
                for j, lam_j in mult.items():
                    base = P if j == 1 else nested[j]
                    term = term * base.pow_int(lam_j)
                    cj = ctab[j] if j > 1 else f.one
                    scal = scal * f.power(cj, lam_j) / (f.coerce(j) ** lam_j * math.factorial(lam_j))
                block = block + term.scale(scal)
            total = total + block.scale(coef_k)
        return total.shift(1)

    def polynomial_equation(self, t, trunc_order: int) -> "PolynomialEquation":
        """F(x,y) = x sum_m c_m(x) y^m with nested factors P_D(x^j, jt)
        replaced by truncated polynomials (they are analytic in a larger
        region than the solution, so the truncation converges fast)."""
        f = self.field
        t = f.coerce(t)
        maxd = self.model.max_degree
        with f.context():
            ctab = c_coeff_table(max(maxd, 2), t, f)
            nested = {}
            for j in range(2, maxd + 1):
                nj = max(trunc_order // j, 1)
                nested[j] = _embed_power(self.series(j * t, nj), j, trunc_order, f)
            cms = [TruncSeries.zero(f, trunc_order) for _ in range(maxd + 1)]
            for k in sorted(self.model.degrees):
                wk = self.model.weight(k)
                if wk == 0 and k != 0:
                    continue
                coef_k = f.power(f.coerce(wk) * math.factorial(k), t)
                if k == 0:
                    cms[0] = cms[0] + TruncSeries.one(f, trunc_order).scale(coef_k)
                    continue
                for mult in self._structure[k]:
                    lam1 = mult.get(1, 0)
                    term = TruncSeries.one(f, trunc_order)
                    scal = f.one / math.factorial(lam1)
                    for j, lam_j in mult.items():
                        if j == 1:
                            continue
                        term = term * nested[j].pow_int(lam_j)
                        scal = scal * f.power(ctab[j], lam_j) / (f.coerce(j) ** lam_j * math.factorial(lam_j))
                    cms[lam1] = cms[lam1] + term.scale(coef_k * scal)
        return PolynomialEquation(self.field, cms)


_family_cache: dict = {}
_family_lock = threading.Lock()


def polya_family(field) -> PolyaFamily:
    key = ("polya", field)
    with _family_lock:
        fam = _family_cache.get(key)
        if fam is None:
            fam = PolyaFamily(field)
            _family_cache[key] = fam
        return fam


def degree_family(model: DegreeModel, field) -> DegreeFamily:
    key = ("degree", model.signature(), field)
    with _family_lock:
        fam = _family_cache.get(key)
        if fam is None:
            fam = DegreeFamily(model, field)
            _family_cache[key] = fam
        return fam


# -- series entry points -----------------------------------------------------


def solve_polya_series(t, order: int, field=RATIONAL) -> TruncSeries:
    """Coefficients of P(x,t) to the given order; exact over the rational
    field for integer t."""
    return polya_family(field).series(t, order)


def solve_degree_series(model: DegreeModel, t, order: int, field=RATIONAL) -> TruncSeries:
    """Coefficients of P_D(x,t); t=1 reproduces the simply generated T(x)."""
    return degree_family(model, field).series(t, order)


def xi_series(order: int, field=RATIONAL) -> TruncSeries:
    """xi(x) = x exp(sum_{j>=2} c(j,2)/j P(x^j, 2j)) as a truncated series:
    the argument of the tree function in the labeled-pair solution."""
    fam = polya_family(field)
    with field.context():
        ctab = c_coeff_table(max(order, 2), field.coerce(2), field)
        g = TruncSeries.zero(field, order)
        for j in range(2, order + 1):
            nj = order // j
            if nj < 1:
                break
            g = g + _embed_power(fam.series(2 * j, nj), j, order, field).scale(ctab[j] / j)
        return g.exp().shift(1)


# ---------------------------------------------------------------------------
# Exponential-type singularities (pointwise)
# ---------------------------------------------------------------------------


class ExpTypeSingularity:
    """Pointwise xi_t(x) = x exp(g_t(x)) for the unrestricted family, with
    g_t(x) = sum_{j=2}^{j_max} c(j,t)/j P(x^j, jt).

    For y = x exp(y + g_t(x)) the characteristic system reduces to y0 = 1
    with xi_t(alpha) = 1/e; nested series are evaluated far inside their own
    discs, so the truncated equation tracks the true one tightly.
    """

    def __init__(self, config: AsymConfig):
        self.config = config
        self.field = config.real_field()
        self.family = polya_family(self.field)

    def g_and_gprime(self, t, x):
        f = self.field
        cfg = self.config
        t = f.coerce(t)
        ctab = c_coeff_table(max(cfg.j_max, 2), t, f)
        with f.context():
            x = f.coerce(x)
            g = f.zero
            gp = f.zero
            for j in range(2, cfg.j_max + 1):
                sub = self.family.series(j * t, cfg.nested_order)
                xj = x**j
                g += ctab[j] / j * sub.eval_at(xj)
                gp += ctab[j] * x ** (j - 1) * sub.eval_derivative_at(xj)
            return g, gp

    def xi(self, t, x):
        f = self.field
        with f.context():
            g, _ = self.g_and_gprime(t, x)
            return f.coerce(x) * mp.exp(g)

    def xi_prime(self, t, x):
        f = self.field
        with f.context():
            g, gp = self.g_and_gprime(t, x)
            return mp.exp(g) * (1 + f.coerce(x) * gp)

    def solve_alpha(self, t, bracket=(0.25, 0.45), guess=None):
        """Root of xi_t(alpha) = 1/e: bracketed bisection into the Newton
        basin, then Newton polish to solver_tol. Returns (alpha, residual,
        iterations)."""
        f = self.field
        cfg = self.config
        with f.context():
            target = mp.exp(-1)
            x = f.coerce(guess) if guess is not None else None
            if x is None:
                lo, hi = f.coerce(bracket[0]), f.coerce(bracket[1])
                flo = self.xi(t, lo) - target
                fhi = self.xi(t, hi) - target
                if mp.sign(flo) == mp.sign(fhi):
                    raise SolverError(
                        f"no sign change of xi - 1/e on [{float(lo)}, {float(hi)}]; truncation order too low?"
                    )
                for _ in range(25):
                    mid = (lo + hi) / 2
                    fm = self.xi(t, mid) - target
                    if mp.sign(fm) == mp.sign(flo):
                        lo, flo = mid, fm
                    else:
                        hi, fhi = mid, fm
                x = (lo + hi) / 2
            tol = f.coerce(cfg.solver_tol)
            iters = 0
            for iters in range(1, cfg.newton_max_iter + 1):
                step = (self.xi(t, x) - target) / self.xi_prime(t, x)
                x -= step
                if abs(step) < tol:
                    break
            residual = self.xi(t, x) - target
            if abs(residual) > tol * 100:
                raise SolverError(f"alpha solve stalled, residual {mp.nstr(residual, 5)}")
            return x, residual, iters


# ---------------------------------------------------------------------------
# Polynomial singular systems (2x2 Newton with the exact truncated Jacobian)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularPoint:
    """A solved characteristic system y = F(x,y), 1 = F_y(x,y)."""

    x0: object
    y0: object
    fx: object
    fyy: object
    residual: object = None

    def as_floats(self) -> dict:
        out = {"x0": float(self.x0), "y0": float(self.y0), "fx": float(self.fx), "fyy": float(self.fyy)}
        if self.residual is not None:
            out["residual"] = float(self.residual)
        return out


class PolynomialEquation:
    """F(x,y) = x * sum_m c_m(x) y^m with truncated-series coefficients."""

    def __init__(self, field, cms: list[TruncSeries]):
        self.field = field
        self.cms = cms

    def F(self, x, y):
        f = self.field
        with f.context():
            x, y = f.coerce(x), f.coerce(y)
            acc = f.zero
            for m in range(len(self.cms) - 1, -1, -1):
                acc = acc * y + self.cms[m].eval_at(x)
            return x * acc

    def Fy(self, x, y):
        f = self.field
        with f.context():
            x, y = f.coerce(x), f.coerce(y)
            acc = f.zero
            for m in range(len(self.cms) - 1, 0, -1):
                acc = acc * y + m * self.cms[m].eval_at(x)
            return x * acc

    def Fyy(self, x, y):
        f = self.field
        with f.context():
            x, y = f.coerce(x), f.coerce(y)
            acc = f.zero
            for m in range(len(self.cms) - 1, 1, -1):
                acc = acc * y + m * (m - 1) * self.cms[m].eval_at(x)
            return x * acc

    def Fx(self, x, y):
        f = self.field
        with f.context():
            x, y = f.coerce(x), f.coerce(y)
            acc = f.zero
            for m in range(len(self.cms) - 1, -1, -1):
                acc = acc * y + (self.cms[m].eval_at(x) + x * self.cms[m].eval_derivative_at(x))
            return acc

    def Fxy(self, x, y):
        f = self.field
        with f.context():
            x, y = f.coerce(x), f.coerce(y)
            acc = f.zero
            for m in range(len(self.cms) - 1, 0, -1):
                acc = acc * y + m * (self.cms[m].eval_at(x) + x * self.cms[m].eval_derivative_at(x))
            return acc

    def series_guess(self, solution_series: TruncSeries):
        """Domb-Sykes initial guess from coefficient ratios, period-aware for
        lattice families (e.g. D = {0,2} has only odd sizes)."""
        coeffs = solution_series.coeffs
        idx = [i for i, c in enumerate(coeffs) if i > 0 and c != 0]
        if len(idx) < 4:
            raise SolverError("series too short for a singularity guess")
        g = idx[-1] - idx[-2]
        n = idx[-1]
        f = self.field
        with f.context():
            ratio = abs(f.coerce(coeffs[n - g]) / f.coerce(coeffs[n]))
            x_guess = f.power(ratio, Fraction(1, g))
            y_guess = solution_series.eval_at(x_guess * f.coerce(Fraction(9, 10)))
        return x_guess, y_guess


def solve_singular_system(
    eq: PolynomialEquation,
    guess: tuple,
    *,
    tol: float = 1e-20,
    max_iter: int = 200,
    margin: float = 1e-6,
) -> SingularPoint:
    """Newton on (F(x,y) - y, F_y(x,y) - 1) with the exact Jacobian of the
    truncated F; validates the non-degeneracy margins |F_x|, |F_yy| > margin."""
    f = eq.field
    with f.context():
        x = f.coerce(guess[0])
        y = f.coerce(guess[1])
        tolv = f.coerce(tol)
        limit = f.coerce(Fraction(1, 4))
        converged = False
        for _ in range(max_iter):
            r1 = eq.F(x, y) - y
            r2 = eq.Fy(x, y) - 1
            a = eq.Fx(x, y)
            b = eq.Fy(x, y) - 1
            c = eq.Fxy(x, y)
            d = eq.Fyy(x, y)
            det = a * d - b * c
            if det == 0:
                raise SolverError("singular Jacobian in the 2x2 Newton iteration")
            dx = (r1 * d - b * r2) / det
            dy = (a * r2 - c * r1) / det
            dx = max(min(dx, limit), -limit)
            dy = max(min(dy, limit), -limit)
            x -= dx
            y -= dy
            if abs(dx) + abs(dy) < tolv:
                converged = True
                break
        if not converged:
            raise SolverError("2x2 Newton iteration did not converge")
        res = max(abs(eq.F(x, y) - y), abs(eq.Fy(x, y) - 1))
        if res > tolv * 100:
            raise SolverError(f"singular system residual too large: {float(res)}")
        fx = eq.Fx(x, y)
        fyy = eq.Fyy(x, y)
        if abs(fx) < margin or abs(fyy) < margin:
            raise SolverError(f"degenerate singular point: F_x={float(fx)}, F_yy={float(fyy)}")
        return SingularPoint(x, y, fx, fyy, res)


def coefficient_constant(point: SingularPoint):
    """K in [x^n] y(x) ~ K x0^{-n} n^{-3/2}: sqrt(x0 F_x / (2 pi F_yy))."""
    return mp.sqrt(point.x0 * point.fx / (2 * mp.pi * point.fyy))


# ---------------------------------------------------------------------------
# Quasi-power cumulants from singularity movement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CltConstants:
    mu: float
    sigma2: float
    diagnostics: dict = dc_field(default_factory=dict)


def central_cumulant_diffs(fvals: dict, h):
    """Richardson-combined first/second central differences of f on the
    stencil {0, +-h, +-2h} (fvals keyed by the integer multiple of h)."""
    d1_h = (fvals[1] - fvals[-1]) / (2 * h)
    d1_2h = (fvals[2] - fvals[-2]) / (4 * h)
    d2_h = (fvals[1] - 2 * fvals[0] + fvals[-1]) / (h * h)
    d2_2h = (fvals[2] - 2 * fvals[0] + fvals[-2]) / (4 * h * h)
    d1 = (4 * d1_h - d1_2h) / 3
    d2 = (4 * d2_h - d2_2h) / 3
    diag = {
        "fd_step": float(h),
        "richardson_delta_mu": abs(float(d1_h - d1_2h)),
        "richardson_delta_sigma2": abs(float(d2_h - d2_2h)),
        "sigma2_unextrapolated": float(d2_h),
    }
    return d1, d2, diag


# ---------------------------------------------------------------------------
# Reported constants
# ---------------------------------------------------------------------------


# a-priori bracket for alpha: rho_P <= alpha <= 1/(rho_P e^2)
ALPHA_BRACKET = (0.338, 0.400)


@dataclass(frozen=True)
class AlphaSolution:
    alpha: object
    residual: object
    iterations: int
    xi_prime: object
    bracket: tuple

    def as_floats(self) -> dict:
        return {
            "alpha": float(self.alpha),
            "residual": float(self.residual),
            "iterations": self.iterations,
            "xi_prime": float(self.xi_prime),
            "bracket": [float(b) for b in self.bracket],
        }


def estimate_alpha(config: AsymConfig = DEFAULT_CONFIG) -> AlphaSolution:
    """The dominant singularity alpha of the labeled-pair family: the root
    of xi(x) = 1/e inside the a-priori bracket [0.338, 0.400]."""
    ex = ExpTypeSingularity(config)
    with ex.field.context():
        t2 = ex.field.coerce(2)
        alpha, residual, iters = ex.solve_alpha(t2, bracket=ALPHA_BRACKET)
        xp = ex.xi_prime(t2, alpha)
    return AlphaSolution(alpha, residual, iters, xp, ALPHA_BRACKET)


@dataclass(frozen=True)
class LabeledConstants:
    A: float
    c_l: float
    alpha: float
    diagnostics: dict


def labeled_constants(config: AsymConfig = DEFAULT_CONFIG, stability: bool = True) -> LabeledConstants:
    """A = sqrt(2 pi e alpha xi'(alpha)) and c_l = 1/(e^2 alpha), the
    constants of p_n ~ A n^{3/2} c_l^n."""

    def compute(cfg):
        sol = estimate_alpha(cfg)
        with cfg.real_field().context():
            A = mp.sqrt(2 * mp.pi * mp.e * sol.alpha * sol.xi_prime)
            c_l = 1 / (mp.e**2 * sol.alpha)
        return A, c_l, sol

    A, c_l, sol = compute(config)
    diag = {"alpha": sol.as_floats()}
    if stability:
        A2, c_l2, _ = compute(config.scaled(2))
        diag["stability"] = {
            "A_rel_change": abs(float((A2 - A) / A)),
            "c_l_rel_change": abs(float((c_l2 - c_l) / c_l)),
        }
    return LabeledConstants(float(A), float(c_l), float(sol.alpha), diag)


@dataclass(frozen=True)
class UnaryBinaryConstants:
    C: float
    delta: float
    x0_pair: float
    x0_single: float
    diagnostics: dict


def unary_binary_constants(config: AsymConfig = DEFAULT_CONFIG, stability: bool = True) -> UnaryBinaryConstants:
    """g_n ~ C n^{3/2} delta^n for unary-binary trees: solve the t=2 and t=1
    characteristic systems, take the coefficient-asymptotics ratio."""
    model = DegreeModel.unary_binary()

    def compute(cfg):
        f = cfg.real_field()
        fam = degree_family(model, f)
        eq2 = fam.polynomial_equation(2, cfg.trunc_order)
        p2 = solve_singular_system(
            eq2, eq2.series_guess(fam.series(2, cfg.trunc_order)), tol=cfg.solver_tol, max_iter=cfg.newton_max_iter
        )
        eq1 = fam.polynomial_equation(1, cfg.trunc_order)
        p1 = solve_singular_system(
            eq1, eq1.series_guess(fam.series(1, cfg.trunc_order)), tol=cfg.solver_tol, max_iter=cfg.newton_max_iter
        )
        with f.context():
            K2 = coefficient_constant(p2)
            K1sq = p1.x0 * p1.fx / (2 * mp.pi * p1.fyy)
            delta = p1.x0**2 / p2.x0
            C = K2 / K1sq
        return C, delta, p2, p1

    C, delta, p2, p1 = compute(config)
    diag = {"pair_point": p2.as_floats(), "single_point": p1.as_floats()}
    if stability:
        C2, delta2, _, _ = compute(config.scaled(2))
        diag["stability"] = {
            "C_rel_change": abs(float((C2 - C) / C)),
            "delta_rel_change": abs(float((delta2 - delta) / delta)),
        }
    return UnaryBinaryConstants(float(C), float(delta), float(p2.x0), float(p1.x0), diag)


@dataclass(frozen=True)
class LeafConstant:
    mu: float
    baseline_unconditioned: float
    diagnostics: dict


def leaf_mean_constant(config: AsymConfig = DEFAULT_CONFIG, stability: bool = True) -> LeafConstant:
    """Mean leaf-count slope of a uniform isomorphic labeled pair:
    mu = (A(alpha)/(alpha xi'(alpha)) + 1/xi'(alpha)) / e with
    A(x) = sum_{j>=2} c(j,2) P_u(x^j, 2j, 1).

    The unconditioned labeled-tree baseline runs the identical pipeline with
    the correction sum switched off (g = 0 makes xi the identity, so the
    root-finder must return 1/e and the formula must produce 1/e)."""

    def compute(cfg):
        ex = ExpTypeSingularity(cfg)
        f = ex.field
        with f.context():
            t2 = f.coerce(2)
            alpha, _res, _it = ex.solve_alpha(t2, bracket=ALPHA_BRACKET)
            xp = ex.xi_prime(t2, alpha)
            ctab = c_coeff_table(max(cfg.j_max, 2), t2, f)
            Aval = f.zero
            for j in range(2, cfg.j_max + 1):
                sub = ex.family.mark_derivative_series(0, 2 * j, cfg.nested_order)
                Aval += ctab[j] * sub.eval_at(alpha**j)
            mu = (Aval / (alpha * xp) + 1 / xp) / mp.e
        return mu, alpha

    def compute_baseline(cfg):
        # empty j-sum: same machinery on the plain tree function y = x e^y
        ex = ExpTypeSingularity(replace(cfg, j_max=1))
        f = ex.field
        with f.context():
            t2 = f.coerce(2)
            alpha, _res, _it = ex.solve_alpha(t2, bracket=(0.25, 0.45))
            xp = ex.xi_prime(t2, alpha)
            return (f.zero / (alpha * xp) + 1 / xp) / mp.e

    mu, alpha = compute(config)
    baseline = compute_baseline(config)
    diag = {"alpha": float(alpha)}
    if stability:
        mu2, _ = compute(config.scaled(2))
        diag["stability"] = {"mu_rel_change": abs(float((mu2 - mu) / mu))}
    return LeafConstant(float(mu), float(baseline), diag)


# ---------------------------------------------------------------------------
# Degree CLT for isomorphic labeled pairs
# ---------------------------------------------------------------------------


def _degree_slice_at_singularity(family: PolyaFamily, d: int, t, alpha, y0, nested_order: int):
    """D_d evaluated at the singular point: j=1 factors take the exact value
    y0, higher factors use nested series evaluated at alpha^j."""
    f = family.field
    t = f.coerce(t)
    with f.context():
        if d == 0:
            return f.one
        ctab = c_coeff_table(max(d, 2), t, f)
        total = f.zero
        for lam in enumerate_partitions(d):
            term = f.one
            for j, lam_j in lam.multiplicities().items():
                if j == 1:
                    val = f.coerce(y0)
                    cj = f.one
                else:
                    val = family.series(j * t, nested_order).eval_at(f.coerce(alpha) ** j)
                    cj = ctab[j]
                term *= (cj * val) ** lam_j / (f.coerce(j) ** lam_j * math.factorial(lam_j))
            total += term
        return total


class MarkedPairSingularity:
    """x0(u) for the labeled-pair family with scalar marks {degree: u}.

    F(x, y, u) = x exp(y + g_u(x)) + sum_d (u_d - 1) x D_d(x, y; u); the
    characteristic 2x2 system is solved by Newton with analytic F and F_y
    and numerically differenced Jacobian entries (the inner functions are
    polynomial evaluations, exact at working precision).
    """

    def __init__(self, config: AsymConfig):
        self.config = config
        self.field = config.real_field()
        self.family = polya_family(self.field)

    def _nested_marked(self, marks, j):
        cfg = self.config
        f = self.field
        if set(marks) == {0}:
            order = cfg.nested_order
        else:
            order = max(cfg.nested_order // j, 4)
        return self.family.degree_marked_series({d: f.coerce(u) ** j for d, u in marks.items()}, 2 * j, order)

    def _g(self, marks, x):
        f = self.field
        cfg = self.config
        ctab = c_coeff_table(max(cfg.j_max, 2), f.coerce(2), f)
        with f.context():
            x = f.coerce(x)
            g = f.zero
            for j in range(2, cfg.j_max + 1):
                g += ctab[j] / j * self._nested_marked(marks, j).eval_at(x**j)
            return g

    def _slices(self, marks, x, y):
        f = self.field
        cfg = self.config
        out = {}
        with f.context():
            for d in marks:
                if d == 0:
                    out[d] = (f.one, f.zero)  # (value, d/dy)
                    continue
                ctab = c_coeff_table(max(d, 2), f.coerce(2), f)
                val = f.zero
                dval = f.zero
                for lam in enumerate_partitions(d):
                    mult = lam.multiplicities()
                    term = f.one
                    for j, lam_j in mult.items():
                        if j == 1:
                            continue
                        sub = self._nested_marked(marks, j).eval_at(f.coerce(x) ** j)
                        term *= (ctab[j] * sub) ** lam_j / (f.coerce(j) ** lam_j * math.factorial(lam_j))
                    lam1 = mult.get(1, 0)
                    yv = f.coerce(y)
                    val += term * yv**lam1 / math.factorial(lam1)
                    if lam1 >= 1:
                        dval += term * lam1 * yv ** (lam1 - 1) / math.factorial(lam1)
                out[d] = (val, dval)
        return out

    def residuals(self, marks, x, y):
        """(F - y, F_y - 1) at (x, y)."""
        f = self.field
        with f.context():
            x, y = f.coerce(x), f.coerce(y)
            g = self._g(marks, x)
            core = x * mp.exp(y + g)
            slices = self._slices(marks, x, y)
            Fv = core
            Fyv = core
            for d, (val, dval) in slices.items():
                u = f.coerce(marks[d])
                Fv += (u - 1) * x * val
                Fyv += (u - 1) * x * dval
            return Fv - y, Fyv - 1

    def solve(self, marks, guess):
        f = self.field
        cfg = self.config
        with f.context():
            x = f.coerce(guess[0])
            y = f.coerce(guess[1])
            tol = f.coerce(cfg.solver_tol)
            h = f.coerce(mp.mpf(2) ** (-(cfg.prec_bits // 3)))
            for _ in range(cfg.newton_max_iter):
                r1, r2 = self.residuals(marks, x, y)
                r1x, r2x = self.residuals(marks, x + h, y)
                r1y, r2y = self.residuals(marks, x, y + h)
                a, b = (r1x - r1) / h, (r1y - r1) / h
                c, d = (r2x - r2) / h, (r2y - r2) / h
                det = a * d - b * c
                if det == 0:
                    raise SolverError("singular Jacobian in the marked-pair solve")
                dx = (r1 * d - b * r2) / det
                dy = (a * r2 - c * r1) / det
                x -= dx
                y -= dy
                if abs(dx) + abs(dy) < tol * 1000:
                    break
            r1, r2 = self.residuals(marks, x, y)
            if abs(r1) + abs(r2) > f.coerce(1e-15):
                raise SolverError(f"marked-pair system residual too large: {float(abs(r1) + abs(r2))}")
            return x, y


@dataclass(frozen=True)
class DegreeCltConstants:
    degrees: tuple[int, ...]
    means: dict[int, float]
    covariance: dict[tuple[int, int], float]
    diagnostics: dict


def degree_clt_constants(
    degrees,
    config: AsymConfig = DEFAULT_CONFIG,
    *,
    with_covariance: bool = True,
) -> DegreeCltConstants:
    """Per-degree CLT constants for vertices of given out-degrees in a
    uniform isomorphic labeled pair.

    Means use the explicit partial-derivative formula
    mu_d = F_{u_d} / (x0 F_x) at the unmarked singular point; covariance
    entries are central finite differences of -log x0 along the marks
    (diagonals on a 5-point stencil with Richardson, off-diagonals on the
    4-point cross)."""
    degrees = tuple(sorted(set(int(d) for d in degrees)))
    ex = ExpTypeSingularity(config)
    f = ex.field
    diag: dict = {}
    with f.context():
        t2 = f.coerce(2)
        alpha, _res, _it = ex.solve_alpha(t2, bracket=ALPHA_BRACKET)
        xp = ex.xi_prime(t2, alpha)
        x0fx = alpha * mp.e * xp  # x0 * F_x at the singular point
        means = {}
        for d in degrees:
            ctab = c_coeff_table(max(config.j_max, 2), t2, f)
            Sval = f.zero
            for j in range(2, config.j_max + 1):
                sub = ex.family.mark_derivative_series(d, 2 * j, config.nested_order)
                Sval += ctab[j] * sub.eval_at(alpha**j)
            Dd = _degree_slice_at_singularity(ex.family, d, t2, alpha, f.one, config.nested_order)
            means[d] = float((Sval + alpha * Dd) / x0fx)
        covariance: dict[tuple[int, int], float] = {}
        if with_covariance:
            solver = MarkedPairSingularity(config)
            h = f.coerce(config.fd_step)

            def logx0(svec: dict[int, object]) -> object:
                marks = {d: mp.exp(s) for d, s in svec.items()}
                x, _y = solver.solve(marks, (alpha, f.one))
                return mp.log(x)

            for d in degrees:
                fvals = {k: logx0({d: k * h}) for k in (0, 1, -1, 2, -2)}
                _d1, d2, fd_diag = central_cumulant_diffs(fvals, h)
                covariance[(d, d)] = float(-d2)
                diag[f"fd_diag_{d}"] = fd_diag
                diag[f"mu_fd_{d}"] = float(-_d1)
            for i, di in enumerate(degrees):
                for dj in degrees[i + 1 :]:
                    fpp = logx0({di: h, dj: h})
                    fpm = logx0({di: h, dj: -h})
                    fmp = logx0({di: -h, dj: h})
                    fmm = logx0({di: -h, dj: -h})
                    cross = -(fpp - fpm - fmp + fmm) / (4 * h * h)
                    covariance[(di, dj)] = float(cross)
                    covariance[(dj, di)] = float(cross)
    diag["alpha"] = float(alpha)
    return DegreeCltConstants(degrees, means, covariance, diag)


# ---------------------------------------------------------------------------
# Weight CLTs (restricted families) and the automorphism CLT
# ---------------------------------------------------------------------------


def logweight_clt_constants(
    model: DegreeModel,
    config: AsymConfig = DEFAULT_CONFIG,
    stability: bool = True,
) -> CltConstants:
    """E[log W(P_n)] ~ mu n, Var ~ sigma^2 n for uniform degree-restricted
    classes: treat t as a small real parameter of the family and track the
    dominant singularity x0(t) on the 5-point stencil around 0."""

    def compute(cfg) -> tuple:
        f = cfg.real_field()
        fam = degree_family(model, f)
        with f.context():
            h = f.coerce(cfg.fd_step)
            guess = None
            fvals = {}
            for k in (0, 1, -1, 2, -2):
                t = k * h
                eq = fam.polynomial_equation(t, cfg.trunc_order)
                if guess is None:
                    guess = eq.series_guess(fam.series(t, cfg.trunc_order))
                point = solve_singular_system(eq, guess, tol=cfg.solver_tol, max_iter=cfg.newton_max_iter)
                guess = (point.x0, point.y0)
                fvals[k] = mp.log(point.x0)
            d1, d2, fd_diag = central_cumulant_diffs(fvals, h)
            return -d1, -d2, fd_diag

    mu, s2, fd_diag = compute(config)
    diag = {"fd": fd_diag, "model": model.signature()}
    if stability:
        mu2, s22, _ = compute(config.scaled(2))
        diag["stability"] = {
            "mu_rel_change": abs(float((mu2 - mu) / mu)),
            "sigma2_rel_change": abs(float((s22 - s2) / s2)),
        }
        h2 = replace(config, fd_step=config.fd_step / 2)
        mu3, s23, _ = compute(h2)
        diag["step_halving"] = {
            "mu_rel_change": abs(float((mu3 - mu) / mu)),
            "sigma2_rel_change": abs(float((s23 - s2) / s2)),
        }
    return CltConstants(float(mu), float(s2), diag)


@dataclass(frozen=True)
class AutCltConstants:
    mu: float
    sigma2: float
    diagnostics: dict

    def log_labelings_mean(self, n: int) -> float:
        """E[log L(P_n)] = n log n - (mu+1) n + (log n)/2 + O(1)."""
        return n * math.log(n) - (self.mu + 1) * n + 0.5 * math.log(n)


def aut_clt_constants(config: AsymConfig = DEFAULT_CONFIG, stability: bool = True) -> AutCltConstants:
    """CLT constants of log |Aut| under the uniform unrestricted class law:
    P(x,t) weights classes by |Aut|^{-t}, so the cumulants of log|Aut| read
    off the movement of alpha(t) around t=0: mu = +dlog alpha, sigma^2 =
    -d2log alpha; the singular condition stays P(alpha(t), t) = 1."""

    def compute(cfg) -> tuple:
        ex = ExpTypeSingularity(cfg)
        f = ex.field
        with f.context():
            h = f.coerce(cfg.fd_step)
            alpha0, _res, _it = ex.solve_alpha(f.zero, bracket=(0.25, 0.45))
            fvals = {0: mp.log(alpha0)}
            for k in (1, -1, 2, -2):
                ak, _r, _i = ex.solve_alpha(k * h, guess=alpha0)
                fvals[k] = mp.log(ak)
            d1, d2, fd_diag = central_cumulant_diffs(fvals, h)
            return d1, -d2, fd_diag, alpha0

    mu, s2, fd_diag, alpha0 = compute(config)
    diag = {"fd": fd_diag, "rho_polya": float(alpha0)}
    if stability:
        mu2, s22, _, _ = compute(config.scaled(2))
        diag["stability"] = {
            "mu_rel_change": abs(float((mu2 - mu) / mu)),
            "sigma2_rel_change": abs(float((s22 - s2) / s2)),
        }
        mu3, s23, _, _ = compute(replace(config, fd_step=config.fd_step / 2))
        diag["step_halving"] = {
            "mu_rel_change": abs(float((mu3 - mu) / mu)),
            "sigma2_rel_change": abs(float((s23 - s2) / s2)),
        }
    return AutCltConstants(float(mu), float(s2), diag)


# ---------------------------------------------------------------------------
# Leading-order predictions (for comparison against the exact oracles)
# ---------------------------------------------------------------------------


def leading_order_prediction(amplitude: float, base: float, n: int) -> float:
    """amplitude * n^{3/2} * base^n."""
    return amplitude * n**1.5 * base**n
