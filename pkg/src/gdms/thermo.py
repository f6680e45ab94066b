"""Birkhoff sums of the geometric potential, pressure brackets, the Bowen
dimension root, and the constants m(s) and c_t.

Normalization: cylinder diameters carry the factor |X|, the potential does
not, so ``d(C) = |X| * exp(S_n phi)`` on affine systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateSystem, InvalidInput, InvariantViolation, UnsupportedMethod
from .geometry import GdmsSystem
from .symbolic import Word

NUMERIC_MAX_GENERATION = 12


@dataclass(frozen=True)
class PressureEstimate:
    s: float
    n: Optional[int]
    lower: float
    upper: float
    method: str
    certified: bool = True

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise InvariantViolation(f"pressure bracket inverted: {self.lower} > {self.upper}")

    @property
    def value(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "n": self.n,
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    lower: float
    upper: float
    method: str
    certified: bool
    pressure_at_zero: float
    evaluations: int
    trace: tuple = field(default=(), repr=False)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method,
            "certified": self.certified,
            "pressure_at_zero": self.pressure_at_zero,
            "evaluations": self.evaluations,
        }


@dataclass(frozen=True)
class PositivityReport:
    s: float
    m: Optional[int]
    found: bool
    window: int
    deficient_n: Optional[int]
    minimum_sum: float
    note: str = (
        "checked for n in [m, m + window]; persistence beyond the window "
        "follows from supermultiplicativity of the sums"
    )

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "m": self.m,
            "found": self.found,
            "window": self.window,
            "deficient_n": self.deficient_n,
            "minimum_sum": self.minimum_sum,
            "note": self.note,
        }


@dataclass(frozen=True)
class CtEstimate:
    t: float
    value: float
    minimizer: Word
    per_depth: tuple
    budget: int

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "value": self.value,
            "minimizer": list(self.minimizer),
            "per_depth": list(self.per_depth),
            "budget": self.budget,
        }


# -- Birkhoff sums and partition sums ---------------------------------------


def birkhoff_sum_bracket(system: GdmsSystem, w) -> tuple[float, float]:
    """[inf, sup] of S_n phi over the cylinder of ``w``: logs of the
    derivative bracket of the composed map."""
    lo, hi = system.derivative_bracket(w)
    return math.log(lo), math.log(hi)


def _ratio_matrices(system: GdmsSystem) -> tuple[np.ndarray, np.ndarray]:
    """First-letter ratios and the edge-ratio matrix (0 off the support)."""
    if not system.affine:
        raise UnsupportedMethod(f"{system.name}: matrix formulation needs affine maps")
    q = system.q
    first = np.array([float(f.ratio) for f in system.maps])
    R = np.zeros((q, q))
    for (i, j), f in system.edges.items():
        R[i, j] = float(f.ratio)
    return first, R


def transfer_matrix(system: GdmsSystem, s: float) -> np.ndarray:
    """B_s[i, j] = A[i, j] * r_ij**s."""
    _, R = _ratio_matrices(system)
    A = system.subshift.matrix.astype(bool)
    B = np.zeros_like(R)
    B[A] = R[A] ** s
    return B


def _tail_sums(B: np.ndarray, n: int) -> list[np.ndarray]:
    """T_1 = 1, T_{k+1} = B T_k. T_k[a] sums weights of the (k-1)-step
    extensions of symbol a."""
    out = [np.ones(B.shape[0])]
    for _ in range(n - 1):
        out.append(B @ out[-1])
    return out


def _numeric_level(system: GdmsSystem, n: int) -> np.ndarray:
    if n > NUMERIC_MAX_GENERATION:
        raise InvalidInput(f"numeric systems support generations <= {NUMERIC_MAX_GENERATION}")
    derivs, _ = system.numeric.level(n)
    return derivs


def partition_sum(system: GdmsSystem, s: float, n: int) -> tuple[float, float]:
    """(Z_inf, Z_sup): sums of exp(s inf S_n phi), exp(s sup S_n phi) over
    all generation-``n`` cylinders."""
    if n < 1:
        raise InvalidInput("generation must be >= 1")
    if system.affine:
        system.subshift.count_words(n)
        first, _ = _ratio_matrices(system)
        T = _tail_sums(transfer_matrix(system, s), n)[-1]
        z = float(np.dot(first**s, T))
        return z, z
    d = _numeric_level(system, n)
    lo, hi = d.min(axis=1) ** s, d.max(axis=1) ** s
    if s < 0:
        lo, hi = hi, lo
    return float(lo.sum()), float(hi.sum())


def pressure_bracket(system: GdmsSystem, s: float, n: int) -> PressureEstimate:
    """Bracket on P(s phi) from generation-``n`` sums.

    Affine systems use the per-letter ratios Z_{n+1}(a) / Z_n(a) of sums
    over cylinders inside C_a; their min and max bracket the spectral
    radius (Collatz-Wielandt), exactly for Bernoulli systems and rigorously
    for Markov ones. Numeric systems use (1/n) log Z with |s| log(kappa) / n
    slack on each side.
    """
    if n < 1:
        raise InvalidInput("generation must be >= 1")
    if system.affine:
        B = transfer_matrix(system, s)
        T = _tail_sums(B, n + 1)
        ratio = T[n] / T[n - 1]
        return PressureEstimate(s, n, math.log(ratio.min()), math.log(ratio.max()), "partition-sum")
    z_inf, z_sup = partition_sum(system, s, n)
    slack = abs(s) * math.log(float(system.kappa)) / n
    return PressureEstimate(
        s, n, math.log(z_inf) / n - slack, math.log(z_sup) / n + slack, "partition-sum", certified=False
    )


def spectral_radius_bracket(B: np.ndarray, tol: float = 1e-12, max_iter: int = 200_000) -> tuple[float, float]:
    """Collatz-Wielandt bracket on the Perron root of an irreducible
    non-negative matrix via shifted power iteration."""
    n = B.shape[0]
    delta = float(B.sum()) / n
    M = B + delta * np.eye(n)
    x = np.ones(n)
    for _ in range(max_iter):
        y = M @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= tol * lo:
            return lo - delta, hi - delta
        x = y / y.max()
    raise InvariantViolation("power iteration did not converge")


def pressure_spectral(system: GdmsSystem, s: float, tol: float = 1e-12) -> PressureEstimate:
    """P(s phi) = log rho(B_s) for affine systems."""
    if not system.affine:
        raise UnsupportedMethod("spectral pressure needs an affine system")
    lo, hi = spectral_radius_bracket(transfer_matrix(system, s), tol)
    if lo <= 0:
        raise InvariantViolation("non-positive Perron root")
    return PressureEstimate(s, None, math.log(lo), math.log(hi), "spectral")


# -- dimension ---------------------------------------------------------------


def _check_decreasing(trace):
    pts = sorted(trace)
    for (s0, p0), (s1, p1) in zip(pts, pts[1:]):
        if s1 > s0 and not p1 < p0:
            raise InvariantViolation(f"pressure not decreasing: P({s0})={p0}, P({s1})={p1}")


def bowen_dimension(system: GdmsSystem, tol: Optional[float] = None, n: int = 10) -> DimensionEstimate:
    """Root of s -> P(s phi) by bisection on [0, ambient dimension]."""
    if system.affine:
        return _bowen_affine(system, 1e-9 if tol is None else tol)
    return _bowen_numeric(system, 1e-3 if tol is None else tol, n)


def _bowen_affine(system: GdmsSystem, tol: float) -> DimensionEstimate:
    p0 = pressure_spectral(system, 0.0)
    if p0.upper <= 1e-12:
        raise DegenerateSystem(f"P(0) = {p0.value:.3g} <= 0: no positive entropy, dimension 0")
    lo, hi = 0.0, float(system.ambient_dimension)
    trace = [(0.0, p0.value)]
    p_top = pressure_spectral(system, hi)
    trace.append((hi, p_top.value))
    if p_top.lower >= 0:
        return DimensionEstimate(hi, hi, hi, "spectral", system.certified, p0.value, 2, tuple(trace))
    evals = 2
    target = tol / 4
    while hi - lo > target:
        mid = 0.5 * (lo + hi)
        p = pressure_spectral(system, mid)
        evals += 1
        trace.append((mid, p.value))
        if p.lower > 0:
            lo = mid
        elif p.upper < 0:
            hi = mid
        else:
            lo = hi = mid
    _check_decreasing(trace)
    return DimensionEstimate(0.5 * (lo + hi), lo, hi, "spectral", system.certified, p0.value, evals, tuple(trace))


def _bisect(f, lo, hi, tol):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bowen_numeric(system: GdmsSystem, tol: float, n: int) -> DimensionEstimate:
    n = min(n, NUMERIC_MAX_GENERATION - 1)
    _, ref_n = system.numeric.level(n)
    _, ref_n1 = system.numeric.level(n + 1)
    trace = []

    def growth(s):
        # log Z_{n+1} / Z_n at a point of J; converges geometrically in n
        v = math.log(np.sum(ref_n1**s) / np.sum(ref_n**s))
        trace.append((s, v))
        return v

    dim_hi = float(system.ambient_dimension)
    p0 = growth(0.0)
    if p0 <= 0:
        raise DegenerateSystem("P(0) <= 0")
    if growth(dim_hi) >= 0:
        raise InvariantViolation("pressure non-negative at the ambient dimension")
    value = _bisect(growth, 0.0, dim_hi, min(tol, 1e-6))
    _check_decreasing(trace)
    s_lo = _bisect(lambda s: pressure_bracket(system, s, n).lower, 0.0, dim_hi, tol)
    s_hi = _bisect(lambda s: pressure_bracket(system, s, n).upper, 0.0, dim_hi, tol)
    return DimensionEstimate(
        value, min(s_lo, value), max(s_hi, value), "reference-point growth", False, p0, len(trace), tuple(trace)
    )


# -- m(s) and c_t ------------------------------------------------------------


def _require_below_dimension(system: GdmsSystem, s: float):
    if system.affine:
        p = pressure_spectral(system, s)
        if not p.lower > 0:
            raise InvalidInput(f"s={s} is not below the dimension (P(s phi) = {p.value:.3g})")
    else:
        dim = bowen_dimension(system)
        if not s < dim.value:
            raise InvalidInput(f"s={s} is not below the dimension {dim.value:.6g}")


def extension_sums(system: GdmsSystem, s: float, n_max: int) -> np.ndarray:
    """R[n, a] = sum over admissible n-step extensions u of a of
    |f_{a,u}'|**s, relative to C_a itself; row 0 is all ones."""
    if system.affine:
        return np.array(_tail_sums(transfer_matrix(system, s), n_max + 1))
    n_max = min(n_max, NUMERIC_MAX_GENERATION - 1)
    top = _numeric_level(system, 1).max(axis=1) ** s
    rows = [np.ones(system.q)]
    for n in range(1, n_max + 1):
        d = _numeric_level(system, n + 1).min(axis=1) ** s
        rows.append(d.reshape(system.q, -1).sum(axis=1) / top)
    return np.array(rows)


def positivity_generation(system: GdmsSystem, s: float, window: int = 8, cap: int = 64) -> PositivityReport:
    """Smallest m with sum over generation-n sub-cylinders of C_a of
    (relative diameter)**s > 1 for every a and every n in [m, m + window]."""
    _require_below_dimension(system, s)
    R = extension_sums(system, s, cap + window)
    worst = R.min(axis=1)
    last = len(worst) - 1
    for m in range(1, last - window + 1):
        block = worst[m : m + window + 1]
        if (block > 1).all():
            return PositivityReport(s, m, True, window, None, float(block.min()))
    deficient = max(n for n in range(1, last + 1) if worst[n] <= 1)
    return PositivityReport(s, None, False, window, deficient, float(worst[1:].min()))


def c_t_constant(system: GdmsSystem, t: float, depth: int = 3, budget="auto") -> CtEstimate:
    """min over cylinders up to ``depth`` of M_inf^t(C) / d(C)^t."""
    from .netmeasure import WHOLE, NetMeasureSolver

    _require_below_dimension(system, t)
    best, arg = math.inf, ()
    per_depth = []
    solver = NetMeasureSolver(system, WHOLE, t, budget=budget)
    for n in range(1, depth + 1):
        for w in system.subshift.enumerate_cylinders(n):
            r = float(solver.normalized(w))
            if r < best:
                best, arg = r, w
        per_depth.append(best)
    return CtEstimate(t, best, arg, tuple(per_depth), solver.budget)
