"""Damping coefficient families a(t, x) and their structural checks.

Every family is built from power-law parts

    T(t) = (1 + t)^(-lambda1),    X(x) = (1 + |x|)^(-lambda2)

combined as zero, time-only (mu * T), space-only (X), separated sum
(T + X) or separated product (T * X).  The integrability constant

    C_a = integral_0^inf a1(t) dt + integral_R a2(x) dx

uses the bare decomposition of a itself (the product family is split with
the Young inequality, which needs lambda1 + lambda2 > 1).  The pointwise
bound check |a| + |a_t| + |a_x| <= a1 + a2 uses the same parts scaled by
a family constant that absorbs the derivative terms.

(1 + |x|)^(-lambda) is Lipschitz but not C^1 at x = 0; the symmetric
subgradient a_x(t, 0) = 0 is adopted and noted in the assumption report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, DivergenceError

FAMILIES = ("zero", "time_power", "space_power", "separated_sum", "separated_product")

QUAD_ABS_TOL = 1e-9


@dataclass(frozen=True)
class DampingSpec:
    """One damping coefficient family with its parameters."""

    family: str
    mu: float = 1.0
    lambda1: float = 0.0
    lambda2: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown damping family {self.family!r}")
        if self.family == "separated_product" and not (
            self.lambda1 > 0.0 and self.lambda2 > 0.0
        ):
            raise ConfigError(
                "separated_product requires lambda1 > 0 and lambda2 > 0"
            )

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def time_power(cls, mu: float, lambda1: float):
        return cls("time_power", mu=mu, lambda1=lambda1)

    @classmethod
    def space_power(cls, lambda2: float):
        return cls("space_power", lambda2=lambda2)

    @classmethod
    def separated_sum(cls, lambda1: float, lambda2: float):
        return cls("separated_sum", lambda1=lambda1, lambda2=lambda2)

    @classmethod
    def separated_product(cls, lambda1: float, lambda2: float):
        return cls("separated_product", lambda1=lambda1, lambda2=lambda2)

    # -- time/space factorization (lets the solver cache the space part) ----

    def time_factor(self, t):
        """Scalar time factor; the full coefficient is combine(time, space)."""
        if self.family == "zero":
            return 0.0 * t
        if self.family == "time_power":
            return self.mu * (1.0 + t) ** (-self.lambda1)
        if self.family == "space_power":
            return np.ones_like(np.asarray(t, dtype=float))[()] if np.ndim(t) else 1.0
        return (1.0 + t) ** (-self.lambda1)

    def time_factor_dt(self, t):
        if self.family == "zero" or self.family == "space_power":
            return 0.0 * t
        if self.family == "time_power":
            return -self.mu * self.lambda1 * (1.0 + t) ** (-self.lambda1 - 1.0)
        return -self.lambda1 * (1.0 + t) ** (-self.lambda1 - 1.0)

    def space_factor(self, x):
        if self.family in ("zero", "time_power"):
            return np.zeros_like(np.asarray(x, dtype=float))[()] if np.ndim(x) else 0.0
        return (1.0 + np.abs(x)) ** (-self.lambda2)

    def space_factor_dx(self, x):
        if self.family in ("zero", "time_power"):
            return np.zeros_like(np.asarray(x, dtype=float))[()] if np.ndim(x) else 0.0
        xa = np.asarray(x, dtype=float)
        d = -self.lambda2 * np.sign(xa) * (1.0 + np.abs(xa)) ** (-self.lambda2 - 1.0)
        return d[()] if np.ndim(x) == 0 else d

    # -- evaluation ---------------------------------------------------------

    def eval_a(self, t, x):
        """a(t, x); total on t >= 0, x in R."""
        if self.family == "zero":
            return np.zeros(np.broadcast(np.asarray(t), np.asarray(x)).shape)[()]
        if self.family == "time_power":
            return self.time_factor(t) + 0.0 * np.asarray(x, dtype=float)[()]
        if self.family == "space_power":
            return self.space_factor(x) + 0.0 * np.asarray(t, dtype=float)[()]
        if self.family == "separated_sum":
            return self.time_factor(t) + self.space_factor(x)
        return self.time_factor(t) * self.space_factor(x)

    def eval_a_t(self, t, x):
        """Analytic partial d a / d t."""
        if self.family == "separated_product":
            return self.time_factor_dt(t) * self.space_factor(x)
        return self.time_factor_dt(t) + 0.0 * np.asarray(x, dtype=float)[()]

    def eval_a_x(self, t, x):
        """Analytic partial d a / d x; a_x(t, 0) = 0 by the symmetric convention."""
        if self.family == "separated_product":
            return self.time_factor(t) * self.space_factor_dx(x)
        return self.space_factor_dx(x) + 0.0 * np.asarray(t, dtype=float)[()]

    # -- separated bound parts ----------------------------------------------

    def _young_weights(self):
        lam = self.lambda1 + self.lambda2
        return self.lambda1 / lam, self.lambda2 / lam, lam

    def bare_a1(self, t):
        """Time part of the bare decomposition |a| <= a1(t) + a2(x)."""
        if self.family == "zero" or self.family == "space_power":
            return 0.0 * t
        if self.family == "time_power":
            return abs(self.mu) * (1.0 + t) ** (-self.lambda1)
        if self.family == "separated_sum":
            return (1.0 + t) ** (-self.lambda1)
        w1, _, lam = self._young_weights()
        return w1 * (1.0 + t) ** (-lam)

    def bare_a2(self, x):
        """Space part of the bare decomposition."""
        if self.family in ("zero", "time_power"):
            return 0.0 * np.asarray(x, dtype=float)[()]
        if self.family in ("space_power", "separated_sum"):
            return (1.0 + np.abs(x)) ** (-self.lambda2)
        _, w2, lam = self._young_weights()
        return w2 * (1.0 + np.abs(x)) ** (-lam)

    def bare_a2_dx(self, x):
        if self.family in ("zero", "time_power"):
            return 0.0 * np.asarray(x, dtype=float)[()]
        if self.family in ("space_power", "separated_sum"):
            lam = self.lambda2
            w = 1.0
        else:
            _, w, lam = self._young_weights()
        xa = np.asarray(x, dtype=float)
        d = -w * lam * np.sign(xa) * (1.0 + np.abs(xa)) ** (-lam - 1.0)
        return d[()] if np.ndim(x) == 0 else d

    def bound_factor(self) -> float:
        """Family constant F so that |a| + |a_t| + |a_x| <= F (a1 + a2)."""
        if self.family == "zero":
            return 1.0
        if self.family == "time_power":
            return 1.0 + self.lambda1
        if self.family == "space_power":
            return 1.0 + self.lambda2
        if self.family == "separated_sum":
            return 1.0 + max(self.lambda1, self.lambda2)
        return 1.0 + self.lambda1 + self.lambda2

    # -- integrability -------------------------------------------------------

    def _tail_exponents(self):
        """(time tail, space tail) decay exponents of the bare parts."""
        if self.family == "zero":
            return np.inf, np.inf
        if self.family == "time_power":
            return self.lambda1, np.inf
        if self.family == "space_power":
            return np.inf, self.lambda2
        if self.family == "separated_sum":
            return self.lambda1, self.lambda2
        lam = self.lambda1 + self.lambda2
        return lam, lam

    def max_abs_a(self, t, x_abs_max: float) -> float:
        """Upper bound of |a(t, .)| on |x| <= x_abs_max (monotone families)."""
        if self.family == "zero":
            return 0.0
        if self.family == "time_power":
            return abs(float(self.time_factor(t)))
        if self.family == "space_power":
            return 1.0
        if self.family == "separated_sum":
            return float(self.time_factor(t)) + 1.0
        return float(self.time_factor(t))


def integral_C_a(spec: DampingSpec) -> float:
    """C_a = integral_0^inf a1 + integral_R a2 of the bare decomposition,
    by adaptive quadrature; raises DivergenceError when either tail exponent
    is <= 1 (the integral cannot converge)."""
    tail_t, tail_x = spec._tail_exponents()
    if tail_t <= 1.0 or tail_x <= 1.0:
        raise DivergenceError(
            f"C_a diverges for {spec.family} with tail exponents "
            f"({tail_t:g}, {tail_x:g})"
        )
    if spec.family == "zero":
        return 0.0
    it, _ = quad(spec.bare_a1, 0.0, np.inf, epsabs=QUAD_ABS_TOL)
    ix, _ = quad(spec.bare_a2, 0.0, np.inf, epsabs=QUAD_ABS_TOL)
    return it + 2.0 * ix


@dataclass
class Violation:
    kind: str
    t: float
    x: float
    lhs: float
    rhs: float

    def to_dict(self):
        return {"kind": self.kind, "t": self.t, "x": self.x,
                "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class AssumptionReport:
    c_a: float
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {
            "c_a": self.c_a,
            "violations": [v.to_dict() for v in self.violations],
            "notes": list(self.notes),
        }


def check_assumptions(spec: DampingSpec, sample_budget: int = 4096,
                      t_max: float = 100.0, x_max: float = 100.0) -> AssumptionReport:
    """Sample the separated bound and the sign condition x * a2'(x) <= 0.

    Violations are collected, never raised; a divergent C_a is reported as
    an "integrability" violation with c_a = inf.
    """
    report = AssumptionReport(c_a=np.nan)
    try:
        report.c_a = integral_C_a(spec)
    except DivergenceError as exc:
        report.c_a = np.inf
        report.violations.append(
            Violation("integrability", np.nan, np.nan, np.inf, np.nan))
        report.notes.append(str(exc))

    n = max(8, int(np.sqrt(sample_budget)))
    ts = np.linspace(0.0, t_max, n)
    xs = np.linspace(-x_max, x_max, n + 1)  # odd count so x = 0 is sampled
    factor = spec.bound_factor()
    for t in ts:
        lhs = (np.abs(spec.eval_a(t, xs)) + np.abs(spec.eval_a_t(t, xs))
               + np.abs(spec.eval_a_x(t, xs)))
        rhs = factor * (spec.bare_a1(t) + spec.bare_a2(xs))
        bad = np.nonzero(lhs > rhs + 1e-12)[0]
        for i in bad:
            report.violations.append(
                Violation("separated_bound", float(t), float(xs[i]),
                          float(np.atleast_1d(lhs)[i]), float(np.atleast_1d(rhs)[i])))

    xg = np.linspace(-x_max, x_max, 4 * n + 1)
    sign_lhs = xg * np.atleast_1d(spec.bare_a2_dx(xg))
    for i in np.nonzero(sign_lhs > 1e-12)[0]:
        report.violations.append(
            Violation("space_monotonicity", 0.0, float(xg[i]),
                      float(sign_lhs[i]), 0.0))

    if spec.family in ("space_power", "separated_sum", "separated_product"):
        report.notes.append(
            "a_x(t, 0) uses the symmetric subgradient 0; (1+|x|)^(-lambda) "
            "is not C^1 at x = 0")
    return report
