"""Free-convolution transforms built on the subordination solvers.

Provides Cauchy transforms of semicircular convolutions and convolution
powers, numerical R-transforms, the scalar boundary curve of a measure, and
spectral-density recovery on grids near the real axis.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .algebra import (
    CPMap,
    POSITIVITY_TOL,
    as_element,
    identity_kron,
    opnorm,
    require_halfplane,
    vec,
    unvec,
)
from .model import OperatorModel, ScalarMeasure
from .subordination import (
    DEFAULT_CONFIG,
    ConvergenceError,
    SolveReport,
    SolverConfig,
    SubordinationProblem,
    solve_omega_stack,
)

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class SemicircularSpec:
    """Covariance of an operator-valued semicircular element, as a CP map on B."""

    beta: CPMap

    def __post_init__(self):
        if self.beta.in_dim != self.beta.out_dim:
            raise ValueError("a semicircular covariance acts on B")

    @classmethod
    def scalar(cls, t: float, dim: int) -> "SemicircularSpec":
        return cls(beta=CPMap.scaled_identity(t, dim))


def _as_beta(beta, dim: int) -> CPMap:
    if isinstance(beta, SemicircularSpec):
        return beta.beta
    if isinstance(beta, CPMap):
        return beta
    return CPMap.scaled_identity(float(beta), dim)


def semicircle_problem(model: OperatorModel, beta: CPMap) -> SubordinationProblem:
    """Generic subordination problem for model + semicircular noise:
    a = 0 and eta = beta composed with the conditional expectation."""
    eta = beta.compose(CPMap.from_kraus(model.expectation_kraus(), to_base=True))
    return SubordinationProblem.generic(model, eta)


@dataclass(frozen=True)
class SemicircularConvolution:
    """Cauchy-transform evaluator for base distribution plus free semicircular noise."""

    base: object      # OperatorModel or another evaluator
    beta: CPMap

    def __post_init__(self):
        if self.beta.in_dim != self.base_dim or self.beta.out_dim != self.base_dim:
            raise ValueError("covariance must act on B")

    @property
    def base_dim(self) -> int:
        return self.base.base_dim

    def omega_stack(self, b_stack: np.ndarray, cfg: SolverConfig = DEFAULT_CONFIG,
                    level: int = 1):
        """Subordination values for a stack of points, with convergence mask."""
        if isinstance(self.base, OperatorModel):
            problem = semicircle_problem(self.base, self.beta)
            w, _, _, ok = solve_omega_stack(problem, b_stack, cfg, level)
            return w, ok
        inner_cfg = replace(cfg, tol=cfg.tol * 0.1, start=None)

        def step(w, idx):
            G, _ = _cauchy_stack(self.base, w, level, inner_cfg)
            return b_stack[idx] - self.beta.apply(G, level)

        from .subordination import _picard_stack
        w, _, _, ok = _picard_stack(step, np.array(b_stack, dtype=complex), cfg)
        if np.any(ok):
            _, inner_ok = _cauchy_stack(self.base, w[ok], level, inner_cfg)
            mask = ok.copy()
            mask[np.where(ok)[0][~inner_ok]] = False
            return w, mask
        return w, ok

    def cauchy_stack(self, b_stack: np.ndarray, level: int = 1,
                     cfg: SolverConfig = DEFAULT_CONFIG):
        w, ok = self.omega_stack(b_stack, cfg, level)
        G, ok2 = _cauchy_stack(self.base, w, level, cfg)
        return G, ok & ok2

    def cauchy(self, b, level: int = 1, cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
        b = as_element(b, "b")
        G, ok = self.cauchy_stack(b[None], level, cfg)
        if not ok[0]:
            report = SolveReport(value=G[0], iterations=cfg.max_iter,
                                 residual=float("nan"), converged=False)
            raise ConvergenceError("semicircular convolution solve did not converge", report)
        return G[0]


@dataclass(frozen=True)
class ConvolutionPower:
    """Cauchy-transform evaluator for a free convolution power of a model."""

    base: OperatorModel
    alpha: CPMap

    @property
    def base_dim(self) -> int:
        return self.base.base_dim

    def problem(self) -> SubordinationProblem:
        return SubordinationProblem.power(self.base, self.alpha)

    def cauchy_stack(self, b_stack: np.ndarray, level: int = 1,
                     cfg: SolverConfig = DEFAULT_CONFIG):
        w, _, _, ok = solve_omega_stack(self.problem(), b_stack, cfg, level)
        return self.base.cauchy(w, level), ok

    def cauchy(self, b, level: int = 1, cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
        b = as_element(b, "b")
        G, ok = self.cauchy_stack(b[None], level, cfg)
        if not ok[0]:
            report = SolveReport(value=G[0], iterations=cfg.max_iter,
                                 residual=float("nan"), converged=False)
            raise ConvergenceError("convolution power solve did not converge", report)
        return G[0]


def _cauchy_stack(source, b_stack: np.ndarray, level: int, cfg: SolverConfig):
    """(G values, converged mask) for a stack of points, any source kind."""
    nbatch = b_stack.shape[0]
    if isinstance(source, OperatorModel):
        return source.cauchy(b_stack, level), np.ones(nbatch, dtype=bool)
    if isinstance(source, (SemicircularConvolution, ConvolutionPower)):
        return source.cauchy_stack(b_stack, level, cfg)
    if isinstance(source, SubordinationProblem):
        w, _, _, ok = solve_omega_stack(source, b_stack, cfg, level)
        return source.model.cauchy(w, level), ok
    raise TypeError(f"cannot evaluate a Cauchy transform of {type(source).__name__}")


def cauchy_eval(source, b, cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Cauchy transform of a model, convolution wrapper, or problem at one point."""
    b = as_element(b, "b")
    if isinstance(source, SubordinationProblem):
        n = source.model.base_dim
    elif isinstance(source, (OperatorModel, SemicircularConvolution, ConvolutionPower)):
        n = source.base_dim
    else:
        raise TypeError(f"cannot evaluate a Cauchy transform of {type(source).__name__}")
    level = b.shape[0] // n
    G, ok = _cauchy_stack(source, b[None], level, cfg)
    if not ok[0]:
        report = SolveReport(value=G[0], iterations=cfg.max_iter,
                             residual=float("nan"), converged=False)
        raise ConvergenceError("Cauchy transform evaluation did not converge", report)
    return G[0]


def semicircular_convolve_g(source, beta, b,
                            cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """G of source plus a free semicircular element with covariance beta.

    beta may be a CPMap on B, a SemicircularSpec, or a scalar variance t.
    """
    n = source.base_dim if not isinstance(source, SubordinationProblem) \
        else source.model.base_dim
    conv = SemicircularConvolution(source, _as_beta(beta, n))
    b = require_halfplane(as_element(b, "b"), "upper", POSITIVITY_TOL, name="b")
    level = b.shape[0] // n
    return conv.cauchy(b, level, cfg)


def convolution_power_g(model: OperatorModel, alpha, b,
                        cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """G of the free convolution power of a model, via subordination."""
    if not isinstance(alpha, CPMap):
        alpha = CPMap.scaled_identity(float(alpha), model.base_dim)
    conv = ConvolutionPower(model, alpha)
    b = require_halfplane(as_element(b, "b"), "upper", POSITIVITY_TOL, name="b")
    level = b.shape[0] // model.base_dim
    return conv.cauchy(b, level, cfg)


# ---------------------------------------------------------------------------
# R-transform
# ---------------------------------------------------------------------------


def _norm_bound(source) -> float:
    if isinstance(source, OperatorModel):
        return source.norm_bound()
    if isinstance(source, SemicircularConvolution):
        return _norm_bound(source.base) + 2.0 * np.sqrt(source.beta.norm_bound())
    if isinstance(source, ConvolutionPower):
        return _norm_bound(source.base) * (1.0 + source.alpha.norm_bound())
    raise TypeError(f"no norm bound for {type(source).__name__}")


def _cauchy_derivative(source, w: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Matrix of c -> d/dt G(w + t c) on vec(B), analytic for models."""
    n = w.shape[0]
    cols = []
    if isinstance(source, OperatorModel):
        R = source.resolvent(w)
        for j in range(n):
            for i in range(n):
                E = np.zeros((n, n), dtype=complex)
                E[i, j] = 1.0
                cols.append(vec(-source.expect(R @ source.embed(E) @ R)))
    else:
        step = 1e-6
        for j in range(n):
            for i in range(n):
                E = np.zeros((n, n), dtype=complex)
                E[i, j] = 1.0
                Gp = cauchy_eval(source, w + step * E, cfg)
                Gm = cauchy_eval(source, w - step * E, cfg)
                cols.append(vec((Gp - Gm) / (2.0 * step)))
    return np.stack(cols, axis=1)


def r_transform_eval(source, g, cfg: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """R(g) = G^{<-1>}(g) - g^{-1} by Newton iteration from w = g^{-1}.

    Restricted to small arguments, ||g|| (||X|| + 2) < 1/2, where the inverse
    exists and the Newton iterates stay in the resolvent-like region.
    """
    g = as_element(g, "g")
    n = g.shape[0]
    bound = _norm_bound(source)
    if opnorm(g) * (bound + 2.0) >= 0.5:
        raise ValueError("outside R-domain")
    ginv = np.linalg.inv(g)
    w = ginv.copy()
    inner_cfg = replace(cfg, tol=min(cfg.tol * 0.1, 1e-13), start=None)
    for _ in range(60):
        G = cauchy_eval(source, w, inner_cfg) if not isinstance(source, OperatorModel) \
            else source.cauchy(w)
        F = G - g
        if opnorm(F) <= cfg.tol:
            return w - ginv
        J = _cauchy_derivative(source, w, inner_cfg)
        try:
            delta = unvec(np.linalg.solve(J, vec(F)), n)
        except np.linalg.LinAlgError as exc:
            raise ValueError("outside R-domain") from exc
        if not np.all(np.isfinite(delta)) or opnorm(delta) > 10.0 * (bound + opnorm(ginv)):
            raise ValueError("outside R-domain")
        w = w - delta
    raise ValueError("outside R-domain")


# ---------------------------------------------------------------------------
# Scalar boundary curve
# ---------------------------------------------------------------------------


def biane_v_scalar(measure: ScalarMeasure, t: float, u: float) -> float:
    """inf{v >= 0 : t * sum_j w_j / ((u - x_j)^2 + v^2) <= 1}.

    The defining sum is strictly decreasing in v, so the infimum is 0 or the
    unique root of sum = 1; the root is bracketed in (0, sqrt(t)] and refined
    until the defining sum equals 1 to 1e-12.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    locs = measure.locations
    wts = measure.weights
    du2 = (u - locs) ** 2

    def total(v: float) -> float:
        return float(t * np.sum(wts / (du2 + v * v)))

    hit = du2 < 1e-300
    if np.any(wts[hit] > 0):
        f0 = np.inf
    else:
        f0 = float(t * np.sum(wts[~hit] / du2[~hit])) if np.any(~hit) else 0.0
    if f0 <= 1.0:
        return 0.0

    # solve in s = v^2; total(sqrt(t)) <= 1 since the weights sum to 1
    def gap(s: float) -> float:
        with np.errstate(divide="ignore"):
            return float(t * np.sum(wts / (du2 + s))) - 1.0

    s = brentq(gap, 0.0, t, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    v = float(np.sqrt(max(s, 0.0)))
    for _ in range(4):
        f = total(v)
        if abs(f - 1.0) <= 1e-13:
            break
        fp = float(-2.0 * t * v * np.sum(wts / (du2 + v * v) ** 2))
        if fp == 0.0:
            break
        v = max(v - (f - 1.0) / fp, 1e-300)
    if abs(total(v) - 1.0) > 1e-12:
        raise ArithmeticError("boundary curve refinement stalled")
    return v


# ---------------------------------------------------------------------------
# Density recovery
# ---------------------------------------------------------------------------


@dataclass
class DensityGrid:
    """Spectral density samples recovered from G just above the real axis.

    raw[j, l] holds -(1/pi) Im tau(G(u_j + i eps_l)); density extrapolates
    the two smallest eps linearly to eps = 0 ("richardson" method tag).
    Non-converged entries are NaN and listed in failures, never fabricated.
    """

    abscissae: np.ndarray
    epsilons: tuple[float, ...]
    raw: np.ndarray
    density: np.ndarray
    method: str
    failures: tuple[tuple[int, int], ...] = ()

    def mass(self) -> float:
        """Trapezoid integral of the extrapolated density over the grid."""
        good = np.isfinite(self.density)
        return float(_trapezoid(np.where(good, self.density, 0.0), self.abscissae))

    def cdf(self, x: np.ndarray) -> np.ndarray:
        dens = np.where(np.isfinite(self.density), np.clip(self.density, 0.0, None), 0.0)
        cum = np.concatenate([[0.0], np.cumsum(
            0.5 * (dens[1:] + dens[:-1]) * np.diff(self.abscissae))])
        return np.interp(x, self.abscissae, cum)


DENSITY_CONFIG = SolverConfig(damping=0.5)


def density_grid(source, abscissae, epsilons,
                 cfg: SolverConfig | None = None) -> DensityGrid:
    """Evaluate -(1/pi) Im tau(G(u + i eps)) on a grid and extrapolate to eps = 0.

    source may be an OperatorModel, a convolution wrapper, a
    SubordinationProblem, or a callable z -> G(z) returning a matrix on B.
    The default solver configuration uses damping 0.5, which keeps the
    fixed-point iteration contractive arbitrarily close to the real axis.
    """
    cfg = DENSITY_CONFIG if cfg is None else cfg
    us = np.asarray(abscissae, dtype=float)
    eps = tuple(sorted((float(e) for e in epsilons), reverse=True))
    if us.ndim != 1 or us.size < 2:
        raise ValueError("abscissae must be a vector with at least two points")
    if not eps or eps[-1] <= 0:
        raise ValueError("epsilons must be positive")

    if callable(source) and not isinstance(
            source, (OperatorModel, SemicircularConvolution, ConvolutionPower,
                     SubordinationProblem)):
        def evaluate(level_points):
            vals, ok = [], []
            for z in level_points:
                try:
                    G = source(z)
                    vals.append(as_element(G, "G(z)"))
                    ok.append(True)
                except Exception:
                    vals.append(None)
                    ok.append(False)
            n = next((v.shape[0] for v in vals if v is not None), 1)
            out = np.stack([v if v is not None else np.full((n, n), np.nan)
                            for v in vals])
            return out, np.array(ok)

        raw = np.empty((us.size, len(eps)))
        failures = []
        for l, e in enumerate(eps):
            G, ok = evaluate(us + 1j * e)
            tau = np.trace(G, axis1=-2, axis2=-1) / G.shape[-1]
            raw[:, l] = -np.imag(tau) / np.pi
            raw[~ok, l] = np.nan
            failures.extend((int(j), l) for j in np.where(~ok)[0])
    else:
        n = source.base_dim if not isinstance(source, SubordinationProblem) \
            else source.model.base_dim
        eye = np.eye(n, dtype=complex)
        raw = np.empty((us.size, len(eps)))
        failures = []
        for l, e in enumerate(eps):
            b_stack = (us[:, None, None] + 1j * e) * eye
            G, ok = _cauchy_stack(source, b_stack, 1, cfg)
            tau = np.trace(G, axis1=-2, axis2=-1) / n
            raw[:, l] = -np.imag(tau) / np.pi
            raw[~ok, l] = np.nan
            failures.extend((int(j), l) for j in np.where(~ok)[0])

    if len(eps) >= 2:
        e1, e2 = eps[-2], eps[-1]
        d1, d2 = raw[:, -2], raw[:, -1]
        density = d2 + (d2 - d1) * e2 / (e1 - e2)
        method = "richardson"
    else:
        density = raw[:, 0].copy()
        method = "none"
    return DensityGrid(abscissae=us, epsilons=eps, raw=raw, density=density,
                       method=method, failures=tuple(failures))
