"""Finite-dimensional operator models.

A model is a Hermitian element X of an ambient matrix algebra A = M_N(C)
together with a trace-preserving conditional expectation E: A -> B onto
B = M_n(C).  The ambient algebra factors as M_n otimes M_m (N = n * m) and E
is a weighted partial trace over the second factor; uniform weights give the
normalized partial trace and n = 1 with atom weights encodes a scalar measure
with finitely many atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    HERMITIAN_TOL,
    POSITIVITY_TOL,
    as_element,
    dag,
    identity_kron,
    in_halfplane,
    kron_with_identity,
    opnorm,
    require_hermitian,
)


@dataclass(frozen=True)
class ScalarMeasure:
    """Compactly supported probability measure with finitely many atoms."""

    atoms: tuple[tuple[float, float], ...]  # (location, weight) pairs

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a scalar measure needs at least one atom")
        locs = np.array([a[0] for a in self.atoms], dtype=float)
        wts = np.array([a[1] for a in self.atoms], dtype=float)
        if not np.all(np.isfinite(locs)):
            raise ValueError("atom locations must be finite")
        if np.any(wts < 0):
            raise ValueError("atom weights must be nonnegative")
        if abs(wts.sum() - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1")

    @property
    def locations(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms], dtype=float)

    @classmethod
    def point(cls, c: float) -> "ScalarMeasure":
        return cls(atoms=((float(c), 1.0),))

    @classmethod
    def symmetric_bernoulli(cls) -> "ScalarMeasure":
        return cls(atoms=((-1.0, 0.5), (1.0, 0.5)))


@dataclass(frozen=True)
class OperatorModel:
    """Hermitian X in M_N(C) with a weighted partial-trace expectation onto M_n(C)."""

    X: np.ndarray
    base_dim: int
    weights: np.ndarray

    def __post_init__(self):
        X = require_hermitian(self.X, HERMITIAN_TOL, name="X")
        object.__setattr__(self, "X", X)
        n = int(self.base_dim)
        if n < 1:
            raise ValueError("base_dim must be positive")
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty vector")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)
        if X.shape[0] != n * w.size:
            raise ValueError(
                f"ambient dimension {X.shape[0]} is not base_dim {n} "
                f"times factor dimension {w.size}")

    @classmethod
    def partial_trace(cls, X, base_dim: int) -> "OperatorModel":
        X = as_element(X, "X")
        if X.shape[0] % base_dim:
            raise ValueError("ambient dimension must be a multiple of base_dim")
        m = X.shape[0] // base_dim
        return cls(X=X, base_dim=base_dim, weights=np.full(m, 1.0 / m))

    @property
    def factor_dim(self) -> int:
        return self.weights.size

    @property
    def ambient_dim(self) -> int:
        return self.base_dim * self.factor_dim

    @property
    def uniform(self) -> bool:
        w = self.weights
        return bool(np.allclose(w, 1.0 / w.size, atol=1e-15))

    def embed(self, b: np.ndarray) -> np.ndarray:
        """B -> A (or M_k(B) -> M_k(A)): tensor with the identity factor."""
        return kron_with_identity(b, self.factor_dim)

    def expect(self, x: np.ndarray, level: int = 1) -> np.ndarray:
        """Weighted partial trace, applied blockwise at amplification level k."""
        x = np.asarray(x, dtype=complex)
        n, m = self.base_dim, self.factor_dim
        d = level * n * m
        if x.shape[-1] != d or x.shape[-2] != d:
            raise ValueError(f"expectation input shape {x.shape} does not match level {level}")
        xr = x.reshape(x.shape[:-2] + (level, n, m, level, n, m))
        out = np.einsum("...pisqjs,s->...piqj", xr, self.weights)
        return out.reshape(x.shape[:-2] + (level * n, level * n))

    def expectation_kraus(self) -> list[np.ndarray]:
        """Kraus operators of E: slices weighted by sqrt(w_s)."""
        n, m = self.base_dim, self.factor_dim
        ops = []
        for s in range(m):
            sel = np.zeros((1, m), dtype=complex)
            sel[0, s] = 1.0
            ops.append(np.sqrt(self.weights[s]) * np.kron(np.eye(n, dtype=complex), sel))
        return ops

    def norm_bound(self) -> float:
        return opnorm(self.X)

    def resolvent(self, b: np.ndarray, level: int = 1) -> np.ndarray:
        """(b - X otimes 1_k)^{-1}, batched over leading axes of b."""
        Xk = identity_kron(level, self.X)
        return np.linalg.inv(self.embed(b) - Xk)

    def cauchy(self, b: np.ndarray, level: int = 1) -> np.ndarray:
        return self.expect(self.resolvent(b, level), level)

    def trace_b(self, b: np.ndarray) -> complex:
        """Normalized trace on B, the scalar state used for densities."""
        b = as_element(b, "trace argument")
        return complex(np.trace(b) / b.shape[0])


def _infer_level(model: OperatorModel, b: np.ndarray) -> int:
    d = b.shape[-1]
    n = model.base_dim
    if d % n:
        raise ValueError(f"point of size {d} is not an amplification of base dimension {n}")
    return d // n


def cauchy_transform(model: OperatorModel, b, level: int | None = None) -> np.ndarray:
    """Matricial Cauchy transform G(b) = (E otimes Id_k)[(b - X otimes 1_k)^{-1}].

    Defined for b with definite imaginary part; maps the upper half-plane of
    M_k(B) into the lower one and satisfies G(b*) = G(b)*.
    """
    b = as_element(b, "b")
    k = _infer_level(model, b) if level is None else level
    if b.shape[-1] != k * model.base_dim:
        raise ValueError("level does not match the size of b")
    if not (in_halfplane(b, "upper", POSITIVITY_TOL)
            or in_halfplane(b, "lower", POSITIVITY_TOL)):
        raise ValueError("b must have a definite imaginary part")
    return model.cauchy(b, k)


def h_transform(model: OperatorModel, b, level: int | None = None) -> np.ndarray:
    """h(b) = G(b)^{-1} - b; has positive semidefinite imaginary part on the upper half-plane."""
    b = as_element(b, "b")
    k = _infer_level(model, b) if level is None else level
    G = cauchy_transform(model, b, k)
    return np.linalg.inv(G) - b


@dataclass(frozen=True)
class MomentRequest:
    """Mixed moment E[X b_1 X ... b_{order-1} X]; order 0 is the unit of B."""

    order: int
    args: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be nonnegative")
        expected = max(self.order - 1, 0)
        if len(self.args) != expected:
            raise ValueError(
                f"order {self.order} needs {expected} interleaved arguments, "
                f"got {len(self.args)}")


def moment(model: OperatorModel, request: MomentRequest) -> np.ndarray:
    n = model.base_dim
    if request.order == 0:
        return np.eye(n, dtype=complex)
    acc = model.X.copy()
    for b in request.args:
        b = as_element(b, "moment argument")
        if b.shape[0] != n:
            raise ValueError("moment arguments live in B")
        acc = acc @ model.embed(b) @ model.X
    return model.expect(acc)


def moment_growth_bound(model: OperatorModel, k_max: int = 6, trials: int = 8,
                        seed: int = 0) -> float:
    """Empirical exponential-growth proxy max ||moment||^(1/(k+1)).

    Sampled over random unit-norm argument tuples at orders 1..k_max; the
    sampling is deterministic for a fixed seed.  For bounded X the value is
    dominated by ||X||.
    """
    rng = np.random.default_rng(seed)
    n = model.base_dim
    bound = 0.0
    for order in range(1, k_max + 1):
        for _ in range(trials):
            args = []
            for _ in range(order - 1):
                c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                args.append(c / opnorm(c))
            val = opnorm(moment(model, MomentRequest(order, tuple(args))))
            bound = max(bound, val ** (1.0 / (order + 1)))
    return bound


def scalar_to_model(measure: ScalarMeasure) -> OperatorModel:
    """Diagonal model of a scalar measure: X = diag(locations), atom-weighted trace."""
    locs = measure.locations
    return OperatorModel(X=np.diag(locs).astype(complex), base_dim=1,
                         weights=measure.weights)
