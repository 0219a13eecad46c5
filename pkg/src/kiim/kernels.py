"""Kernel functions, bandwidth selection, and Gram-matrix construction.

The default pipeline kernel is the elementwise product of an RBF kernel
(median-heuristic bandwidth), a log kernel and a rational quadratic kernel.
Note that this product has a zero diagonal (the log factor vanishes at
distance 0) and is therefore not positive definite; ``CompositeSum`` is kept
as a configurable fallback for experiments that need a PSD surrogate, but
the default pipeline uses the product form.

All inputs are scalar observations; kernels are evaluated on 1-D samples.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError

#: Bandwidth marker resolved against a sample set before evaluation.
MEDIAN = "median"


class KernelFamily(Enum):
    RBF = "rbf"
    LOG = "log"
    RATIONAL_QUADRATIC = "rq"
    POLYNOMIAL = "poly"
    COMPOSITE_PRODUCT = "product"
    COMPOSITE_SUM = "sum"


_COMPOSITES = (KernelFamily.COMPOSITE_PRODUCT, KernelFamily.COMPOSITE_SUM)


@dataclass(frozen=True)
class KernelSpec:
    """Declarative kernel description: family plus its parameters.

    ``bandwidth`` is a positive width or the ``MEDIAN`` marker (RBF only),
    ``degree`` applies to the polynomial family, ``parts`` to the two
    composite families.
    """

    family: KernelFamily
    bandwidth: float | str | None = None
    degree: int | None = None
    parts: tuple["KernelSpec", ...] = ()

    def __post_init__(self):
        fam = self.family
        if fam is KernelFamily.RBF:
            bw = self.bandwidth
            if bw != MEDIAN and not (isinstance(bw, (int, float)) and bw > 0):
                raise ValueError("RBF bandwidth must be positive or the median marker")
        elif self.bandwidth is not None:
            raise ValueError(f"{fam.value} kernel takes no bandwidth")
        if fam is KernelFamily.POLYNOMIAL:
            if not (isinstance(self.degree, int) and self.degree >= 1):
                raise ValueError("polynomial degree must be an integer >= 1")
        elif self.degree is not None:
            raise ValueError(f"{fam.value} kernel takes no degree")
        if fam in _COMPOSITES:
            if len(self.parts) < 2:
                raise ValueError("composite kernel needs at least 2 parts")
            object.__setattr__(self, "parts", tuple(self.parts))
        elif self.parts:
            raise ValueError(f"{fam.value} kernel takes no parts")

    @property
    def is_resolved(self) -> bool:
        """True once every median-heuristic marker has been replaced."""
        if self.family is KernelFamily.RBF:
            return self.bandwidth != MEDIAN
        return all(p.is_resolved for p in self.parts)

    @property
    def is_stationary(self) -> bool:
        """True when the kernel depends on its arguments only through x - x'."""
        if self.family in _COMPOSITES:
            return all(p.is_stationary for p in self.parts)
        return self.family is not KernelFamily.POLYNOMIAL


def rbf(bandwidth: float | str = MEDIAN) -> KernelSpec:
    """RBF kernel exp(-(x - x')^2 / sigma^2)."""
    return KernelSpec(KernelFamily.RBF, bandwidth=bandwidth)


def log_kernel() -> KernelSpec:
    """Log kernel -log((x - x')^2 + 1); zero diagonal, not PSD."""
    return KernelSpec(KernelFamily.LOG)


def rational_quadratic() -> KernelSpec:
    """Rational quadratic kernel 1 - d^2 / (d^2 + 1) with d = x - x'."""
    return KernelSpec(KernelFamily.RATIONAL_QUADRATIC)


def polynomial(degree: int) -> KernelSpec:
    """Inhomogeneous polynomial kernel (x x' + 1)^degree."""
    return KernelSpec(KernelFamily.POLYNOMIAL, degree=degree)


def product(*parts: KernelSpec) -> KernelSpec:
    return KernelSpec(KernelFamily.COMPOSITE_PRODUCT, parts=tuple(parts))


def kernel_sum(*parts: KernelSpec) -> KernelSpec:
    return KernelSpec(KernelFamily.COMPOSITE_SUM, parts=tuple(parts))


def default_composite(mode: str = "product") -> KernelSpec:
    """Default pipeline kernel: RBF(median) combined with log and RQ parts."""
    parts = (rbf(), log_kernel(), rational_quadratic())
    if mode == "product":
        return product(*parts)
    if mode == "sum":
        return kernel_sum(*parts)
    raise ConfigurationError(f"unknown composite mode {mode!r}")


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """n x n matrix of kernel evaluations with its (resolved) provenance spec."""

    values: np.ndarray
    spec: KernelSpec
    n: int


def median_heuristic(samples) -> float:
    """Median of pairwise Euclidean distances over distinct index pairs.

    Returns the fallback 1.0 when the median distance is 0 (degenerate
    sample sets with many ties).
    """
    xs = np.asarray(samples, dtype=float).ravel()
    if xs.size < 2:
        raise ValueError("median heuristic needs at least 2 samples")
    iu = np.triu_indices(xs.size, k=1)
    dists = np.abs(xs[:, None] - xs[None, :])[iu]
    med = float(np.median(dists))
    return med if med > 0.0 else 1.0


def resolve(spec: KernelSpec, samples) -> KernelSpec:
    """Replace every median-heuristic marker by the sample-set median width.

    Deterministic for a fixed sample set; non-RBF leaves are returned as-is.
    """
    if spec.family is KernelFamily.RBF and spec.bandwidth == MEDIAN:
        return dataclasses.replace(spec, bandwidth=median_heuristic(samples))
    if spec.family in _COMPOSITES:
        return dataclasses.replace(spec, parts=tuple(resolve(p, samples) for p in spec.parts))
    return spec


def _evaluate(spec: KernelSpec, a, b):
    """Evaluate the (resolved) kernel on broadcastable point arrays a, b."""
    fam = spec.family
    if fam is KernelFamily.RBF:
        d2 = (a - b) ** 2
        return np.exp(-d2 / spec.bandwidth**2)
    if fam is KernelFamily.LOG:
        return -np.log1p((a - b) ** 2)
    if fam is KernelFamily.RATIONAL_QUADRATIC:
        d2 = (a - b) ** 2
        return 1.0 - d2 / (d2 + 1.0)
    if fam is KernelFamily.POLYNOMIAL:
        return (a * b + 1.0) ** spec.degree
    if fam is KernelFamily.COMPOSITE_PRODUCT:
        out = _evaluate(spec.parts[0], a, b)
        for part in spec.parts[1:]:
            out = out * _evaluate(part, a, b)
        return out
    if fam is KernelFamily.COMPOSITE_SUM:
        out = _evaluate(spec.parts[0], a, b)
        for part in spec.parts[1:]:
            out = out + _evaluate(part, a, b)
        return out
    raise ConfigurationError(f"unknown kernel family {fam!r}")


def eval_kernel(spec: KernelSpec, x: float, xp: float) -> float:
    """Evaluate k(x, x') for a fully resolved spec.

    Composite products multiply their part values, composite sums add them.
    """
    if not spec.is_resolved:
        raise ConfigurationError("bandwidth not resolved; call resolve() against a sample set")
    return float(_evaluate(spec, np.float64(x), np.float64(xp)))


def gram(spec: KernelSpec, samples) -> GramMatrix:
    """Symmetric Gram matrix of kernel evaluations over a sample sequence.

    Median-heuristic bandwidths are resolved against ``samples`` first. The
    upper triangle is evaluated once and mirrored, so the result equals its
    transpose bit-for-bit.
    """
    xs = np.asarray(samples, dtype=float).ravel()
    if xs.size == 0:
        raise ValueError("gram needs a nonempty sample sequence")
    resolved = resolve(spec, xs)
    full = np.asarray(_evaluate(resolved, xs[:, None], xs[None, :]), dtype=float)
    upper = np.triu(full)
    values = upper + np.triu(full, k=1).T
    values.setflags(write=False)
    return GramMatrix(values=values, spec=resolved, n=int(xs.size))


def centering_matrix(n: int) -> np.ndarray:
    """H = I - (1/n) 1 1^T; idempotent, annihilates the all-ones vector."""
    if n < 1:
        raise ValueError("centering matrix needs n >= 1")
    return np.eye(n) - 1.0 / n
