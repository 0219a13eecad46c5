"""Invariance-matrix scores and the pairwise direction decision.

The score of a candidate direction is built in four steps: standardize
both variables, form the invariance matrix M from the cause and effect
Gram matrices, eigendecompose M, and average the smallest eigenvalues
that jointly carry at least the configured energy fraction. Small score
means stable conditional embeddings, i.e. the plausible causal direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .baselines import anm_score, igci_score, kcdc_score, IgciReference, oriented
from .config import RunConfig, config_digest
from .embeddings import cond_embedding_matrix_uncentered, reweighted_cond_matrix, \
    reweighting_vector, ridge_factorization
from .errors import ConfigurationError, NumericalError
from .kernels import GramMatrix, centering_matrix, gram
from .pairs import Direction, PairedDataset, standardize

CLAMP_FACTOR = 1e-10


class Method(str, Enum):
    KIIM = "KIIM"
    RW_KIIM = "RwKIIM"
    KCDC = "KCDC"
    IGCI_GAUSS = "IGCIGauss"
    IGCI_UNIFORM = "IGCIUniform"
    ANM = "ANM"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted descending and floored at zero.

    ``clamped_count`` counts roundoff-scale negatives (within
    CLAMP_FACTOR of the largest magnitude) that were zeroed;
    ``negative_count`` flags genuine negatives beyond that threshold,
    which were also floored but indicate a non-PSD input. ``min_raw``
    keeps the smallest eigenvalue before flooring for diagnostics.
    """

    eigenvalues: np.ndarray
    clamped_count: int
    negative_count: int
    min_raw: float
    source_dim: int


@dataclass(frozen=True)
class DirectionScore:
    """Score of one direction plus spectral diagnostics when available.

    The rank fields are None for scorers that do not work on a spectrum.
    """

    score: float
    retained_count: int | None = None
    retained_energy_ratio: float | None = None
    discarded_top: int | None = None


@dataclass(frozen=True)
class CausalDecision:
    direction: Direction
    score_xy: DirectionScore
    score_yx: DirectionScore
    method: Method
    config_digest: str


@dataclass(frozen=True)
class AblationPoint:
    """Scores and decision for one fixed discard count d."""

    discarded_top: int
    score_xy: DirectionScore
    score_yx: DirectionScore
    direction: Direction


def kiim_matrix(Kx: GramMatrix, Ky: GramMatrix, lam: float) -> np.ndarray:
    """Invariance matrix K_y (K_x+lam I)^{-1} K_x H K_x (K_x+lam I)^{-1} K_y.

    Assembled as B^T B with B = H K_x (K_x+lam I)^{-1} K_y (valid because
    H = H^T H), which keeps the result symmetric PSD up to roundoff; the
    average with its transpose is returned.
    """
    if Kx.n != Ky.n:
        raise ValueError("Gram matrices must have matching dimensions")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    T = ridge_factorization(Kx.values, lam).solve(np.array(Ky.values))
    B = centering_matrix(Kx.n) @ (Kx.values @ T)
    M = B.T @ B
    return 0.5 * (M + M.T)


def matrix_from_coeffs(A: np.ndarray, Ky: GramMatrix) -> np.ndarray:
    """Invariance matrix from an explicit coefficient matrix.

    Column i of A holds the conditional-embedding coefficients a_i; with
    C = K_y A the matrix is C H C^T, the scatter of the embeddings after
    centering, pulled back through the effect Gram matrix.
    """
    if A.shape != (Ky.n, Ky.n):
        raise ValueError("coefficient matrix must be n x n")
    B = centering_matrix(Ky.n) @ (Ky.values @ A).T
    M = B.T @ B
    return 0.5 * (M + M.T)


def sym_eig(M) -> Spectrum:
    """Full eigenvalue spectrum of a symmetric matrix, descending."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    scale = float(np.abs(M).max()) if M.size else 0.0
    if scale > 0 and float(np.abs(M - M.T).max()) > 1e-8 * scale:
        raise ValueError("matrix is not symmetric within 1e-8 relative")
    try:
        raw = np.linalg.eigvalsh(0.5 * (M + M.T))[::-1]
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition did not converge: {exc}") from exc
    threshold = -CLAMP_FACTOR * float(np.abs(raw).max()) if raw.size else 0.0
    negative = raw < 0
    tiny = negative & (raw > threshold)
    return Spectrum(eigenvalues=np.maximum(raw, 0.0),
                    clamped_count=int(tiny.sum()),
                    negative_count=int((negative & ~tiny).sum()),
                    min_raw=float(raw.min()) if raw.size else 0.0,
                    source_dim=int(M.shape[0]))


def energy_rank_score(spectrum: Spectrum, energy_threshold: float = 0.9) -> DirectionScore:
    """Average of the bottom eigenvalues holding >= the threshold energy.

    With eigenvalues pi_1 >= ... >= pi_n, the retained tail starts at the
    largest index whose suffix sum still reaches energy_threshold times
    the total; the score is that suffix sum divided by n.
    """
    eig = spectrum.eigenvalues
    n = eig.size
    if n == 0:
        raise ValueError("empty spectrum")
    if not 0.0 < energy_threshold <= 1.0:
        raise ValueError("energy threshold must lie in (0, 1]")
    tails = np.cumsum(eig[::-1])[::-1]
    total = float(tails[0])
    if total <= 0.0:
        return DirectionScore(score=0.0, retained_count=n,
                              retained_energy_ratio=1.0, discarded_top=0)
    start = int(np.nonzero(tails >= energy_threshold * total)[0].max())
    retained = float(tails[start])
    return DirectionScore(score=retained / n, retained_count=n - start,
                          retained_energy_ratio=min(retained / total, 1.0),
                          discarded_top=start)


def fixed_discard_score(spectrum: Spectrum, discard: int) -> DirectionScore:
    """Ablation path: drop exactly ``discard`` top eigenvalues, average the rest."""
    eig = spectrum.eigenvalues
    n = eig.size
    if not 0 <= discard < n:
        raise ValueError("discard count must lie in [0, n)")
    retained = float(eig[discard:].sum())
    total = float(eig.sum())
    return DirectionScore(score=retained / n, retained_count=n - discard,
                          retained_energy_ratio=min(retained / total, 1.0) if total > 0 else 1.0,
                          discarded_top=discard)


def _standardized_pair(dataset: PairedDataset, direction):
    if dataset.n < 5:
        raise ValueError("invariance score needs at least 5 paired samples")
    cause, effect = oriented(dataset, direction)
    return standardize(cause), standardize(effect)


def invariance_matrix(dataset: PairedDataset, direction, config: RunConfig,
                      reweighted: bool = False) -> np.ndarray:
    """M for one direction of a dataset under the configured estimator."""
    cause, effect = _standardized_pair(dataset, direction)
    Kx = gram(config.kernel_x, cause)
    Ky = gram(config.kernel_y, effect)
    if reweighted:
        r = reweighting_vector(cause, clip_quantile=config.rw_clip_quantile)
        return matrix_from_coeffs(reweighted_cond_matrix(Kx, r, config.lam), Ky)
    if config.embedding_form == "alg1":
        return kiim_matrix(Kx, Ky, config.lam)
    if config.embedding_form == "eq5":
        return matrix_from_coeffs(cond_embedding_matrix_uncentered(Kx, config.lam), Ky)
    raise ConfigurationError(f"unknown embedding form {config.embedding_form!r}")


def kiim_score(dataset: PairedDataset, direction, config: RunConfig | None = None) -> DirectionScore:
    """Invariance score of one direction (plain conditional embeddings)."""
    config = config or RunConfig()
    M = invariance_matrix(dataset, direction, config)
    return energy_rank_score(sym_eig(M), config.energy_threshold)


def rw_kiim_score(dataset: PairedDataset, direction, config: RunConfig | None = None) -> DirectionScore:
    """Invariance score with importance-reweighted conditional embeddings.

    The reweighting pushes the (standardized) cause sample toward a
    uniform reference on its range before the embeddings are compared.
    """
    config = config or RunConfig()
    M = invariance_matrix(dataset, direction, config, reweighted=True)
    return energy_rank_score(sym_eig(M), config.energy_threshold)


def direction_score(dataset: PairedDataset, direction, method, config: RunConfig) -> DirectionScore:
    """One direction's score under any method, wrapped uniformly."""
    method = Method(method)
    if method is Method.KIIM:
        return kiim_score(dataset, direction, config)
    if method is Method.RW_KIIM:
        return rw_kiim_score(dataset, direction, config)
    if method is Method.KCDC:
        return DirectionScore(score=kcdc_score(dataset, direction, config.baselines))
    if method is Method.IGCI_GAUSS:
        return DirectionScore(score=igci_score(dataset, direction, IgciReference.GAUSSIAN))
    if method is Method.IGCI_UNIFORM:
        return DirectionScore(score=igci_score(dataset, direction, IgciReference.UNIFORM))
    return DirectionScore(score=anm_score(dataset, direction, config.baselines))


def _decide(score_xy: float, score_yx: float, tie_tolerance: float) -> Direction:
    if abs(score_xy - score_yx) <= tie_tolerance * max(score_xy, score_yx, 1.0):
        return Direction.UNDECIDED
    return Direction.X_TO_Y if score_xy < score_yx else Direction.Y_TO_X


def infer_direction(dataset: PairedDataset, method, config: RunConfig | None = None) -> CausalDecision:
    """Score both directions with identical settings and compare.

    Smaller score wins; ties within the relative tolerance are Undecided.
    """
    config = config or RunConfig()
    method = Method(method)
    score_xy = direction_score(dataset, Direction.X_TO_Y, method, config)
    score_yx = direction_score(dataset, Direction.Y_TO_X, method, config)
    return CausalDecision(direction=_decide(score_xy.score, score_yx.score, config.tie_tolerance),
                          score_xy=score_xy, score_yx=score_yx, method=method,
                          config_digest=config_digest(config))


def rank_ablation(dataset: PairedDataset, d_max: int,
                  config: RunConfig | None = None) -> tuple[AblationPoint, ...]:
    """Decisions for every fixed discard count d = 0..d_max.

    Both spectra are computed once; each d then slices the sorted
    eigenvalues directly, bypassing the energy rule.
    """
    config = config or RunConfig()
    if not 0 <= d_max < dataset.n:
        raise ValueError("d_max must lie in [0, n)")
    spectra = {direction: sym_eig(invariance_matrix(dataset, direction, config))
               for direction in (Direction.X_TO_Y, Direction.Y_TO_X)}
    points = []
    for d in range(d_max + 1):
        score_xy = fixed_discard_score(spectra[Direction.X_TO_Y], d)
        score_yx = fixed_discard_score(spectra[Direction.Y_TO_X], d)
        points.append(AblationPoint(discarded_top=d, score_xy=score_xy, score_yx=score_yx,
                                    direction=_decide(score_xy.score, score_yx.score,
                                                      config.tie_tolerance)))
    return tuple(points)
