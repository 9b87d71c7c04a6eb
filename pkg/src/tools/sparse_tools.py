"""Joint sparse coding with orthogonal matching pursuit."""

import logging
from typing import List, Optional

import numpy as np
from scipy import linalg

from src.config.settings import LSTSQ_RCOND, RESIDUAL_TOL
from src.errors import ConfigError, DimensionError, RankError
from src.models.sparse_code import SparseCode, SparseCodeMatrix

logger = logging.getLogger(__name__)


def _atom_norms(dictionary: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(dictionary, axis=0)
    if np.any(norms == 0.0):
        zero = np.flatnonzero(norms == 0.0)
        raise RankError(f"dictionary has zero-norm atoms at {zero.tolist()}")
    return norms


def _pursue(
    dictionary: np.ndarray,
    norms: np.ndarray,
    signal: np.ndarray,
    correlations: np.ndarray,
    gram: np.ndarray,
    sparsity: int,
    residual_tol: float,
    rcond: float,
    history: Optional[List[float]],
) -> SparseCode:
    residual_norm = float(np.linalg.norm(signal))
    if history is not None:
        history.append(residual_norm)
    if residual_norm <= residual_tol:
        return SparseCode()

    support: List[int] = []
    coefficients = np.zeros(0)
    excluded = np.zeros(dictionary.shape[1], dtype=bool)

    while len(support) < sparsity and not excluded.all():
        # D^T r = D^T x - G[:, S] c
        current = correlations - gram[:, support] @ coefficients if support else correlations
        scores = np.abs(current) / norms
        scores[excluded] = -1.0
        best = int(np.argmax(scores))
        if scores[best] <= 0.0:
            break
        excluded[best] = True

        candidate = support + [best]
        submatrix = dictionary[:, candidate]
        solution, _, rank, _ = linalg.lstsq(submatrix, signal, cond=rcond)
        if rank < len(candidate):
            continue

        support, coefficients = candidate, solution
        residual_norm = float(np.linalg.norm(signal - submatrix @ solution))
        if history is not None:
            history.append(residual_norm)
        if residual_norm <= residual_tol:
            break

    return SparseCode(
        support=tuple(support),
        coefficients=tuple(float(c) for c in coefficients),
    )


def _check_sparsity(sparsity: int, atom_count: int) -> None:
    if sparsity < 1:
        raise ConfigError(f"sparsity must be at least 1, got {sparsity}")
    if sparsity > atom_count:
        raise ConfigError(f"sparsity {sparsity} exceeds atom count {atom_count}")


def omp(
    stacked_dictionary: np.ndarray,
    stacked_signal: np.ndarray,
    sparsity: int,
    residual_tol: float = RESIDUAL_TOL,
    rcond: float = LSTSQ_RCOND,
    residual_history: Optional[List[float]] = None,
) -> SparseCode:
    """Greedy orthogonal matching pursuit on one signal.

    Atoms are selected by |<atom, residual>| / ||atom||, then the coefficients
    are re-solved by least squares over the whole support. Stops at
    `sparsity` atoms or when the residual norm drops to `residual_tol`.
    Residual norms per step are appended to `residual_history` if given.
    """
    dictionary = np.asarray(stacked_dictionary, dtype=np.float64)
    signal = np.asarray(stacked_signal, dtype=np.float64).ravel()
    if dictionary.ndim != 2 or dictionary.shape[0] != signal.shape[0]:
        raise DimensionError(
            f"dictionary {dictionary.shape} does not match signal of length {signal.shape[0]}"
        )
    _check_sparsity(sparsity, dictionary.shape[1])
    norms = _atom_norms(dictionary)
    return _pursue(
        dictionary, norms, signal,
        correlations=dictionary.T @ signal,
        gram=dictionary.T @ dictionary,
        sparsity=sparsity,
        residual_tol=residual_tol,
        rcond=rcond,
        history=residual_history,
    )


def stack_pair(top: np.ndarray, bottom: np.ndarray) -> np.ndarray:
    """Vertically stack two equally wide matrices (or vectors)."""
    top = np.asarray(top, dtype=np.float64)
    bottom = np.asarray(bottom, dtype=np.float64)
    if top.shape[1:] != bottom.shape[1:] or top.shape[0] != bottom.shape[0]:
        raise DimensionError(f"cannot stack {top.shape} over {bottom.shape}")
    return np.concatenate([top, bottom], axis=0)


def joint_code(
    d_ms: np.ndarray,
    d_b: np.ndarray,
    x_ms: np.ndarray,
    x_b: np.ndarray,
    sparsity: int,
    residual_tol: float = RESIDUAL_TOL,
    rcond: float = LSTSQ_RCOND,
) -> SparseCodeMatrix:
    """Code every patch pair [x_MS; x_B] against [D_MS; D_B] with one shared code."""
    d_ms = np.asarray(d_ms, dtype=np.float64)
    d_b = np.asarray(d_b, dtype=np.float64)
    x_ms = np.asarray(x_ms, dtype=np.float64)
    x_b = np.asarray(x_b, dtype=np.float64)
    if d_ms.shape != d_b.shape:
        raise DimensionError(f"dictionary shapes differ: {d_ms.shape} vs {d_b.shape}")
    if x_ms.shape != x_b.shape:
        raise DimensionError(f"patch matrix shapes differ: {x_ms.shape} vs {x_b.shape}")
    if x_ms.shape[0] != d_ms.shape[0]:
        raise DimensionError(
            f"patch dimension {x_ms.shape[0]} does not match dictionary rows {d_ms.shape[0]}"
        )

    dictionary = stack_pair(d_ms, d_b)
    signals = stack_pair(x_ms, x_b)
    _check_sparsity(sparsity, dictionary.shape[1])
    norms = _atom_norms(dictionary)
    gram = dictionary.T @ dictionary
    correlations = dictionary.T @ signals

    codes = tuple(
        _pursue(
            dictionary, norms, signals[:, m], correlations[:, m], gram,
            sparsity, residual_tol, rcond, history=None,
        )
        for m in range(signals.shape[1])
    )
    logger.debug("coded %d patch pairs against %d atoms", len(codes), dictionary.shape[1])
    return SparseCodeMatrix(codes=codes, atom_count=dictionary.shape[1])
