"""Coupled dictionary training.

Alternates joint sparse coding of the stacked patch pairs with a sweep of
per-atom updates. Atoms are visited in ascending order and the residuals are
refreshed after each one, so later atoms see the earlier updates.
"""

import logging
import time
from typing import Optional, Tuple, Union

import numpy as np

from src.errors import DataError, DimensionError, NumericalError
from src.models.dictionary import CoupledDictionary, TrainConfig, TrainTrace
from src.models.sparse_code import SparseCodeMatrix
from src.tools.sparse_tools import joint_code

logger = logging.getLogger(__name__)

ZERO_NORM = 1e-12

Codes = Union[SparseCodeMatrix, np.ndarray]


def _dense(codes: Codes) -> np.ndarray:
    if isinstance(codes, SparseCodeMatrix):
        return codes.to_dense()
    return np.asarray(codes, dtype=np.float64)


def _random_unit(rng: np.random.Generator, size: int) -> np.ndarray:
    vector = rng.standard_normal(size)
    return vector / np.linalg.norm(vector)


def coding_cost(p: int, q: int, atom_count: int, sparsity: int) -> int:
    """Multiply-adds of one joint coding pass over stacked 2p-dimensional pairs."""
    return 2 * p * q * atom_count * sparsity


def update_cost(p: int, q: int) -> int:
    """Multiply-adds of one atom-update sweep over both modalities."""
    return 2 * p * q


def init_dictionary(
    x_ms: np.ndarray,
    x_b: np.ndarray,
    cfg: TrainConfig,
) -> CoupledDictionary:
    """D_MS = D_B = D_0 built from sampled, normalized averaged patch pairs."""
    x_ms = np.asarray(x_ms, dtype=np.float64)
    x_b = np.asarray(x_b, dtype=np.float64)
    if x_ms.shape != x_b.shape:
        raise DimensionError(f"patch matrix shapes differ: {x_ms.shape} vs {x_b.shape}")

    p, q = x_ms.shape
    averaged = (x_ms + x_b) / 2.0
    norms = np.linalg.norm(averaged, axis=0)
    if not np.any(norms > ZERO_NORM):
        raise DataError("training patches are all zero; no atoms can be seeded")
    if q < cfg.atom_count:
        logger.warning(
            "only %d training patches for %d atoms; %d atoms seeded randomly",
            q, cfg.atom_count, cfg.atom_count - q,
        )

    rng = np.random.default_rng(cfg.seed)
    picked = rng.choice(q, size=min(q, cfg.atom_count), replace=False)
    atoms = np.empty((p, cfg.atom_count))
    for n in range(cfg.atom_count):
        if n < picked.shape[0] and norms[picked[n]] > ZERO_NORM:
            atoms[:, n] = averaged[:, picked[n]] / norms[picked[n]]
        else:
            atoms[:, n] = _random_unit(rng, p)
    return CoupledDictionary(d_ms=atoms, d_b=atoms)


def full_error(x_r: np.ndarray, d_r: np.ndarray, codes: Codes) -> np.ndarray:
    """Residual X_r - D_r L."""
    dense = _dense(codes)
    if d_r.shape[1] != dense.shape[0] or x_r.shape != (d_r.shape[0], dense.shape[1]):
        raise DimensionError(
            f"cannot form X - D L from X {x_r.shape}, D {d_r.shape}, L {dense.shape}"
        )
    return x_r - d_r @ dense


def _pair_objective(x_ms, x_b, d_ms, d_b, dense) -> float:
    e_ms = full_error(x_ms, d_ms, dense)
    e_b = full_error(x_b, d_b, dense)
    return float(np.sum(e_ms * e_ms) + np.sum(e_b * e_b))


def objective(x_ms: np.ndarray, x_b: np.ndarray, dictionary: CoupledDictionary, codes: Codes) -> float:
    """||X_MS - D_MS L||_F^2 + ||X_B - D_B L||_F^2."""
    return _pair_objective(
        np.asarray(x_ms, dtype=np.float64), np.asarray(x_b, dtype=np.float64),
        dictionary.d_ms, dictionary.d_b, _dense(codes),
    )


def atom_support(codes: Codes, n: int) -> np.ndarray:
    """Columns whose code uses atom n."""
    if isinstance(codes, SparseCodeMatrix):
        if not 0 <= n < codes.atom_count:
            raise DimensionError(f"atom {n} out of range for {codes.atom_count} atoms")
        return np.array(
            [m for m, code in enumerate(codes.codes) if n in code.support and
             code.coefficients[code.support.index(n)] != 0.0],
            dtype=np.intp,
        )
    dense = np.asarray(codes)
    if not 0 <= n < dense.shape[0]:
        raise DimensionError(f"atom {n} out of range for {dense.shape[0]} atoms")
    return np.flatnonzero(dense[n])


def restricted_error(
    x_r: np.ndarray,
    d_r: np.ndarray,
    codes: Codes,
    n: int,
    support: np.ndarray,
    residual: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Error without atom n's contribution, restricted to the columns in `support`.

    `residual` may carry an up-to-date X_r - D_r L to avoid recomputing it.
    """
    if len(support) == 0:
        raise DimensionError(f"atom {n} has an empty support; use full_error instead")
    dense = _dense(codes)
    if residual is None:
        residual = full_error(x_r, d_r, dense)
    elif residual.shape != x_r.shape:
        raise DimensionError(f"residual {residual.shape} does not match X {x_r.shape}")
    return residual[:, support] + np.outer(d_r[:, n], dense[n, support])


def update_atom_pair(
    e_ms: np.ndarray,
    e_b: np.ndarray,
    alpha_row: np.ndarray,
    empty: bool,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """New ([d_MS]_n, [d_B]_n, restricted alpha row) for one atom.

    Empty support: each atom becomes the normalized column-wise mean of its
    full error matrix and the row is returned unchanged.
    Otherwise d_r = E_r alpha^T, normalized per modality, and the row is
    re-fit as the least-squares projection of the stacked error onto the
    stacked atom pair.
    """
    alpha_row = np.asarray(alpha_row, dtype=np.float64)
    if empty:
        rng = rng or np.random.default_rng(0)
        atoms = []
        for error in (e_ms, e_b):
            atom = np.asarray(error, dtype=np.float64).mean(axis=1)
            norm = np.linalg.norm(atom)
            atoms.append(atom / norm if norm > ZERO_NORM else _random_unit(rng, atom.shape[0]))
        return atoms[0], atoms[1], alpha_row

    if e_ms.shape != e_b.shape or e_ms.shape[1] != alpha_row.shape[0]:
        raise DimensionError(
            f"restricted errors {e_ms.shape}, {e_b.shape} do not match a row of {alpha_row.shape[0]}"
        )
    d_ms = e_ms @ alpha_row
    d_b = e_b @ alpha_row
    norm_ms = np.linalg.norm(d_ms)
    norm_b = np.linalg.norm(d_b)
    if norm_ms <= ZERO_NORM or norm_b <= ZERO_NORM:
        raise NumericalError("atom update direction E_r alpha^T vanished")
    d_ms = d_ms / norm_ms
    d_b = d_b / norm_b

    stacked_sq = d_ms @ d_ms + d_b @ d_b
    new_row = (d_ms @ e_ms + d_b @ e_b) / stacked_sq
    return d_ms, d_b, new_row


def _sweep(
    x_ms: np.ndarray,
    x_b: np.ndarray,
    d_ms: np.ndarray,
    d_b: np.ndarray,
    dense: np.ndarray,
    cfg: TrainConfig,
    rng: np.random.Generator,
) -> Tuple[int, int]:
    """One in-place pass over all atoms. Returns (empty, refreshed) atom counts."""
    e_ms = full_error(x_ms, d_ms, dense)
    e_b = full_error(x_b, d_b, dense)
    empty_count = 0
    refreshed = 0

    for n in range(cfg.atom_count):
        support = atom_support(dense, n)
        if support.size == 0:
            empty_count += 1
            d_ms[:, n], d_b[:, n], _ = update_atom_pair(e_ms, e_b, np.zeros(0), empty=True, rng=rng)
            continue

        row = dense[n, support]
        e_ms_n = restricted_error(x_ms, d_ms, dense, n, support, residual=e_ms)
        e_b_n = restricted_error(x_b, d_b, dense, n, support, residual=e_b)
        try:
            new_ms, new_b, new_row = update_atom_pair(e_ms_n, e_b_n, row, empty=False)
        except NumericalError:
            # keep the atoms, drop the row; the atom is re-seeded if configured
            dense[n, support] = 0.0
            e_ms[:, support] = e_ms_n
            e_b[:, support] = e_b_n
            if cfg.refresh_failed_atoms:
                d_ms[:, n], d_b[:, n], _ = update_atom_pair(e_ms, e_b, np.zeros(0), empty=True, rng=rng)
                refreshed += 1
            logger.debug("atom %d update vanished; row cleared", n)
            continue

        d_ms[:, n] = new_ms
        d_b[:, n] = new_b
        dense[n, support] = new_row
        e_ms[:, support] = e_ms_n - np.outer(new_ms, new_row)
        e_b[:, support] = e_b_n - np.outer(new_b, new_row)

    return empty_count, refreshed


def train(
    x_ms: np.ndarray,
    x_b: np.ndarray,
    cfg: TrainConfig,
    initial: Optional[CoupledDictionary] = None,
) -> Tuple[CoupledDictionary, SparseCodeMatrix, TrainTrace]:
    """Run R rounds of joint coding followed by a full atom sweep."""
    x_ms = np.asarray(x_ms, dtype=np.float64)
    x_b = np.asarray(x_b, dtype=np.float64)
    if x_ms.shape != x_b.shape:
        raise DimensionError(f"patch matrix shapes differ: {x_ms.shape} vs {x_b.shape}")

    dictionary = initial or init_dictionary(x_ms, x_b, cfg)
    if dictionary.atom_count != cfg.atom_count or dictionary.patch_dim != x_ms.shape[0]:
        raise DimensionError(
            f"initial dictionary {dictionary.patch_dim}x{dictionary.atom_count} does not match "
            f"p={x_ms.shape[0]}, A={cfg.atom_count}"
        )

    p, q = x_ms.shape
    rng = np.random.default_rng(cfg.seed + 1)
    d_ms = np.array(dictionary.d_ms)
    d_b = np.array(dictionary.d_b)
    trace = TrainTrace(
        coding_cost=coding_cost(p, q, cfg.atom_count, cfg.sparsity),
        update_cost=update_cost(p, q),
    )
    logger.info(
        "training %d atoms on %d patch pairs (p=%d, H0=%d, R=%d)",
        cfg.atom_count, q, p, cfg.sparsity, cfg.rounds,
    )

    codes = None
    for r in range(cfg.rounds):
        started = time.perf_counter()
        codes = joint_code(d_ms, d_b, x_ms, x_b, cfg.sparsity, cfg.residual_tol, cfg.lstsq_rcond)
        dense = codes.to_dense()
        coded = _pair_objective(x_ms, x_b, d_ms, d_b, dense)
        if r == 0:
            trace.initial_objective = coded

        empty_count, refreshed = _sweep(x_ms, x_b, d_ms, d_b, dense, cfg, rng)
        value = _pair_objective(x_ms, x_b, d_ms, d_b, dense)
        if not np.isfinite(value):
            raise NumericalError(
                f"objective became {value} in round {r + 1} "
                f"(previous {trace.objectives[-1] if trace.objectives else coded}); training aborted"
            )
        dictionary = CoupledDictionary(d_ms=d_ms, d_b=d_b)
        codes = SparseCodeMatrix.from_dense(dense)

        trace.coded_objectives.append(coded)
        trace.objectives.append(value)
        trace.empty_atoms.append(empty_count)
        trace.refreshed_atoms.append(refreshed)
        trace.round_seconds.append(time.perf_counter() - started)
        logger.info(
            "round %d/%d: objective %.6g (after coding %.6g), %d empty atoms",
            r + 1, cfg.rounds, value, coded, empty_count,
        )

    return dictionary, codes, trace
