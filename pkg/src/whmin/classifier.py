"""WMIN: Mahalanobis-distance classifier for automorphically minimal words.

The model holds the mean and (ridged) inverse covariance of feature vectors
of minimal words and a threshold ``rho``; a word is declared minimal when
its squared Mahalanobis distance is strictly below ``rho``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg

from .automorphisms import is_whitehead_minimal
from .features import feature_dim, feature_matrix, feature_vector
from .heuristics import CentroidModel
from .words import RankMismatch, SeedLike, Word, WordError, random_cyclically_reduced_word, rng_from

MODEL_VERSION = 1
MINIMAL, NON_MINIMAL = "minimal", "non-minimal"


class ModelError(ValueError):
    """Malformed or incompatible model file."""


@dataclass(frozen=True)
class WminModel:
    rank: int
    mu: np.ndarray
    sigma_inv: np.ndarray
    rho: float
    alpha: float
    ridge: float = 1e-6
    centroids: Optional[CentroidModel] = field(default=None, compare=False)

    def with_centroids(self, centroids: Optional[CentroidModel]) -> "WminModel":
        return WminModel(self.rank, self.mu, self.sigma_inv, self.rho, self.alpha, self.ridge, centroids)


def _check_word(model: WminModel, u: Word) -> None:
    if u.rank != model.rank:
        raise RankMismatch(f"model has rank {model.rank}, word has rank {u.rank}")
    if len(u) < 2:
        raise WordError("minimality classification needs a word of length >= 2")


def quadratic_form(sigma_inv: np.ndarray, diff: np.ndarray) -> np.ndarray:
    """Row-wise ``diff^T S diff`` for a 1-D or 2-D ``diff``."""
    return np.einsum("...i,ij,...j->...", diff, sigma_inv, diff)


def mahalanobis_sq(model: WminModel, u: Word) -> float:
    _check_word(model, u)
    diff = feature_vector(u) - model.mu
    return max(float(quadratic_form(model.sigma_inv, diff)), 0.0)


def decide(model: WminModel, u: Word) -> str:
    return MINIMAL if mahalanobis_sq(model, u) < model.rho else NON_MINIMAL


def is_classified_minimal(model: WminModel, u: Word) -> bool:
    return decide(model, u) == MINIMAL


def strict_quantile(distances: np.ndarray, alpha: float) -> float:
    """Smallest sample value ``rho`` with ``#{d < rho} >= (1 - alpha) N``.

    Nearest-rank rule under a strict comparison: the ``ceil((1-alpha) N)``
    smallest values fall strictly below it.  When that takes every sample the
    threshold is nudged just above the maximum.
    """
    d = np.sort(np.asarray(distances, dtype=float))
    if d.size == 0:
        raise ValueError("no distances to take a quantile of")
    k = math.ceil((1.0 - alpha) * d.size - 1e-9)
    if k <= 0:
        return float(d[0])
    # first value strictly above the k-th smallest, so ties never straddle the cut
    j = int(np.searchsorted(d, d[k - 1], side="right"))
    if j >= d.size:
        return float(np.nextafter(d[-1], np.inf))
    return float(d[j])


def fit_gaussian(features: np.ndarray, ridge: float = 1e-6) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and ridged inverse covariance of the rows of ``features``."""
    mu = features.mean(axis=0)
    sigma = np.cov(features, rowvar=False)
    d = sigma.shape[0]
    sigma = sigma + ridge * (np.trace(sigma) / d) * np.eye(d)
    try:
        factor = scipy.linalg.cho_factor(sigma, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise ModelError(f"covariance is singular even after ridge {ridge}") from exc
    sigma_inv = scipy.linalg.cho_solve(factor, np.eye(d))
    sigma_inv = 0.5 * (sigma_inv + sigma_inv.T)
    return mu, sigma_inv


def train_wmin(
    rank: int,
    sample_size: int = 10000,
    alpha: float = 0.001,
    length_range: Tuple[int, int] = (100, 1000),
    seed: SeedLike = None,
    *,
    certify: bool = False,
    ridge: float = 1e-6,
    train_fraction: float = 0.8,
) -> WminModel:
    """Estimate mean/covariance on 80% of random cyclically reduced words, rho on the rest.

    Random cyclically reduced words are minimal with asymptotic probability
    one, so by default they are used uncertified; ``certify=True`` rejects
    any that an exhaustive sweep can shorten.
    """
    d = feature_dim(rank)
    if sample_size < 10 * d:
        raise ValueError(f"sample_size must be at least {10 * d} for rank {rank}")
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    lo, hi = length_range
    if lo < 2 or hi < lo:
        raise ValueError(f"bad length range {length_range}")
    rng = rng_from(seed)
    words = []
    while len(words) < sample_size:
        w = random_cyclically_reduced_word(rank, int(rng.integers(lo, hi + 1)), rng)
        if certify and not is_whitehead_minimal(w):
            continue
        words.append(w)
    feats = feature_matrix(words, rank)
    n_train = int(round(train_fraction * sample_size))
    mu, sigma_inv = fit_gaussian(feats[:n_train], ridge)
    held = np.maximum(quadratic_form(sigma_inv, feats[n_train:] - mu), 0.0)
    rho = strict_quantile(held, alpha)
    for a in (mu, sigma_inv):
        a.flags.writeable = False
    return WminModel(rank, mu, sigma_inv, rho, alpha, ridge)


# --- persistence ------------------------------------------------------------


def model_to_dict(model: WminModel) -> dict:
    out = {
        "version": MODEL_VERSION,
        "rank": model.rank,
        "alpha": model.alpha,
        "ridge": model.ridge,
        "mu": [float(x) for x in model.mu],
        "sigma_inv": [[float(x) for x in row] for row in model.sigma_inv],
        "rho": model.rho,
        "centroids": model.centroids.to_json() if model.centroids is not None else [],
    }
    if model.centroids is not None:
        out["centroid_max_length"] = model.centroids.max_length
    return out


def model_from_dict(data: dict) -> WminModel:
    if not isinstance(data, dict):
        raise ModelError("model file must hold a JSON object")
    if data.get("version") != MODEL_VERSION:
        raise ModelError(f"unsupported model version {data.get('version')!r} (expected {MODEL_VERSION})")
    try:
        rank = int(data["rank"])
        d = feature_dim(rank)
        mu = np.asarray(data["mu"], dtype=float)
        sigma_inv = np.asarray(data["sigma_inv"], dtype=float)
        rho = float(data["rho"])
        alpha = float(data["alpha"])
        ridge = float(data["ridge"])
        entries = data.get("centroids", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed model file: {exc}") from exc
    if mu.shape != (d,) or sigma_inv.shape != (d, d):
        raise ModelError(f"model arrays do not match rank {rank} (dimension {d})")
    centroids = None
    if entries:
        try:
            centroids = CentroidModel.from_json(entries, rank, int(data.get("centroid_max_length", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"malformed centroid entries: {exc}") from exc
    return WminModel(rank, mu, sigma_inv, rho, alpha, ridge, centroids)


def save_model(model: WminModel, path: Union[str, Path]) -> None:
    # json writes floats with repr(), which round-trips exactly
    Path(path).write_text(json.dumps(model_to_dict(model)), encoding="utf-8")


def load_model(path: Union[str, Path]) -> WminModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed model file {path}: {exc}") from exc
    return model_from_dict(data)
