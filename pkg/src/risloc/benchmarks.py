"""Comparison methods and metrics: MUSIC with known target count, the no-RIS
baseline, and the Monte-Carlo MSE."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .localizer import LocalizerConfig, SpectrumResult, detect_peaks, _scan_matrix, _step_denominator
from .pr_beamformer import BeamformedData
from .ris_optimizer import PhaseShiftMatrix
from .signal_model import ArraySpec, steering_matrix

MISS_ERROR_DEG = 90.0  # worst-case padding for missing detections


@dataclass
class TrialReport:
    true_aoas: List[float]
    estimated_aoas: List[float]
    mse: float
    detected_count: int
    snr_db: float
    method: str
    m_elements: int = 0
    trial: int = 0
    flagged: bool = False


def _local_maxima(values: np.ndarray) -> list:
    """Interior strict local maxima (plateau: leftmost index), any height."""
    n = values.size
    out = []
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        if (j + 1 < n and values[i] > values[i - 1] and values[i] > values[j + 1]):
            out.append(i)
        i = j + 1
    return out


def music_estimate(data: BeamformedData, k_true: int, grid,
                   phases: PhaseShiftMatrix, ris: ArraySpec, aod_ris_pr: float,
                   include_b: bool = True) -> List[float]:
    """Subspace estimates of the k_true RIS-side angles.

    Sample covariance of the beamformed epochs, noise subspace from the
    smallest eigenvalues, pseudospectrum against unit-norm scan vectors,
    k_true largest local maxima. If the pseudospectrum has fewer interior
    maxima than k_true (degenerate inputs), the largest remaining grid values
    fill in.
    """
    if not 1 <= k_true < data.n_epoch:
        raise ValueError(f"k_true must satisfy 1 <= k_true < n_epoch, got {k_true}")
    z = data.z
    r = z @ z.conj().T / data.n_samples
    r = r + 1e-10 * np.trace(r).real / data.n_epoch * np.eye(data.n_epoch)
    _, vecs = np.linalg.eigh(r)  # ascending eigenvalues
    noise_sub = vecs[:, : data.n_epoch - k_true]
    cfg = LocalizerConfig(grid=np.asarray(grid, dtype=float), include_b=include_b)
    d = _scan_matrix(cfg, phases, ris, aod_ris_pr)
    d = d / np.linalg.norm(d, axis=0)
    denom = np.sum(np.abs(noise_sub.conj().T @ d) ** 2, axis=0)
    pseudo = 1.0 / np.maximum(denom, 1e-300)
    order = sorted(_local_maxima(pseudo), key=lambda i: -pseudo[i])
    picked = order[:k_true]
    if len(picked) < k_true:
        rest = [i for i in np.argsort(-pseudo) if i not in picked]
        picked.extend(rest[: k_true - len(picked)])
    return sorted(float(cfg.grid[i]) for i in picked)


def no_ris_localize(y_epoch: np.ndarray, cfg: LocalizerConfig,
                    pr: ArraySpec) -> SpectrumResult:
    """Algorithm variant without the RIS: NLMS on raw array snapshots.

    y_epoch is a single N_PR x L epoch containing only direct paths; the scan
    dictionary is the plain PR steering vector, so peaks land at the PR-side
    target angles.
    """
    y_epoch = np.asarray(y_epoch, dtype=complex)
    d = steering_matrix(pr, cfg.grid)
    a_hat = np.zeros((pr.elements, cfg.grid.size), dtype=complex)
    for ell in range(y_epoch.shape[1]):
        y = y_epoch[:, ell]
        err = d.conj().T @ y - a_hat.conj().T @ y
        a_hat += (cfg.mu / _step_denominator(y, cfg)) * np.outer(y, err.conj())
    power = np.sum(np.abs(a_hat) ** 2, axis=0)
    peak = power.max() if power.size else 0.0
    if peak <= 0.0:
        return SpectrumResult(cfg.grid, power, np.zeros_like(power), [], [],
                              degenerate=True)
    normalized = power / peak
    peaks = detect_peaks(normalized, cfg.grid, cfg.threshold)
    return SpectrumResult(cfg.grid, power, normalized, peaks, list(peaks))


def select_estimates(result: SpectrumResult, k: int) -> List[float]:
    """Up to k detected peaks, strongest first, returned in ascending angle."""
    ranked = sorted(result.peaks, key=lambda t: -result.normalized[
        int(np.argmin(np.abs(result.grid - t)))])
    return sorted(ranked[:k])


def trial_error(true_aoas: Sequence[float], estimates: Sequence[float]):
    """Single-trial squared-error terms under sorted pairing.

    Missing estimates are charged the worst grid error and the trial is
    flagged; surplus estimates must be trimmed by the caller.
    """
    truths = np.sort(np.asarray(true_aoas, dtype=float))
    est = np.sort(np.asarray(estimates, dtype=float))
    k = truths.size
    if est.size > k:
        raise ValueError("more estimates than targets; trim before scoring")
    flagged = est.size < k
    errs = np.full(k, MISS_ERROR_DEG)
    if est.size:
        errs[: est.size] = np.abs(truths[: est.size] - est)
    mse = float(np.mean(errs ** 2)) if k else 0.0
    return mse, flagged


def compute_mse(true_aoas: Sequence[float],
                estimated_aoas_per_trial: Sequence[Sequence[float]]) -> float:
    """Monte-Carlo MSE: mean over trials and targets of (theta - theta_hat)^2.

    Estimates pair with truths in sorted order; short trials are padded with
    the worst grid error.
    """
    if not estimated_aoas_per_trial:
        raise ValueError("at least one trial required")
    total = 0.0
    for est in estimated_aoas_per_trial:
        mse, _ = trial_error(true_aoas, est)
        total += mse
    return total / len(estimated_aoas_per_trial)
