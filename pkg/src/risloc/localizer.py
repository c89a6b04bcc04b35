"""Batch NLMS direction finding over an angular grid: per-angle adaptive
steering estimates, power spectrum, normalization and peak detection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .pr_beamformer import BeamformedData
from .ris_optimizer import PhaseShiftMatrix
from .signal_model import ArraySpec, steering_vector


def default_grid() -> np.ndarray:
    # steering is undefined at +-90, so the grid stops half a step short
    return np.round(np.arange(-89.5, 89.5 + 0.25, 0.5), 6)


@dataclass
class LocalizerConfig:
    mu: float = 0.1
    grid: np.ndarray = field(default_factory=default_grid)
    threshold: float = 0.5
    epsilon: float = 1e-12
    include_b: bool = True
    # squared-norm step normalization (scale-invariant textbook form); the
    # default divides by ||z|| as the recursion is specified
    textbook_norm: bool = False

    def __post_init__(self):
        # mu = 0 is allowed: the recursion then never updates, which is a
        # useful degenerate case for testing.
        if self.mu < 0:
            raise ValueError("step size mu must be non-negative")
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must lie in (0, 1)")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.size == 0 or np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be non-empty and strictly increasing")


@dataclass
class SpectrumResult:
    grid: np.ndarray
    power: np.ndarray
    normalized: np.ndarray
    peaks: list
    estimates: list
    degenerate: bool = False

    @property
    def k_hat(self) -> int:
        return len(self.peaks)

    def to_csv(self, path) -> None:
        is_peak = np.isin(self.grid, self.peaks).astype(int)
        with open(path, "w") as fh:
            fh.write("theta_deg,power,normalized,is_peak\n")
            for t, p, n, ip in zip(self.grid, self.power, self.normalized, is_peak):
                fh.write(f"{t:.6g},{p:.12g},{n:.12g},{ip}\n")


def scan_vector(theta: float, phases: PhaseShiftMatrix, ris: ArraySpec,
                aod_ris_pr: float, include_b: bool = True) -> np.ndarray:
    """Epoch signature of a hypothetical source at theta: V a(theta), or
    V diag(b) a(theta) when the reflect-side taper is included."""
    a = steering_vector(ris, theta)
    if include_b:
        a = a * steering_vector(ris, aod_ris_pr)
    return phases.matrix @ a


def _scan_matrix(cfg: LocalizerConfig, phases, ris, aod_ris_pr) -> np.ndarray:
    a = np.stack([steering_vector(ris, t) for t in cfg.grid], axis=1)
    if cfg.include_b:
        a = a * steering_vector(ris, aod_ris_pr)[:, None]
    return phases.matrix @ a  # N_epoch x n_grid


def _step_denominator(z: np.ndarray, cfg: LocalizerConfig) -> float:
    nrm = np.linalg.norm(z)
    if cfg.textbook_norm:
        return nrm * nrm + cfg.epsilon
    return nrm + cfg.epsilon


def nlms_run(data: BeamformedData, theta: float, cfg: LocalizerConfig,
             phases: PhaseShiftMatrix, ris: ArraySpec, aod_ris_pr: float) -> np.ndarray:
    """Adapt a_hat from zero over the L snapshots for one scan angle.

    Per snapshot: p = d^H z, then
    a_hat <- a_hat + mu/(||z|| + eps) * conj(p - a_hat^H z) * z.
    Returns a_hat after the last snapshot.
    """
    d = scan_vector(theta, phases, ris, aod_ris_pr, cfg.include_b)
    a_hat = np.zeros(data.n_epoch, dtype=complex)
    for ell in range(data.n_samples):
        z = data.z[:, ell]
        p = np.vdot(d, z)
        err = p - np.vdot(a_hat, z)
        a_hat = a_hat + (cfg.mu / _step_denominator(z, cfg)) * np.conj(err) * z
    return a_hat


def spectrum(data: BeamformedData, cfg: LocalizerConfig, phases: PhaseShiftMatrix,
             ris: ArraySpec, aod_ris_pr: float) -> SpectrumResult:
    """P(theta) = ||a_hat_L(theta)||^2 over the grid, normalized, with peaks.

    All grid angles share the identical per-snapshot recursion, so the whole
    grid is updated as one rank-1 outer product per snapshot; this equals
    running nlms_run per angle.
    """
    d = _scan_matrix(cfg, phases, ris, aod_ris_pr)
    a_hat = np.zeros((data.n_epoch, cfg.grid.size), dtype=complex)
    for ell in range(data.n_samples):
        z = data.z[:, ell]
        err = d.conj().T @ z - a_hat.conj().T @ z
        a_hat += (cfg.mu / _step_denominator(z, cfg)) * np.outer(z, err.conj())
    power = np.sum(np.abs(a_hat) ** 2, axis=0)
    peak = power.max() if power.size else 0.0
    if peak <= 0.0:
        return SpectrumResult(cfg.grid, power, np.zeros_like(power), [], [],
                              degenerate=True)
    normalized = power / peak
    peaks = detect_peaks(normalized, cfg.grid, cfg.threshold)
    return SpectrumResult(cfg.grid, power, normalized, peaks, list(peaks))


def detect_peaks(normalized: np.ndarray, grid: np.ndarray, phi: float) -> list:
    """Strict local maxima above phi; endpoints excluded; on a plateau the
    leftmost sample wins."""
    normalized = np.asarray(normalized)
    n = normalized.size
    out = []
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and normalized[j + 1] == normalized[i]:
            j += 1
        if (j + 1 < n and normalized[i] > phi
                and normalized[i] > normalized[i - 1]
                and normalized[i] > normalized[j + 1]):
            out.append(float(grid[i]))
        i = j + 1
    return out
