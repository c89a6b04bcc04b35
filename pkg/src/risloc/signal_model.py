"""Narrowband multi-hop signal model: steering vectors, Rician channels,
waveforms, RIS incident/reflected signals and the received-data tensor."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


@dataclass
class ArraySpec:
    """Uniform linear array: element count and spacing in wavelengths."""

    elements: int
    spacing: float = 0.5

    def __post_init__(self):
        if self.elements < 1:
            raise ValueError(f"elements must be >= 1, got {self.elements}")
        if self.spacing <= 0:
            raise ValueError(f"spacing must be > 0, got {self.spacing}")


@dataclass
class PathDelays:
    """Propagation delays in seconds, folded into gains as carrier phases.

    Per-target lists must match the scene's target count.
    """

    ap_targets: Optional[Sequence[float]] = None
    targets_ris: Optional[Sequence[float]] = None
    ap_ris: float = 0.0
    ris_pr: float = 0.0
    ap_pr: float = 0.0
    targets_pr: Optional[Sequence[float]] = None


@dataclass
class SceneConfig:
    """Geometry, complex path gains and Rician factors for AP, RIS, PR and targets.

    Angles are in degrees. Gains are complex amplitudes. Delays, when given,
    multiply the corresponding gain by exp(-j*2*pi*carrier_hz*tau); with
    carrier_hz=0 the gains are used exactly as configured.
    """

    target_aoas_ris: Sequence[float]
    target_aoas_pr: Sequence[float]
    aoa_ap_ris: float
    aoa_ris_pr: float
    aod_ris_pr: float
    aoa_ap_pr: float
    gain_targets: Sequence[complex]
    gain_ap_ris: complex
    gain_ris_pr: complex
    gain_ap_pr: complex
    gain_targets_pr: Sequence[complex]
    rician_ap_pr: float = 10.0
    rician_targets_pr: Sequence[float] = ()
    delays: Optional[PathDelays] = None
    carrier_hz: float = 0.0

    def __post_init__(self):
        k = len(self.target_aoas_ris)
        if not (len(self.target_aoas_pr) == len(self.gain_targets)
                == len(self.gain_targets_pr) == k):
            raise ValueError("per-target lists must share one length K")
        if not self.rician_targets_pr:
            self.rician_targets_pr = tuple(10.0 for _ in range(k))
        if len(self.rician_targets_pr) != k:
            raise ValueError("rician_targets_pr length must equal K")
        if self.rician_ap_pr < 0 or any(v < 0 for v in self.rician_targets_pr):
            raise ValueError("Rician factors must be non-negative")
        for g in [self.gain_ap_ris, self.gain_ris_pr, self.gain_ap_pr,
                  *self.gain_targets, *self.gain_targets_pr]:
            if not np.isfinite(g):
                raise ValueError("gains must be finite")

    @property
    def n_targets(self) -> int:
        return len(self.target_aoas_ris)

    def _phase(self, tau: float) -> complex:
        return np.exp(-2j * np.pi * self.carrier_hz * tau)

    def effective_gain_targets(self) -> np.ndarray:
        """Two-way AP-target-RIS gains with delay phases applied."""
        g = np.asarray(self.gain_targets, dtype=complex)
        d = self.delays
        if d is not None and self.carrier_hz != 0.0:
            ap = d.ap_targets or [0.0] * self.n_targets
            tr = d.targets_ris or [0.0] * self.n_targets
            g = g * np.array([self._phase(a + b) for a, b in zip(ap, tr)])
        return g

    def effective_gain_ap_ris(self) -> complex:
        if self.delays is not None and self.carrier_hz != 0.0:
            return self.gain_ap_ris * self._phase(self.delays.ap_ris)
        return self.gain_ap_ris

    def effective_gain_ris_pr(self) -> complex:
        if self.delays is not None and self.carrier_hz != 0.0:
            return self.gain_ris_pr * self._phase(self.delays.ris_pr)
        return self.gain_ris_pr

    def effective_gain_ap_pr(self) -> complex:
        if self.delays is not None and self.carrier_hz != 0.0:
            return self.gain_ap_pr * self._phase(self.delays.ap_pr)
        return self.gain_ap_pr

    def effective_gain_targets_pr(self) -> np.ndarray:
        """Direct AP-target-PR gains with delay phases applied."""
        g = np.asarray(self.gain_targets_pr, dtype=complex)
        d = self.delays
        if d is not None and self.carrier_hz != 0.0:
            ap = d.ap_targets or [0.0] * self.n_targets
            tp = d.targets_pr or [0.0] * self.n_targets
            g = g * np.array([self._phase(a + b) for a, b in zip(ap, tp)])
        return g


@dataclass
class Waveform:
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ValueError("waveform must be a non-empty 1-D sequence")
        if self.power <= 0:
            raise ValueError("waveform power must be positive")

    @property
    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    def __len__(self):
        return self.samples.size


@dataclass
class NoiseModel:
    variance: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("noise variance must be non-negative")


@dataclass
class SnapshotTensor:
    """Per-epoch received matrices Y_n (N_PR x L) plus their vertical stack."""

    per_epoch: list = field(default_factory=list)

    @property
    def n_epoch(self) -> int:
        return len(self.per_epoch)

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate(self.per_epoch, axis=0)


def steering_vector(spec: ArraySpec, angle_deg: float) -> np.ndarray:
    """ULA response: element m (1-based) = exp(j*2*pi*spacing*(m-1)*sin(angle))."""
    if not abs(angle_deg) < 90.0:
        raise ValueError(f"steering angle must satisfy |angle| < 90, got {angle_deg}")
    m = np.arange(spec.elements)
    return np.exp(2j * np.pi * spec.spacing * m * np.sin(np.deg2rad(angle_deg)))


def steering_matrix(spec: ArraySpec, angles_deg) -> np.ndarray:
    """Columns are steering vectors for each angle."""
    if len(angles_deg) == 0:
        return np.zeros((spec.elements, 0), dtype=complex)
    return np.stack([steering_vector(spec, a) for a in angles_deg], axis=1)


def rician_channel(spec: ArraySpec, los_angle_deg: float, kappa: float,
                   rng: np.random.Generator) -> np.ndarray:
    """LoS steering vector plus scattered CN(0,1) part, mixed by the K-factor."""
    if kappa < 0:
        raise ValueError(f"Rician factor must be non-negative, got {kappa}")
    los = steering_vector(spec, los_angle_deg)
    nlos = (rng.standard_normal(spec.elements)
            + 1j * rng.standard_normal(spec.elements)) / np.sqrt(2.0)
    return np.sqrt(kappa / (1.0 + kappa)) * los + np.sqrt(1.0 / (1.0 + kappa)) * nlos


def generate_waveform(length: int, rng: np.random.Generator,
                      kind: str = "gaussian") -> Waveform:
    """Unit-power probing sequence; circular complex Gaussian or QPSK."""
    if length < 1:
        raise ValueError(f"waveform length must be >= 1, got {length}")
    if kind == "gaussian":
        s = (rng.standard_normal(length) + 1j * rng.standard_normal(length)) / np.sqrt(2.0)
    elif kind == "qpsk":
        s = rng.choice(np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0), size=length)
    else:
        raise ValueError(f"unknown waveform kind {kind!r}")
    return Waveform(s)


def ris_incident(scene: SceneConfig, waveform: Waveform, ris: ArraySpec) -> np.ndarray:
    """Signal arriving at the RIS aperture: target bounces plus the direct AP ray.

    Returns an M x L matrix A*S + alpha_0 * a_M(aoa_ap_ris) * s.
    """
    s = waveform.samples
    out = np.zeros((ris.elements, len(s)), dtype=complex)
    gains = scene.effective_gain_targets()
    for k in range(scene.n_targets):
        out += gains[k] * np.outer(steering_vector(ris, scene.target_aoas_ris[k]), s)
    a0 = scene.effective_gain_ap_ris()
    if a0 != 0:
        out += a0 * np.outer(steering_vector(ris, scene.aoa_ap_ris), s)
    return out


def ris_reflect(incident: np.ndarray, v_n: np.ndarray, aod_ris_pr: float,
                ris: ArraySpec) -> np.ndarray:
    """One epoch of RIS output: x_n = b^T diag(v_n) * incident (length-L row)."""
    v_n = np.asarray(v_n)
    if v_n.shape != (incident.shape[0],):
        raise ValueError("phase row length must match incident rows")
    if np.max(np.abs(np.abs(v_n) - 1.0)) > 1e-9:
        raise ValueError("phase-shift entries must be unit modulus")
    b = steering_vector(ris, aod_ris_pr)
    return (b * v_n) @ incident


def pr_received(scene: SceneConfig, waveform: Waveform, x_n: np.ndarray,
                pr: ArraySpec, noise: NoiseModel,
                rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """One epoch at the PR: RIS path + direct AP path + direct target paths + AWGN.

    Rician channels are redrawn on every call, so consecutive epochs see
    independent fading.
    """
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    s = waveform.samples
    L = len(s)
    y = scene.effective_gain_ris_pr() * np.outer(
        steering_vector(pr, scene.aoa_ris_pr), x_n)
    g_ap = scene.effective_gain_ap_pr()
    if g_ap != 0:
        h = rician_channel(pr, scene.aoa_ap_pr, scene.rician_ap_pr, rng)
        y += g_ap * np.outer(h, s)
    g_t = scene.effective_gain_targets_pr()
    for k in range(scene.n_targets):
        if g_t[k] != 0:
            h = rician_channel(pr, scene.target_aoas_pr[k],
                               scene.rician_targets_pr[k], rng)
            y += g_t[k] * np.outer(h, s)
    if noise.variance > 0:
        e = (rng.standard_normal((pr.elements, L))
             + 1j * rng.standard_normal((pr.elements, L))) / np.sqrt(2.0)
        y += np.sqrt(noise.variance) * e
    return y


def simulate_epochs(scene: SceneConfig, waveform: Waveform, phases,
                    pr: ArraySpec, ris: ArraySpec, noise: NoiseModel,
                    rng: np.random.Generator) -> SnapshotTensor:
    """Full acquisition: one incident field, then reflect + receive per epoch."""
    incident = ris_incident(scene, waveform, ris)
    tensor = SnapshotTensor()
    for v_n in phases.matrix:
        x_n = ris_reflect(incident, v_n, scene.aod_ris_pr, ris)
        tensor.per_epoch.append(pr_received(scene, waveform, x_n, pr, noise, rng))
    return tensor
