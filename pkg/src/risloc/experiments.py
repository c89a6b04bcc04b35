"""Experiment harness: config files, deterministic seeding, the three
experiment drivers (spectrum, MSE sweep, beampattern) and their CSV/JSON
artifacts."""

from __future__ import annotations

import dataclasses
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import yaml

from .benchmarks import TrialReport, music_estimate, no_ris_localize, select_estimates, trial_error
from .localizer import LocalizerConfig, SpectrumResult, default_grid, spectrum
from .pr_beamformer import BeamformedData, beamform, matched_weight
from .ris_optimizer import PhaseShiftMatrix, solve_phase_shifts, suppression_target, beampattern
from .signal_model import (ArraySpec, NoiseModel, PathDelays, SceneConfig, Waveform,
                           generate_waveform, ris_incident, simulate_epochs,
                           steering_vector)

TRIALS_CSV_HEADER = "trial,method,snr_db,m_elements,mse_deg2,detected_count,flagged"


def _parse_gain(spec, rng: Optional[np.random.Generator]) -> complex:
    """Gain entry: plain number (linear, phase 0) or {db, phase_deg}.

    phase_deg omitted or null means a fresh uniform phase per call, which is
    how per-trial phase randomization enters.
    """
    if isinstance(spec, (int, float, complex)):
        return complex(spec)
    mag = 10.0 ** (float(spec["db"]) / 20.0)
    phase = spec.get("phase_deg")
    if phase is None:
        if rng is None:
            raise ValueError("random gain phase requested but no rng supplied")
        phase = rng.uniform(0.0, 360.0)
    return mag * np.exp(1j * np.deg2rad(float(phase)))


@dataclass
class ExperimentConfig:
    scene_spec: dict
    ris: ArraySpec
    pr: ArraySpec
    localizer: LocalizerConfig
    n_epoch: int
    n_samples: int
    snr_db: float = 0.0
    snr_sweep_db: Sequence[float] = ()
    trials: int = 200
    seed: int = 0
    out_dir: str = "results"
    ris_init: str = "gaussian"
    refine_rounds: int = 1
    waveform_kind: str = "gaussian"
    m_sweep: Optional[Sequence[int]] = None
    methods: Sequence[str] = ("nlms_ris", "music_ris", "nlms_no_ris")
    beampattern_placements: Sequence[float] = ()
    mse_target_deg2: float = 10.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n_epoch < 1 or self.n_samples < 1:
            raise ValueError("n_epoch and n_samples must be >= 1")

    def make_scene(self, rng: Optional[np.random.Generator] = None) -> SceneConfig:
        s = self.scene_spec
        delays = None
        if "delays" in s and s["delays"]:
            delays = PathDelays(**s["delays"])
        return SceneConfig(
            target_aoas_ris=list(s["target_aoas_ris"]),
            target_aoas_pr=list(s["target_aoas_pr"]),
            aoa_ap_ris=float(s["aoa_ap_ris"]),
            aoa_ris_pr=float(s["aoa_ris_pr"]),
            aod_ris_pr=float(s["aod_ris_pr"]),
            aoa_ap_pr=float(s["aoa_ap_pr"]),
            gain_targets=[_parse_gain(g, rng) for g in s["gain_targets"]],
            gain_ap_ris=_parse_gain(s["gain_ap_ris"], rng),
            gain_ris_pr=_parse_gain(s["gain_ris_pr"], rng),
            gain_ap_pr=_parse_gain(s["gain_ap_pr"], rng),
            gain_targets_pr=[_parse_gain(g, rng) for g in s["gain_targets_pr"]],
            rician_ap_pr=float(s.get("rician_ap_pr", 10.0)),
            rician_targets_pr=tuple(s.get("rician_targets_pr", ())),
            delays=delays,
            carrier_hz=float(s.get("carrier_hz", 0.0)),
        )


def _parse_grid(spec) -> np.ndarray:
    if spec is None:
        return default_grid()
    if isinstance(spec, dict):
        start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        return np.round(np.arange(start, stop + step / 2, step), 6)
    return np.asarray(spec, dtype=float)


_SCENE_KEYS = ("target_aoas_ris", "target_aoas_pr", "aoa_ap_ris", "aoa_ris_pr",
               "aod_ris_pr", "aoa_ap_pr", "gain_targets", "gain_ap_ris",
               "gain_ris_pr", "gain_ap_pr", "gain_targets_pr")


def config_from_dict(d: dict) -> ExperimentConfig:
    missing = [k for k in _SCENE_KEYS if k not in d.get("scene", {})]
    if missing:
        raise ValueError(f"scene is missing required keys: {', '.join(missing)}")
    loc = dict(d.get("localizer", {}))
    loc["grid"] = _parse_grid(loc.get("grid"))
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    extra = {k: v for k, v in d.items()
             if k in known and k not in ("scene_spec", "ris", "pr", "localizer")}
    return ExperimentConfig(
        scene_spec=d["scene"],
        ris=ArraySpec(**d["ris"]),
        pr=ArraySpec(**d["pr"]),
        localizer=LocalizerConfig(**loc),
        **extra,
    )


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        d = yaml.safe_load(fh)
    try:
        return config_from_dict(d)
    except KeyError as exc:
        raise ValueError(f"config {path} is missing required key {exc}") from exc


def trial_rng(master_seed: int, m_index: int, trial: int) -> np.random.Generator:
    """Documented per-trial stream: spawn_key = (m_index, trial).

    The SNR index is deliberately not part of the key, so every point of a
    sweep reuses the same channel/noise draws scaled to its own variance.
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(m_index, trial)))


def build_phases(cfg: ExperimentConfig, scene: SceneConfig, ris: ArraySpec,
                 rng: np.random.Generator) -> PhaseShiftMatrix:
    return solve_phase_shifts(suppression_target(scene, ris), cfg.n_epoch, rng,
                              init=cfg.ris_init, refine_rounds=cfg.refine_rounds)


def ris_output_power(scene: SceneConfig, waveform: Waveform, phases: PhaseShiftMatrix,
                     ris: ArraySpec) -> float:
    """Mean |x_n(t)|^2 over epochs and samples for the SNR definition."""
    incident = ris_incident(scene, waveform, ris)
    b = steering_vector(ris, scene.aod_ris_pr)
    x = (phases.matrix * b) @ incident
    return float(np.mean(np.abs(x) ** 2))


def noise_variance_for_snr(scene: SceneConfig, x_power: float, snr_db: float) -> float:
    """SNR := |gain_ris_pr|^2 * mean|x|^2 / sigma^2, solved for sigma^2."""
    sig = abs(scene.effective_gain_ris_pr()) ** 2 * x_power
    return sig / (10.0 ** (snr_db / 10.0))


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------- spectrum

def run_spectrum(cfg: ExperimentConfig, seed: Optional[int] = None,
                 out_dir: Optional[str] = None) -> SpectrumResult:
    """Solve phases, simulate one acquisition, beamform and scan.

    Writes spectrum.csv plus a JSON summary with the detected peaks.
    """
    master = cfg.seed if seed is None else seed
    rng = np.random.default_rng(np.random.SeedSequence(entropy=master))
    scene = cfg.make_scene(rng)
    phases = build_phases(cfg, scene, cfg.ris, rng)
    waveform = generate_waveform(cfg.n_samples, rng, cfg.waveform_kind)
    x_power = ris_output_power(scene, waveform, phases, cfg.ris)
    variance = noise_variance_for_snr(scene, x_power, cfg.snr_db)
    tensor = simulate_epochs(scene, waveform, phases, cfg.pr, cfg.ris,
                             NoiseModel(variance), rng)
    w = matched_weight(cfg.pr, scene.aoa_ris_pr)
    data = beamform(tensor, w)
    result = spectrum(data, cfg.localizer, phases, cfg.ris, scene.aod_ris_pr)

    out = out_dir if out_dir is not None else cfg.out_dir
    os.makedirs(out, exist_ok=True)
    result.to_csv(os.path.join(out, "spectrum.csv"))
    _write_json(os.path.join(out, "spectrum_summary.json"), {
        "seed": master,
        "snr_db": cfg.snr_db,
        "noise_variance": variance,
        "k_hat": result.k_hat,
        "peaks": [float(p) for p in result.peaks],
        "estimates": [float(p) for p in result.estimates],
    })
    return result


# ---------------------------------------------------------------- MSE sweep

def _beamformed_parts(cfg: ExperimentConfig, scene: SceneConfig, ris: ArraySpec,
                      phases: PhaseShiftMatrix, waveform: Waveform,
                      rng: np.random.Generator):
    """Noise-free beamformed rows, the no-RIS epoch, and unit-variance noise.

    Splitting signal from noise lets one trial serve every SNR point with
    shared draws (the noise is rescaled, never redrawn).
    """
    incident = ris_incident(scene, waveform, ris)
    b = steering_vector(ris, scene.aod_ris_pr)
    x = (phases.matrix * b) @ incident  # N_epoch x L
    x_power = float(np.mean(np.abs(x) ** 2))
    w = matched_weight(cfg.pr, scene.aoa_ris_pr)
    s = waveform.samples

    from .signal_model import rician_channel  # local import keeps module load light

    gain_dir = np.zeros(cfg.n_epoch, dtype=complex)
    g_ap = scene.effective_gain_ap_pr()
    g_t = scene.effective_gain_targets_pr()
    for n in range(cfg.n_epoch):
        acc = 0.0 + 0.0j
        if g_ap != 0:
            acc += g_ap * np.vdot(w, rician_channel(cfg.pr, scene.aoa_ap_pr,
                                                    scene.rician_ap_pr, rng))
        for k in range(scene.n_targets):
            if g_t[k] != 0:
                acc += g_t[k] * np.vdot(w, rician_channel(
                    cfg.pr, scene.target_aoas_pr[k], scene.rician_targets_pr[k], rng))
        gain_dir[n] = acc
    wa = np.vdot(w, steering_vector(cfg.pr, scene.aoa_ris_pr))
    z0 = scene.effective_gain_ris_pr() * wa * x + np.outer(gain_dir, s)

    # the baseline observes the same scene with the RIS absent
    y0_nr = np.zeros((cfg.pr.elements, cfg.n_samples), dtype=complex)
    if g_ap != 0:
        y0_nr += g_ap * np.outer(rician_channel(cfg.pr, scene.aoa_ap_pr,
                                                scene.rician_ap_pr, rng), s)
    for k in range(scene.n_targets):
        if g_t[k] != 0:
            y0_nr += g_t[k] * np.outer(rician_channel(
                cfg.pr, scene.target_aoas_pr[k], scene.rician_targets_pr[k], rng), s)

    ez = (rng.standard_normal(z0.shape) + 1j * rng.standard_normal(z0.shape)) / np.sqrt(2.0)
    e1 = (rng.standard_normal(y0_nr.shape) + 1j * rng.standard_normal(y0_nr.shape)) / np.sqrt(2.0)
    return z0, y0_nr, x_power, np.linalg.norm(w), ez, e1


def _sweep_trial(cfg: ExperimentConfig, m_index: int, m_elements: int,
                 trial: int) -> List[TrialReport]:
    rng = trial_rng(cfg.seed, m_index, trial)
    scene = cfg.make_scene(rng)
    ris = ArraySpec(m_elements, cfg.ris.spacing)
    phases = build_phases(cfg, scene, ris, rng)
    waveform = generate_waveform(cfg.n_samples, rng, cfg.waveform_kind)
    z0, y0_nr, x_power, w_norm, ez, e1 = _beamformed_parts(
        cfg, scene, ris, phases, waveform, rng)

    k = scene.n_targets
    truths_ris = list(scene.target_aoas_ris)
    truths_pr = list(scene.target_aoas_pr)
    reports = []
    for snr_db in cfg.snr_sweep_db:
        variance = noise_variance_for_snr(scene, x_power, snr_db)
        sigma = np.sqrt(variance)
        data = BeamformedData(z0 + sigma * w_norm * ez)
        for method in cfg.methods:
            if method == "nlms_ris":
                res = spectrum(data, cfg.localizer, phases, ris, scene.aod_ris_pr)
                est = select_estimates(res, k)
                mse, flagged = trial_error(truths_ris, est)
                detected = res.k_hat
            elif method == "music_ris":
                est = music_estimate(data, k, cfg.localizer.grid, phases, ris,
                                     scene.aod_ris_pr, cfg.localizer.include_b)
                mse, flagged = trial_error(truths_ris, est)
                detected = len(est)
            elif method == "nlms_no_ris":
                res = no_ris_localize(y0_nr + sigma * e1, cfg.localizer, cfg.pr)
                est = select_estimates(res, k)
                mse, flagged = trial_error(truths_pr, est)
                detected = res.k_hat
            else:
                raise ValueError(f"unknown method {method!r}")
            reports.append(TrialReport(
                true_aoas=truths_pr if method == "nlms_no_ris" else truths_ris,
                estimated_aoas=list(est), mse=mse, detected_count=detected,
                snr_db=float(snr_db), method=method, m_elements=m_elements,
                trial=trial, flagged=flagged))
    return reports


def run_mse_sweep(cfg: ExperimentConfig, seed: Optional[int] = None,
                  out_dir: Optional[str] = None, parallel: int = 1):
    """Monte-Carlo MSE vs SNR for every configured method and RIS size.

    Writes the per-trial stream (trials.csv), the aggregate table
    (mse_sweep.csv) and a JSON summary. Returns the aggregate rows.
    """
    if not cfg.snr_sweep_db:
        raise ValueError("snr_sweep_db must be non-empty")
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    m_list = list(cfg.m_sweep) if cfg.m_sweep else [cfg.ris.elements]

    jobs = [(mi, m, t) for mi, m in enumerate(m_list) for t in range(cfg.trials)]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            chunks = list(pool.map(_sweep_trial_star,
                                   [(cfg, mi, m, t) for mi, m, t in jobs],
                                   chunksize=4))
    else:
        chunks = [_sweep_trial(cfg, mi, m, t) for mi, m, t in jobs]
    reports = [r for chunk in chunks for r in chunk]

    out = out_dir if out_dir is not None else cfg.out_dir
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "trials.csv"), "w") as fh:
        fh.write(TRIALS_CSV_HEADER + "\n")
        for r in reports:
            fh.write(f"{r.trial},{r.method},{r.snr_db:.10g},{r.m_elements},"
                     f"{r.mse:.10g},{r.detected_count},{int(r.flagged)}\n")

    aggregate = []
    for m in m_list:
        for method in cfg.methods:
            for snr_db in cfg.snr_sweep_db:
                sel = [r for r in reports if r.m_elements == m
                       and r.method == method and r.snr_db == snr_db]
                mse = float(np.mean([r.mse for r in sel]))
                frac = float(np.mean([r.flagged for r in sel]))
                aggregate.append({"snr_db": float(snr_db), "method": method,
                                  "m_elements": m, "mse_deg2": mse,
                                  "flagged_fraction": frac})
    with open(os.path.join(out, "mse_sweep.csv"), "w") as fh:
        fh.write("snr_db,method,m_elements,mse_deg2,flagged_fraction\n")
        for row in aggregate:
            fh.write(f"{row['snr_db']:.10g},{row['method']},{row['m_elements']},"
                     f"{row['mse_deg2']:.10g},{row['flagged_fraction']:.10g}\n")
    _write_json(os.path.join(out, "mse_sweep_summary.json"), {
        "seed": cfg.seed, "trials": cfg.trials, "m_sweep": m_list,
        "methods": list(cfg.methods),
        "snr_sweep_db": [float(s) for s in cfg.snr_sweep_db],
    })
    return aggregate


def _sweep_trial_star(args):
    return _sweep_trial(*args)


# ---------------------------------------------------------------- beampattern

def run_beampattern(cfg: ExperimentConfig, seed: Optional[int] = None,
                    out_dir: Optional[str] = None):
    """Solve phases per AP placement and tabulate the normalized beampattern.

    One CSV per placement with columns (theta_deg, b_normalized_db); the JSON
    summary records the notch depth and the off-notch median level.
    """
    if not cfg.beampattern_placements:
        raise ValueError("beampattern_placements must be non-empty")
    master = cfg.seed if seed is None else seed
    out = out_dir if out_dir is not None else cfg.out_dir
    os.makedirs(out, exist_ok=True)
    grid = cfg.localizer.grid
    summary = []
    for idx, placement in enumerate(cfg.beampattern_placements):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=master, spawn_key=(idx,)))
        scene = dataclasses.replace(cfg.make_scene(rng), aoa_ap_ris=float(placement))
        phases = build_phases(cfg, scene, cfg.ris, rng)
        pat = beampattern(phases, scene.aod_ris_pr, cfg.ris, grid)
        peak = pat.max()
        pat_db = 10.0 * np.log10(np.maximum(pat, 1e-300) / peak)
        notch = beampattern(phases, scene.aod_ris_pr, cfg.ris, [placement])[0]
        notch_db = 10.0 * np.log10(max(notch, 1e-300) / peak)
        off = pat_db[np.abs(grid - placement) > 3.0]
        name = f"beampattern_ap{placement:+g}.csv"
        with open(os.path.join(out, name), "w") as fh:
            fh.write("theta_deg,b_normalized_db\n")
            for t, v in zip(grid, pat_db):
                fh.write(f"{t:.6g},{v:.10g}\n")
        summary.append({"aoa_ap_ris": float(placement), "notch_db": float(notch_db),
                        "off_notch_median_db": float(np.median(off)), "csv": name})
    _write_json(os.path.join(out, "beampattern_summary.json"),
                {"seed": master, "placements": summary})
    return summary
