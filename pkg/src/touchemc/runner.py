"""Config-driven runs and run-to-run comparison."""

from __future__ import annotations

import logging
import platform
from dataclasses import asdict
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import SCHEMA_VERSION, RunConfig, load_config
from .errors import EmptyBand, MissingArtifact
from .io import (
    HARMONICS_HEADER,
    NEARFIELD_HEADER,
    read_manifest,
    read_spectrum,
    write_manifest,
    write_rows,
    write_spectrum,
    write_waveform,
)
from .lisn import discretize
from .nearfield import default_sample_rate as nearfield_sample_rate
from .nearfield import frequency_sweep_report
from .receiver import analysis_plan, band_power, comb_peaks
from .scenario import run_conducted

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"
SPECTRUM_VP = "spectrum_vp.csv"
SPECTRUM_VN = "spectrum_vn.csv"
HARMONICS_VP = "harmonics_vp.csv"
NEARFIELD_REPORT = "nearfield_report.csv"


def _versions() -> dict:
    return {
        "touchemc": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def _run_conducted(cfg: RunConfig, out: Path) -> list[Path]:
    sc = cfg.scenario
    result = run_conducted(sc, workers=cfg.workers)
    files = [
        write_spectrum(out / SPECTRUM_VP, result.spectrum_p),
        write_spectrum(out / SPECTRUM_VN, result.spectrum_n),
    ]
    peaks = comb_peaks(result.spectrum_p, result.timing.f_osc, n_max=int(sc.receiver.f_stop // result.timing.f_osc))
    files.append(write_rows(out / HARMONICS_VP, HARMONICS_HEADER, peaks))
    if cfg.export_waveforms:
        files.append(write_waveform(out / "waveform_vout.csv", result.v_out))
        files.append(write_waveform(out / "waveform_vp.csv", result.ports.v_p))
        files.append(write_waveform(out / "waveform_vn.csv", result.ports.v_n))

    b, a = discretize(sc.lisn, sc.sample_rate, sc.lisn_prewarp)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "kind": "conducted",
        "label": cfg.label,
        "versions": _versions(),
        "inputs": {
            "circuit": sc.circuit.to_dict(),
            "parasitic_cm_capacitance": sc.parasitic_cm_capacitance,
            "lisn": sc.lisn.to_dict(),
            "lisn_prewarp": sc.lisn_prewarp,
            "receiver": sc.receiver.to_dict(),
            "duration": sc.duration,
            "sample_rate": sc.sample_rate,
            "workers": cfg.workers,
            "export_waveforms": cfg.export_waveforms,
        },
        "derived": {
            "timing": result.timing.to_dict(),
            "measured_timing": result.measured.to_dict(),
            "receiver_plan": analysis_plan(sc.receiver, sc.sample_rate),
            "lisn_filter": {"b": [float(x) for x in b], "a": [float(x) for x in a]},
            "n_samples": len(result.v_out),
        },
        "outputs": sorted(p.name for p in files),
    }
    files.append(write_manifest(out / MANIFEST, manifest))
    return files


def _run_nearfield(cfg: RunConfig, out: Path) -> list[Path]:
    rows = frequency_sweep_report(
        cfg.drive, list(cfg.drive_freqs), cfg.receiver,
        duration=cfg.duration, sample_rate=cfg.sample_rate, workers=cfg.workers,
    )
    files = [
        write_rows(out / NEARFIELD_REPORT, NEARFIELD_HEADER,
                   [(r.drive_freq_hz, r.fundamental_dbuv, r.band_power_dbuv) for r in rows]),
    ]
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "kind": "nearfield",
        "label": cfg.label,
        "versions": _versions(),
        "inputs": {
            "drive": cfg.drive.to_dict(),
            "drive_freqs": list(cfg.drive_freqs),
            "receiver": cfg.receiver.to_dict(),
            "duration": cfg.duration,
            "sample_rate": cfg.sample_rate,
            "workers": cfg.workers,
        },
        "derived": {
            "rows": [asdict(r) for r in rows],
            "sample_rates": [
                cfg.sample_rate or nearfield_sample_rate(cfg.receiver, cfg.drive.pulse_at(f)) for f in cfg.drive_freqs
            ],
        },
        "outputs": sorted(p.name for p in files),
    }
    files.append(write_manifest(out / MANIFEST, manifest))
    return files


def run_config(path: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Execute the run described by the config at ``path``.

    Output goes to ``out_dir``, else the config's ``output_dir``, else a
    directory named after the config file next to it. Returns written paths.
    """
    path = Path(path)
    cfg = load_config(path)
    out = Path(out_dir) if out_dir is not None else cfg.output_dir or path.with_suffix("")
    if out.exists() and not out.is_dir():
        raise NotADirectoryError(f"output path exists and is not a directory: {out}")
    out.mkdir(parents=True, exist_ok=True)
    log.info("running %s config %s -> %s", cfg.kind, path, out)
    if cfg.kind == "conducted":
        return _run_conducted(cfg, out)
    return _run_nearfield(cfg, out)


def compare_emissions(run_a: str | Path, run_b: str | Path, band: tuple[float, float], n_harmonics: int = 20) -> dict:
    """Compare the V_P spectra of two conducted runs over ``band``.

    The harmonic table follows the oscillation frequency of run A.
    """
    run_a, run_b = Path(run_a), Path(run_b)
    spec_a = read_spectrum(run_a / SPECTRUM_VP)
    spec_b = read_spectrum(run_b / SPECTRUM_VP)
    man_a = read_manifest(run_a / MANIFEST)
    man_b = read_manifest(run_b / MANIFEST)
    f1, f2 = band
    try:
        bp_a = band_power(spec_a, f1, f2)
        bp_b = band_power(spec_b, f1, f2)
    except EmptyBand as exc:
        raise MissingArtifact(f"band [{f1:g}, {f2:g}] Hz not covered by both runs: {exc}") from None

    table = []
    try:
        f0 = float(man_a["derived"]["timing"]["f_osc"])
    except KeyError:
        raise MissingArtifact(f"{run_a / MANIFEST} lacks derived timing") from None
    n_lo = max(1, int(np.ceil(f1 / f0 - 1e-9)))
    for n in range(n_lo, n_lo + n_harmonics):
        fn = n * f0
        if fn > f2:
            break
        la, lb = spec_a.level_at(fn), spec_b.level_at(fn)
        table.append({"harmonic": n, "freq_hz": fn, "level_a_dbuv": la, "level_b_dbuv": lb, "delta_db": la - lb})

    delta = bp_a - bp_b
    label_a = man_a.get("label", str(run_a))
    label_b = man_b.get("label", str(run_b))
    if delta == 0:
        quieter = None
    else:
        quieter = label_b if delta > 0 else label_a
    return {
        "run_a": label_a,
        "run_b": label_b,
        "band_hz": [f1, f2],
        "band_power_a_dbuv": bp_a,
        "band_power_b_dbuv": bp_b,
        "delta_db": delta,
        "harmonics": table,
        "winner": quieter,
    }


def format_comparison(report: dict) -> str:
    lines = [
        f"band {report['band_hz'][0]:g}-{report['band_hz'][1]:g} Hz",
        f"  {report['run_a']}: {report['band_power_a_dbuv']:.2f} dBuV",
        f"  {report['run_b']}: {report['band_power_b_dbuv']:.2f} dBuV",
        f"  delta (a - b): {report['delta_db']:+.2f} dB",
    ]
    if report["harmonics"]:
        lines.append("harmonic  freq_hz        a_dbuv    b_dbuv    delta_db")
        for row in report["harmonics"]:
            lines.append(
                f"{row['harmonic']:>8d}  {row['freq_hz']:<13.6g}  {row['level_a_dbuv']:8.2f}  "
                f"{row['level_b_dbuv']:8.2f}  {row['delta_db']:+8.2f}"
            )
    winner = report["winner"]
    lines.append("winner (lower emission): " + (winner if winner else "tie"))
    return "\n".join(lines)
