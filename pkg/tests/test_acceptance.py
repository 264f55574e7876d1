"""Acceptance gate: one test per exit criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even
without ``-s``).
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest
import yaml
from scipy.signal import find_peaks

from touchemc.lisn import LisnModel, ModalCurrents, digital_impedance, modal_compose, modal_decompose
from touchemc.nearfield import ElectrodeDrive, frequency_sweep_report
from touchemc.oscillator import capacitance_from_duty, simulate_relaxation_transient, timing_from_params
from touchemc.receiver import Detector, ReceiverSettings, band_power, comb_peaks, sweep, to_dbuv
from touchemc.runner import run_config
from touchemc.scenario import Scenario, conducted_emission_pipeline, default_duration, default_sample_rate
from touchemc.waveform import SampledWaveform, TrapezoidSpec, Unit, differentiate, displacement_current, synth_trapezoid

from conftest import random_params

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def report(capsys):
    def emit(criterion: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        assert ok, f"{criterion}: {detail}"

    return emit


def test_ac1_transient_matches_closed_form(report):
    rng = np.random.default_rng(1)
    worst = 0.0
    start = time.perf_counter()
    for _ in range(50):
        p = random_params(rng, max_duty=0.9)
        sol = timing_from_params(p)
        _, _, measured = simulate_relaxation_transient(p, 12 * sol.period, 2000 * sol.f_osc)
        worst = max(worst, abs(measured.t_on / sol.t_on - 1), abs(measured.t_off / sol.t_off - 1))
    elapsed = time.perf_counter() - start
    report("AC1 transient vs closed-form timing", worst <= 5e-3 and elapsed < 10.0,
           f"worst relative error {worst:.2e} (tol 5e-3), {elapsed:.2f} s for 50 sets (budget 10 s)")


def test_ac2_decoder_roundtrip(report):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        p = random_params(rng, max_duty=0.99)
        c = capacitance_from_duty(timing_from_params(p).duty, p)
        worst = max(worst, abs(c / p.c_sen - 1))
    report("AC2 decoder roundtrip", worst <= 1e-12, f"worst relative error {worst:.2e} over 1000 sets (tol 1e-12)")


def test_ac3_modal_algebra(report):
    rng = np.random.default_rng(3)
    eps = np.finfo(float).eps
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(10, 2000))
        scale = 10 ** rng.uniform(-9, -1)
        cm = SampledWaveform(1e8, rng.normal(scale=scale, size=n), Unit.AMPERES)
        dm = SampledWaveform(1e8, rng.normal(scale=scale, size=n), Unit.AMPERES)
        pv = modal_compose(ModalCurrents(cm, dm))
        vp, vn = pv.v_p.samples, pv.v_n.samples
        mag = np.abs(vp) + np.abs(vn)
        worst = max(worst,
                    np.max(np.abs(vp + vn - 100 * cm.samples) / mag),
                    np.max(np.abs(vp - vn - 100 * dm.samples) / mag))
        back = modal_decompose(pv)
        ref = np.abs(cm.samples) + np.abs(dm.samples)
        worst = max(worst, np.max(np.abs(back.i_cm.samples - cm.samples) / ref),
                    np.max(np.abs(back.i_dm.samples - dm.samples) / ref))
    report("AC3 modal algebra", worst <= 4 * eps, f"worst relative residual {worst:.2e} (tol 4 eps = {4 * eps:.1e})")


def test_ac4_receiver_calibration(report):
    fs, dur = 300e6, 1.2e-3
    t = np.arange(int(fs * dur)) / fs
    s_peak = ReceiverSettings()
    s_avg = ReceiverSettings(detector=Detector.AVERAGE)
    worst = 0.0
    for f in np.geomspace(150e3, 108e6, 12):
        w = SampledWaveform(fs, math.sqrt(2) * 1e-3 * np.sin(2 * np.pi * f * t + 0.7))
        for s in (s_peak, s_avg):
            worst = max(worst, abs(sweep(w, s).level_at(f) - 60.0))

    f0, amp = 1e6, 1e-3
    n_per = int(fs / f0)
    period = np.zeros(n_per)
    period[: n_per // 2] = amp
    period[0] = period[n_per // 2] = amp / 2
    spec = sweep(SampledWaveform(fs, np.resize(period, t.size)), s_peak)
    worst_sq = 0.0
    for n in range(1, 22, 2):
        expected = to_dbuv(2 * amp / (n * math.pi) / math.sqrt(2))
        worst_sq = max(worst_sq, abs(spec.level_at(n * f0) - expected))
    report("AC4 receiver calibration", worst <= 0.5 and worst_sq <= 1.0,
           f"tone error {worst:.3f} dB (tol 0.5), square-wave harmonic error {worst_sq:.3f} dB up to n=21 (tol 1)")


def test_ac5_conducted_structure(report, params_25k):
    rx = ReceiverSettings(f_start=150e3, f_stop=10e6)
    results = {}
    for label, p in (("25k", params_25k), ("1k", params_25k.replace(r_ref=250e3))):
        sc = Scenario(p, default_duration(p, rx), default_sample_rate(p, rx), receiver=rx, label=label)
        start = time.perf_counter()
        spec_p, _, _ = conducted_emission_pipeline(sc)
        results[label] = (spec_p, time.perf_counter() - start)

    spec, _ = results["25k"]
    f0 = 25e3
    idx, _ = find_peaks(spec.levels, prominence=10.0)
    off = [spec.freqs[i] for i in idx if abs(spec.freqs[i] - round(spec.freqs[i] / f0) * f0) > spec.bin_width]
    comb = comb_peaks(spec, f0, int(rx.f_stop // f0))
    comb_off = [f for n, f, _ in comb if abs(f - n * f0) > spec.bin_width]
    delta = band_power(spec, 150e3, 1e6) - band_power(results["1k"][0], 150e3, 1e6)
    slowest = max(r[1] for r in results.values())
    ok = idx.size > 0 and len(comb) > 0 and not off and not comb_off and delta > 3.0 and slowest < 60.0
    report("AC5 conducted 25 kHz vs 1 kHz", ok,
           f"{idx.size} prominent peaks, {len(off)} off-harmonic; {len(comb)} comb lines; "
           f"band power delta {delta:.2f} dB (need > 3); slowest scenario {slowest:.2f} s (budget 60)")


def test_ac6_nearfield_structure(report):
    rows = frequency_sweep_report(ElectrodeDrive(), [1e3, 10e3, 100e3, 1e6], ReceiverSettings())
    on_bin = all(abs(r.fundamental_freq_hz - r.drive_freq_hz) <= r.fundamental_bin_hz for r in rows)
    powers = [r.band_power_dbuv for r in rows]
    monotone = all(b > a for a, b in zip(powers, powers[1:]))
    report("AC6 near-field sweep", on_bin and monotone,
           f"fundamental offsets {[round(r.fundamental_freq_hz - r.drive_freq_hz, 1) for r in rows]} Hz, "
           f"band power {[round(p, 2) for p in powers]} dBuV")


def test_ac7_displacement_current(report):
    fs = 1e9
    edge = TrapezoidSpec(frequency=100e3, v_low=0.0, v_high=5.0, duty=0.5, rise=1e-6, fall=1e-6)
    i = displacement_current(synth_trapezoid(edge, 10e-6, fs), 100e-12)
    plateau = i.samples[50:950]
    plateau_err = np.max(np.abs(plateau / 500e-6 - 1))

    f, fs2 = 1e3, 1e6
    t = np.arange(int(5e-3 * fs2)) / fs2
    d = differentiate(SampledWaveform(fs2, np.sin(2 * np.pi * f * t)))
    exact = 2 * np.pi * f * np.cos(2 * np.pi * f * t)
    deriv_err = np.max(np.abs(d.samples - exact)) / (2 * np.pi * f)
    report("AC7 i = C dV/dt", plateau_err <= 0.01 and deriv_err <= 1e-4,
           f"plateau error {plateau_err:.2e} (tol 1e-2), derivative error {deriv_err:.2e} of peak (tol 1e-4)")


def test_ac8_lisn_impedance(report):
    m = LisnModel()
    f = np.geomspace(150e3, 100e6, 20)
    fs = 1.08e9
    err = np.abs(np.abs(digital_impedance(m, fs, f)) / np.abs(m.impedance(f)) - 1)
    report("AC8 LISN discretized |Z|", float(err.max()) <= 0.05,
           f"worst |Z| error {err.max():.2e} over 20 frequencies (tol 5e-2)")


def test_ac9_determinism(report, tmp_path):
    data = yaml.safe_load((CONFIGS / "conducted_25k.yaml").read_text())
    serial = tmp_path / "serial.yaml"
    serial.write_text(yaml.safe_dump({**data, "workers": 1}))
    parallel = tmp_path / "parallel.yaml"
    parallel.write_text(yaml.safe_dump({**data, "workers": 4}))
    run_config(parallel, tmp_path / "p1")
    run_config(parallel, tmp_path / "p2")
    run_config(serial, tmp_path / "s1")
    names = sorted(p.name for p in (tmp_path / "p1").glob("*.csv"))
    same = all((tmp_path / "p1" / n).read_bytes() == (tmp_path / "p2" / n).read_bytes() for n in names)
    same_serial = all((tmp_path / "p1" / n).read_bytes() == (tmp_path / "s1" / n).read_bytes() for n in names)
    report("AC9 determinism", bool(names) and same and same_serial,
           f"{len(names)} CSVs; parallel rerun identical={same}; parallel vs serial identical={same_serial}")
