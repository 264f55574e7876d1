import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from touchemc.errors import EmptyBand, NegativeInput, TooShort, UnderSampled, UnitMismatch
from touchemc.receiver import (
    FLOOR_DBUV,
    Detector,
    ReceiverSettings,
    Spectrum,
    analysis_plan,
    band_power,
    comb_peaks,
    gaussian_sigma,
    gaussian_window,
    sweep,
    to_dbuv,
)
from touchemc.waveform import SampledWaveform, Unit

FS = 100e6
DUR = 1.2e-3
RX = ReceiverSettings(f_start=150e3, f_stop=30e6)


def tone(f, rms=1e-3, fs=FS, duration=DUR, phase=0.3):
    t = np.arange(int(round(duration * fs))) / fs
    return SampledWaveform(fs, math.sqrt(2) * rms * np.sin(2 * np.pi * f * t + phase))


def square(f0, amplitude, fs, duration=DUR):
    """0..amplitude square wave with exact half-wave symmetry (edge samples at mid level)."""
    n_per = int(round(fs / f0))
    assert n_per % 2 == 0
    period = np.zeros(n_per)
    period[: n_per // 2] = amplitude
    period[0] = period[n_per // 2] = amplitude / 2
    n = int(round(duration * fs))
    return SampledWaveform(fs, np.resize(period, n))


def test_to_dbuv():
    assert to_dbuv(1e-6) == pytest.approx(0.0)
    assert to_dbuv(1.0) == pytest.approx(120.0)
    assert to_dbuv(1e-3) == pytest.approx(60.0)
    assert to_dbuv(0.0) == FLOOR_DBUV
    with pytest.raises(NegativeInput):
        to_dbuv(-1e-6)


def test_window_bandwidth_is_rbw():
    rbw, fs = 9e3, 10e6
    w = gaussian_window(rbw, fs)
    nfft = 1 << 22
    mag = np.abs(np.fft.rfft(w, nfft))
    mag /= mag[0]
    f = np.arange(mag.size) * fs / nfft
    half = f[np.argmax(mag < 0.5)]
    assert 2 * half == pytest.approx(rbw, rel=1e-3)
    assert gaussian_sigma(rbw) == pytest.approx(41.6e-6, rel=1e-2)


def test_bin_grid_no_coarser_than_quarter_rbw():
    plan = analysis_plan(RX, FS)
    assert plan["bin_width_hz"] <= RX.rbw / 4
    assert plan["hop_samples"] == round(0.05 * plan["window_samples"])


def test_zero_waveform_is_floor():
    w = SampledWaveform(FS, np.zeros(int(DUR * FS)))
    spec = sweep(w, RX)
    assert np.all(spec.levels == FLOOR_DBUV)


@pytest.mark.parametrize("detector", list(Detector))
def test_10mhz_tone_60dbuv(detector):
    spec = sweep(tone(10e6), ReceiverSettings(f_start=150e3, f_stop=30e6, detector=detector))
    assert spec.level_at(10e6) == pytest.approx(60.0, abs=0.5)


@pytest.mark.parametrize("detector", list(Detector))
@pytest.mark.parametrize("f", [150e3, 153.7e3, 1.0e6, 4.321e6, 17.77e6, 29.9e6])
def test_calibration_anywhere(f, detector):
    spec = sweep(tone(f), ReceiverSettings(f_start=150e3, f_stop=30e6, detector=detector))
    assert spec.level_at(f) == pytest.approx(60.0, abs=0.5)
    assert spec.levels.max() == pytest.approx(60.0, abs=0.5)


@pytest.mark.parametrize("overlap,fs", [(0.0, 80e6), (0.5, 100e6), (0.95, 64e6)])
def test_calibration_independent_of_rate_and_overlap(overlap, fs):
    s = ReceiverSettings(f_start=150e3, f_stop=30e6, overlap=overlap)
    spec = sweep(tone(2.5e6, fs=fs), s)
    f_bin = spec.freqs[spec.nearest_bin(2.5e6)]
    on_bin = sweep(tone(f_bin, fs=fs), s)
    assert on_bin.level_at(f_bin) == pytest.approx(60.0, abs=0.05)


def test_square_wave_harmonics():
    f0, amp, fs = 1e6, 1e-3, 200e6
    spec = sweep(square(f0, amp, fs), RX)
    for n in range(1, 22, 2):
        expected = to_dbuv(2 * amp / (n * math.pi) / math.sqrt(2))
        assert spec.level_at(n * f0) == pytest.approx(expected, abs=1.0), n


def test_comb_odd_only_for_square_wave():
    f0, fs = 1e6, 200e6
    spec = sweep(square(f0, 1e-3, fs), RX)
    peaks = comb_peaks(spec, f0, 25, prominence_db=10.0)
    found = [n for n, _, _ in peaks]
    assert found == list(range(1, 26, 2))
    for n in range(2, 24, 2):
        odd_neighbour = min(spec.level_at((n - 1) * f0), spec.level_at((n + 1) * f0))
        assert spec.level_at(n * f0) <= odd_neighbour - 20


def test_comb_single_tone():
    spec = sweep(tone(2e6), RX)
    peaks = comb_peaks(spec, 2e6, 10)
    assert [n for n, _, _ in peaks] == [1]
    assert peaks[0][1] == pytest.approx(2e6, abs=spec.bin_width)


def test_comb_flat_floor_is_empty():
    flat = Spectrum(np.linspace(150e3, 1e6, 200), np.full(200, 20.0))
    assert comb_peaks(flat, 25e3, 40) == []
    floor = Spectrum(np.linspace(150e3, 1e6, 200), np.full(200, FLOOR_DBUV))
    assert comb_peaks(floor, 25e3, 40) == []


def test_band_power_examples():
    one = Spectrum(np.array([1e6, 2e6, 3e6]), np.array([FLOOR_DBUV, 60.0, FLOOR_DBUV]))
    assert band_power(one, 1.5e6, 2.5e6) == pytest.approx(60.0)
    two = Spectrum(np.array([1e6, 2e6]), np.array([60.0, 60.0]))
    assert band_power(two, 0.5e6, 2.5e6) == pytest.approx(63.0103, abs=1e-4)
    with pytest.raises(EmptyBand):
        band_power(two, 3e6, 4e6)


def test_peak_not_below_average():
    rng = np.random.default_rng(3)
    w = SampledWaveform(FS, rng.normal(scale=1e-3, size=int(DUR * FS)))
    peak = sweep(w, ReceiverSettings(f_start=150e3, f_stop=30e6, detector="peak"))
    avg = sweep(w, ReceiverSettings(f_start=150e3, f_stop=30e6, detector="average"))
    assert np.all(peak.levels >= avg.levels)


@settings(max_examples=15, deadline=None)
@given(st.floats(2.2e6, 27e6), st.floats(-2e6, 2e6))
def test_frequency_shift_covariance(f, df):
    a = sweep(tone(f), RX)
    b = sweep(tone(f + df), RX)
    fa = a.freqs[np.argmax(a.levels)]
    fb = b.freqs[np.argmax(b.levels)]
    assert abs((fb - fa) - df) <= a.bin_width


def test_amplitude_doubling_adds_6db():
    w = square(1e6, 1e-3, 200e6)
    a = sweep(w, RX)
    b = sweep(w.scaled(2.0), RX)
    live = a.levels > FLOOR_DBUV
    assert np.allclose(b.levels[live] - a.levels[live], 20 * math.log10(2), atol=0.1)


def test_parallel_is_bit_identical():
    rng = np.random.default_rng(11)
    w = SampledWaveform(FS, rng.normal(size=int(2e-3 * FS)))
    for det in Detector:
        s = ReceiverSettings(f_start=150e3, f_stop=30e6, detector=det)
        serial = sweep(w, s)
        parallel = sweep(w, s, workers=4)
        assert np.array_equal(serial.levels, parallel.levels)


def test_sweep_preconditions():
    with pytest.raises(UnderSampled):
        sweep(tone(1e6, fs=50e6), RX)
    with pytest.raises(TooShort):
        sweep(tone(1e6, duration=0.5e-3), RX)
    with pytest.raises(UnitMismatch):
        sweep(SampledWaveform(FS, np.zeros(int(DUR * FS)), Unit.AMPERES), RX)
