"""Virtual EMI receiver.

A swept measurement is emulated with a short-time Fourier transform: a
Gaussian window whose -6 dB bandwidth equals the RBW slides over the record
with the configured overlap, each segment is transformed on a bin grid no
coarser than RBW/4, and a detector (peak or average of the magnitude)
reduces the segments. Levels are calibrated to the rms value of a sine and
reported in dBuV.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import fft as sfft

from .errors import EmptyBand, InvalidSpec, NegativeInput, TooShort, UnderSampled
from .waveform import SampledWaveform, Unit, require_unit

FLOOR_DBUV = -200.0
"""Level reported for bins with no measurable signal."""

# Gaussian truncated at +-5 sigma: truncation sidelobes sit near -110 dB
_SIGMAS = 5.0
_CHUNK = 16


class Detector(str, enum.Enum):
    PEAK = "peak"
    AVERAGE = "average"


@dataclass(frozen=True)
class ReceiverSettings:
    f_start: float = 150e3
    f_stop: float = 108e6
    rbw: float = 9e3
    overlap: float = 0.95
    detector: Detector = Detector.PEAK

    def __post_init__(self) -> None:
        object.__setattr__(self, "detector", Detector(self.detector))
        if not 0 < self.f_start < self.f_stop:
            raise InvalidSpec("need 0 < f_start < f_stop")
        if not self.rbw > 0:
            raise InvalidSpec("rbw must be positive")
        if not 0 <= self.overlap < 1:
            raise InvalidSpec("overlap must lie in [0, 1)")

    @property
    def min_duration(self) -> float:
        return 10.0 / self.rbw

    def to_dict(self) -> dict:
        d = asdict(self)
        d["detector"] = self.detector.value
        return d


@dataclass(frozen=True, eq=False)
class Spectrum:
    freqs: np.ndarray
    levels: np.ndarray

    def __post_init__(self) -> None:
        f = np.asarray(self.freqs, dtype=float)
        lv = np.asarray(self.levels, dtype=float)
        if f.shape != lv.shape or f.ndim != 1:
            raise InvalidSpec("freqs and levels must be 1-D and of equal length")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise InvalidSpec("freqs must be strictly increasing")
        f.flags.writeable = False
        lv.flags.writeable = False
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "levels", lv)

    def __len__(self) -> int:
        return self.freqs.size

    @property
    def bin_width(self) -> float:
        return float(self.freqs[1] - self.freqs[0]) if len(self) > 1 else 0.0

    def level_at(self, f: float) -> float:
        return float(self.levels[self.nearest_bin(f)])

    def nearest_bin(self, f: float) -> int:
        return int(np.argmin(np.abs(self.freqs - f)))

    def shifted(self, db: float) -> "Spectrum":
        floor = self.levels <= FLOOR_DBUV
        return Spectrum(self.freqs, np.where(floor, FLOOR_DBUV, np.maximum(self.levels + db, FLOOR_DBUV)))


def to_dbuv(v: float | np.ndarray) -> float | np.ndarray:
    """Volts to dBuV; zero maps to :data:`FLOOR_DBUV`."""
    arr = np.asarray(v, dtype=float)
    if np.any(arr < 0):
        raise NegativeInput("to_dbuv needs non-negative amplitudes")
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(arr / 1e-6)
    db = np.maximum(db, FLOOR_DBUV)
    return float(db) if db.ndim == 0 else db


def gaussian_sigma(rbw: float) -> float:
    """Time-domain sigma of a Gaussian window whose -6 dB (half-amplitude) bandwidth is ``rbw``."""
    # |W(f)| ~ exp(-2 pi^2 sigma^2 f^2) = 1/2 at f = rbw / 2
    return math.sqrt(2.0 * math.log(2.0)) / (math.pi * rbw)


def gaussian_window(rbw: float, sample_rate: float) -> np.ndarray:
    sigma = gaussian_sigma(rbw) * sample_rate
    half = int(math.ceil(_SIGMAS * sigma))
    n = np.arange(-half, half + 1)
    return np.exp(-0.5 * (n / sigma) ** 2)


def fft_length(rbw: float, sample_rate: float, window_len: int) -> int:
    """Smallest fast FFT size giving bin spacing <= rbw/4 and covering the window."""
    need = max(window_len, int(math.ceil(sample_rate / (rbw / 4.0))))
    return sfft.next_fast_len(need, real=True)


def analysis_plan(s: ReceiverSettings, sample_rate: float) -> dict:
    """Derived STFT parameters used by :func:`sweep` (for run manifests)."""
    window = gaussian_window(s.rbw, sample_rate)
    nfft = fft_length(s.rbw, sample_rate, window.size)
    return {
        "gaussian_sigma_s": gaussian_sigma(s.rbw),
        "window_samples": int(window.size),
        "hop_samples": max(1, int(round((1.0 - s.overlap) * window.size))),
        "fft_length": int(nfft),
        "bin_width_hz": sample_rate / nfft,
    }


def _segment_magnitudes(x: np.ndarray, window: np.ndarray, nfft: int, lo: int, hi: int) -> np.ndarray:
    seg = x * window
    spec = sfft.rfft(seg, n=nfft, axis=-1)[..., lo:hi]
    return np.abs(spec)


def sweep(w: SampledWaveform, s: ReceiverSettings, workers: int = 1) -> Spectrum:
    """Measure ``w`` with the receiver ``s``.

    ``workers`` > 1 evaluates segment chunks on a thread pool; chunking and
    reduction order are fixed so the result is bit-identical to a serial run.
    """
    require_unit(w, Unit.VOLTS)
    fs = w.sample_rate
    if not fs > 2.0 * s.f_stop:
        raise UnderSampled(f"sample rate {fs:g} Hz must exceed 2 x f_stop = {2 * s.f_stop:g} Hz")
    if w.duration < s.min_duration * (1 - 1e-9):
        raise TooShort(f"record of {w.duration:g} s is shorter than 10/RBW = {s.min_duration:g} s")

    window = gaussian_window(s.rbw, fs)
    nwin = window.size
    if len(w) < nwin:
        raise TooShort("record shorter than the RBW window")
    nfft = fft_length(s.rbw, fs, nwin)
    df = fs / nfft
    lo = int(math.ceil(s.f_start / df))
    hi = int(math.floor(s.f_stop / df)) + 1
    if hi <= lo:
        raise EmptyBand("no FFT bins inside [f_start, f_stop]")
    freqs = np.arange(lo, hi) * df

    hop = max(1, int(round((1.0 - s.overlap) * nwin)))
    frames = sliding_window_view(w.samples, nwin)[::hop]
    n_frames = frames.shape[0]
    chunks = [(i, min(i + _CHUNK, n_frames)) for i in range(0, n_frames, _CHUNK)]

    def reduce_chunk(bounds: tuple[int, int]) -> np.ndarray:
        mags = _segment_magnitudes(frames[bounds[0]:bounds[1]], window, nfft, lo, hi)
        return mags.max(axis=0) if s.detector is Detector.PEAK else mags.sum(axis=0)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(reduce_chunk, chunks))
    else:
        partials = [reduce_chunk(c) for c in chunks]

    acc = partials[0].copy()
    for part in partials[1:]:
        if s.detector is Detector.PEAK:
            np.maximum(acc, part, out=acc)
        else:
            acc += part
    if s.detector is Detector.AVERAGE:
        acc /= n_frames

    # a sine of amplitude A gives |X| = A * sum(w) / 2 at its frequency
    rms = acc * (math.sqrt(2.0) / window.sum())
    return Spectrum(freqs, to_dbuv(rms))


def comb_peaks(
    spec: Spectrum,
    f0: float,
    n_max: int,
    prominence_db: float = 6.0,
    tolerance: float | None = None,
    dynamic_range_db: float = 100.0,
) -> list[tuple[int, float, float]]:
    """Harmonic lines of ``f0`` found in ``spec``.

    For each harmonic ``n * f0`` inside the span, the strongest local maximum
    within ``tolerance`` (default: the larger of 4 bins and f0/4, capped at
    f0/2) is kept when it rises ``prominence_db`` above the lowest level
    between it and the neighbouring harmonics. Lines more than
    ``dynamic_range_db`` below the strongest bin are treated as floor.
    """
    if not f0 > 0 or len(spec) == 0:
        return []
    freqs, levels = spec.freqs, spec.levels
    min_level = max(FLOOR_DBUV, float(levels.max()) - dynamic_range_db)
    bw = spec.bin_width or f0
    tol = tolerance if tolerance is not None else min(max(4 * bw, f0 / 4), f0 / 2)
    peaks: list[tuple[int, float, float]] = []
    for n in range(1, n_max + 1):
        fn = n * f0
        if fn < freqs[0] - tol or fn > freqs[-1] + tol:
            continue
        idx = np.flatnonzero(np.abs(freqs - fn) <= tol)
        if idx.size == 0:
            continue
        i = int(idx[np.argmax(levels[idx])])
        if levels[i] <= min_level:
            continue
        left = levels[max(0, i - 1)] if i > 0 else -np.inf
        right = levels[i + 1] if i + 1 < len(levels) else -np.inf
        if levels[i] < left or levels[i] < right:
            continue
        lo_mask = (freqs >= fn - 0.5 * f0) & (freqs < freqs[i])
        hi_mask = (freqs <= fn + 0.5 * f0) & (freqs > freqs[i])
        ref = []
        if lo_mask.any():
            ref.append(levels[lo_mask].min())
        if hi_mask.any():
            ref.append(levels[hi_mask].min())
        if not ref or levels[i] - max(ref) < prominence_db:
            continue
        peaks.append((n, float(freqs[i]), float(levels[i])))
    return peaks


def band_power(spec: Spectrum, f1: float, f2: float) -> float:
    """Power sum ``10 log10(sum 10^(L/10))`` over bins in ``[f1, f2]``."""
    if not f1 < f2:
        raise EmptyBand("need f1 < f2")
    mask = (spec.freqs >= f1) & (spec.freqs <= f2)
    if not mask.any():
        raise EmptyBand(f"no bins in [{f1:g}, {f2:g}] Hz")
    lv = spec.levels[mask]
    live = lv > FLOOR_DBUV
    if not live.any():
        return FLOOR_DBUV
    peak = lv[live].max()
    total = np.sum(10.0 ** ((lv[live] - peak) / 10.0))
    return float(peak + 10.0 * np.log10(total))
