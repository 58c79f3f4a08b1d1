"""Offline processing of recorded multichannel pulse waveforms.

Stages: bandpass filtering (linear-phase FIR, group delay compensated),
strongest-pulse interception, amplitude normalization to [-1, 1], and
finally the spectrum search. Normalization divides by the single global
peak magnitude across all channels, which removes the distance-dependent
overall amplitude while preserving the inter-channel gain ratios that
carry the direction information.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import firwin

from .estimator import DoaEstimate, estimate_doa
from .manifold import ArrayConfig
from .pattern import GaussianMixturePattern

__all__ = [
    "Recording",
    "FilterSpec",
    "PulseWindow",
    "PipelineResult",
    "NoPulseFoundError",
    "bandpass",
    "detect_pulse",
    "normalize_bipolar",
    "process_recording",
]


class NoPulseFoundError(RuntimeError):
    """No sample exceeded the detection threshold."""


@dataclass(frozen=True)
class Recording:
    """Multichannel waveform record.

    ``channels`` is an (n_channels, n_samples) array in volts. When
    ``element_of_channel`` is given it maps channel index -> array
    element index; otherwise channels are already in element order.
    """

    rate_hz: float
    channels: np.ndarray
    element_of_channel: tuple[int, ...] | None = None

    def __post_init__(self):
        data = np.asarray(self.channels, dtype=float)
        if data.ndim != 2:
            raise ValueError("channels must be a 2-D array")
        if data.shape[1] < 2:
            raise ValueError("recording needs at least 2 samples")
        if not np.all(np.isfinite(data)):
            raise ValueError("recording contains non-finite samples")
        if not (self.rate_hz > 0.0 and np.isfinite(self.rate_hz)):
            raise ValueError(f"rate_hz must be > 0, got {self.rate_hz}")
        object.__setattr__(self, "channels", data)
        if self.element_of_channel is not None:
            mapping = tuple(int(i) for i in self.element_of_channel)
            if sorted(mapping) != list(range(data.shape[0])):
                raise ValueError("element_of_channel must be a permutation of channels")
            object.__setattr__(self, "element_of_channel", mapping)

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def n_samples(self) -> int:
        return self.channels.shape[1]

    def in_element_order(self) -> np.ndarray:
        """Rows reordered so row k belongs to array element k."""
        if self.element_of_channel is None:
            return self.channels
        order = np.argsort(self.element_of_channel)
        return self.channels[order]


@dataclass(frozen=True)
class FilterSpec:
    """Linear-phase windowed-sinc bandpass design.

    ``n_taps`` must be odd so the group delay is an integer number of
    samples. Feasibility against a concrete sample rate (high edge below
    Nyquist, record longer than the kernel) is checked when filtering.
    """

    low_hz: float = 1.0e9
    high_hz: float = 2.0e9
    n_taps: int = 101

    def __post_init__(self):
        if not (0.0 < self.low_hz < self.high_hz):
            raise ValueError(
                f"need 0 < low_hz < high_hz, got {self.low_hz}, {self.high_hz}"
            )
        if self.n_taps < 11 or self.n_taps % 2 == 0:
            raise ValueError(f"n_taps must be odd and >= 11, got {self.n_taps}")

    def kernel(self, rate_hz: float) -> np.ndarray:
        """FIR taps for the given sample rate (Hamming windowed sinc)."""
        if self.high_hz >= rate_hz / 2.0:
            raise ValueError(
                f"high_hz={self.high_hz} must be below Nyquist ({rate_hz / 2.0})"
            )
        return firwin(
            self.n_taps,
            [self.low_hz, self.high_hz],
            pass_zero=False,
            window="hamming",
            fs=rate_hz,
        )


@dataclass(frozen=True)
class PulseWindow:
    """Half-open sample range [start, stop) selected around the pulse."""

    start: int
    stop: int
    channel: int
    threshold: float

    def __post_init__(self):
        for name in ("start", "stop", "channel"):
            object.__setattr__(self, name, int(getattr(self, name)))
        object.__setattr__(self, "threshold", float(self.threshold))
        if not (0 <= self.start < self.stop):
            raise ValueError(f"need 0 <= start < stop, got {self.start}, {self.stop}")
        if self.stop - self.start < 2:
            raise ValueError("window must span at least 2 samples")


@dataclass(frozen=True)
class PipelineResult:
    """Direction estimate plus the pulse window it was computed from."""

    estimate: DoaEstimate
    window: PulseWindow
    rate_hz: float
    filter_band_hz: tuple[float, float]
    n_elements: int


def bandpass(rec: Recording, spec: FilterSpec) -> Recording:
    """Filter every channel with the same linear-phase FIR kernel.

    Output length equals input length: the convolution treats samples
    beyond the record edges as zero, and taking the central part of the
    full convolution compensates the group delay, so channels stay time
    aligned.
    """
    if rec.n_samples < spec.n_taps:
        raise ValueError(
            f"record length {rec.n_samples} is shorter than the kernel ({spec.n_taps})"
        )
    kernel = spec.kernel(rec.rate_hz)
    filtered = np.array([np.convolve(ch, kernel, mode="same") for ch in rec.channels])
    return replace(rec, channels=filtered)


def detect_pulse(
    rec: Recording,
    k_sigma: float = 5.0,
    *,
    pre_margin_s: float = 5e-9,
    post_margin_s: float = 20e-9,
) -> PulseWindow:
    """Locate the strongest pulse and return a window around it.

    The global maximum magnitude across channels marks the pulse; the
    detection threshold is k_sigma times the noise standard deviation
    estimated from the first 10% of that channel (which assumes the
    pulse does not sit at the very start of the record). With several
    pulses present, the largest one wins.

    Raises:
        NoPulseFoundError: peak magnitude below the threshold (or an
            all-zero record).
    """
    if k_sigma <= 0.0:
        raise ValueError(f"k_sigma must be > 0, got {k_sigma}")
    data = rec.channels
    flat_peak = int(np.argmax(np.abs(data)))
    channel, peak_idx = np.unravel_index(flat_peak, data.shape)
    peak = abs(float(data[channel, peak_idx]))

    head = data[channel, : max(2, rec.n_samples // 10)]
    threshold = k_sigma * float(np.std(head))
    if peak <= 0.0 or peak < threshold:
        raise NoPulseFoundError(
            f"peak magnitude {peak:.3g} below detection threshold {threshold:.3g}"
        )

    pre = int(round(pre_margin_s * rec.rate_hz))
    post = int(round(post_margin_s * rec.rate_hz))
    start = max(0, peak_idx - pre)
    stop = min(rec.n_samples, peak_idx + post + 1)
    return PulseWindow(start=start, stop=stop, channel=int(channel), threshold=threshold)


def normalize_bipolar(x) -> np.ndarray:
    """Scale a snapshot matrix by its single global peak magnitude.

    Every entry is divided by max |entry| over all channels jointly, so
    the output lies in [-1, 1] with at least one entry at +-1, signs and
    inter-channel amplitude ratios unchanged. Idempotent.
    """
    data = np.asarray(x, dtype=float)
    peak = float(np.max(np.abs(data)))
    if peak == 0.0:
        raise ValueError("cannot normalize an all-zero matrix")
    return data / peak


def process_recording(
    rec: Recording,
    filter_spec: FilterSpec,
    pattern: GaussianMixturePattern,
    array: ArrayConfig,
    grid_deg=None,
    *,
    k_sigma: float = 5.0,
    pre_margin_s: float = 5e-9,
    post_margin_s: float = 20e-9,
    normalized: bool = False,
) -> PipelineResult:
    """Bandpass, intercept the pulse, normalize, estimate the direction.

    The recording must carry one channel per array element. Detection
    failures (``NoPulseFoundError``) propagate to the caller.
    """
    if rec.n_channels != array.n_elements:
        raise ValueError(
            f"recording has {rec.n_channels} channels but the array has "
            f"{array.n_elements} elements"
        )
    ordered = replace(rec, channels=rec.in_element_order(), element_of_channel=None)
    filtered = bandpass(ordered, filter_spec)
    window = detect_pulse(
        filtered, k_sigma, pre_margin_s=pre_margin_s, post_margin_s=post_margin_s
    )
    snapshots = normalize_bipolar(filtered.channels[:, window.start : window.stop])
    estimate = estimate_doa(snapshots, pattern, array, grid_deg, normalized=normalized)
    return PipelineResult(
        estimate=estimate,
        window=window,
        rate_hz=rec.rate_hz,
        filter_band_hz=(filter_spec.low_hz, filter_spec.high_hz),
        n_elements=array.n_elements,
    )
