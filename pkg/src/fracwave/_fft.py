"""Thin wrappers around scipy.fft used by the structured-matrix kernels.

Two concerns are centralized here:

* a process-wide worker count so the CLI ``--threads`` flag reaches every
  transform without threading state through each call site, and
* an optional transform counter used by tests to assert FFT budgets
  (the fast Toeplitz solve must cost exactly four size-N FFTs).

Convention used throughout the project: the forward transform is
unnormalized and the inverse carries the 1/N factor (numpy/scipy default).
"""

from __future__ import annotations

from dataclasses import dataclass

import scipy.fft as _sfft

_WORKERS: int = 1


def set_fft_workers(workers: int) -> None:
    """Cap the number of threads scipy.fft may use for the heavy transforms."""
    global _WORKERS
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    _WORKERS = int(workers)


def get_fft_workers() -> int:
    return _WORKERS


@dataclass
class FftCounter:
    """Counts 1D complex transforms executed through this module.

    ``calls`` counts invocations; ``transforms`` counts individual length-N
    transforms (a batched call over k columns adds k). Disabled by default
    so the hot path pays only an attribute check.
    """

    enabled: bool = False
    calls: int = 0
    transforms: int = 0

    def reset(self) -> None:
        self.calls = 0
        self.transforms = 0


COUNTER = FftCounter()


def _count(x, axis: int) -> None:
    COUNTER.calls += 1
    COUNTER.transforms += x.size // x.shape[axis]


def cfft(x, axis: int = 0):
    """Counted complex FFT along ``axis``."""
    if COUNTER.enabled:
        _count(x, axis)
    return _sfft.fft(x, axis=axis, workers=_WORKERS)


def cifft(x, axis: int = 0):
    """Counted complex inverse FFT along ``axis``."""
    if COUNTER.enabled:
        _count(x, axis)
    return _sfft.ifft(x, axis=axis, workers=_WORKERS)


def rfft(x, axis: int = 0):
    return _sfft.rfft(x, axis=axis, workers=_WORKERS)


def irfft(x, n: int, axis: int = 0):
    return _sfft.irfft(x, n=n, axis=axis, workers=_WORKERS)


def rfft2(x):
    return _sfft.rfft2(x, workers=_WORKERS)


def irfft2(x, s):
    return _sfft.irfft2(x, s=s, workers=_WORKERS)


def dctn_type1(x):
    return _sfft.dctn(x, type=1, workers=_WORKERS)


def dst_type1_ortho(x, axes):
    return _sfft.dstn(x, type=1, norm="ortho", axes=axes, workers=_WORKERS)


def next_fast_real_len(target: int) -> int:
    """Smallest FFT-friendly length >= target for real-input transforms."""
    return _sfft.next_fast_len(target, real=True)
