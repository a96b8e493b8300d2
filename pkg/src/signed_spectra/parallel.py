"""Worker-count policy for the few embarrassingly parallel sweeps."""

import os

__all__ = ["max_workers"]

ENV_VAR = "SIGNED_SPECTRA_THREADS"


def max_workers():
    """Worker cap from SIGNED_SPECTRA_THREADS, else the CPU count."""
    raw = os.environ.get(ENV_VAR)
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from exc
        if value < 1:
            raise ValueError(f"{ENV_VAR} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1
