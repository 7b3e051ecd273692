"""Snapshot output: grid fields written as CSV or raw binary blocks.

Formats (both bit-exact and documented so external tools can read them):

* CSV: header ``i,j,value``; one row per node in row-major order; i and j
  are 1-based interior node indices (node coordinate = a + i h); values
  carry 17 significant digits, enough to round-trip a float64.
* raw: ``<name>.f64`` holds the N x N field as little-endian float64 in
  row-major order (i outer, j inner), and ``<name>.meta`` is a small
  ``key = value`` text sidecar with n, h, t, alpha, kappa, nonlinearity,
  surface.

An optional pointwise surface transform is applied before writing:
``u`` (identity), ``sin_u`` (sin u), or ``sin_half_u`` (sin(u/2)); the two
sine variants are the customary ways to display ring waves of the
sine-Gordon equation.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ValidationError

__all__ = [
    "SURFACE_NAMES",
    "apply_surface",
    "write_snapshot_csv",
    "write_snapshot_raw",
    "read_snapshot_raw",
]

SURFACE_NAMES = ("u", "sin_u", "sin_half_u")


def apply_surface(surface: str, u: np.ndarray) -> np.ndarray:
    if surface == "u":
        return u
    if surface == "sin_u":
        return np.sin(u)
    if surface == "sin_half_u":
        return np.sin(0.5 * u)
    raise ValidationError(
        f"unknown surface {surface!r}; available: {', '.join(SURFACE_NAMES)}"
    )


def write_snapshot_csv(path, field: np.ndarray) -> None:
    field = np.asarray(field, dtype=float)
    n = field.shape[0]
    lines = ["i,j,value"]
    for i in range(n):
        row = field[i]
        lines.extend(f"{i + 1},{j + 1},{row[j]:.17g}" for j in range(field.shape[1]))
    Path(path).write_text("\n".join(lines) + "\n")


def write_snapshot_raw(
    path,
    field: np.ndarray,
    *,
    h: float,
    t: float,
    alpha: float,
    kappa: float,
    nonlinearity: str,
    surface: str = "u",
) -> None:
    """Write ``path``.f64 (data) and ``path``.meta (text sidecar)."""
    field = np.asarray(field, dtype=float)
    base = Path(path)
    data = field.astype("<f8", copy=False)
    # names are built by appending (not Path.with_suffix) so that dots in
    # time labels like snap_t2.5 survive
    base.parent.joinpath(base.name + ".f64").write_bytes(data.tobytes(order="C"))
    meta = "\n".join([
        f"n = {field.shape[0]}",
        f"h = {h:.17g}",
        f"t = {t:.17g}",
        f"alpha = {alpha:.17g}",
        f"kappa = {kappa:.17g}",
        f"nonlinearity = {nonlinearity}",
        f"surface = {surface}",
        "dtype = float64 little-endian row-major",
    ])
    base.parent.joinpath(base.name + ".meta").write_text(meta + "\n")


def read_snapshot_raw(path) -> tuple[np.ndarray, dict[str, str]]:
    """Read back a raw snapshot pair (inverse of write_snapshot_raw)."""
    base = Path(path)
    meta: dict[str, str] = {}
    for line in base.parent.joinpath(base.name + ".meta").read_text().splitlines():
        if "=" in line:
            key, _, val = line.partition("=")
            meta[key.strip()] = val.strip()
    n = int(meta["n"])
    raw = base.parent.joinpath(base.name + ".f64").read_bytes()
    field = np.frombuffer(raw, dtype="<f8").reshape(n, n)
    return field, meta
