"""Worst-case convergence factors over a grid of 2x2 eigenvalue pairs (m1, m2)."""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .convergence import rho_worst_aa

CSV_HEADER = ("m1", "m2", "rho_aa", "rho_pi", "ratio", "masked", "valid")


@dataclass(frozen=True)
class SweepConfig:
    m1_range: tuple[float, float] = (-1.0, 1.0)
    m2_range: tuple[float, float] = (-1.0, 1.0)
    resolution: int = 401
    exclusion_band: float = 1e-8

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise ValueError(f"resolution must be an integer >= 2, got {self.resolution}")
        if not self.exclusion_band > 0:
            raise ValueError("exclusion_band must be > 0")
        for name in ("m1_range", "m2_range"):
            lo, hi = getattr(self, name)
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"{name} must be a finite interval lo < hi, got {(lo, hi)}")


def unit_square_config() -> SweepConfig:
    return SweepConfig((-1.0, 1.0), (-1.0, 1.0), 401)


def wide_square_config() -> SweepConfig:
    return SweepConfig((-3.0, 3.0), (-3.0, 3.0), 601)


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """Per-cell values indexed ``[i, j]`` for ``(m1_axis[i], m2_axis[j])``.

    Invalid cells (an eigenvalue within the exclusion band of 1) hold NaN;
    ratio is NaN where rho_pi = 0.
    """

    m1_axis: np.ndarray
    m2_axis: np.ndarray
    rho_aa: np.ndarray
    rho_pi: np.ndarray
    ratio: np.ndarray
    masked: np.ndarray
    valid: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.rho_aa.shape


def grid_axis(lo: float, hi: float, n: int) -> np.ndarray:
    """n points from lo to hi; mirror-symmetric bit-for-bit when lo = -hi."""
    t = (2.0 * np.arange(n) - (n - 1)) / (n - 1)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


def run_sweep(cfg: SweepConfig = SweepConfig()) -> SweepGrid:
    m1 = grid_axis(*cfg.m1_range, cfg.resolution)
    m2 = grid_axis(*cfg.m2_range, cfg.resolution)
    M1, M2 = np.meshgrid(m1, m2, indexing="ij")
    valid = (np.abs(M1 - 1.0) > cfg.exclusion_band) & (np.abs(M2 - 1.0) > cfg.exclusion_band)
    rho_aa = np.where(valid, rho_worst_aa(M1, M2), np.nan)
    rho_pi = np.where(valid, np.maximum(np.abs(M1), np.abs(M2)), np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(rho_pi > 0, rho_aa / rho_pi, np.nan)
    masked = valid & (rho_aa > 1.0)
    for a in (m1, m2, rho_aa, rho_pi, ratio, masked, valid):
        a.setflags(write=False)
    return SweepGrid(m1, m2, rho_aa, rho_pi, ratio, masked, valid)


def _fmt(x: float) -> str:
    return "%.17g" % x


def emit_csv(grid: SweepGrid, path) -> None:
    """Write the grid row-major (m1 outer, m2 inner) as CSV.

    The file is written to a temporary sibling and renamed into place, so a
    failure never leaves a partial file behind.

    Raises:
        OSError: with the target path in the message.
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    n1, n2 = grid.shape
    lines = [",".join(CSV_HEADER)]
    m1s = [_fmt(v) for v in grid.m1_axis]
    m2s = [_fmt(v) for v in grid.m2_axis]
    for i in range(n1):
        aa = grid.rho_aa[i].tolist()
        pi = grid.rho_pi[i].tolist()
        ra = grid.ratio[i].tolist()
        mk = grid.masked[i].tolist()
        ok = grid.valid[i].tolist()
        for j in range(n2):
            lines.append(
                f"{m1s[i]},{m2s[j]},{_fmt(aa[j])},{_fmt(pi[j])},{_fmt(ra[j])},"
                f"{'true' if mk[j] else 'false'},{'true' if ok[j] else 'false'}"
            )
    data = "\n".join(lines) + "\n"
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(prefix=".sweep-", suffix=".csv", dir=directory)
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)
        raise OSError(exc.errno, f"cannot write sweep CSV to {path}: {exc.strerror}") from exc


def read_csv(path) -> SweepGrid:
    """Parse a CSV written by :func:`emit_csv` back into a grid."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = list(reader)
    m1 = np.array([float(r[0]) for r in rows])
    m2 = np.array([float(r[1]) for r in rows])
    m1_axis = np.unique(m1)
    m2_axis = np.unique(m2)
    shape = (m1_axis.size, m2_axis.size)
    if m1_axis.size * m2_axis.size != len(rows):
        raise ValueError(f"{path}: rows do not form a rectangular grid")

    def col(i, conv=float):
        return np.array([conv(r[i]) for r in rows]).reshape(shape)

    def flag(s: str) -> bool:
        if s not in ("true", "false"):
            raise ValueError(f"{path}: bad boolean {s!r}")
        return s == "true"

    return SweepGrid(m1_axis, m2_axis, col(2), col(3), col(4), col(5, flag), col(6, flag))
