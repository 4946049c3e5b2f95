"""Problem files and trace CSVs.

A problem file is a small key-value text document::

    # q(x) = M x + b
    n  = 2
    M  = 0.5  0.0
         0.0 -0.5
    b  = 1 1
    x0 = 0 0        # optional, defaults to the zero vector

Values are separated by whitespace or commas.  A line without ``=``
continues the previous key, so matrices may be written one row per line.
Everything after ``#`` is a comment.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np

from .iterations import IterationTrace, SymmetricSystem

log = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
KEYS = ("n", "M", "b", "x0")


class ProblemParseError(ValueError):
    def __init__(self, message: str, path: str = "<string>", line: int | None = None):
        where = path if line is None else f"{path}:{line}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    M: np.ndarray
    b: np.ndarray
    x0: np.ndarray

    def system(self) -> SymmetricSystem:
        return SymmetricSystem(self.M, self.b)


def parse_problem(text: str, path: str = "<string>") -> ProblemSpec:
    values: dict[str, list[float]] = {}
    first_line: dict[str, int] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, rest = line.partition("=")
            key = key.strip()
            if key not in KEYS:
                raise ProblemParseError(f"unknown key {key!r}", path, lineno)
            if key in values:
                raise ProblemParseError(f"duplicate key {key!r}", path, lineno)
            values[key] = []
            first_line[key] = lineno
            current = key
        elif current is None:
            raise ProblemParseError("expected 'key = values'", path, lineno)
        else:
            rest = line
        for tok in rest.replace(",", " ").split():
            try:
                values[current].append(float(tok))
            except ValueError:
                raise ProblemParseError(f"not a number: {tok!r}", path, lineno) from None

    for key in ("n", "M", "b"):
        if key not in values:
            raise ProblemParseError(f"missing key {key!r}", path)
    nvals = values["n"]
    if len(nvals) != 1 or nvals[0] != int(nvals[0]) or nvals[0] < 1:
        raise ProblemParseError("n must be a single positive integer", path, first_line["n"])
    n = int(nvals[0])
    expected = {"M": n * n, "b": n, "x0": n}
    for key, count in expected.items():
        if key in values and len(values[key]) != count:
            raise ProblemParseError(
                f"{key} needs {count} values for n = {n}, got {len(values[key])}",
                path, first_line[key])
    arrays = {k: np.array(v, dtype=np.float64) for k, v in values.items()}
    for key, arr in arrays.items():
        if not np.all(np.isfinite(arr)):
            raise ProblemParseError(f"{key} has non-finite values", path, first_line[key])

    M = arrays["M"].reshape(n, n)
    asym = float(np.max(np.abs(M - M.T)))
    if asym > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(M)))):
        raise ProblemParseError(f"M is not symmetric (max |M - M'| = {asym:.3e})",
                                path, first_line["M"])
    if asym > 0:
        log.warning("%s: M symmetrized (max |M - M'| = %.3e)", path, asym)
        M = 0.5 * (M + M.T)
    x0 = arrays.get("x0", np.zeros(n))
    return ProblemSpec(M, arrays["b"], x0)


def load_problem(path) -> ProblemSpec:
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemParseError(f"cannot read file: {exc.strerror}", path) from exc
    return parse_problem(text, path)


def format_problem(M, b, x0=None) -> str:
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    rows = "\n".join("    " + " ".join("%.17g" % v for v in row) for row in M)
    out = [f"n = {n}", "M =", rows, "b = " + " ".join("%.17g" % v for v in b)]
    if x0 is not None:
        out.append("x0 = " + " ".join("%.17g" % v for v in x0))
    return "\n".join(out) + "\n"


TRACE_HEADER = ("k", "residual_norm", "beta_or_blank")


def _beta_text(beta) -> str:
    if beta is None:
        return ""
    if isinstance(beta, tuple):
        return " ".join("%.17g" % v for v in beta)
    return "%.17g" % beta


def write_trace_csv(trace: IterationTrace, path) -> None:
    betas = trace.beta_by_step()
    lines = [",".join(TRACE_HEADER)]
    for k, nr in enumerate(trace.residual_norms.tolist()):
        lines.append(f"{k},{'%.17g' % nr},{_beta_text(betas.get(k))}")
    path = os.fspath(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write trace CSV to {path}: {exc.strerror}") from exc


def read_trace_csv(path) -> tuple[np.ndarray, dict]:
    """Return (residual norms, {k: beta}) from a trace CSV."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if tuple(lines[0].split(",")) != TRACE_HEADER:
        raise ValueError(f"{path}: unexpected header {lines[0]!r}")
    norms, betas = [], {}
    for line in lines[1:]:
        k, nr, beta = line.split(",")
        norms.append(float(nr))
        if beta:
            parts = [float(v) for v in beta.split()]
            betas[int(k)] = parts[0] if len(parts) == 1 else tuple(parts)
    return np.array(norms), betas
