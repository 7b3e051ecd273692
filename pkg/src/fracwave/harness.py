"""Diagnostics and benchmark harness: discrete norms, the conserved energy
functional, self-refinement error studies, and CSV table generation.

Error metrics (self-refinement, no exact solution needed):

    time axis:   Error1(tau, h) = sqrt(h^2 sum |u^M(tau, h) - u^{2M}(tau/2, h)|^2)
    space axis:  Error2(tau, h) = sqrt(h^2 sum |u^M_ij(tau, h) - u^M_{2i,2j}(tau, h/2)|^2)

with observed order log2 of consecutive error ratios. Halving h turns N
interior nodes into 2N + 1, so coarse node i coincides with fine node 2i
and the comparison needs no interpolation.

The energy functional conserved exactly by the linear (g = 0) splitting
scheme, written for the level pair (w^n, w^{n+1}) with dt = (w^{n+1} - w^n)/tau:

    H_n^2 = ||dt||^2
          + (tau^2 kappa / 2) (||dt||_Atilde^2 - ||dt||_A^2)
          + (kappa / 2) (||w^{n+1}||_A^2 + ||w^n||_A^2)
          + (kappa^2 tau^4 / 4) ||dt||_B^2,

where the quadratic forms pair a field with the discrete fractional
Laplacian (A), the separable Riesz sum (Atilde), and the Riesz tensor
product (B). The Atilde - A difference is nonnegative for every field
(tested as a standalone inequality), which is what makes H_n^2 a norm.
"""

from __future__ import annotations

import csv
import logging
import weakref
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .coeffs import riesz_sum_coeffs_2d
from .errors import ValidationError
from .problems import Grid2D, Problem, example_problem
from .stepper import RunInfo, SchemeState, StepOperators, build_operators, run
from .structured import BttbOperator, SymToeplitz, bttb_build

__all__ = [
    "NORM_KINDS",
    "EnergyTrace",
    "StudyRow",
    "StudySpec",
    "inner_product",
    "splitting_gap",
    "discrete_energy",
    "error_time_refinement",
    "error_space_refinement",
    "run_study",
    "write_rows_csv",
    "parse_study_file",
    "parse_number",
    "parse_number_list",
]

log = logging.getLogger(__name__)

NORM_KINDS = ("l2", "A", "A_tilde", "B")


class _NormEngine:
    """Operators behind the A / Atilde / B quadratic forms for one ops set."""

    def __init__(self, ops: StepOperators):
        n = ops.grid.n
        h_alpha = ops.grid.h ** (-ops.riesz_1d.alpha)
        self.h2 = ops.grid.h * ops.grid.h
        self.lap = ops.lap
        cross = riesz_sum_coeffs_2d(ops.riesz_1d.alpha, n)
        self.cross: BttbOperator = bttb_build(cross, n, scale=h_alpha)
        self.riesz_t = SymToeplitz(h_alpha * ops.riesz_1d.weights)

    def apply_a(self, w: np.ndarray) -> np.ndarray:
        return self.lap.apply(w)

    def apply_a_tilde(self, w: np.ndarray) -> np.ndarray:
        return self.cross.apply(w)

    def apply_b(self, w: np.ndarray) -> np.ndarray:
        # tensor product of the two 1D Riesz operators: columns, then rows
        return self.riesz_t.matvec(self.riesz_t.matvec(w).T).T


_ENGINES: "weakref.WeakKeyDictionary[StepOperators, _NormEngine]" = (
    weakref.WeakKeyDictionary()
)


def _engine(ops: StepOperators) -> _NormEngine:
    eng = _ENGINES.get(ops)
    if eng is None:
        eng = _NormEngine(ops)
        _ENGINES[ops] = eng
    return eng


def inner_product(kind: str, w1: np.ndarray, w2: np.ndarray, ops: StepOperators) -> float:
    """Discrete inner product h^2 sum(T w1 * w2) with T depending on kind:
    identity (l2), fractional Laplacian (A), separable Riesz sum (A_tilde),
    or Riesz tensor product (B)."""
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    if w1.shape != w2.shape:
        raise ValidationError(f"field shapes differ: {w1.shape} vs {w2.shape}")
    eng = _engine(ops)
    if kind == "l2":
        tw1 = w1
    elif kind == "A":
        tw1 = eng.apply_a(w1)
    elif kind == "A_tilde":
        tw1 = eng.apply_a_tilde(w1)
    elif kind == "B":
        tw1 = eng.apply_b(w1)
    else:
        raise ValidationError(f"unknown norm kind {kind!r}; kinds: {NORM_KINDS}")
    return eng.h2 * float(np.vdot(tw1, w2).real)


def splitting_gap(w: np.ndarray, ops: StepOperators) -> float:
    """Return ||w||_Atilde^2 - ||w||_A^2, the nonnegative splitting defect."""
    return inner_product("A_tilde", w, w, ops) - inner_product("A", w, w, ops)


@dataclass(frozen=True)
class EnergyTrace:
    """Squared energy values H_n^2, one entry per recorded step."""

    values: np.ndarray

    def relative_drift(self) -> float:
        v = self.values
        if v.size == 0 or v[0] == 0.0:
            return 0.0
        return float(np.max(np.abs(v - v[0])) / abs(v[0]))


def discrete_energy(state: SchemeState, ops: StepOperators) -> float:
    """Evaluate H_n^2 on the level pair held by ``state``."""
    tau = ops.tau_step
    kappa = ops.kappa
    dt = (state.u_curr - state.u_prev) / tau
    e = inner_product("l2", dt, dt, ops)
    e += 0.5 * tau * tau * kappa * splitting_gap(dt, ops)
    e += 0.5 * kappa * (
        inner_product("A", state.u_curr, state.u_curr, ops)
        + inner_product("A", state.u_prev, state.u_prev, ops)
    )
    e += 0.25 * (kappa * tau * tau) ** 2 * inner_product("B", dt, dt, ops)
    return e


# ---------------------------------------------------------------------------
# refinement studies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StudyRow:
    """One table line: error at (alpha, step) plus the run's timings.

    ``step`` is tau for time studies and h for space studies; ``order`` is
    None on the first line of each refinement column. cpu_setup covers
    coefficient generation and solver precomputation for the run at this
    row's step; cpu_loop covers time stepping; cpu_seconds is their sum.
    """

    scheme: str
    alpha: float
    step: float
    error: float
    order: float | None
    cpu_setup: float
    cpu_loop: float

    @property
    def cpu_seconds(self) -> float:
        return self.cpu_setup + self.cpu_loop


def _steps_for(t_final: float, tau: float) -> int:
    m = round(t_final / tau)
    if m < 1 or abs(m * tau - t_final) > 1e-9 * max(1.0, abs(t_final)):
        raise ValidationError(
            f"t_final={t_final} is not an integral number of steps of tau={tau}"
        )
    return m


def _l2h_diff(h: float, u_coarse: np.ndarray, u_fine_restricted: np.ndarray) -> float:
    d = u_coarse - u_fine_restricted
    return float(np.sqrt(h * h * np.sum(d * d)))


def _check_halving(values: Sequence[float], what: str) -> None:
    if len(values) < 1:
        raise ValidationError(f"{what} list must not be empty")
    for a, b in zip(values, values[1:]):
        if abs(a / b - 2.0) > 1e-9:
            raise ValidationError(f"{what} list must halve strictly: {a} -> {b}")


def error_time_refinement(
    problem: Problem,
    h_fixed: float,
    tau_list: Sequence[float],
    t_final: float,
    scheme: str = "sadi",
    setup_tol: float = 1e-13,
    step_tol: float = 1e-11,
    oversampling: int = 8,
) -> list[StudyRow]:
    """Error/order rows along a halving tau list at fixed h.

    Each row compares the final field at tau with the one at tau/2 on the
    same grid; because the list halves, consecutive rows share runs, so a
    K-row study costs K+1 runs. Timings reported per row belong to the run
    at that row's tau.
    """
    _check_halving(tau_list, "tau")
    grid = Grid2D.from_spacing(problem.a, problem.b, h_fixed)
    all_taus = list(tau_list) + [tau_list[-1] / 2.0]
    finals: list[np.ndarray] = []
    infos: list[RunInfo] = []
    for tau in all_taus:
        m_steps = _steps_for(t_final, tau)
        log.info("run %s alpha=%g h=%g tau=%g (%d steps, N=%d)",
                 scheme, problem.alpha, h_fixed, tau, m_steps, grid.n)
        state, info = run(
            problem, grid, tau, m_steps, scheme=scheme,
            setup_tol=setup_tol, step_tol=step_tol, oversampling=oversampling,
        )
        finals.append(state.u_curr)
        infos.append(info)
    rows: list[StudyRow] = []
    prev_error: float | None = None
    for k, tau in enumerate(tau_list):
        err = _l2h_diff(grid.h, finals[k], finals[k + 1])
        order = None if prev_error is None else float(np.log2(prev_error / err))
        rows.append(StudyRow(
            scheme=scheme, alpha=problem.alpha, step=tau, error=err, order=order,
            cpu_setup=infos[k].setup_seconds, cpu_loop=infos[k].loop_seconds,
        ))
        prev_error = err
    return rows


def error_space_refinement(
    problem: Problem,
    tau_fixed: float,
    h_list: Sequence[float],
    t_final: float,
    scheme: str = "sadi",
    setup_tol: float = 1e-13,
    step_tol: float = 1e-11,
    oversampling: int = 8,
) -> list[StudyRow]:
    """Error/order rows along a halving h list at fixed tau.

    Each row compares the final field at h against the h/2 field restricted
    to the coincident (even-index) nodes. Consecutive rows share runs like
    in the time study.
    """
    _check_halving(h_list, "h")
    m_steps = _steps_for(t_final, tau_fixed)
    all_hs = list(h_list) + [h_list[-1] / 2.0]
    grids = [Grid2D.from_spacing(problem.a, problem.b, h) for h in all_hs]
    for coarse, fine in zip(grids, grids[1:]):
        if fine.n != 2 * coarse.n + 1:
            raise ValidationError(
                f"grids N={coarse.n} and N={fine.n} have no coincident nodes"
            )
    finals: list[np.ndarray] = []
    infos: list[RunInfo] = []
    for grid, h in zip(grids, all_hs):
        log.info("run %s alpha=%g tau=%g h=%g (%d steps, N=%d)",
                 scheme, problem.alpha, tau_fixed, h, m_steps, grid.n)
        state, info = run(
            problem, grid, tau_fixed, m_steps, scheme=scheme,
            setup_tol=setup_tol, step_tol=step_tol, oversampling=oversampling,
        )
        finals.append(state.u_curr)
        infos.append(info)
    rows: list[StudyRow] = []
    prev_error: float | None = None
    for k, h in enumerate(h_list):
        restricted = finals[k + 1][1::2, 1::2]
        err = _l2h_diff(h, finals[k], restricted)
        order = None if prev_error is None else float(np.log2(prev_error / err))
        rows.append(StudyRow(
            scheme=scheme, alpha=problem.alpha, step=h, error=err, order=order,
            cpu_setup=infos[k].setup_seconds, cpu_loop=infos[k].loop_seconds,
        ))
        prev_error = err
    return rows


# ---------------------------------------------------------------------------
# study specification and CSV output
# ---------------------------------------------------------------------------

SCHEME_CHOICES = ("sadi", "nonadi", "both")


@dataclass(frozen=True)
class StudySpec:
    """A batch of refinement studies over schemes and fractional orders.

    ``axis`` selects the refinement direction: "time" varies ``taus`` at
    the single fixed h in ``hs``; "space" varies ``hs`` at the single fixed
    tau in ``taus``.
    """

    axis: str
    example: str = "sine-gordon"
    scheme: str = "sadi"
    alphas: tuple[float, ...] = (1.1, 1.5, 1.9)
    taus: tuple[float, ...] = ()
    hs: tuple[float, ...] = ()
    t_final: float | None = None
    tol: float = 1e-11
    kappa: float = 1.0
    oversampling: int = 8
    threads: int = 1
    timing_strict: bool = False


def _spec_defaults(spec: StudySpec) -> StudySpec:
    """Fill unset step lists / horizon with the benchmark configurations."""
    from dataclasses import replace

    from .problems import EXAMPLE_DEFAULTS

    tau_d, h_d, t_d = EXAMPLE_DEFAULTS.get(spec.example, (0.01, 0.025, 5.0))
    taus, hs = spec.taus, spec.hs
    if spec.axis == "time":
        if not taus:
            taus = tuple(0.1 / 2**k for k in range(4))
        if not hs:
            hs = (h_d,)
    elif spec.axis == "space":
        if not hs:
            hs = tuple(1.0 / 2**k for k in range(4))
        if not taus:
            taus = (tau_d,)
    else:
        raise ValidationError(f"axis must be 'time' or 'space', got {spec.axis!r}")
    t_final = spec.t_final if spec.t_final is not None else t_d
    return replace(spec, taus=taus, hs=hs, t_final=t_final)


def run_study(spec: StudySpec, output_path=None) -> list[StudyRow]:
    """Execute a study spec; optionally write rows to a CSV file.

    Cells run sequentially in declaration order (scheme, then alpha, then
    step), which also satisfies the exclusive-timing requirement of
    ``timing_strict`` within this single-process harness.
    """
    from . import _fft

    spec = _spec_defaults(spec)
    if spec.scheme not in SCHEME_CHOICES:
        raise ValidationError(
            f"scheme must be one of {SCHEME_CHOICES}, got {spec.scheme!r}"
        )
    _fft.set_fft_workers(spec.threads)
    schemes = ("sadi", "nonadi") if spec.scheme == "both" else (spec.scheme,)
    if spec.axis == "time" and len(spec.hs) != 1:
        raise ValidationError("time study needs exactly one fixed h")
    if spec.axis == "space" and len(spec.taus) != 1:
        raise ValidationError("space study needs exactly one fixed tau")

    rows: list[StudyRow] = []
    for scheme in schemes:
        for alpha in spec.alphas:
            problem = example_problem(spec.example, alpha, kappa=spec.kappa)
            if spec.axis == "time":
                rows.extend(error_time_refinement(
                    problem, spec.hs[0], spec.taus, spec.t_final,
                    scheme=scheme, step_tol=spec.tol,
                    oversampling=spec.oversampling,
                ))
            else:
                rows.extend(error_space_refinement(
                    problem, spec.taus[0], spec.hs, spec.t_final,
                    scheme=scheme, step_tol=spec.tol,
                    oversampling=spec.oversampling,
                ))
    if output_path is not None:
        write_rows_csv(output_path, rows)
    return rows


CSV_HEADER = ("scheme", "alpha", "step", "error", "order",
              "cpu_setup", "cpu_loop", "cpu_seconds")


def write_rows_csv(path, rows: Iterable[StudyRow]) -> None:
    """Write study rows as CSV; the first row of each column has an empty
    order cell."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([
                row.scheme,
                f"{row.alpha:g}",
                f"{row.step:.12g}",
                f"{row.error:.6e}",
                "" if row.order is None else f"{row.order:.4f}",
                f"{row.cpu_setup:.4f}",
                f"{row.cpu_loop:.4f}",
                f"{row.cpu_seconds:.4f}",
            ])


# ---------------------------------------------------------------------------
# flat key = value study files
# ---------------------------------------------------------------------------

def parse_number(text: str) -> float:
    """Parse a decimal or a p/q fraction (the benchmark steps are naturally
    fractions like 1/40)."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            return float(num) / float(den)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad fraction {text!r}") from exc
    try:
        return float(text)
    except ValueError as exc:
        raise ValidationError(f"bad number {text!r}") from exc


def parse_number_list(text: str) -> tuple[float, ...]:
    items = [t for t in (p.strip() for p in text.split(",")) if t]
    return tuple(parse_number(t) for t in items)


_BOOL_WORDS = {"1": True, "true": True, "yes": True, "on": True,
               "0": False, "false": False, "no": False, "off": False}

STUDY_FILE_KEYS = ("example", "scheme", "alphas", "taus", "hs",
                   "t_final", "tol", "threads", "timing-strict")


def parse_study_file(path, axis: str) -> StudySpec:
    """Read a flat ``key = value`` study file.

    Recognized keys: example, scheme, alphas, taus, hs, t_final, tol,
    threads, timing-strict. Lists are comma separated; numbers may be
    fractions. Blank lines and '#' comments are ignored.
    """
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip().lower().replace("_", "-")
            if key == "t-final":
                key = "t_final"
            if key not in STUDY_FILE_KEYS:
                raise ValidationError(
                    f"{path}:{lineno}: unknown key {key!r}; "
                    f"known keys: {', '.join(STUDY_FILE_KEYS)}"
                )
            values[key] = val.strip()

    kwargs: dict = {"axis": axis}
    if "example" in values:
        kwargs["example"] = values["example"]
    if "scheme" in values:
        kwargs["scheme"] = values["scheme"]
    if "alphas" in values:
        kwargs["alphas"] = parse_number_list(values["alphas"])
    if "taus" in values:
        kwargs["taus"] = parse_number_list(values["taus"])
    if "hs" in values:
        kwargs["hs"] = parse_number_list(values["hs"])
    if "t_final" in values:
        kwargs["t_final"] = parse_number(values["t_final"])
    if "tol" in values:
        kwargs["tol"] = parse_number(values["tol"])
    if "threads" in values:
        kwargs["threads"] = int(values["threads"])
    if "timing-strict" in values:
        word = values["timing-strict"].lower()
        if word not in _BOOL_WORDS:
            raise ValidationError(f"bad boolean for timing-strict: {word!r}")
        kwargs["timing_strict"] = _BOOL_WORDS[word]
    return StudySpec(**kwargs)
