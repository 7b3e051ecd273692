"""Structured linear algebra kernels.

Everything the time steppers need reduces to four structured-matrix tools:

* circulant and skew-circulant matvecs (FFT diagonalization),
* symmetric Toeplitz matvec via circulant embedding,
* a direct solver for symmetric positive definite Toeplitz systems based on
  the Gohberg-Semencul representation of the inverse: once c = H^{-1} e_1 is
  known, H^{-1} factorizes into one circulant and one skew-circulant built
  from c, and every subsequent solve costs exactly four size-N FFTs,
* a block-Toeplitz-Toeplitz-block (BTTB) matvec via 2D circulant embedding,
  plus sine-transform (tau algebra) preconditioners and a plain PCG loop
  for the systems that are BTTB but not factorable.

Dense constructions live only in the test suite; all operators here are
matrix-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _fft
from .coeffs import Coeffs2D, validate_alpha
from .errors import SolverError, ValidationError

__all__ = [
    "SymToeplitz",
    "GSData",
    "BttbOperator",
    "TauSpec",
    "PcgReport",
    "circulant_matvec",
    "skew_circulant_matvec",
    "toeplitz_matvec",
    "gs_precompute",
    "gs_solve",
    "bttb_build",
    "bttb_apply",
    "tau_spec_1d",
    "tau_spec_2d",
    "tau_apply",
    "dst1",
    "pcg",
]


# ---------------------------------------------------------------------------
# circulant / skew-circulant / Toeplitz matvecs
# ---------------------------------------------------------------------------

def circulant_matvec(lambda_c: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Multiply by the circulant whose eigenvalues are ``lambda_c``.

    C v = ifft(lambda_c * fft(v)); lambda_c = fft(first column of C).
    ``v`` may be a vector or a matrix whose columns are independent
    right-hand sides (one batched FFT call either way).
    """
    lambda_c = np.asarray(lambda_c)
    v = np.asarray(v)
    if v.shape[0] != lambda_c.shape[0]:
        raise ValidationError(
            f"length mismatch: eigenvalues {lambda_c.shape[0]}, vector {v.shape[0]}"
        )
    lam = lambda_c if v.ndim == 1 else lambda_c[:, None]
    return _fft.cifft(lam * _fft.cfft(v, axis=0), axis=0)


def skew_circulant_matvec(
    lambda_s: np.ndarray, q_diag: np.ndarray, v: np.ndarray
) -> np.ndarray:
    """Multiply by the skew-circulant diagonalized as S = Q* F* diag(lambda_s) F Q.

    Q = diag(exp(-i pi k / N)) conjugates the skew-circulant into an
    ordinary circulant; lambda_s = fft(Q s) for first column s. Batched
    columns are supported like in :func:`circulant_matvec`.
    """
    lambda_s = np.asarray(lambda_s)
    q_diag = np.asarray(q_diag)
    v = np.asarray(v)
    if v.shape[0] != lambda_s.shape[0]:
        raise ValidationError(
            f"length mismatch: eigenvalues {lambda_s.shape[0]}, vector {v.shape[0]}"
        )
    if v.ndim == 1:
        lam, q, qc = lambda_s, q_diag, q_diag.conj()
    else:
        lam, q, qc = lambda_s[:, None], q_diag[:, None], q_diag.conj()[:, None]
    return qc * _fft.cifft(lam * _fft.cfft(q * v, axis=0), axis=0)


@dataclass(frozen=True)
class SymToeplitz:
    """Symmetric Toeplitz matrix stored as its first column.

    Entry (i, j) equals ``first_col[|i - j|]``. The matvec embeds the matrix
    into a circulant of FFT-friendly size >= 2N whose first column reads
    [t_0, t_1, .., t_{N-1}, 0 .., 0, t_{N-1}, .., t_1] and keeps that
    circulant's (real) spectrum cached.
    """

    first_col: np.ndarray
    _spectrum: np.ndarray = field(init=False, repr=False, compare=False)
    _length: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        col = np.asarray(self.first_col, dtype=float)
        if col.ndim != 1 or col.shape[0] < 1:
            raise ValidationError("first_col must be a nonempty 1D real vector")
        n = col.shape[0]
        length = _fft.next_fast_real_len(2 * n)
        kernel = np.zeros(length)
        kernel[:n] = col
        kernel[length - n + 1:] = col[1:][::-1]
        object.__setattr__(self, "first_col", col)
        object.__setattr__(self, "_spectrum", _fft.rfft(kernel))
        object.__setattr__(self, "_length", length)

    @property
    def n(self) -> int:
        return self.first_col.shape[0]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Multiply by the Toeplitz matrix; columns of a matrix input are
        treated as independent vectors."""
        v = np.asarray(v, dtype=float)
        n = self.n
        if v.shape[0] != n:
            raise ValidationError(f"length mismatch: matrix {n}, vector {v.shape[0]}")
        shape = (self._length,) + v.shape[1:]
        padded = np.zeros(shape)
        padded[:n] = v
        spec = self._spectrum if v.ndim == 1 else self._spectrum[:, None]
        out = _fft.irfft(spec * _fft.rfft(padded, axis=0), n=self._length, axis=0)
        return out[:n]


def toeplitz_matvec(first_col: np.ndarray, v: np.ndarray) -> np.ndarray:
    """One-shot symmetric Toeplitz multiply (embedding built per call)."""
    return SymToeplitz(np.asarray(first_col, dtype=float)).matvec(v)


# ---------------------------------------------------------------------------
# Gohberg-Semencul solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GSData:
    """Precomputed data representing the inverse of an SPD Toeplitz matrix.

    With c = H^{-1} e_1 and p_k = c_{k-1} (1-based), the inverse acts as

        H^{-1} v = Re(v3) + J Im(v3),
        v1 = (v + i J v) / (2 p_1),
        v2 = S v1   (skew-circulant with first column s = [p_1, -p_N, .., -p_2]),
        v3 = C v2   (circulant with first column c),

    where J is the index-reversal. Both structured factors are diagonal in
    Fourier space, so one solve costs exactly four size-N FFTs.
    """

    p1: float
    lambda_c: np.ndarray
    lambda_s: np.ndarray
    q_diag: np.ndarray

    @property
    def n(self) -> int:
        return self.lambda_c.shape[0]


def gs_precompute(
    h_matrix: SymToeplitz,
    tol: float = 1e-13,
    precond: "TauSpec | None" = None,
    max_iter: int = 2000,
) -> GSData:
    """Solve H c = e_1 once and package the structured inverse.

    The one-time solve uses preconditioned conjugate gradients (matvec via
    the cached circulant embedding). ``precond`` is typically the 1D tau
    spectrum matching H; None means plain CG. A positive p_1 = c_0 is a
    hard requirement: the (1,1) entry of the inverse of an SPD matrix is
    positive, so p_1 <= 0 signals a non-SPD input.
    """
    n = h_matrix.n
    e1 = np.zeros(n)
    e1[0] = 1.0
    apply_m = (lambda r: tau_apply(precond, r)) if precond is not None else None
    c, report = pcg(h_matrix.matvec, apply_m, e1, tol=tol, max_iter=max_iter)
    if not report.converged:
        raise SolverError(
            f"CG on the Toeplitz factor did not reach tol={tol:g} in "
            f"{report.iterations} iterations "
            f"(relative residual {report.final_relative_residual:.2e})"
        )
    p1 = float(c[0])
    if p1 <= 0.0:
        raise SolverError(f"first entry of the inverse column is {p1:.3e} <= 0; "
                          "matrix is not symmetric positive definite")
    s = np.empty(n)
    s[0] = p1
    s[1:] = -c[1:][::-1]
    q_diag = np.exp(-1j * np.pi * np.arange(n) / n)
    return GSData(
        p1=p1,
        lambda_c=np.fft.fft(c),
        lambda_s=np.fft.fft(q_diag * s),
        q_diag=q_diag,
    )


def gs_solve(data: GSData, v: np.ndarray) -> np.ndarray:
    """Apply the structured inverse: returns H^{-1} v.

    ``v`` may be a vector or an N x k matrix of right-hand-side columns; the
    batched form still performs four (batched) FFT calls in total, keeping
    the four-transforms-per-column budget.
    """
    v = np.asarray(v, dtype=float)
    n = data.n
    if v.shape[0] != n:
        raise ValidationError(f"length mismatch: solver {n}, vector {v.shape[0]}")
    v1 = (v + 1j * v[::-1]) / (2.0 * data.p1)
    v2 = skew_circulant_matvec(data.lambda_s, data.q_diag, v1)
    v3 = circulant_matvec(data.lambda_c, v2)
    return v3.real + v3.imag[::-1]


# ---------------------------------------------------------------------------
# BTTB operator via 2D circulant embedding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BttbOperator:
    """Block-Toeplitz-Toeplitz-block operator on N x N fields.

    The doubly Toeplitz matrix with entries scale * a_{|i-p|, |j-q|} embeds
    into a block-circulant-circulant-block matrix on an L x L torus
    (L fast length >= 2N), where it is diagonal in 2D Fourier space. The
    embedded kernel is real and even, so the spectrum is real and operator
    applications (pad, transform, multiply, crop) return real fields.
    """

    n: int
    length: int
    spectrum: np.ndarray

    def apply(self, u: np.ndarray) -> np.ndarray:
        return bttb_apply(self, u)


def bttb_build(coeffs: Coeffs2D | np.ndarray, n: int, scale: float = 1.0) -> BttbOperator:
    """Build the BTTB operator for a coefficient quadrant and grid size n."""
    quad = coeffs.quadrant if isinstance(coeffs, Coeffs2D) else np.asarray(coeffs, float)
    if quad.shape[0] < n or quad.shape[1] < n:
        raise ValidationError(
            f"coefficient quadrant {quad.shape} too small for grid size {n}"
        )
    length = _fft.next_fast_real_len(2 * n)
    offsets = np.minimum(np.arange(length), length - np.arange(length))
    inside = offsets <= n - 1
    kernel = np.zeros((length, length))
    kernel[np.ix_(inside, inside)] = quad[np.ix_(offsets[inside], offsets[inside])]
    # the embedded kernel is palindromic in both dimensions, so its transform
    # is real; dropping the round-off imaginary part keeps the apply exact
    spectrum = _fft.rfft2(kernel).real * scale
    return BttbOperator(n=n, length=length, spectrum=spectrum)


def bttb_apply(op: BttbOperator, u: np.ndarray) -> np.ndarray:
    """Apply the BTTB operator to an N x N field (two real 2D FFTs)."""
    u = np.asarray(u, dtype=float)
    n, length = op.n, op.length
    if u.shape != (n, n):
        raise ValidationError(f"field shape {u.shape} does not match grid ({n}, {n})")
    padded = np.zeros((length, length))
    padded[:n, :n] = u
    out = _fft.irfft2(_fft.rfft2(padded) * op.spectrum, s=(length, length))
    return out[:n, :n]


# ---------------------------------------------------------------------------
# tau (sine-transform algebra) preconditioners
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TauSpec:
    """Eigenvalues of a preconditioner diagonalized by the orthonormal
    DST-I: a 1D vector d_p for Toeplitz systems or a 2D array d_pq for the
    BTTB systems of the unfactored scheme. All eigenvalues are >= 1 by
    construction (1 + nonnegative symbol sample)."""

    eigenvalues: np.ndarray

    @property
    def ndim(self) -> int:
        return self.eigenvalues.ndim


def _sine_symbol(alpha: float, n: int) -> np.ndarray:
    theta = np.pi * np.arange(1, n + 1) / (n + 1)
    return (4.0 * np.sin(theta / 2.0) ** 2) ** (alpha / 2.0)


def tau_spec_1d(alpha: float, n: int, factor: float) -> TauSpec:
    """Eigenvalues d_p = 1 + factor * (4 sin^2(theta_p / 2))^{alpha/2} at the
    sine frequencies theta_p = p pi / (N+1); the sine-transform analogue of
    I + factor * (1D Riesz difference matrix)."""
    validate_alpha(alpha, allow_classical=True)
    if factor < 0:
        raise ValidationError(f"factor must be >= 0, got {factor}")
    return TauSpec(1.0 + factor * _sine_symbol(alpha, n))


def tau_spec_2d(alpha: float, n: int, factor: float) -> TauSpec:
    """2D analogue with d_pq = 1 + factor * (s_p + s_q)^{alpha/2} where
    s_p = 4 sin^2(theta_p / 2): matches the full 2D fractional-Laplacian
    symbol at the grid frequencies, diagonal in the tensor DST-I basis."""
    validate_alpha(alpha, allow_classical=True)
    if factor < 0:
        raise ValidationError(f"factor must be >= 0, got {factor}")
    theta = np.pi * np.arange(1, n + 1) / (n + 1)
    s = 4.0 * np.sin(theta / 2.0) ** 2
    return TauSpec(1.0 + factor * (s[:, None] + s[None, :]) ** (alpha / 2.0))


def dst1(v: np.ndarray, axis: int = -1) -> np.ndarray:
    """Orthonormal type-I discrete sine transform (self-inverse)."""
    return _fft.dst_type1_ortho(np.asarray(v, dtype=float), axes=(axis,))


def tau_apply(spec: TauSpec, v: np.ndarray) -> np.ndarray:
    """Apply the inverse preconditioner: sine transform, divide by the
    eigenvalues, transform back. For a 1D spec, ``v`` is a vector or a
    matrix of columns; for a 2D spec, ``v`` is an N x N field."""
    v = np.asarray(v, dtype=float)
    if spec.ndim == 1:
        coeff = _fft.dst_type1_ortho(v, axes=(0,))
        lam = spec.eigenvalues if v.ndim == 1 else spec.eigenvalues[:, None]
        return _fft.dst_type1_ortho(coeff / lam, axes=(0,))
    if v.shape != spec.eigenvalues.shape:
        raise ValidationError(
            f"field shape {v.shape} does not match spectrum {spec.eigenvalues.shape}"
        )
    coeff = _fft.dst_type1_ortho(v, axes=(0, 1))
    return _fft.dst_type1_ortho(coeff / spec.eigenvalues, axes=(0, 1))


# ---------------------------------------------------------------------------
# preconditioned conjugate gradients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PcgReport:
    iterations: int
    final_relative_residual: float
    converged: bool


def pcg(
    apply_a: Callable[[np.ndarray], np.ndarray],
    apply_m_inv: Callable[[np.ndarray], np.ndarray] | None,
    b: np.ndarray,
    tol: float = 1e-11,
    max_iter: int = 500,
    x0: np.ndarray | None = None,
) -> tuple[np.ndarray, PcgReport]:
    """Conjugate gradients on an SPD operator with optional preconditioner.

    Works on arrays of any shape (fields included); inner products are full
    contractions. Convergence is declared when the preconditioned residual
    norm sqrt(<r, M^{-1} r>) drops below tol times its value for the zero
    initial guess, i.e. tol * sqrt(<b, M^{-1} b>), making the criterion
    independent of the (possibly warm) starting point. A zero right-hand
    side returns zeros immediately with 0 iterations.
    """
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    b = np.asarray(b, dtype=float)
    if apply_m_inv is None:
        apply_m_inv = lambda r: r
    zb = apply_m_inv(b)
    scale = np.sqrt(float(np.vdot(b, zb).real))
    if scale == 0.0:
        return np.zeros_like(b), PcgReport(0, 0.0, True)

    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float, copy=True)
    r = b - apply_a(x) if x0 is not None else b.copy()
    z = apply_m_inv(r)
    rho = float(np.vdot(r, z).real)
    rel = np.sqrt(max(rho, 0.0)) / scale
    if rel <= tol:
        return x, PcgReport(0, rel, True)
    p = z.copy()
    for it in range(1, max_iter + 1):
        ap = apply_a(p)
        denom = float(np.vdot(p, ap).real)
        if denom <= 0.0:
            raise SolverError("conjugate gradients met a nonpositive curvature "
                              "direction; operator is not positive definite")
        step = rho / denom
        x += step * p
        r -= step * ap
        z = apply_m_inv(r)
        rho_next = float(np.vdot(r, z).real)
        rel = np.sqrt(max(rho_next, 0.0)) / scale
        if rel <= tol:
            return x, PcgReport(it, rel, True)
        p = z + (rho_next / rho) * p
        rho = rho_next
    return x, PcgReport(max_iter, rel, False)
