"""Nevanlinna-matrix evaluation and entire-function growth estimation.

The matrix is computed as the partial product of rank-one-perturbed
identity factors built from (Q_n(0), P_n(0)), seeded with [[0,-1],[1,0]]
so that the columns reproduce the classical partial sums (B_N(0) = -1,
C_N(0) = 1, det = 1).  Orders, types, convergence exponents and densities
are then read off three independent routes: power-series coefficients,
max-modulus sampling, and zero counting.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .classify import Classification, Regime, classify
from .params import JacobiSequence
from .recurrence import ExponentFit, PolySolution, power_law_fit

__all__ = [
    "NevanlinnaPartial",
    "GrowthEstimate",
    "nevanlinna_evaluate",
    "evaluate_entries",
    "evaluate_entries_real",
    "scan_b_zeros",
    "b_log_max_modulus",
    "log_majorant_product",
    "majorant_bound_gap",
    "leading_coefficient_logs",
    "order_type_from_coefficients",
    "order_type_from_max_modulus",
    "convergence_exponent_from_zeros",
    "upper_density",
]


@dataclass(frozen=True)
class NevanlinnaPartial:
    """Entries of the N-step partial product at one point z.

    True entry values are entry * exp(log_scale); the rescaling keeps the
    stored entries inside binary64 range at any radius.
    """

    N: int
    z: complex
    A: complex
    B: complex
    C: complex
    D: complex
    log_scale: float

    def determinant_residual(self) -> float:
        """|A D - B C - 1| after undoing the rescaling."""
        det = (self.A * self.D - self.B * self.C) * math.exp(2.0 * self.log_scale)
        return abs(det - 1.0)

    def log_spectral_norm(self) -> float:
        # normalize by the largest entry so the 2x2 norm formula cannot
        # overflow even at the rescaling threshold
        m = max(abs(self.A), abs(self.B), abs(self.C), abs(self.D))
        a, b, c, d = self.A / m, self.B / m, self.C / m, self.D / m
        s = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2
        det = a * d - b * c
        disc = max(s * s - 4.0 * abs(det) ** 2, 0.0)
        top = 0.5 * (s + math.sqrt(disc))
        return math.log(m) + 0.5 * math.log(top) + self.log_scale


@dataclass(frozen=True)
class GrowthEstimate:
    order: float
    type_at_order: float
    convergence_exponent: float
    upper_density: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        assert self.order >= 0 and self.type_at_order >= 0

    def to_json(self) -> dict:
        def _finite(x):
            return x if math.isfinite(x) else None

        return {
            "order": self.order,
            "type_at_order": self.type_at_order,
            "convergence_exponent": _finite(self.convergence_exponent),
            "upper_density": _finite(self.upper_density),
            "diagnostics": self.diagnostics,
        }


def _check_N(sol: PolySolution, N: Optional[int]) -> int:
    if N is None:
        N = sol.N + 1
    if not 1 <= N <= sol.N + 1:
        raise ValueError(f"need 1 <= N <= {sol.N + 1}")
    return N


def evaluate_entries(sol: PolySolution, zs: np.ndarray, N: Optional[int] = None):
    """(A, B, C, D, log_scale) arrays of the N-step product at complex zs."""
    N = _check_N(sol, N)
    zs = np.ascontiguousarray(np.asarray(zs, dtype=np.complex128))
    return _kernels.transfer_complex(sol.P, sol.Q, zs, N)


def evaluate_entries_real(sol: PolySolution, xs: np.ndarray, N: Optional[int] = None):
    """Real-axis specialization (all entries stay real there)."""
    N = _check_N(sol, N)
    xs = np.ascontiguousarray(np.asarray(xs, dtype=np.float64))
    return _kernels.transfer_real(sol.P, sol.Q, xs, N)


def nevanlinna_evaluate(
    sol: PolySolution, z: complex, N: Optional[int] = None
) -> NevanlinnaPartial:
    """The partial product M_N(z) = prod_{n<N} (I + z R_n) * [[0,-1],[1,0]]."""
    N = _check_N(sol, N)
    A, B, C, D, ls = evaluate_entries(sol, np.array([z], dtype=np.complex128), N)
    return NevanlinnaPartial(
        N=N,
        z=complex(z),
        A=complex(A[0]),
        B=complex(B[0]),
        C=complex(C[0]),
        D=complex(D[0]),
        log_scale=float(ls[0]),
    )


# ---------------------------------------------------------------------------
# zeros of B on the real axis
# ---------------------------------------------------------------------------

def _scan_grid(r: float, grid: int) -> np.ndarray:
    r0 = min(1.0, 0.1 * r)
    decades = max(1, int(math.ceil(math.log10(r / r0))))
    per_side = max(grid // 2, 4096 * decades)
    pos = np.geomspace(r0, r, per_side)
    core = np.linspace(-r0, r0, 129)
    return np.unique(np.concatenate([-pos[::-1], core, pos]))


def _bisect_signs(sol, N, lo, hi, slo, tol):
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(200):
        if np.max(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        _, Bm, _, _, _ = evaluate_entries_real(sol, mid, N)
        sm = np.where(Bm < 0, -1.0, 1.0)
        same = sm == slo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _suspicious_runs(logmag: np.ndarray, change: np.ndarray) -> list:
    """Indices where |B| dips far below its local envelope with no sign
    change nearby: the signature of a zero pair hiding inside one cell.

    A clean double zero at distance <= one cell from a grid point sits
    about 2 log(half-width) below the rolling max, while the midpoint
    between two resolved zeros is either shallower or adjacent to their
    sign changes; half = 32 with a 6.0 threshold separates the two.
    """
    n = logmag.shape[0]
    half = 32
    if n <= 2 * half + 2:
        return []
    interior = np.arange(half, n - half)
    env = logmag[interior - half].copy()
    for off in range(-half + 1, half + 1):
        np.maximum(env, logmag[interior + off], out=env)
    deep = env - logmag[interior] > 6.0
    near_change = np.zeros(n, dtype=bool)
    for off in range(-3, 3):
        cells = np.arange(max(0, -off), min(n - 1, n - 1 - off))
        near_change[cells + off] |= change[cells]
    flagged = interior[deep & ~near_change[interior]]
    runs = []
    for i in flagged:
        if runs and i - runs[-1][-1] <= 4:
            runs[-1].append(i)
        else:
            runs.append([i])
    return runs


_MAX_REFINE_DEPTH = 8


def scan_b_zeros(
    sol: PolySolution, N: int, r: float, grid: int = 8192
) -> np.ndarray:
    """Real zeros of B_N in [-r, r] by sign scan plus bisection.

    The scan grid is geometric per decade (4096 points each) with a linear
    core through the origin.  Regions where |B| dips deep below its local
    envelope without a sign change risk hiding a close pair of zeros; they
    are re-scanned recursively at increasing resolution and reported with
    a warning (a dip persisting at the depth limit is a tangency the sign
    scan cannot represent).
    """
    if grid < 64:
        raise ValueError("need a grid of at least 64 points")
    if r <= 0:
        raise ValueError("r must be positive")
    brackets = []
    refined = 0
    unresolved = 0
    segments = [(_scan_grid(float(r), grid), 0)]
    while segments:
        xs, depth = segments.pop()
        _, B, _, _, ls = evaluate_entries_real(sol, xs, N)
        sg = np.where(B < 0, -1.0, 1.0)
        logmag = np.log(np.abs(B) + 5e-324) + ls
        change = sg[:-1] * sg[1:] < 0
        idx = np.nonzero(change)[0]
        if idx.size:
            brackets.append((xs[idx], xs[idx + 1], sg[idx]))
        for run in _suspicious_runs(logmag, change):
            if depth >= _MAX_REFINE_DEPTH:
                unresolved += 1
                continue
            refined += 1
            lo_i, hi_i = run[0] - 1, run[-1] + 1
            segments.append((np.linspace(xs[lo_i], xs[hi_i], 513), depth + 1))
    if refined:
        warnings.warn(
            f"{refined} deep |B| dips without a sign change; refined them "
            f"recursively" + (f" ({unresolved} unresolved)" if unresolved else ""),
            RuntimeWarning,
        )
    if not brackets:
        return np.empty(0)
    lo = np.concatenate([b[0] for b in brackets])
    hi = np.concatenate([b[1] for b in brackets])
    slo = np.concatenate([b[2] for b in brackets])
    tol = 1e-9 * max(1.0, float(r))
    zeros = _bisect_signs(sol, N, lo, hi, slo, tol)
    zeros = np.sort(zeros)
    return zeros[(zeros >= -r) & (zeros <= r)]


def b_log_max_modulus(
    sol: PolySolution, N: int, rays: int = 16
) -> Callable[[float], float]:
    """Evaluator r -> log max_theta |B_N(r e^{i theta})| over a ray grid."""
    if rays < 16:
        raise ValueError("need at least 16 directions")
    theta = np.arange(rays) * 2.0 * np.pi / rays

    def evaluator(r: float) -> float:
        zs = r * np.exp(1j * theta)
        _, B, _, _, ls = evaluate_entries(sol, zs, N)
        # the real rays can hit a zero of B exactly; other rays dominate
        return float(np.max(np.log(np.abs(B) + 5e-324) + ls))

    return evaluator


# ---------------------------------------------------------------------------
# majorant product
# ---------------------------------------------------------------------------

def _case2_constants(seq: JacobiSequence) -> tuple[float, float, Classification]:
    desc = seq.descriptor
    if desc is None:
        raise ValueError("the majorant needs a descriptor-backed sequence")
    cls = classify(desc)
    if cls.case_label != "T1(ii)" or cls.regime is not Regime.LCC:
        raise ValueError(
            "majorant is defined for dominant off-diagonal lcc families only"
        )
    return float(desc.beta1), float(cls.a_constant / desc.x0), cls


def log_majorant_product(
    seq: JacobiSequence, r: float, terms: Optional[int] = None
) -> float:
    """log F(r) = sum_n log(1 + r * (a/x0) n^{-beta1}).

    The factor weights use only the limiting constant a/x0 of the
    normalized solutions; the sum length is chosen so the dropped tail is
    negligible against log F itself.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    beta1, g, _ = _case2_constants(seq)
    if r == 0.0:
        return 0.0
    if terms is None:
        terms = min(max(8192, int(50.0 * (r * g) ** (1.0 / beta1))), 5_000_000)
    n = np.arange(1, terms + 1, dtype=np.float64)
    return float(np.sum(np.log1p(r * g * n ** (-beta1))))


def majorant_bound_gap(
    sol: PolySolution, seq: JacobiSequence, zs: np.ndarray, N: Optional[int] = None
) -> np.ndarray:
    """log ||M_N(z)|| - log F(|z|) over the sample; bounded above when the
    majorant dominates up to a constant."""
    zs = np.asarray(zs, dtype=np.complex128)
    gaps = np.empty(zs.shape, dtype=np.float64)
    for i, z in enumerate(zs):
        part = nevanlinna_evaluate(sol, complex(z), N)
        gaps[i] = part.log_spectral_norm() - log_majorant_product(seq, abs(z))
    return gaps


# ---------------------------------------------------------------------------
# power-series coefficients of the diagonal minor series
# ---------------------------------------------------------------------------

def leading_coefficient_logs(seq: JacobiSequence, N: Optional[int] = None) -> np.ndarray:
    """log of the leading polynomial coefficients, log c_n = -sum_{k=1}^{n-1} log rho_k.

    Computed in log space, so no underflow at any scale; c_0 = c_1 = 1.
    """
    if N is None:
        N = len(seq)
    if not 2 <= N <= len(seq):
        raise ValueError(f"need 2 <= N <= {len(seq)}")
    out = np.zeros(N)
    out[2:] = -np.cumsum(np.log(seq.rho[1 : N - 1]))
    return out


def order_type_from_coefficients(log_coeffs: np.ndarray) -> tuple[float, float]:
    """Order and type of sum c_n z^n from the decay of log |c_n|.

    The order comes from fitting -log|c_n| to a n log n + b n + c log n + d
    over the last dyadic block (order = 1/a); the raw limsup formula
    n log n / -log|c_n| converges too slowly to be usable at desk scale and
    is kept as a diagnostic only.  The type then uses the rearranged
    limsup tau = 1/(e rho) * limsup n |c_n|^(rho/n) on the same block.
    """
    logc = np.asarray(log_coeffs, dtype=np.float64)
    M = logc.shape[0]
    if M < 64:
        raise ValueError("need at least 64 coefficients")
    w = np.arange(M // 2, M)
    y = -logc[w]
    if not (np.all(np.isfinite(y)) and y[-1] > y[0] and np.all(y > 0)):
        raise ValueError("coefficients do not decay over the tail window")
    n = w.astype(np.float64)
    basis = np.vstack([n * np.log(n), n, np.log(n), np.ones_like(n)]).T
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    if coef[0] <= 0:
        raise ValueError("coefficient decay is slower than any positive order")
    order = 1.0 / float(coef[0])
    tau = float(np.max(n * np.exp(order * logc[w] / n)) / (math.e * order))
    return order, tau


def pointwise_order_estimates(log_coeffs: np.ndarray) -> np.ndarray:
    """The raw limsup sequence n log n / (-log |c_n|) (diagnostic)."""
    logc = np.asarray(log_coeffs, dtype=np.float64)
    n = np.arange(logc.shape[0], dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(logc < 0, n * np.log(n) / (-logc), np.nan)


# ---------------------------------------------------------------------------
# max-modulus and zero-based estimates
# ---------------------------------------------------------------------------

def order_type_from_max_modulus(
    evaluator: Callable[[float], float], r_grid: np.ndarray
) -> tuple[float, float]:
    """Order from the top-half slope of log log M(r) vs log r; type from
    the mean of log M(r) / r^order there."""
    r_grid = np.asarray(r_grid, dtype=np.float64)
    if r_grid.size < 8 or np.any(np.diff(r_grid) <= 0):
        raise ValueError("need a geometric r grid with at least 8 increasing points")
    logM = np.array([float(evaluator(r)) for r in r_grid])
    if np.any(np.diff(logM) <= 0) or np.any(logM <= 0):
        raise ValueError(
            "max-modulus values are not increasing: evaluation breakdown"
        )
    half = r_grid.size // 2
    x = np.log(r_grid[half:])
    y = np.log(logM[half:])
    order = float(np.linalg.lstsq(
        np.vstack([x, np.ones_like(x)]).T, y, rcond=None
    )[0][0])
    type_at_order = float(np.mean(logM[half:] / r_grid[half:] ** order))
    return order, type_at_order


def convergence_exponent_from_zeros(zeros: np.ndarray) -> ExponentFit:
    """Slope of log n against log |zero_n| over the top half of the moduli.

    For an increasing zero sequence this estimates the convergence
    exponent (the infimum of alpha with sum |zero_n|^-alpha finite).
    """
    mods = np.asarray(zeros, dtype=np.float64)
    if mods.size < 32:
        raise ValueError("need at least 32 zeros")
    if np.any(mods <= 0) or np.any(np.diff(mods) < 0):
        raise ValueError("zeros must be positive moduli sorted increasingly")
    k = np.arange(1, mods.size + 1, dtype=np.float64)
    half = mods.size // 2
    return power_law_fit(mods[half:], k[half:], (half + 1, mods.size))


def upper_density(zeros: np.ndarray, beta: float) -> float:
    """Finite-sample proxy of limsup n(r)/r^{1/beta}: max of k/|zero_k|^{1/beta}
    over the top half of the moduli."""
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    mods = np.asarray(zeros, dtype=np.float64)
    if np.any(mods <= 0) or np.any(np.diff(mods) < 0):
        raise ValueError("zeros must be positive moduli sorted increasingly")
    k = np.arange(1, mods.size + 1, dtype=np.float64)
    half = mods.size // 2
    return float(np.max(k[half:] / mods[half:] ** (1.0 / beta)))
