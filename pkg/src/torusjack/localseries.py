"""Frobenius-type series for L near the face x_{N-1} = x_N.

In the chart x(u, z) = (x_1, ..., x_{N-2}, u - z, u + z) the solution has
the form

    L1(x) = ((u^2 - z^2) prod x_j)^{-gamma kappa} rho(z^{-kappa}, z^{kappa})
            sum_n alpha_n(x(u,0)) z^n,

valid for |z| < delta0 = min_j |u - x_j|, Im(z/u) > 0, and normalized by
alpha_0(x^(0)) = I at the base chart x^(0) = (1, w, ..., w^{N-3}, w^{-3/2},
w^{-3/2}), w = e^{2 pi i / N}.  alpha_0 is continued along chart paths by
its own first-order system; the higher coefficients follow from the
z-recurrence

    alpha_{2n}   = (kappa / 2n) S_{2n},
    alpha_{2n-1} = rho(kappa/(2n-1-2kappa), kappa/(2n-1+2kappa)) S_{2n-1},
    S_n = sum_{i<n} alpha_{n-1-i} B_i.

Branches: z^{+-kappa} uses the principal logarithm (the charts used here
keep z away from the negative real axis); the scalar prefactor is continued
continuously along the same path as alpha_0, which is tracked exactly in
the (log-radius, lifted-angle) parametrization below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .odeflow import DEFAULT_ATOL, DEFAULT_RTOL, SingularPoint
from .symgroup import IrrepData


class HalfIntegerKappa(ValueError):
    pass


class OutsideRadius(ValueError):
    pass


EVAL_RADIUS_FRACTION = 0.25   # default |z| cap as a fraction of delta0
DEFAULT_TERMS = 24


def _check_kappa(kappa: float) -> None:
    k2 = 2 * kappa
    if abs(k2 - round(k2)) < 1e-12 and round(k2) % 2 != 0:
        raise HalfIntegerKappa(f"kappa={kappa} in Z + 1/2 is excluded")


def rho(irrep: IrrepData, z1: complex, z2: complex) -> np.ndarray:
    """diag(z1 I_m, z2 I_{n-m}) in the sigma-block decomposition."""
    d = np.ones(irrep.n_tau, dtype=complex)
    d[:irrep.m_tau] = z1
    d[irrep.m_tau:] = z2
    return np.diag(d)


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FaceChart:
    """Base data x(u, 0) = (x_1, ..., x_{N-2}, u, u) of a series chart.

    The N-1 points (x_1, ..., x_{N-2}, u) are stored as lifted angles and
    log-radii: point_k = exp(logr_k + i phi_k).  Torus charts have all
    log-radii 0; the chart of the global base point x0 has u strictly
    inside the disc.
    """

    irrep: IrrepData
    kappa: float
    phis: tuple[float, ...]
    logrs: tuple[float, ...]

    def __post_init__(self):
        _check_kappa(self.kappa)
        if len(self.phis) != self.irrep.N - 1 or len(self.logrs) != len(self.phis):
            raise ValueError("chart needs N-1 points (x_1..x_{N-2}, u)")

    @property
    def points(self) -> np.ndarray:
        return np.exp(np.asarray(self.logrs) + 1j * np.asarray(self.phis))

    @property
    def xs(self) -> np.ndarray:
        return self.points[:-1]

    @property
    def u(self) -> complex:
        return complex(self.points[-1])

    @property
    def delta0(self) -> float:
        return float(np.min(np.abs(self.u - self.xs)))

    @property
    def log_w(self) -> complex:
        """Continuously-tracked log(u^2 prod x_j) for the prefactor branch."""
        lr = np.asarray(self.logrs)
        ph = np.asarray(self.phis)
        return complex(2 * (lr[-1] + 1j * ph[-1]) + np.sum(lr[:-1] + 1j * ph[:-1]))

    @staticmethod
    def on_torus(irrep: IrrepData, kappa: float,
                 phis: tuple[float, ...]) -> "FaceChart":
        return FaceChart(irrep, kappa, tuple(phis), (0.0,) * len(phis))


def base_chart(irrep: IrrepData, kappa: float) -> FaceChart:
    """x^(0): angles 2 pi j / N for j = 0..N-3 and u = omega^{-3/2} lifted
    to angle 2 pi - 3 pi / N (increasing window)."""
    n = irrep.N
    phis = [2 * np.pi * j / n for j in range(n - 2)]
    phis.append(2 * np.pi - 3 * np.pi / n)
    return FaceChart.on_torus(irrep, kappa, tuple(phis))


def x0_chart(irrep: IrrepData, kappa: float) -> tuple[FaceChart, complex]:
    """The chart and z value of the global base point
    x0 = (1, omega, ..., omega^{N-1}):
    u = (omega^{N-2} + omega^{N-1})/2 = cos(pi/N) e^{i (2N-3) pi / N} and
    z = (omega^{N-1} - omega^{N-2})/2."""
    n = irrep.N
    w = np.exp(2j * np.pi / n)
    phis = [2 * np.pi * j / n for j in range(n - 2)]
    phis.append((2 * n - 3) * np.pi / n)
    logrs = [0.0] * (n - 2) + [float(np.log(np.cos(np.pi / n)))]
    chart = FaceChart(irrep, kappa, tuple(phis), tuple(logrs))
    z = (w ** (n - 1) - w ** (n - 2)) / 2
    assert abs(chart.u - (w ** (n - 1) + w ** (n - 2)) / 2) < 1e-12
    return chart, complex(z)


# ---------------------------------------------------------------------------
# beta / B coefficient streams
# ---------------------------------------------------------------------------

def beta_stream(chart: FaceChart, nmax: int) -> list[np.ndarray]:
    """beta_n(x(u,0)) = sum_{j<=N-2} tau((j,N)) / (u - x_j)^{n+1}."""
    ir = chart.irrep
    u, xs = chart.u, chart.xs
    taus = [ir.transposition(j, ir.N) for j in range(1, ir.N - 1)]
    out = []
    for n in range(nmax + 1):
        b = np.zeros((ir.n_tau, ir.n_tau), dtype=complex)
        for j, t in enumerate(taus):
            b += t / (u - xs[j]) ** (n + 1)
        out.append(b)
    return out


def b_stream(chart: FaceChart, nmax: int) -> list[np.ndarray]:
    """B_n = (-1)^n beta_n - sigma beta_n sigma; sigma-parity
    sigma B_n sigma = (-1)^{n+1} B_n."""
    ir = chart.irrep
    sg = ir.sigma
    return [((-1) ** n) * b - sg @ b @ sg
            for n, b in enumerate(beta_stream(chart, nmax))]


# ---------------------------------------------------------------------------
# alpha_0 continuation
# ---------------------------------------------------------------------------

def alpha0_solve(chart: FaceChart, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Continue alpha_0 from the base chart x^(0) to ``chart`` along the
    straight line in (lifted angle, log-radius) coordinates, by the system

        d alpha_0 = kappa alpha_0 { (beta_0 + sigma beta_0 sigma) du
            + sum_j [ sum_{i != j} tau((i,j))/(x_j - x_i)
                      - (tau((j,N-1)) + tau((j,N)))/(u - x_j) ] dx_j }.
    """
    ir = chart.irrep
    kappa = chart.kappa
    base = base_chart(ir, kappa)
    p0 = np.asarray(base.logrs) + 1j * np.asarray(base.phis)
    p1 = np.asarray(chart.logrs) + 1j * np.asarray(chart.phis)
    vel = p1 - p0
    n = ir.N

    # collision check along the path
    for t in np.linspace(0, 1, 65):
        pts = np.exp((1 - t) * p0 + t * p1)
        m = len(pts)
        gap = min(abs(pts[i] - pts[j]) for i in range(m) for j in range(i + 1, m))
        if gap < 1e-9:
            raise SingularPoint("chart path hits a collision")

    if np.max(np.abs(vel)) < 1e-15:
        return np.eye(ir.n_tau, dtype=complex)

    taus_jN = [ir.transposition(j, n) for j in range(1, n - 1)]
    taus_jN1 = [ir.transposition(j, n - 1) for j in range(1, n - 1)]
    taus_ij = {(i, j): ir.transposition(i, j)
               for i in range(1, n - 1) for j in range(1, n - 1) if i != j}
    sg = ir.sigma

    def deriv(t, y):
        a0 = y.reshape(ir.n_tau, ir.n_tau)
        pts = np.exp((1 - t) * p0 + t * p1)
        dpts = pts * vel  # d/dt exp(linear) = exp * vel
        xs, u = pts[:-1], pts[-1]
        f = np.zeros((ir.n_tau, ir.n_tau), dtype=complex)
        b0 = np.zeros_like(f)
        for j in range(n - 2):
            b0 += taus_jN[j] / (u - xs[j])
        f += (b0 + sg @ b0 @ sg) * dpts[-1]
        for j in range(n - 2):
            aj = np.zeros_like(f)
            for i in range(n - 2):
                if i != j:
                    aj += taus_ij[(i + 1, j + 1)] / (xs[j] - xs[i])
            aj -= (taus_jN1[j] + taus_jN[j]) / (u - xs[j])
            f += aj * dpts[j]
        return (kappa * (a0 @ f)).reshape(-1)

    y0 = np.eye(ir.n_tau, dtype=complex).reshape(-1)
    sol = solve_ivp(deriv, (0.0, 1.0), y0, method="DOP853",
                    rtol=rtol, atol=DEFAULT_ATOL)
    if not sol.success:
        raise RuntimeError(f"alpha0 continuation failed: {sol.message}")
    return sol.y[:, -1].reshape(ir.n_tau, ir.n_tau)


def det_alpha0_closed_form(chart: FaceChart) -> complex:
    """|det alpha_0| from the closed form with exponent lam = tr(sigma) =
    n_tau - 2 m_tau:
    prod_{i<j} ((x_i-x_j)/(x_i0-x_j0))^{lam kappa}
    prod_i ((x_i-u)/(x_i0-u0))^{2 lam kappa}  (absolute values)."""
    ir = chart.irrep
    lam = ir.n_tau - 2 * ir.m_tau
    k = chart.kappa
    b = base_chart(ir, k)
    out = 1.0
    for i in range(ir.N - 2):
        for j in range(i + 1, ir.N - 2):
            out *= (abs(chart.xs[i] - chart.xs[j])
                    / abs(b.xs[i] - b.xs[j])) ** (lam * k)
        out *= (abs(chart.xs[i] - chart.u) / abs(b.xs[i] - b.u)) ** (2 * lam * k)
    return out


# ---------------------------------------------------------------------------
# the series
# ---------------------------------------------------------------------------

@dataclass
class SeriesExpansion:
    chart: FaceChart
    alphas: list[np.ndarray]

    @property
    def kappa(self) -> float:
        return self.chart.kappa

    @property
    def truncation(self) -> int:
        return len(self.alphas) - 1

    def coefficient_norms(self) -> list[float]:
        return [float(np.linalg.norm(a, 2)) for a in self.alphas]

    def parity_residual(self) -> float:
        """max_n || sigma alpha_n sigma - (-1)^n alpha_n ||; structurally 0."""
        sg = self.chart.irrep.sigma
        return max(float(np.abs(sg @ a @ sg - ((-1) ** n) * a).max())
                   for n, a in enumerate(self.alphas))

    def tail_bound(self, z_abs: float) -> float:
        """Bound on the dropped tail sum_{n > M} ||alpha_n|| |z|^n using the
        coefficient-bound recurrence (t_n)."""
        t = coefficient_bounds(self.chart, self.truncation + 400,
                               float(np.linalg.norm(self.alphas[0], 2)))
        q = z_abs / self.chart.delta0
        if q >= 1:
            return np.inf
        return float(sum(t[n] * z_abs ** n
                         for n in range(self.truncation + 1, len(t))))


def coefficient_bounds(chart: FaceChart, nmax: int,
                       alpha0_norm: float = 1.0) -> list[float]:
    """The bound sequence t_n with t_0 = ||alpha_0||,
    t_1 = 2 lam/(1-2k0) t_0 / delta0,
    t_{2n} = (2 lam + 2n - 1 - 2 k0)/(2n) t_{2n-1}/delta0,
    t_{2n+1} = (2 lam + 2n)/(2n + 1 - 2 k0) t_{2n}/delta0,
    where k0 = |kappa| and lam = (N-2) k0."""
    k0 = abs(chart.kappa)
    lam = (chart.irrep.N - 2) * k0
    d0 = chart.delta0
    t = [alpha0_norm]
    if nmax >= 1:
        t.append(2 * lam / (1 - 2 * k0) * alpha0_norm / d0)
    for n in range(2, nmax + 1):
        if n % 2 == 0:
            m = n // 2
            t.append((2 * lam + 2 * m - 1 - 2 * k0) / (2 * m) * t[-1] / d0)
        else:
            m = (n - 1) // 2
            t.append((2 * lam + 2 * m) / (2 * m + 1 - 2 * k0) * t[-1] / d0)
    return t


def closed_form_bounds(chart: FaceChart, nmax: int,
                       alpha0_norm: float = 1.0) -> list[float]:
    """The closed-form Pochhammer bounds: for even index 2n
    ||alpha_0|| (lam)_n (lam + 1/2 - k0)_n / (n! (1/2 - k0)_n) delta0^{-2n},
    and for odd index 2n+1
    ||alpha_0|| (lam)_{n+1} (lam + 1/2 - k0)_n / (n! (1/2 - k0)_{n+1})
    delta0^{-2n-1}."""
    from scipy.special import poch
    k0 = abs(chart.kappa)
    lam = (chart.irrep.N - 2) * k0
    d0 = chart.delta0
    from math import factorial
    out = []
    for idx in range(nmax + 1):
        n = idx // 2
        if idx % 2 == 0:
            v = poch(lam, n) * poch(lam + 0.5 - k0, n) \
                / (factorial(n) * poch(0.5 - k0, n)) * d0 ** (-2 * n)
        else:
            v = poch(lam, n + 1) * poch(lam + 0.5 - k0, n) \
                / (factorial(n) * poch(0.5 - k0, n + 1)) * d0 ** (-2 * n - 1)
        out.append(alpha0_norm * float(v))
    return out


def alpha_recurrence(chart: FaceChart, alpha0: np.ndarray,
                     terms: int = DEFAULT_TERMS) -> SeriesExpansion:
    """alpha_1..alpha_M from the z-recurrence; exact sigma-parity is
    enforced structurally (the complementary blocks are zeroed, which is
    what the block form of the recurrence produces up to roundoff)."""
    _check_kappa(chart.kappa)
    ir = chart.irrep
    k = chart.kappa
    m = ir.m_tau
    bs = b_stream(chart, terms)
    alphas = [alpha0.astype(complex)]
    for n in range(1, terms + 1):
        s = np.zeros_like(alpha0, dtype=complex)
        for i in range(n):
            s += alphas[n - 1 - i] @ bs[i]
        if n % 2 == 0:
            a = (k / n) * s
            a[:m, m:] = 0.0
            a[m:, :m] = 0.0
        else:
            a = rho(ir, k / (n - 2 * k), k / (n + 2 * k)) @ s
            a[:m, :m] = 0.0
            a[m:, m:] = 0.0
        alphas.append(a)
    return SeriesExpansion(chart, alphas)


def expand(chart: FaceChart, terms: int = DEFAULT_TERMS,
           rtol: float = DEFAULT_RTOL) -> SeriesExpansion:
    return alpha_recurrence(chart, alpha0_solve(chart, rtol=rtol), terms)


def eval_L1(series: SeriesExpansion, z: complex,
            max_radius_fraction: float = EVAL_RADIUS_FRACTION,
            tail_tol: float | None = None) -> np.ndarray:
    """L1 at x(u, z).  Refuses |z| beyond the validated fraction of delta0;
    pass a larger fraction explicitly (with a tail tolerance) to evaluate
    closer to the convergence boundary."""
    chart = series.chart
    ir = chart.irrep
    k = chart.kappa
    if abs(z) > max_radius_fraction * chart.delta0:
        raise OutsideRadius(
            f"|z|={abs(z):.3g} beyond {max_radius_fraction} * delta0")
    if tail_tol is not None and series.tail_bound(abs(z)) > tail_tol:
        raise OutsideRadius("truncation tail bound exceeds tolerance")
    u = chart.u
    total = np.zeros((ir.n_tau, ir.n_tau), dtype=complex)
    zp = 1.0
    for a in series.alphas:
        total += a * zp
        zp *= z
    gamma = float(ir.gamma)
    logw = chart.log_w + np.log1p(-z * z / (u * u))
    pref = np.exp(-gamma * k * logw)
    # branch of log z anchored to the tracked angle of u: z = i u s with
    # s = z/(iu) away from the cut (s > 0 for all charts used here)
    log_u = chart.logrs[-1] + 1j * chart.phis[-1]
    logz = np.log(z / (1j * u)) + log_u + 1j * np.pi / 2
    zk = np.exp(k * logz)
    return pref * rho(ir, 1.0 / zk, zk) @ total


def matching_constant(irrep: IrrepData, kappa: float,
                      tail_tol: float = 1e-10,
                      rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """L1(x0): the series evaluated at the chart of the global base point.
    The truncation order is grown until the tail bound meets ``tail_tol``."""
    chart, z = x0_chart(irrep, kappa)
    a0 = alpha0_solve(chart, rtol=rtol)
    terms = DEFAULT_TERMS
    while True:
        series = alpha_recurrence(chart, a0, terms)
        if series.tail_bound(abs(z)) <= tail_tol or terms > 400:
            break
        terms *= 2
    return eval_L1(series, z, max_radius_fraction=0.95)
