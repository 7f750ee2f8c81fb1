"""Numerical continuation of the matrix systems for L and L* along paths in
the regular part of the torus, extension to all components, monodromy
factors, and the independent determinant oracle.

L solves  dL/dt = kappa L sum_i A_i(p(t)) p_i'(t)  with
A_i(x) = sum_{j != i} tau((i,j))/(x_i - x_j) - (gamma/x_i) I  and L(x0) = I,
x0 = (1, omega, ..., omega^{N-1}).  Paths are straight lines in lifted angle
coordinates; the fundamental chamber C0 (cyclically increasing angles) is
convex in those coordinates, so segments between points of C0 stay inside.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .symgroup import (IrrepData, Perm, compose, cycle_perm, identity_perm,
                       inverse_perm)


class SingularPoint(ValueError):
    pass


class PathLeavesChamber(ValueError):
    pass


SINGULAR_FLOOR = 1e-12
DEFAULT_RTOL = 1e-11
DEFAULT_ATOL = 1e-12


# ---------------------------------------------------------------------------
# points and paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusPoint:
    """A point of the torus in angle coordinates."""

    theta: tuple[float, ...]

    @property
    def x(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.theta))

    @property
    def N(self) -> int:
        return len(self.theta)

    def min_gap(self) -> float:
        x = self.x
        n = len(x)
        return min(abs(x[i] - x[j]) for i in range(n) for j in range(i + 1, n))

    def require_regular(self, floor: float = SINGULAR_FLOOR) -> None:
        if self.min_gap() < floor:
            raise SingularPoint(f"point within {floor} of the singular set")

    def in_c0(self) -> bool:
        """Membership in the fundamental chamber: angles cyclically
        increasing in index order."""
        th = np.asarray(self.theta)
        gaps = np.mod(np.diff(np.concatenate([th, th[:1]])), 2 * np.pi)
        return bool(np.all(gaps > 0) and abs(gaps.sum() - 2 * np.pi) < 1e-9)

    def lifted_c0_angles(self) -> np.ndarray:
        """Angles lifted so theta_1 < theta_2 < ... < theta_N < theta_1+2pi."""
        if not self.in_c0():
            raise PathLeavesChamber("point not in the fundamental chamber")
        th = np.asarray(self.theta, dtype=float)
        out = [th[0]]
        for d in np.mod(np.diff(th), 2 * np.pi):
            out.append(out[-1] + d)
        return np.array(out)


def base_point(n: int) -> TorusPoint:
    """x0 = (1, omega, ..., omega^{N-1})."""
    return TorusPoint(tuple(2 * np.pi * j / n for j in range(n)))


@dataclass(frozen=True)
class Path:
    """Piecewise-linear path in lifted angle coordinates.

    ``waypoints`` is a (k, N) array of lifted angles; the path is the
    concatenation of straight segments between consecutive rows, mapped to
    the torus via x_j = exp(i g_j(t)), t in [0, 1] overall.
    """

    waypoints: tuple[tuple[float, ...], ...]

    @staticmethod
    def within_c0(start: TorusPoint, end: TorusPoint) -> "Path":
        """The default straight-line path g_j(t) = (1-t) start_j + t end_j
        in lifted angles; stays in C0 by convexity."""
        a = start.lifted_c0_angles()
        b = end.lifted_c0_angles()
        return Path((tuple(a), tuple(b)))

    @staticmethod
    def through(points: list[TorusPoint]) -> "Path":
        return Path(tuple(tuple(p.lifted_c0_angles()) for p in points))

    def angles(self, t: float) -> np.ndarray:
        w = np.asarray(self.waypoints)
        k = len(w) - 1
        s = min(max(t, 0.0), 1.0) * k
        seg = min(int(s), k - 1)
        u = s - seg
        return (1 - u) * w[seg] + u * w[seg + 1]

    def velocity(self, t: float) -> np.ndarray:
        w = np.asarray(self.waypoints)
        k = len(w) - 1
        seg = min(int(min(max(t, 0.0), 1.0 - 1e-15) * k), k - 1)
        return (w[seg + 1] - w[seg]) * k

    def min_gap(self, samples: int = 64) -> float:
        gaps = []
        for t in np.linspace(0, 1, samples):
            x = np.exp(1j * self.angles(t))
            n = len(x)
            gaps.append(min(abs(x[i] - x[j])
                            for i in range(n) for j in range(i + 1, n)))
        return min(gaps)


@dataclass
class FlowResult:
    value: np.ndarray
    error_estimate: float
    step_count: int
    log_det_increment: complex | None = None


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------

def rhs_L(irrep: IrrepData, kappa: float, x: np.ndarray,
          floor: float = SINGULAR_FLOOR) -> list[np.ndarray]:
    """The coefficient matrices A_i(x) of the L system."""
    n = irrep.N
    gamma = float(irrep.gamma)
    eye = np.eye(irrep.n_tau)
    out = []
    for i in range(1, n + 1):
        a = -(gamma / x[i - 1]) * eye
        for j in range(1, n + 1):
            if j == i:
                continue
            d = x[i - 1] - x[j - 1]
            if abs(d) < floor:
                raise SingularPoint("A_i evaluated at a singular point")
            a = a + irrep.transposition(i, j) / d
        out.append(a)
    return out


def _pair_data(irrep: IrrepData):
    n = irrep.N
    return [(i, j, irrep.transposition(i, j))
            for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def _flow(irrep: IrrepData, kappa: float, path: Path, init: np.ndarray,
          side: str, rtol: float, atol: float,
          with_det: bool = False) -> FlowResult:
    """Integrate dL/dt = kappa L F(t) (side='right') or
    dL*/dt = kappa F*(t) L* (side='left') along the path."""
    n = irrep.N
    dim = irrep.n_tau
    gamma = float(irrep.gamma)
    pairs = _pair_data(irrep)
    lam = float(irrep.lambda_trace)

    def deriv(t, y):
        g = path.angles(t)
        gp = path.velocity(t)
        x = np.exp(1j * g)
        xp = 1j * gp * x
        if side == "right":
            f = np.zeros((dim, dim), dtype=complex)
            for i, j, tmat in pairs:
                f += ((xp[j - 1] - xp[i - 1]) / (x[j - 1] - x[i - 1])) * tmat
            f -= gamma * np.sum(xp / x) * np.eye(dim)
            mat = y[:dim * dim].reshape(dim, dim)
            dmat = kappa * mat @ f
        else:
            f = np.zeros((dim, dim), dtype=complex)
            for i, j, tmat in pairs:
                d = x[i - 1] - x[j - 1]
                # A*_i contribution x_j/x_i /(x_i-x_j) plus A*_j contribution
                f += (xp[i - 1] * x[j - 1] / (x[i - 1] * d)
                      - xp[j - 1] * x[i - 1] / (x[j - 1] * d)) * tmat
            f += gamma * np.sum(xp / x) * np.eye(dim)
            mat = y[:dim * dim].reshape(dim, dim)
            dmat = kappa * f @ mat
        out = dmat.reshape(-1)
        if with_det:
            # Jacobi identity: d(log det)/dt = kappa tr F(t)
            trf = lam * sum((xp[j - 1] - xp[i - 1]) / (x[j - 1] - x[i - 1])
                            for i, j, _ in pairs)
            trf -= gamma * dim * np.sum(xp / x)
            out = np.concatenate([out, [kappa * trf]])
        return out

    y0 = init.astype(complex).reshape(-1)
    if with_det:
        y0 = np.concatenate([y0, [0.0 + 0.0j]])  # log det relative to start
    sol = solve_ivp(deriv, (0.0, 1.0), y0, method="DOP853",
                    rtol=rtol, atol=atol, dense_output=False)
    if not sol.success:
        raise RuntimeError(f"flow failed: {sol.message}")
    yf = sol.y[:, -1]
    value = yf[:dim * dim].reshape(dim, dim)
    if not np.all(np.isfinite(value)):
        raise FloatingPointError("flow produced non-finite values")
    res = FlowResult(value, rtol * max(1.0, float(np.abs(value).max())),
                     len(sol.t))
    if with_det:
        res.log_det_increment = complex(yf[-1])
    return res


def integrate_L(irrep: IrrepData, kappa: float, path: Path,
                init: np.ndarray | None = None, rtol: float = DEFAULT_RTOL,
                atol: float = DEFAULT_ATOL, with_det: bool = False) -> FlowResult:
    if init is None:
        init = np.eye(irrep.n_tau)
    return _flow(irrep, kappa, path, init, "right", rtol, atol, with_det)


def integrate_Lstar(irrep: IrrepData, kappa: float, path: Path,
                    init: np.ndarray | None = None,
                    rtol: float = DEFAULT_RTOL,
                    atol: float = DEFAULT_ATOL) -> FlowResult:
    if init is None:
        init = np.eye(irrep.n_tau)
    return _flow(irrep, kappa, path, init, "left", rtol, atol)


# ---------------------------------------------------------------------------
# extension to the whole regular torus, monodromy
# ---------------------------------------------------------------------------

def chamber_permutation(x: TorusPoint) -> Perm:
    """The unique w_x with w_x(1) = 1 and x w_x^{-1} in C0."""
    th = np.asarray(x.theta)
    rel = np.mod(th - th[0], 2 * np.pi)
    order = [0] + sorted(range(1, len(th)), key=lambda j: rel[j])
    w_inv = tuple(o + 1 for o in order)  # w_x^{-1}(k) = order[k-1] + 1
    return inverse_perm(w_inv)


def permute_point(x: TorusPoint, w: Perm) -> TorusPoint:
    """(xw)_i = x_{w(i)}."""
    return TorusPoint(tuple(x.theta[w[i] - 1] for i in range(len(w))))


def nu_factor(irrep: IrrepData, w: Perm) -> np.ndarray:
    """nu(w) = upsilon^{1 - w(1)}."""
    return irrep.upsilon_power(1 - w[0])


def monodromy_factor(irrep: IrrepData, w: Perm, x: TorusPoint) -> np.ndarray:
    """M(w, x) = nu(w_x w), the power of upsilon with
    L(xw) = M(w, x) L(x) tau(w)."""
    return nu_factor(irrep, compose(chamber_permutation(x), w))


class FlowCache:
    """Memo for L values keyed by (tau, kappa, grid id, point key); safe for
    concurrent insert-or-read."""

    def __init__(self) -> None:
        self._data: dict = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key, compute):
        with self._lock:
            if key in self._data:
                return self._data[key]
        value = compute()
        with self._lock:
            self._data.setdefault(key, value)
        return value


_default_cache = FlowCache()


def extend_L(irrep: IrrepData, kappa: float, x: TorusPoint,
             rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """L(x) = L(x w_x^{-1}) tau(w_x) on any component of the regular torus."""
    x.require_regular()
    w = chamber_permutation(x)
    y = permute_point(x, inverse_perm(w))
    path = Path.within_c0(base_point(irrep.N), y)
    val = integrate_L(irrep, kappa, path, rtol=rtol).value
    if w == identity_perm(irrep.N):
        return val
    return val @ irrep.rep(w)


def batch_extend_L(irrep: IrrepData, kappa: float, points: list[TorusPoint],
                   rtol: float = DEFAULT_RTOL,
                   threads: int = 1) -> list[np.ndarray]:
    """L at many points, chaining flows between nearby chamber
    representatives (C0 is convex in lifted angles, so segment paths are
    valid).  Much faster than independent flows for dense grids.  With
    threads > 1 the sorted chain is split into that many independent
    sub-chains."""
    n = irrep.N
    reduced = []
    for x in points:
        w = chamber_permutation(x)
        y = permute_point(x, inverse_perm(w))
        reduced.append((tuple(np.round(y.lifted_c0_angles(), 12)), w))

    unique = sorted({r[0] for r in reduced})
    values: dict[tuple, np.ndarray] = {}
    x0 = base_point(n)

    def run_chain(chain: list[tuple]) -> None:
        current = None
        current_val = np.eye(irrep.n_tau)
        for ang in chain:
            tgt = TorusPoint(tuple(np.mod(np.array(ang) + np.pi,
                                          2 * np.pi) - np.pi))
            if current is None:
                path = Path.within_c0(x0, tgt)
                current_val = integrate_L(irrep, kappa, path,
                                          rtol=rtol).value
            else:
                path = Path((current, ang))
                current_val = integrate_L(irrep, kappa, path,
                                          init=current_val, rtol=rtol).value
            current = ang
            values[ang] = current_val

    if threads > 1 and len(unique) > threads:
        from concurrent.futures import ThreadPoolExecutor
        size = (len(unique) + threads - 1) // threads
        chunks = [unique[k:k + size] for k in range(0, len(unique), size)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_chain, chunks))
    else:
        run_chain(unique)

    out = []
    for key, w in reduced:
        val = values[key]
        if w != identity_perm(n):
            val = val @ irrep.rep(w)
        out.append(val)
    return out


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def _angle_coefficient(irrep: IrrepData, kappa: float, theta: np.ndarray,
                       i: int) -> np.ndarray:
    """C_i(theta) with dL/dtheta_i = L C_i: kappa (i x_i) A_i(x)."""
    x = np.exp(1j * theta)
    a = rhs_L(irrep, kappa, x)[i - 1]
    return kappa * 1j * x[i - 1] * a


def frobenius_fd_residual(irrep: IrrepData, kappa: float, x: TorusPoint,
                          i: int, j: int, h: float) -> float:
    """||FD_i C_j - FD_j C_i - [C_j, C_i]|| with centered differences of
    step h; the exact mixed-partial identity makes this O(h^2).  This
    probes the integrability of the system independently of any flow."""
    th = np.asarray(x.theta, dtype=float)

    def c(k, th_):
        return _angle_coefficient(irrep, kappa, th_, k)

    def fd(k, m):
        # d C_m / d theta_k, centered
        e = np.zeros_like(th)
        e[k - 1] = h
        return (c(m, th + e) - c(m, th - e)) / (2 * h)

    ci, cj = c(i, th), c(j, th)
    res = fd(i, j) - fd(j, i) - (cj @ ci - ci @ cj)
    return float(np.abs(res).max())


def mixed_partial_residual(irrep: IrrepData, kappa: float, x: TorusPoint,
                           i: int, j: int, h: float,
                           rtol: float = 1e-12) -> float:
    """||FD_i(L C_j) - FD_j(L C_i)|| at x with centered differences.

    Both expressions approximate the equal mixed partials of L (using the
    system dL/dtheta_k = L C_k), so the exact value is zero and the
    finite-difference remainder decays as O(h^2).  L at the four stencil
    points comes from independent flows, making this a two-route check of
    the integrability of the system together with the flow solution.
    """
    th = np.asarray(x.theta, dtype=float)

    def lval(th_):
        return extend_L(irrep, kappa, TorusPoint(tuple(th_)), rtol=rtol)

    def term(k, m):
        # FD_k of theta -> L(theta) C_m(theta)
        e = np.zeros_like(th)
        e[k - 1] = h
        plus = lval(th + e) @ _angle_coefficient(irrep, kappa, th + e, m)
        minus = lval(th - e) @ _angle_coefficient(irrep, kappa, th - e, m)
        return (plus - minus) / (2 * h)

    return float(np.abs(term(i, j) - term(j, i)).max())

def det_closed_form(irrep: IrrepData, kappa: float, x: TorusPoint) -> complex:
    """|det L(x)| from the closed form prod (4 sin^2((th_i-th_j)/2))^{kappa
    Lambda / 2} with Lambda = tr tau((1,2)), normalized against x0."""
    lam = float(irrep.lambda_trace)
    th = np.asarray(x.theta)
    th0 = np.asarray(base_point(irrep.N).theta)

    def prod_form(t):
        p = 1.0
        n = len(t)
        for i in range(n):
            for j in range(i + 1, n):
                p *= (4 * np.sin((t[i] - t[j]) / 2) ** 2) ** (kappa * lam / 2)
        return p

    return prod_form(th) / prod_form(th0)


def global_bound_check(irrep: IrrepData, kappa: float,
                       samples: list[TorusPoint],
                       rtol: float = DEFAULT_RTOL) -> dict:
    """Record ||L(x)|| prod |x_i - x_j|^{|kappa|} per sample along with the
    exponential path-integral bound (the -log sin construction)."""
    report = {"ratios": [], "bounds": [], "max_ratio": 0.0}
    n = irrep.N
    for x in samples:
        val = extend_L(irrep, kappa, x, rtol=rtol)
        xx = x.x
        prod = 1.0
        for i in range(n):
            for j in range(i + 1, n):
                prod *= abs(xx[i] - xx[j]) ** abs(kappa)
        ratio = float(np.linalg.norm(val, 2)) * prod
        # path bound: exp(|kappa| sum_{i<j} (-log sin(dtheta/2) - log sin((j-i)pi/N) + 4 pi))
        # times the product recovers an upper bound for the ratio
        y = permute_point(x, inverse_perm(chamber_permutation(x)))
        th = y.lifted_c0_angles()
        s = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                s += (-np.log(np.sin((th[j] - th[i]) / 2))
                      - np.log(np.sin((j - i) * np.pi / n)) + 4 * np.pi)
        bound = float(np.exp(abs(kappa) * s)) * prod
        report["ratios"].append(ratio)
        report["bounds"].append(bound)
    report["max_ratio"] = max(report["ratios"], default=0.0)
    return report
