"""Modewise time quadrature of heat-semigroup Duhamel integrals.

Two integrand families share the engine:

* moving-Dirac phases exp(-i gamma(tau).xi), integrated by treating the
  phase gamma(tau).xi as linear on each subinterval and integrating its
  product with exp(-(t-tau)|xi|^2) exactly -- exact for the stiff factor at
  any step, exact overall for constant/linear/tabulated curves, second
  order in the phase for Hoelder power curves;
* tabulated trajectories (tensor channels in the solver), interpolated
  piecewise-linearly between time nodes with the same exact exponential
  weights.

All formulas keep every exponential argument non-positive, so the rules are
uniformly stable for arbitrarily large |xi|^2 t.
"""

from __future__ import annotations

import numpy as np

from .curves import Curve
from .errors import QuadratureNotConverged
from .spectral import FourierLattice

MAX_SUBINTERVALS = 2**20


def hermitian_symmetrize(values: np.ndarray) -> np.ndarray:
    """Project onto Hermitian-symmetric fields: v <- (v + conj v(-xi))/2.

    Only the Nyquist planes are affected for fields synthesized from real
    data; frequency-synthesized moving-phase objects carry genuinely complex
    content there that an even real lattice cannot represent, and this is
    its canonical representable stand-in.
    """
    axes = tuple(range(values.ndim - 3, values.ndim))
    flipped = values[..., ::-1, ::-1, ::-1]
    flipped = np.roll(flipped, 1, axis=axes)
    return 0.5 * (values + np.conj(flipped))


def dirac_phase(lat: FourierLattice, point: np.ndarray) -> np.ndarray:
    """Transform exp(-i point.xi) of the Dirac mass at ``point`` (separable).

    Hermitian-symmetrized on the Nyquist planes so that products with
    Hermitian fields remain transforms of real fields.
    """
    p = np.asarray(point, dtype=float).reshape(3)
    e1 = np.exp(-1j * p[0] * lat.xi_1d)
    e2 = np.exp(-1j * p[1] * lat.xi_1d)
    e3 = np.exp(-1j * p[2] * lat.xi_1d)
    nyq = lat.k_int == -(lat.points_per_axis // 2)
    for e in (e1, e2, e3):
        e[nyq] = e[nyq].real
    return e1[:, None, None] * e2[None, :, None] * e3[None, None, :]


def kernel_time_integral(lat: FourierLattice, t: float) -> np.ndarray:
    """integral_0^t exp(-(t-tau)|xi|^2) dtau = (1 - exp(-t|xi|^2))/|xi|^2.

    The zero mode carries its finite limit t.
    """
    k2 = lat.xi_norm2_safe
    out = -np.expm1(-t * k2) / k2
    out[0, 0, 0] = t
    return out


def _phi1(w: np.ndarray) -> np.ndarray:
    """(exp(w) - 1)/w for complex w with |w| small (series, |w| < 0.02)."""
    return 1.0 + w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0 + w * (1.0 / 120.0 + w / 720.0))))


def _broadcast_phase(lat: FourierLattice, dg: np.ndarray):
    """exp(-i dg.xi) and dg.xi as lazily broadcast arrays.

    Curves moving along a coordinate axis keep these one-dimensional, which
    removes the per-subinterval 3D complex exponential from the hot loop.
    """
    axes = (lat.xi1, lat.xi2, lat.xi3)
    live = [a for a in range(3) if dg[a] != 0.0]
    if not live:
        return np.ones(1), np.zeros(1)
    mh = dg[live[0]] * axes[live[0]]
    for a in live[1:]:
        mh = mh + dg[a] * axes[a]
    return np.exp(-1j * mh), mh


def _phase_cell(h, lam_h, decay, emh, mh, small_floor=0.02):
    """Exact integral of e^{-(t-tau)lam} e^{-i theta(tau)} over one cell, with
    theta linear (increment m h) and discounted to the cell's right edge."""
    w = lam_h - 1j * mh
    with np.errstate(divide="ignore", invalid="ignore"):
        cell = h * (emh - decay) / w
    cell = np.asarray(np.broadcast_to(cell, decay.shape)).copy()
    small = np.broadcast_to(np.abs(w) < small_floor, decay.shape)
    if np.any(small):
        w_small = np.broadcast_to(w, decay.shape)[small]
        cell[small] = h * decay[small] * _phi1(w_small)
    return cell


def _phase_level(lat: FourierLattice, curve: Curve, t: float, n: int) -> np.ndarray:
    """One quadrature level with n uniform subintervals."""
    taus = np.linspace(0.0, t, n + 1)
    g = curve(taus)  # (n+1, 3)
    h = t / n
    lam_h = h * lat.xi_norm2
    decay = np.exp(-lam_h)
    eth0, th0 = _broadcast_phase(lat, g[0])
    eth = np.asarray(np.broadcast_to(eth0, lat.shape)).copy().astype(np.complex128)
    acc = np.zeros(lat.shape, dtype=np.complex128)
    for j in range(n):
        dg = g[j + 1] - g[j]
        emh, mh = _broadcast_phase(lat, dg)
        cell = _phase_cell(h, lam_h, decay, emh, mh)
        acc = acc * decay + eth * cell
        eth = eth * emh
    return acc


def phase_duhamel(
    lat: FourierLattice,
    curve: Curve,
    t: float,
    rtol: float = 1e-10,
    max_subintervals: int = MAX_SUBINTERVALS,
    n0: int = 8,
) -> tuple[np.ndarray, int]:
    """integral_0^t exp(-(t-tau)|xi|^2) exp(-i gamma(tau).xi) dtau, modewise.

    Subintervals are doubled until two consecutive levels agree to ``rtol``
    relative in the PM^2 norm.  Returns (values, subintervals_used).

    Raises
    ------
    QuadratureNotConverged
        If agreement is not reached within ``max_subintervals``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return np.zeros(lat.shape, dtype=np.complex128), 0
    k2 = lat.xi_norm2
    prev = _phase_level(lat, curve, t, n0)
    n = n0
    while n <= max_subintervals // 2:
        n *= 2
        cur = _phase_level(lat, curve, t, n)
        diff = (k2 * np.abs(cur - prev)).max()
        scale = (k2 * np.abs(cur)).max()
        if diff <= rtol * max(scale, 1e-300):
            return hermitian_symmetrize(cur), n
        prev = cur
    raise QuadratureNotConverged(
        f"phase quadrature at t={t} not converged with {n} subintervals (rtol={rtol:.1e})"
    )


def linear_weights(lam: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exponential weights for one step of a piecewise-linear tabulated integrand.

    For f linear on [t_k, t_k + h],

        integral exp(-(t_k + h - tau) lam) f(tau) dtau = w0 f(t_k) + w1 f(t_k + h)

    and an accumulated integral S over [0, t_k] advances as S*decay + w0 f0 + w1 f1
    with decay = exp(-h lam).  Returns (decay, w0, w1); series branches keep the
    weights accurate for h*lam below 0.1.
    """
    z = h * lam
    decay = np.exp(-z)
    with np.errstate(divide="ignore", invalid="ignore"):
        w0 = (1.0 - decay * (1.0 + z)) / (z * z)
        w1 = (z - 1.0 + decay) / (z * z)
    # series: w0/h = sum (-z)^n/(n!(n+2)),  w1/h = sum (-z)^n/(n!(n+1)(n+2))
    s0 = np.zeros_like(z)
    s1 = np.zeros_like(z)
    term = np.ones_like(z)
    for nn in range(9):
        s0 += term / (nn + 2)
        s1 += term / ((nn + 1) * (nn + 2))
        term *= -z / (nn + 1)
    small = z < 0.1
    w0 = np.where(small, s0, w0)
    w1 = np.where(small, s1, w1)
    return decay, h * w0, h * w1
