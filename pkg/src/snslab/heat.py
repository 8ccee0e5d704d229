"""Moving-singularity solutions of the forced heat equation, built in Fourier space.

For a Hoelder curve gamma the tempered distribution defined modewise by

    u_hat(xi, t) = integral_0^t exp(-(t-tau)|xi|^2) exp(-i gamma(tau).xi) dtau

solves d_t u - lap u = delta_{gamma(t)} from zero data and splits as

    u(x, t) = omega_0(x, t) + 1/(4 pi |x - gamma(t)|),

with the regular part omega_0 given by

    omega_0_hat = -exp(-t|xi|^2) E(t) / |xi|^2
                  + integral_0^t exp(-(t-tau)|xi|^2) (E(tau) - E(t)) dtau,

E(t) = exp(-i gamma(t).xi).  The modewise envelope |u_hat| <= (1 - e^{-t
|xi|^2})/|xi|^2 and the bound |omega_0_hat| <= 2/|xi|^2 hold exactly for the
quadrature rules used here (the piecewise phase-linear approximant has unit
modulus), so they are structural, not tuned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import Curve
from .duhamel import dirac_phase, kernel_time_integral, phase_duhamel
from .errors import ExponentOutOfRange, SupportIntersectsCurve
from .norms import lq_norm, pm_norm
from .spectral import FourierLattice, SpectralField, inverse_transform, inverse_values


@dataclass(frozen=True)
class HeatDecomposition:
    """u_hat at time t together with its regular/singular split.

    ``singular_center`` is gamma(t): the singular summand is the fundamental
    profile 1/(4 pi |x - gamma(t)|), whose lattice transform is
    exp(-i gamma(t).xi)/|xi|^2.
    """

    t: float
    u: SpectralField
    omega0: SpectralField
    singular_center: np.ndarray

    def singular_part_values(self) -> np.ndarray:
        lat = self.u.lattice
        return dirac_phase(lat, self.singular_center) * lat.inverse_power(2.0)


def heat_fourier_solution(
    curve: Curve, t: float, lat: FourierLattice, rtol: float = 1e-10
) -> SpectralField:
    """Duhamel integral of the moving Dirac source at time t (modewise)."""
    vals, _ = phase_duhamel(lat, curve, t, rtol=rtol)
    return SpectralField(lat, vals[None])


def omega0(curve: Curve, t: float, lat: FourierLattice, rtol: float = 1e-10) -> SpectralField:
    """Regular part: u_hat minus the shifted fundamental profile."""
    u, _ = phase_duhamel(lat, curve, t, rtol=rtol)
    phase_t = dirac_phase(lat, curve(t))
    correction = phase_t * kernel_time_integral(lat, t)
    singular = phase_t * lat.inverse_power(2.0)
    vals = (u - correction) + (correction - singular)
    # zero mode: the singular profile's mode is 0 by convention, so omega0
    # keeps the full Duhamel value t there (finite).
    return SpectralField(lat, vals[None])


def decompose(curve: Curve, t: float, lat: FourierLattice, rtol: float = 1e-10) -> HeatDecomposition:
    u = heat_fourier_solution(curve, t, lat, rtol=rtol)
    w0 = omega0(curve, t, lat, rtol=rtol)
    return HeatDecomposition(t, u, w0, np.asarray(curve(t), dtype=float))


def lq_decay_admissible(q: float, alpha: float) -> bool:
    """q range (3, 3/(2-2alpha)) of the L^q decay statement (alpha > 1/2)."""
    if alpha <= 0.5:
        return False
    hi = np.inf if alpha >= 1.0 else 3.0 / (2.0 - 2.0 * alpha)
    return 3.0 < q < hi


def lq_decay_fit(
    curve: Curve,
    q: float,
    t_samples,
    lat: FourierLattice,
    rtol: float = 1e-6,
) -> dict:
    """Least-squares slope of log ||omega_0(t)||_{L^q} against log t.

    The construction gives ||omega_0(t)||_q <= C t^{(3/q - 1)/2}, an upper
    envelope; the fitted slope must not exceed that exponent (within lattice
    tolerance).  ``q`` must lie in (3, 3/(2 - 2 alpha)).
    """
    if not lq_decay_admissible(q, curve.alpha):
        raise ExponentOutOfRange(f"q={q} outside (3, 3/(2-2alpha)) for alpha={curve.alpha}")
    ts = np.asarray(sorted(t_samples), dtype=float)
    if np.any(ts <= 0):
        raise ValueError("t samples must be positive")
    norms = []
    for t in ts:
        w0 = omega0(curve, t, lat, rtol=rtol)
        norms.append(lq_norm(inverse_transform(w0), q))
    norms = np.asarray(norms)
    slope = float(np.polyfit(np.log(ts), np.log(norms), 1)[0])
    return {
        "q": q,
        "slope": slope,
        "predicted": 0.5 * (3.0 / q - 1.0),
        "times": ts,
        "norms": norms,
    }


@dataclass(frozen=True)
class SpaceTimeBump:
    """Separable space-time test function phi(x, t) = bump(x) * bump_t(t)."""

    center: np.ndarray
    radius: float
    t_center: float
    t_radius: float

    def _time_profile(self, t):
        s = (np.asarray(t, dtype=float) - self.t_center) / self.t_radius
        q = s * s
        out = np.zeros(q.shape)
        inside = q < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - q[inside]))
        return out

    def _time_profile_dt(self, t):
        s = (np.asarray(t, dtype=float) - self.t_center) / self.t_radius
        q = s * s
        out = np.zeros(q.shape)
        inside = q < 1.0
        qi = q[inside]
        phi = np.exp(1.0 - 1.0 / (1.0 - qi))
        out[inside] = phi * (-2.0 * s[inside] / self.t_radius) / (1.0 - qi) ** 2
        return out

    def _space(self, x1, x2, x3):
        q = ((x1 - self.center[0]) ** 2 + (x2 - self.center[1]) ** 2
             + (x3 - self.center[2]) ** 2) / self.radius**2
        phi = np.zeros(np.broadcast_shapes(q.shape))
        inside = q < 1.0
        phi[inside] = np.exp(1.0 - 1.0 / (1.0 - q[inside]))
        return phi, q, inside

    def space_value(self, lat: FourierLattice) -> np.ndarray:
        x1, x2, x3 = lat.grid()
        phi, _, _ = self._space(*np.broadcast_arrays(x1, x2, x3))
        return phi

    def space_laplacian(self, lat: FourierLattice) -> np.ndarray:
        """Analytic laplacian of the radial bump on the grid."""
        x1, x2, x3 = np.broadcast_arrays(*lat.grid())
        phi, q, inside = self._space(x1, x2, x3)
        out = np.zeros_like(phi)
        qi = q[inside]
        one = 1.0 - qi
        # for phi = exp(1 - 1/(1-q)), q = r^2/R^2:
        # lap phi = phi * [ 4q/(R^2) * ( 1/one^4 - 2/one^3 ) + (6/R^2) * 1/one^2 ] ... derived below
        # d phi/dq = -phi / one^2 ; d2 phi/dq2 = phi (1/one^4 - 2/one^3)
        # lap phi = 4 q / R^2 * d2phi/dq2 + 6 / R^2 * dphi/dq
        phi_i = phi[inside]
        d1 = -phi_i / one**2
        d2 = phi_i * (1.0 / one**4 - 2.0 / one**3)
        out[inside] = (4.0 * qi * d2 + 6.0 * d1) / self.radius**2
        return out


def heat_residual_check(
    curve: Curve,
    bump: SpaceTimeBump,
    lat: FourierLattice,
    time_nodes: int = 96,
    rtol: float = 1e-10,
    min_distance: float | None = None,
) -> dict:
    """Discrete space-time pairing |integral u (phi_t + lap phi)| off the curve.

    A small value certifies that u solves the heat equation distributionally
    away from the singular curve.  The support of phi must stay clear of the
    curve; violation raises SupportIntersectsCurve.
    """
    t_lo = max(bump.t_center - bump.t_radius, 1e-12)
    t_hi = bump.t_center + bump.t_radius
    ts = np.linspace(t_lo, t_hi, time_nodes)
    gap = min(
        float(np.linalg.norm(curve(t) - bump.center)) - bump.radius for t in ts
    )
    floor = 0.05 * bump.radius if min_distance is None else min_distance
    if gap < floor:
        raise SupportIntersectsCurve(
            f"bump support within {gap:.3g} of the curve (needs >= {floor:.3g})"
        )
    space_phi = bump.space_value(lat)
    space_lap = bump.space_laplacian(lat)
    cell = lat.cell**3
    pair = np.empty(ts.size)
    scale = np.empty(ts.size)
    for i, t in enumerate(ts):
        vals, _ = phase_duhamel(lat, curve, t, rtol=rtol)
        u_phys = inverse_values(lat, vals).real
        integrand = u_phys * (bump._time_profile_dt(t) * space_phi
                              + bump._time_profile(t) * space_lap)
        pair[i] = integrand.sum() * cell
        scale[i] = (np.abs(u_phys) * (np.abs(bump._time_profile_dt(t)) * space_phi
                                      + bump._time_profile(t) * np.abs(space_lap))).sum() * cell
    dt = ts[1] - ts[0]
    residual = abs(np.trapezoid(pair, dx=dt))
    reference = float(np.trapezoid(scale, dx=dt))
    return {
        "residual": residual,
        "scale": reference,
        "relative": residual / reference if reference > 0 else 0.0,
        "times": ts,
    }


def envelope_defect(u: SpectralField, t: float) -> float:
    """max over modes of |u_hat| - (1-e^{-t|xi|^2})/|xi|^2 (<= 0 when the bound holds)."""
    lat = u.lattice
    env = kernel_time_integral(lat, t)
    return float((np.abs(u.values[0]) - env).max())


def pm2_bound_defect(w0: SpectralField) -> float:
    """max over nonzero modes of |omega0_hat| - 2/|xi|^2."""
    lat = w0.lattice
    bound = 2.0 * lat.inverse_power(2.0)
    diff = np.abs(w0.values[0]) - bound
    mask = np.ones(lat.shape, dtype=bool)
    mask[0, 0, 0] = False
    return float(diff[mask].max())


def weak_time_continuity(
    curve: Curve, t: float, deltas, lat: FourierLattice, rtol: float = 1e-8
) -> np.ndarray:
    """|<u(t+d) - u(t), psi>| for a fixed Schwartz-class psi, per delta d.

    psi is a unit Gaussian; the pairing is the lattice integral of
    u_hat psi_hat over frequency space.
    """
    psi_hat = np.exp(-lat.xi_norm2 / 4.0) * np.pi**1.5
    meas = lat.frequency_spacing**3 / (2.0 * np.pi) ** 3
    base, _ = phase_duhamel(lat, curve, t, rtol=rtol)
    out = []
    for d in deltas:
        stepped, _ = phase_duhamel(lat, curve, t + d, rtol=rtol)
        out.append(abs(((stepped - base) * psi_hat).sum() * meas))
    return np.asarray(out)


def pm_norm_of(u: SpectralField, a: float) -> float:
    return pm_norm(u, a).value
