"""Hoelder-continuous paths gamma: [0, T] -> R^3 carrying the singularity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(3)
    return a


@dataclass(frozen=True)
class Curve:
    """A path gamma(t) with a Hoelder exponent alpha and constant C(T).

    ``kind`` is one of ``constant``, ``linear``, ``power`` or ``tabulated``:

    * constant:  gamma(t) = point
    * linear:    gamma(t) = velocity * t
    * power:     gamma(t) = amplitude * t**alpha * direction
    * tabulated: piecewise-linear interpolation of (times, points) samples

    For the closed-form kinds the Hoelder constant on [0, T] is analytic;
    for tabulated data it is certified by dense sampling, not assumed.
    """

    kind: str
    alpha: float = 1.0
    point: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    amplitude: float = 1.0
    direction: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    times: np.ndarray | None = None
    points: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "linear", "power", "tabulated"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        object.__setattr__(self, "point", _as_point(self.point))
        object.__setattr__(self, "velocity", _as_point(self.velocity))
        object.__setattr__(self, "direction", _as_point(self.direction))
        if self.kind == "tabulated":
            t = np.asarray(self.times, dtype=float)
            p = np.asarray(self.points, dtype=float)
            if t.ndim != 1 or p.shape != (t.size, 3) or t.size < 2:
                raise ValueError("tabulated curve needs times (n,) and points (n, 3)")
            if np.any(np.diff(t) <= 0) or t[0] != 0.0:
                raise ValueError("tabulated times must start at 0 and increase")
            object.__setattr__(self, "times", t)
            object.__setattr__(self, "points", p)

    def __call__(self, t) -> np.ndarray:
        """gamma(t); accepts a scalar or an array, returns (..., 3)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.broadcast_to(self.point, t.shape + (3,)).copy()
        if self.kind == "linear":
            return t[..., None] * self.velocity
        if self.kind == "power":
            return (self.amplitude * np.abs(t) ** self.alpha)[..., None] * self.direction
        out = np.empty(t.shape + (3,))
        for a in range(3):
            out[..., a] = np.interp(t, self.times, self.points[:, a])
        return out

    def hoelder_constant(self, horizon: float, samples: int = 256) -> float:
        """Smallest C with |gamma(t)-gamma(s)| <= C |t-s|^alpha on [0, horizon].

        Analytic for the closed-form kinds; certified by dense pair sampling
        for tabulated curves (a lower bound that converges from below).
        """
        if self.kind == "constant":
            return 0.0
        if self.kind == "linear":
            speed = float(np.linalg.norm(self.velocity))
            return speed * horizon ** (1.0 - self.alpha)
        if self.kind == "power":
            # |t^a - s^a| <= |t-s|^a for a in (0,1], with equality as s -> 0
            return abs(self.amplitude)
        ts = np.linspace(0.0, min(horizon, self.times[-1]), samples)
        ts = np.union1d(ts, self.times[self.times <= horizon])
        g = self(ts)
        diff = np.linalg.norm(g[:, None, :] - g[None, :, :], axis=-1)
        dt = np.abs(ts[:, None] - ts[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dt > 0, diff / dt**self.alpha, 0.0)
        return float(ratio.max())


def constant_curve(point=(0.0, 0.0, 0.0)) -> Curve:
    return Curve(kind="constant", point=np.asarray(point, dtype=float))


def linear_curve(velocity=(1.0, 0.0, 0.0)) -> Curve:
    return Curve(kind="linear", velocity=np.asarray(velocity, dtype=float))


def power_curve(alpha: float, amplitude: float = 1.0, direction=(1.0, 0.0, 0.0)) -> Curve:
    return Curve(kind="power", alpha=alpha, amplitude=amplitude,
                 direction=np.asarray(direction, dtype=float))
