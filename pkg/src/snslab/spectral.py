"""Discrete Fourier representation of fields on a periodic box standing in for R^3.

Conventions, fixed once for the whole package:

* forward transform with the continuum normalization

      v_hat(xi) = integral f(x) exp(-i xi.x) dx  ~  h^3 * sum_j f(x_j) exp(-i xi.x_j)

  so analytic transforms (Gaussian pairs, 1/(4 pi |x|) <-> 1/|xi|^2) can be
  compared without bookkeeping factors;
* grid x_j = j*h - L/2 with h = L/N, frequencies xi_k = (2 pi / L) k for
  integer k in [-N/2, N/2) per axis;
* d/dx_a corresponds to multiplication by +i xi_a;
* the Dirac mass at a point g has transform exp(-i g.xi).

The zero mode is present and flagged; every |xi|^{-s} multiplier sets it to 0.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .errors import LatticeMismatch, NonHermitianInput

_MAGIC = b"SNSFIELD" + b"\x00" * 8  # 16-byte magic
_VERSION = 1


@dataclass(frozen=True)
class FourierLattice:
    """Truncated periodic Fourier grid approximating R^3.

    Parameters
    ----------
    points_per_axis : int
        N, positive and even.
    box_length : float
        L, in length units. Fields should decay below ~1e-6 at the box
        boundary for the lattice to be a faithful stand-in for R^3; use
        :func:`boundary_decay` to check. The Landau velocity (|x|^-1 tail)
        never satisfies this -- the synthesis in :mod:`snslab.landau`
        tapers it and reports the compromise instead of hiding it.
    """

    points_per_axis: int
    box_length: float

    def __post_init__(self) -> None:
        N, L = self.points_per_axis, float(self.box_length)
        if N <= 0 or N % 2 != 0:
            raise ValueError("points_per_axis must be a positive even integer")
        if L <= 0:
            raise ValueError("box_length must be positive")
        object.__setattr__(self, "box_length", L)
        k = np.rint(np.fft.fftfreq(N) * N).astype(np.int64)
        xi = (2.0 * np.pi / L) * k
        object.__setattr__(self, "k_int", k)
        object.__setattr__(self, "xi_1d", xi)
        x = (np.arange(N) * (L / N)) - L / 2
        object.__setattr__(self, "x_1d", x)
        object.__setattr__(self, "cell", L / N)
        object.__setattr__(self, "frequency_spacing", 2.0 * np.pi / L)
        object.__setattr__(self, "cutoff", np.pi * N / L)
        x1 = xi[:, None, None]
        x2 = xi[None, :, None]
        x3 = xi[None, None, :]
        k2 = x1 * x1 + x2 * x2 + x3 * x3
        object.__setattr__(self, "xi1", x1)
        object.__setattr__(self, "xi2", x2)
        object.__setattr__(self, "xi3", x3)
        object.__setattr__(self, "xi_norm2", k2)
        object.__setattr__(self, "xi_norm2_safe", np.where(k2 == 0.0, 1.0, k2))
        object.__setattr__(self, "xi_norm", np.sqrt(k2))
        # symmetric frequency: the self-conjugate Nyquist plane has no
        # negative partner on the lattice, so operator multipliers built
        # from xi components treat it as 0 (keeps real fields real)
        xs = xi.copy()
        xs[k == -(N // 2)] = 0.0
        object.__setattr__(self, "xi_1d_s", xs)
        object.__setattr__(self, "xi1_s", xs[:, None, None])
        object.__setattr__(self, "xi2_s", xs[None, :, None])
        object.__setattr__(self, "xi3_s", xs[None, None, :])
        k2s_sym = (
            xs[:, None, None] ** 2 + xs[None, :, None] ** 2 + xs[None, None, :] ** 2
        )
        object.__setattr__(self, "xi_norm2_sym", k2s_sym)
        object.__setattr__(
            self, "xi_norm2_sym_safe", np.where(k2s_sym == 0.0, 1.0, k2s_sym)
        )
        # strict 2/3 rule: |k| < N/3 keeps the quadratic products alias-free
        # (at 3 | N, modes at exactly N/3 would receive wrapped energy)
        band = (N - 1) // 3
        ka = np.abs(k)
        mask = (
            (ka[:, None, None] <= band)
            & (ka[None, :, None] <= band)
            & (ka[None, None, :] <= band)
        )
        object.__setattr__(self, "band_limit", band)
        object.__setattr__(self, "dealias_mask", mask)
        sgn = np.where(ka % 2 == 0, 1.0, -1.0)
        object.__setattr__(
            self,
            "_center_phase",
            sgn[:, None, None] * sgn[None, :, None] * sgn[None, None, :],
        )
        for name in ("k_int", "xi_1d", "x_1d", "xi_norm2", "xi_norm2_safe",
                     "xi_norm", "dealias_mask", "_center_phase", "xi_1d_s",
                     "xi_norm2_sym", "xi_norm2_sym_safe"):
            getattr(self, name).setflags(write=False)

    @property
    def shape(self) -> tuple[int, int, int]:
        N = self.points_per_axis
        return (N, N, N)

    def grid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable physical coordinates (x1, x2, x3)."""
        x = self.x_1d
        return x[:, None, None], x[None, :, None], x[None, None, :]

    def inverse_power(self, s: float) -> np.ndarray:
        """|xi|^{-s} with the zero mode set to 0 by convention."""
        out = self.xi_norm2_safe ** (-s / 2.0)
        out[0, 0, 0] = 0.0
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FourierLattice)
            and self.points_per_axis == other.points_per_axis
            and self.box_length == other.box_length
        )

    def __hash__(self) -> int:
        return hash((self.points_per_axis, self.box_length))


def _as_components(values: np.ndarray, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim == 3:
        arr = arr[None]
    if arr.ndim != 4:
        raise ValueError("field values must have shape (ncomp, N, N, N)")
    if arr.shape[0] not in (1, 3, 9):
        raise ValueError("components must be 1, 3 or 9")
    return arr


class SpectralField:
    """Complex amplitudes v_hat on a :class:`FourierLattice`.

    ``values`` has shape ``(components, N, N, N)`` with components 1
    (scalar), 3 (vector) or 9 (tensor channels (i, j) flattened as 3*i+j).
    Fields are immutable after construction.
    """

    __slots__ = ("lattice", "values")

    def __init__(self, lattice: FourierLattice, values: np.ndarray):
        arr = _as_components(values, np.complex128)
        if arr.shape[1:] != lattice.shape:
            raise ValueError(f"values shape {arr.shape} does not match N={lattice.points_per_axis}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralField is immutable")

    @property
    def components(self) -> int:
        return self.values.shape[0]

    def hermitian_defect(self) -> float:
        """max |v(-xi) - conj v(xi)| relative to max |v| (0 for a real field)."""
        v = self.values
        scale = float(np.abs(v).max())
        if scale == 0.0:
            return 0.0
        flipped = v[:, ::-1, ::-1, ::-1]
        flipped = np.roll(flipped, 1, axis=(1, 2, 3))
        return float(np.abs(flipped - np.conj(v)).max()) / scale

    def zero_mode(self) -> np.ndarray:
        return self.values[:, 0, 0, 0]


class PhysicalField:
    """Real point values on the grid x_j = j*h - L/2.

    ``imag_residue`` records the relative imaginary part discarded by the
    inverse transform that produced the field (0.0 for directly built ones).
    """

    __slots__ = ("lattice", "values", "imag_residue")

    def __init__(self, lattice: FourierLattice, values: np.ndarray, imag_residue: float = 0.0):
        arr = _as_components(values, np.float64)
        if arr.shape[1:] != lattice.shape:
            raise ValueError(f"values shape {arr.shape} does not match N={lattice.points_per_axis}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "imag_residue", float(imag_residue))

    def __setattr__(self, name, value):
        raise AttributeError("PhysicalField is immutable")

    @property
    def components(self) -> int:
        return self.values.shape[0]


# -- raw array kernels (shared with the solver hot loops) --------------------

def forward_values(lat: FourierLattice, phys: np.ndarray) -> np.ndarray:
    """DFT of real values with continuum normalization; accepts (..., N, N, N)."""
    scale = lat.cell ** 3
    return _fft.fftn(phys, axes=(-3, -2, -1)) * (scale * lat._center_phase)


def inverse_values(lat: FourierLattice, spec: np.ndarray) -> np.ndarray:
    """Inverse DFT to complex point values; exact inverse of forward_values."""
    N = lat.points_per_axis
    scale = N ** 3 / lat.box_length ** 3
    return _fft.ifftn(spec * lat._center_phase, axes=(-3, -2, -1)) * scale


def project_values(lat: FourierLattice, v: np.ndarray) -> np.ndarray:
    """Leray projection on raw (3, N, N, N) values; zero mode passed through.

    Built from the symmetric frequency (Nyquist treated as 0), so projecting
    the transform of a real field returns the transform of a real field.
    """
    div = (lat.xi1_s * v[0] + lat.xi2_s * v[1] + lat.xi3_s * v[2]) / lat.xi_norm2_sym_safe
    return np.stack((v[0] - lat.xi1_s * div, v[1] - lat.xi2_s * div, v[2] - lat.xi3_s * div))


# -- public operations --------------------------------------------------------

def forward_transform(f: PhysicalField) -> SpectralField:
    """Discrete stand-in for v_hat(xi) = integral f(x) exp(-i xi.x) dx."""
    return SpectralField(f.lattice, forward_values(f.lattice, f.values))


def inverse_transform(v: SpectralField, hermitian_tol: float = 1e-8) -> PhysicalField:
    """Exact inverse of :func:`forward_transform` up to round-off.

    Raises
    ------
    NonHermitianInput
        If the Hermitian-symmetry defect exceeds ``hermitian_tol``; the
        imaginary residue actually discarded is recorded on the result.
    """
    defect = v.hermitian_defect()
    if defect > hermitian_tol:
        raise NonHermitianInput(
            f"hermitian defect {defect:.3e} exceeds tolerance {hermitian_tol:.1e}"
        )
    z = inverse_values(v.lattice, v.values)
    scale = float(np.abs(z).max())
    residue = float(np.abs(z.imag).max()) / scale if scale > 0 else 0.0
    return PhysicalField(v.lattice, z.real, imag_residue=residue)


def dealiased_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """Spectral representation of the pointwise product with 2/3-rule dealiasing.

    Channel layout of the result is the outer product of the operand
    components: (3, 3) operands give the 9 tensor channels (u_i v_j).
    """
    if u.lattice != v.lattice:
        raise LatticeMismatch("operands live on different lattices")
    lat = u.lattice
    mask = lat.dealias_mask
    up = inverse_values(lat, u.values * mask)
    vp = inverse_values(lat, v.values * mask)
    prods = up[:, None] * vp[None, :]
    prods = prods.reshape(u.components * v.components, *lat.shape)
    out = forward_values(lat, prods)
    out *= mask
    return SpectralField(lat, out)


def leray_project(v: SpectralField) -> SpectralField:
    """Modewise projector delta_jk - xi_j xi_k / |xi|^2 on a 3-component field."""
    if v.components != 3:
        raise ValueError("leray_project expects a 3-component field")
    return SpectralField(v.lattice, project_values(v.lattice, v.values))


def spectral_derivative(v: SpectralField, axis: int) -> SpectralField:
    """Componentwise multiplication by i xi_axis (axis in 1..3)."""
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2 or 3")
    xi = (v.lattice.xi1_s, v.lattice.xi2_s, v.lattice.xi3_s)[axis - 1]
    return SpectralField(v.lattice, 1j * xi * v.values)


def spectral_divergence(v: SpectralField) -> SpectralField:
    """i xi . v_hat for a 3-component field."""
    if v.components != 3:
        raise ValueError("spectral_divergence expects a 3-component field")
    lat = v.lattice
    w = 1j * (lat.xi1_s * v.values[0] + lat.xi2_s * v.values[1] + lat.xi3_s * v.values[2])
    return SpectralField(lat, w[None])


def divergence_defect(v: SpectralField) -> float:
    """max |xi . v_hat| relative to max |xi| |v_hat| (solenoidality check)."""
    lat = v.lattice
    num = np.abs(
        lat.xi1_s * v.values[0] + lat.xi2_s * v.values[1] + lat.xi3_s * v.values[2]
    ).max()
    den = (lat.xi_norm * np.abs(v.values).max(axis=0)).max()
    return float(num / den) if den > 0 else 0.0


def boundary_decay(f: PhysicalField) -> float:
    """max |f| on the box boundary faces relative to max |f| overall.

    Truncation-of-R^3 diagnostic: values well below 1e-6 mean the periodic
    box is a faithful stand-in for the field at hand.
    """
    a = np.abs(f.values)
    scale = float(a.max())
    if scale == 0.0:
        return 0.0
    faces = max(
        float(a[:, 0].max()), float(a[:, :, 0].max()), float(a[:, :, :, 0].max())
    )
    return faces / scale


# -- field dump format ---------------------------------------------------------

def write_field(path, v: SpectralField) -> None:
    """Dump: 16-byte magic, u32 version, u32 N, f64 L, u32 components, then
    complex amplitudes as interleaved little-endian float64 pairs, each
    component row-major (k1 slowest, k3 fastest)."""
    header = _MAGIC + struct.pack(
        "<IId I", _VERSION, v.lattice.points_per_axis, v.lattice.box_length, v.components
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(v.values, dtype="<c16").tobytes())


def read_field(path) -> SpectralField:
    with open(path, "rb") as fh:
        magic = fh.read(16)
        if magic != _MAGIC:
            raise ValueError("not a SNSFIELD dump")
        version, N, L, ncomp = struct.unpack("<IIdI", fh.read(20))
        if version != _VERSION:
            raise ValueError(f"unsupported SNSFIELD version {version}")
        data = np.frombuffer(fh.read(), dtype="<c16")
    lat = FourierLattice(N, L)
    return SpectralField(lat, data.reshape(ncomp, N, N, N).astype(np.complex128))
