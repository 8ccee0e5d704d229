"""Tests for the spectral core: transforms, dealiasing, projection, dumps."""

import numpy as np
import pytest

from snslab.errors import LatticeMismatch, NonHermitianInput
from snslab.spectral import (
    FourierLattice,
    PhysicalField,
    SpectralField,
    boundary_decay,
    dealiased_product,
    divergence_defect,
    forward_transform,
    inverse_transform,
    leray_project,
    read_field,
    spectral_derivative,
    spectral_divergence,
    write_field,
)


def gaussian_field(lat):
    x1, x2, x3 = lat.grid()
    return PhysicalField(lat, np.exp(-(x1**2 + x2**2 + x3**2))[None])


def random_band_limited(lat, seed, components=1):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal((components,) + lat.shape)
    spec = forward_transform(PhysicalField(lat, vals)).values * lat.dealias_mask
    return SpectralField(lat, spec)


class TestTransforms:
    def test_discrete_delta_transforms_to_one(self):
        lat = FourierLattice(16, 8.0)
        vals = np.zeros(lat.shape)
        # unit point mass: value N^3/L^3 in the origin cell
        i0 = np.argmin(np.abs(lat.x_1d))
        vals[i0, i0, i0] = (lat.points_per_axis / lat.box_length) ** 3
        spec = forward_transform(PhysicalField(lat, vals[None]))
        assert np.abs(spec.values - 1.0).max() < 1e-12

    def test_one_transforms_to_discrete_delta(self):
        lat = FourierLattice(16, 8.0)
        spec = SpectralField(lat, np.ones(lat.shape, dtype=complex)[None])
        phys = inverse_transform(spec)
        i0 = np.argmin(np.abs(lat.x_1d))
        mass = phys.values.sum() * lat.cell**3
        assert abs(mass - 1.0) < 1e-12
        peak = phys.values[0, i0, i0, i0]
        assert abs(peak - (lat.points_per_axis / lat.box_length) ** 3) < 1e-9

    def test_gaussian_pair_forward(self):
        lat = FourierLattice(64, 16.0)
        spec = forward_transform(gaussian_field(lat))
        expected = np.pi**1.5 * np.exp(-lat.xi_norm2 / 4.0)
        sub = lat.xi_norm <= lat.cutoff / 2.0
        rel = np.abs(spec.values[0][sub] - expected[sub]) / expected[sub]
        assert rel.max() < 1e-8

    def test_gaussian_pair_inverse(self):
        lat = FourierLattice(64, 16.0)
        spec = SpectralField(lat, (np.pi**1.5 * np.exp(-lat.xi_norm2 / 4.0)).astype(complex)[None])
        phys = inverse_transform(spec)
        x1, x2, x3 = lat.grid()
        expected = np.exp(-(x1**2 + x2**2 + x3**2))
        mask = expected > 1e-6  # compare where the Gaussian is resolvable
        rel = np.abs(phys.values[0][mask] - expected[mask]) / expected[mask]
        assert rel.max() < 1e-8

    def test_round_trip(self):
        lat = FourierLattice(24, 8.0)
        rng = np.random.default_rng(11)
        f = PhysicalField(lat, rng.standard_normal((3,) + lat.shape))
        back = inverse_transform(forward_transform(f))
        scale = np.abs(f.values).max()
        assert np.abs(back.values - f.values).max() / scale < 1e-12
        assert back.imag_residue < 1e-12

    def test_parseval(self):
        lat = FourierLattice(32, 8.0)
        rng = np.random.default_rng(3)
        f = PhysicalField(lat, rng.standard_normal(lat.shape)[None])
        spec = forward_transform(f)
        phys_sum = (f.values**2).sum() * lat.cell**3
        spec_sum = (np.abs(spec.values) ** 2).sum() * lat.frequency_spacing**3 / (2 * np.pi) ** 3
        assert abs(phys_sum - spec_sum) / phys_sum < 1e-10

    def test_non_hermitian_rejected(self):
        lat = FourierLattice(16, 8.0)
        vals = np.zeros(lat.shape, dtype=complex)
        vals[1, 0, 0] = 1.0  # lone positive mode, no conjugate partner
        with pytest.raises(NonHermitianInput):
            inverse_transform(SpectralField(lat, vals[None]))


class TestDealiasedProduct:
    def test_zero_annihilates(self):
        lat = FourierLattice(16, 8.0)
        u = SpectralField(lat, np.zeros(lat.shape, dtype=complex)[None])
        v = random_band_limited(lat, 5)
        out = dealiased_product(u, v)
        assert np.abs(out.values).max() == 0.0

    def test_single_mode_doubling(self):
        lat = FourierLattice(24, 8.0)
        vals = np.zeros(lat.shape, dtype=complex)
        k0 = 2
        i0 = list(lat.k_int).index(k0)
        vals[i0, 0, 0] = lat.box_length**3  # physical field exp(i xi0 . x)
        u = SpectralField(lat, vals[None])
        out = dealiased_product(u, u)
        i2 = list(lat.k_int).index(2 * k0)
        assert abs(out.values[0][i2, 0, 0] - lat.box_length**3) < 1e-9 * lat.box_length**3
        other = out.values.copy()
        other[0, i2, 0, 0] = 0.0
        assert np.abs(other).max() < 1e-10 * lat.box_length**3

    def test_commutativity_transposes_channels(self):
        lat = FourierLattice(16, 8.0)
        u = random_band_limited(lat, 1, components=3)
        v = random_band_limited(lat, 2, components=3)
        uv = dealiased_product(u, v).values.reshape(3, 3, *lat.shape)
        vu = dealiased_product(v, u).values.reshape(3, 3, *lat.shape)
        scale = np.abs(uv).max()
        assert np.abs(uv - vu.transpose(1, 0, 2, 3, 4)).max() < 1e-13 * scale

    def test_matches_direct_convolution(self):
        """2/3-dealiased product equals the exact convolution for banded fields."""
        lat = FourierLattice(12, 4.0)
        u = random_band_limited(lat, 7)
        v = random_band_limited(lat, 8)
        out = dealiased_product(u, v).values[0]
        third = lat.band_limit
        ks = [k for k in lat.k_int if abs(k) <= third]
        index = {k: i for i, k in enumerate(lat.k_int)}
        direct = np.zeros(lat.shape, dtype=complex)
        uv = u.values[0]
        vv = v.values[0]
        for n1 in ks:
            for n2 in ks:
                for n3 in ks:
                    acc = 0.0
                    for m1 in ks:
                        for m2 in ks:
                            for m3 in ks:
                                r1, r2, r3 = n1 - m1, n2 - m2, n3 - m3
                                if max(abs(r1), abs(r2), abs(r3)) > third:
                                    continue
                                acc += (
                                    uv[index[r1], index[r2], index[r3]]
                                    * vv[index[m1], index[m2], index[m3]]
                                )
                    direct[index[n1], index[n2], index[n3]] = acc / lat.box_length**3
        scale = np.abs(direct).max()
        assert np.abs(out - direct).max() < 1e-10 * scale

    def test_lattice_mismatch(self):
        u = random_band_limited(FourierLattice(16, 8.0), 1)
        v = random_band_limited(FourierLattice(16, 4.0), 1)
        with pytest.raises(LatticeMismatch):
            dealiased_product(u, v)


class TestLerayProjection:
    def test_kills_gradients(self):
        lat = FourierLattice(16, 8.0)
        s = random_band_limited(lat, 4).values[0]
        grad = np.stack((1j * lat.xi1 * s, 1j * lat.xi2 * s, 1j * lat.xi3 * s))
        out = leray_project(SpectralField(lat, grad))
        scale = np.abs(grad).max()
        assert np.abs(out.values).max() < 1e-13 * scale

    def test_single_mode_matrix_action(self):
        lat = FourierLattice(16, 8.0)
        i1 = list(lat.k_int).index(1)
        e1 = np.zeros((3,) + lat.shape, dtype=complex)
        e1[0, i1, 0, 0] = 1.0  # xi along axis 1, input e1
        out = leray_project(SpectralField(lat, e1))
        assert np.abs(out.values[:, i1, 0, 0]).max() < 1e-14
        e2 = np.zeros((3,) + lat.shape, dtype=complex)
        e2[1, i1, 0, 0] = 1.0  # input e2 passes through
        out2 = leray_project(SpectralField(lat, e2))
        assert abs(out2.values[1, i1, 0, 0] - 1.0) < 1e-14

    def test_idempotent(self):
        lat = FourierLattice(16, 8.0)
        v = random_band_limited(lat, 9, components=3)
        once = leray_project(v)
        twice = leray_project(once)
        scale = np.abs(once.values).max()
        assert np.abs(twice.values - once.values).max() < 1e-13 * scale

    def test_self_adjoint(self):
        lat = FourierLattice(16, 8.0)
        rng = np.random.default_rng(12)
        a = rng.standard_normal((3,) + lat.shape) + 1j * rng.standard_normal((3,) + lat.shape)
        b = rng.standard_normal((3,) + lat.shape) + 1j * rng.standard_normal((3,) + lat.shape)
        Pa = leray_project(SpectralField(lat, a)).values
        Pb = leray_project(SpectralField(lat, b)).values
        lhs = np.vdot(Pa, b)
        rhs = np.vdot(a, Pb)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)

    def test_projected_field_divergence_free(self):
        lat = FourierLattice(16, 8.0)
        v = random_band_limited(lat, 20, components=3)
        out = leray_project(v)
        assert divergence_defect(out) < 1e-13

    def test_zero_mode_passthrough(self):
        lat = FourierLattice(16, 8.0)
        vals = np.zeros((3,) + lat.shape, dtype=complex)
        vals[:, 0, 0, 0] = (1.0, 2.0, 3.0)
        out = leray_project(SpectralField(lat, vals))
        assert np.allclose(out.values[:, 0, 0, 0], (1.0, 2.0, 3.0))


class TestDerivatives:
    def test_derivative_of_constant_is_zero(self):
        lat = FourierLattice(16, 8.0)
        vals = np.zeros(lat.shape, dtype=complex)
        vals[0, 0, 0] = 5.0
        d = spectral_derivative(SpectralField(lat, vals[None]), 1)
        assert np.abs(d.values).max() == 0.0

    def test_single_mode_derivative(self):
        lat = FourierLattice(16, 8.0)
        i1 = list(lat.k_int).index(3)
        vals = np.zeros(lat.shape, dtype=complex)
        vals[i1, 0, 0] = 1.0
        d = spectral_derivative(SpectralField(lat, vals[None]), 1)
        xi = lat.xi_1d[i1]
        assert abs(d.values[0, i1, 0, 0] - 1j * xi) < 1e-14

    def test_divergence_matches_component_sum(self):
        lat = FourierLattice(16, 8.0)
        v = random_band_limited(lat, 30, components=3)
        total = sum(
            spectral_derivative(SpectralField(lat, v.values[a][None]), a + 1).values[0]
            for a in range(3)
        )
        div = spectral_divergence(v).values[0]
        scale = np.abs(div).max()
        assert np.abs(div - total).max() < 1e-13 * max(scale, 1e-30)


class TestFieldDump:
    def test_round_trip(self, tmp_path):
        lat = FourierLattice(12, 4.0)
        v = random_band_limited(lat, 42, components=3)
        path = tmp_path / "field.snsfield"
        write_field(path, v)
        back = read_field(path)
        assert back.lattice == lat
        assert np.array_equal(back.values, v.values)

    def test_header_layout(self, tmp_path):
        lat = FourierLattice(12, 4.0)
        v = random_band_limited(lat, 4)
        path = tmp_path / "field.snsfield"
        write_field(path, v)
        blob = path.read_bytes()
        assert blob[:8] == b"SNSFIELD"
        assert blob[8:16] == b"\x00" * 8
        assert int.from_bytes(blob[16:20], "little") == 1          # version
        assert int.from_bytes(blob[20:24], "little") == 12         # N
        assert np.frombuffer(blob[24:32], dtype="<f8")[0] == 4.0   # L
        assert int.from_bytes(blob[32:36], "little") == 1          # components
        assert len(blob) == 36 + 12**3 * 16


def test_boundary_decay_diagnostic():
    lat = FourierLattice(32, 16.0)
    f = gaussian_field(lat)
    assert boundary_decay(f) < 1e-6
    x1, _, _ = lat.grid()
    slow = PhysicalField(lat, (1.0 / (1.0 + x1**2) + 0 * lat.xi_norm2)[None])
    assert boundary_decay(slow) > 1e-3
