import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kagome_jja.coupling import (
    CROSS_SCALE,
    CouplingKernel,
    Direction,
    FourierKernel,
    KernelSource,
    closed_form_kernel,
    closed_form_table,
    finite_kernel,
    fourier_oracle_entry,
    infinite_kernel_entry,
    infinite_kernel_entry_exact,
    infinite_kernel_entry_mp,
    kernel_decay_profile,
    pseudo_inverse,
    write_profile_csv,
)
from kagome_jja.io import read_csv
from kagome_jja.lattice import build_lattice, constraint_matrices

offsets = st.integers(min_value=-12, max_value=12)


def test_plaquette_kernel_by_hand(plaquette, plaquette_kernel):
    cm = constraint_matrices(plaquette)
    wp = cm.plus.toarray().ravel().astype(float)
    wm = cm.minus.toarray().ravel().astype(float)
    assert np.allclose(plaquette_kernel.g_pm, np.outer(wp, wm) / 12, atol=1e-14)
    assert np.allclose(plaquette_kernel.g_pp, np.outer(wp, wp) / 12, atol=1e-14)
    a, b = int(np.argmin(wp)), int(np.argmin(wm))
    assert plaquette_kernel.g_pm[a, b] == pytest.approx(1 / 3, abs=1e-14)
    values = {round(v, 12) for v in plaquette_kernel.g_pm.ravel()}
    assert values == {round(1 / 3, 12), round(-1 / 6, 12), round(1 / 12, 12)}


def test_finite_kernel_is_projector(plaquette_kernel):
    k = plaquette_kernel.total()
    assert np.allclose(k @ k, k, atol=1e-12)


@pytest.mark.parametrize("shape,boundary", [((3, 3), "periodic"), ((4, 3), "open"), ((6, 6), "periodic")])
def test_symmetry_and_pinv(shape, boundary):
    lat = build_lattice(*shape, boundary)
    cm = constraint_matrices(lat)
    k = finite_kernel(cm)
    assert np.array_equal(k.g_pm, k.g_mp.T)
    assert np.array_equal(k.g_pp, k.g_pp.T) and np.array_equal(k.g_mm, k.g_mm.T)
    gp, gm = cm.plus.toarray(), cm.minus.toarray()
    a = gp.T @ gp + gm.T @ gm
    ap, _ = pseudo_inverse(a)
    assert np.abs(a @ ap @ a - a).max() <= 1e-10


def test_tolerance_validation(plaquette):
    with pytest.raises(ValueError):
        finite_kernel(plaquette, tolerance=0.0)
    with pytest.raises(ValueError):
        pseudo_inverse(np.eye(2), tolerance=-1)


def test_empty_kernel_warns():
    lat = build_lattice(1, 3)  # open strip, no complete hexagon
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        k = finite_kernel(lat)
    assert k.empty and not np.any(k.total())
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_periodic_same_sublattice_local():
    k = finite_kernel(build_lattice(12, 12, "periodic"))
    diag = np.diag(k.g_pp)
    off = k.g_pp - np.diag(diag)
    assert np.ptp(diag) < 1e-12
    assert diag[0] - off[0, 1] == pytest.approx(0.5, abs=1e-10)
    # the remaining offset is the removed zero mode, uniform over all pairs
    assert np.ptp(off[~np.eye(len(diag), dtype=bool)]) < 1e-12


def _periodic_deviation(L, radius=3):
    lat = build_lattice(L, L, "periodic")
    k = finite_kernel(lat)
    dev = []
    for b, mi in enumerate(lat.minus_sites):
        l2, m2, _ = lat.triangles[mi]
        dl = (l2 + L // 2) % L - L // 2
        dm = (m2 + L // 2) % L - L // 2
        if abs(dl) <= radius and abs(dm) <= radius + 1:
            dev.append(abs(k.g_pm[0, b] - CROSS_SCALE * infinite_kernel_entry(dl, dm)))
    return max(dev)


@pytest.mark.slow
def test_finite_converges_to_closed_form():
    devs = [_periodic_deviation(L) for L in (8, 16, 24)]
    assert devs[0] > devs[1] > devs[2]


def test_closed_form_values():
    assert infinite_kernel_entry(0, 0) == -0.5
    assert infinite_kernel_entry(0, -1) == -0.5
    assert infinite_kernel_entry(1, 0) == -0.25
    assert infinite_kernel_entry(1, -1) == 0.5
    assert infinite_kernel_entry(2, -1) == 0.125
    assert infinite_kernel_entry(-1, 0) == 0.0
    assert infinite_kernel_entry_exact(3, 0) == Fraction(-1, 16)


@settings(max_examples=200, deadline=None)
@given(offsets, offsets)
def test_half_plane_support(dl, dm):
    value = infinite_kernel_entry(dl, dm)
    if dl < 0 or dm > 0 or dm < -dl - 1:
        assert value == 0.0
    assert infinite_kernel_entry_mp(-dl, -dm) == value


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=8))
def test_wedge_reflection(d):
    # values are symmetric about the centre of the support wedge dm = -(d + 1) / 2
    for e in range(-d - 1, 1):
        assert infinite_kernel_entry_exact(d, e) == infinite_kernel_entry_exact(d, -d - 1 - e)


def test_closed_form_kernel_blocks():
    lat = build_lattice(4, 4)
    k = closed_form_kernel(lat)
    assert k.source is KernelSource.INFINITE_CLOSED_FORM
    assert np.array_equal(k.g_pp, 0.5 * np.eye(16)) and np.array_equal(k.g_mm, 0.5 * np.eye(16))
    assert np.array_equal(k.g_pm, k.g_mp.T)


def test_bulk_finite_matches_scaled_closed_form():
    lat = build_lattice(20, 20)
    fk = finite_kernel(lat)
    ck = closed_form_kernel(lat)
    centre = lat.site_index[(10, 10, 1)]
    a = int(np.flatnonzero(lat.plus_sites == centre)[0])
    for dl, dm in [(0, 0), (0, -1), (1, 0), (1, -1), (2, -1)]:
        b = int(np.flatnonzero(lat.minus_sites == lat.site_index[(10 + dl, 10 + dm, -1)])[0])
        assert fk.g_pm[a, b] == pytest.approx(ck.g_pm[a, b], abs=0.01)


def test_fourier_symbols():
    fk = FourierKernel(64)
    q, r = fk.mesh()
    m = fk.modulus_sq(q, r)
    assert np.abs(np.abs(fk.g_plus(q, r)) ** 2 - m).max() <= 1e-12
    assert np.abs(np.abs(fk.g_minus(q, r)) ** 2 - m).max() <= 1e-12
    assert fk.modulus_sq(0.0, 0.0) == 0.0
    assert np.abs(fk.ratio()).max() == pytest.approx(1.0)


@pytest.mark.parametrize("dl,dm", [(1, 0), (0, -1), (-3, 5)])
def test_oracle_entries_grid_512(dl, dm):
    assert fourier_oracle_entry(dl, dm, 512) == pytest.approx(infinite_kernel_entry(dl, dm), abs=1e-4)


def test_oracle_grid_validation():
    with pytest.raises(ValueError):
        fourier_oracle_entry(0, 0, 32)
    with pytest.raises(ValueError):
        fourier_oracle_entry(0, 0, 65)


def test_oracle_plain_midpoint_error_order():
    # uniform error shrinks by 2**1.5 per grid halving
    e1 = fourier_oracle_entry(0, 0, 256, extrapolate=False) + 0.5
    e2 = fourier_oracle_entry(0, 0, 512, extrapolate=False) + 0.5
    assert e1 / e2 == pytest.approx(2**1.5, rel=0.05)


def test_decay_profiles():
    h = kernel_decay_profile(direction="horizontal", max_range=10)
    assert all(v == -0.5 * 2.0**-d for d, v in h)
    v = kernel_decay_profile(direction=Direction.VERTICAL, max_range=10)
    assert all(val == -0.5 * 2.0**-d for d, val in v)
    diag = kernel_decay_profile(direction="diagonal", max_range=4)
    assert diag[0] == (0, infinite_kernel_entry(0, 0))
    with pytest.raises(ValueError):
        kernel_decay_profile(max_range=1)


def test_profile_csv(tmp_path):
    path = write_profile_csv(tmp_path / "p.csv", {"horizontal": kernel_decay_profile(max_range=3)})
    header, rows = read_csv(path)
    assert header == ["direction", "distance", "value"]
    assert rows[1] == ["horizontal", "1", "-0.25"]


def test_kernel_save_load(tmp_path, plaquette, plaquette_kernel):
    plaquette_kernel.save(tmp_path / "k", plaquette)
    again = CouplingKernel.load(tmp_path / "k")
    assert np.array_equal(again.total(), plaquette_kernel.total())
    assert again.source is plaquette_kernel.source


def test_closed_form_table_shape():
    t = closed_form_table(3)
    assert t.shape == (7, 7)
    assert t[3 + 1, 3 + 0] == -0.25
