"""Analysis tests: slicing, zero finding, cell areas, sweeps, comparison."""

import numpy as np
import numpy.testing as npt
import pytest

from chronomap import (
    CellAreaReport,
    CompassSpec,
    ComplexField,
    ConfigError,
    CrossSection,
    DataError,
    DomainError,
    InsufficientStructureError,
    PulseSpec,
    Window,
    ZeroSet,
    cell_areas,
    compare_maps,
    compass_state,
    cross_section,
    find_zeros,
    gaussian_pulse,
    interior_spacings,
    make_grid,
    shg_frog,
    sweep_separation,
    wigner,
    wigner_cell_areas,
)
from chronomap.analysis import _auto_window

OMEGA0 = np.pi * 3.3
SIGMA = 0.25


def compass_map(t0=2.0, n=2048, dt=0.02, amplitudes=(1.0, 1.0, 1.0, 1.0)):
    g = make_grid(n, dt, -n * dt / 2)
    f = compass_state(g, CompassSpec(t0, OMEGA0, SIGMA, amplitudes=amplitudes))
    steps = int(round((2 * t0 + 1.0) / dt))
    return shg_frog(f, dt * np.arange(-steps, steps + 1))


# ---------------------------------------------------------------- types


def test_window_validation():
    Window(0.0, 1.0, 0.0, 2.0)
    with pytest.raises(ConfigError):
        Window(0.0, 0.0, 0.0, 2.0)
    with pytest.raises(ConfigError):
        Window(0.0, 1.0, 0.0, -2.0)
    with pytest.raises(ConfigError):
        Window(np.nan, 1.0, 0.0, 2.0)


def test_cross_section_validation():
    ax = np.linspace(0, 1, 5)
    CrossSection(ax, np.ones(5), "intensity", ("frequency", 0.0))
    CrossSection(ax, np.array([-1.0, 1, -1, 1, -1]), "signed", ("delay", 0.0))
    with pytest.raises(ConfigError):
        CrossSection(ax, np.ones(4), "intensity", ("frequency", 0.0))
    with pytest.raises(ConfigError):
        CrossSection(ax, -np.ones(5), "intensity", ("frequency", 0.0))
    with pytest.raises(ConfigError):
        CrossSection(np.array([0.0, 0.1, 0.15, 0.4, 0.5]), np.ones(5), "intensity", ("frequency", 0.0))
    with pytest.raises(ConfigError):
        CrossSection(ax, np.ones(5), "magnitude", ("frequency", 0.0))
    sec = CrossSection(ax, np.ones(5), "intensity", ("frequency", 0.0))
    with pytest.raises(ValueError):
        sec.values[0] = 2.0


def test_zero_set_validation():
    ZeroSet(np.array([0.1, 0.4]), "sign-change")
    with pytest.raises(ConfigError):
        ZeroSet(np.array([0.4, 0.1]), "sign-change")


def test_cell_area_report_validation():
    w = Window(0, 1, 0, 1)
    with pytest.raises(ConfigError):
        CellAreaReport(np.array([0.3]), np.array([1.5]), np.array([0.45]), -0.45, True, w)


# --------------------------------------------------------- cross sections


def test_cross_section_grid_line_is_exact():
    m = compass_map(t0=1.5, n=512, dt=0.04)
    i = 10
    sec = cross_section(m, "frequency", m.tau_axis[i])
    npt.assert_array_equal(sec.values, m.values[i, :])
    npt.assert_array_equal(sec.axis, m.omega_axis)
    assert sec.kind == "intensity"
    assert sec.fixed_coordinate == ("delay", m.tau_axis[i])
    j = 100
    sec2 = cross_section(m, "delay", m.omega_axis[j])
    npt.assert_array_equal(sec2.values, m.values[:, j])


def test_cross_section_interpolates_between_lines():
    m = compass_map(t0=1.5, n=512, dt=0.04)
    mid = 0.5 * (m.omega_axis[40] + m.omega_axis[41])
    sec = cross_section(m, "delay", mid)
    npt.assert_allclose(sec.values, 0.5 * (m.values[:, 40] + m.values[:, 41]), atol=1e-14)


def test_cross_section_rejects():
    m = compass_map(t0=1.5, n=512, dt=0.04)
    with pytest.raises(DomainError):
        cross_section(m, "delay", m.omega_axis[-1] + 1.0)
    with pytest.raises(ConfigError):
        cross_section(m, "wavelength", 0.0)


def test_wigner_cross_section_is_signed():
    g = make_grid(512, 0.04, -10.24)
    wm = wigner(compass_state(g, CompassSpec(2.0, OMEGA0, SIGMA)))
    sec = cross_section(wm, "frequency", 0.0)
    assert sec.kind == "signed"
    assert np.any(sec.values < 0)


# ------------------------------------------------------------ find_zeros


def test_find_zeros_cosine_squared_slice():
    ax = np.arange(-2.0, 2.0001, 0.02)
    sec = CrossSection(ax, np.cos(OMEGA0 * ax) ** 2, "intensity", ("frequency", 0.0))
    zs = find_zeros(sec)
    assert zs.method == "minimum-below-threshold"
    # the outermost zero pair has no flanking maxima inside the slice
    expected = (np.arange(-6, 6) + 0.5) * np.pi / OMEGA0
    npt.assert_allclose(zs.positions, expected, atol=0.005)
    npt.assert_allclose(np.diff(zs.positions), np.pi / OMEGA0, rtol=1e-2)


def test_find_zeros_gaussian_slice_empty():
    ax = np.arange(-2.0, 2.0001, 0.02)
    sec = CrossSection(ax, np.exp(-(ax**2)), "intensity", ("frequency", 0.0))
    assert find_zeros(sec).positions.size == 0


def test_find_zeros_noise_regression():
    ax = np.arange(-2.0, 2.0001, 0.02)
    clean = np.cos(OMEGA0 * ax) ** 2 * np.exp(-(ax**2) / 4)
    n_clean = find_zeros(
        CrossSection(ax, clean, "intensity", ("frequency", 0.0)), 0.05
    ).positions.size
    assert n_clean == 12
    rng = np.random.default_rng(0)
    noisy = np.clip(clean + 0.01 * rng.standard_normal(ax.size), 0, None)
    n_noisy = find_zeros(
        CrossSection(ax, noisy, "intensity", ("frequency", 0.0)), 0.05
    ).positions.size
    assert n_noisy == n_clean


def test_find_zeros_signed_interpolation():
    ax = np.arange(-1.5, 1.5001, 0.02)
    sec = CrossSection(ax, np.sin(np.pi * ax), "signed", ("delay", 0.0))
    zs = find_zeros(sec)
    assert zs.method == "sign-change"
    npt.assert_allclose(zs.positions, [-1.0, 0.0, 1.0], atol=2e-3)


def test_find_zeros_signed_gates_roundoff_chatter():
    ax = np.arange(0.0, 4.0001, 0.02)
    body = np.sin(np.pi * ax) * np.exp(-(ax**2))
    chatter = 1e-13 * np.cos(40 * ax)
    vals = np.where(ax < 2.5, body, chatter[: ax.size])
    zs = find_zeros(CrossSection(ax, vals, "signed", ("delay", 0.0)))
    assert np.all(zs.positions < 2.5)
    npt.assert_allclose(zs.positions, [1.0, 2.0], atol=2e-3)


def test_find_zeros_rejects():
    ax = np.linspace(0, 1, 9)
    sec = CrossSection(ax, np.ones(9), "intensity", ("frequency", 0.0))
    with pytest.raises(ConfigError):
        find_zeros(sec, noise_floor=1.0)
    with pytest.raises(ConfigError):
        find_zeros(sec, noise_floor=-0.1)
    with pytest.raises(ConfigError):
        find_zeros(CrossSection(np.array([0.0, 1.0]), np.ones(2), "intensity", ("f", 0.0)))
    bad = np.ones(9)
    bad[4] = np.nan
    with pytest.raises(DataError):
        find_zeros(CrossSection(ax, bad, "signed", ("frequency", 0.0)))


def test_interior_spacings_trim():
    npt.assert_array_equal(interior_spacings([1.0, 2.0]), [1.0, 2.0])
    npt.assert_array_equal(interior_spacings([1, 2, 3, 4]), [1, 2, 3, 4])
    npt.assert_array_equal(interior_spacings([1, 2, 3, 4, 5]), [2, 3, 4])
    npt.assert_array_equal(interior_spacings(np.arange(7)), [2, 3, 4])
    npt.assert_array_equal(interior_spacings(np.arange(15)), np.arange(2, 13))


# ------------------------------------------------------------ cell areas


def test_cell_areas_compass_sub_fourier():
    m = compass_map(t0=2.5)
    rep = cell_areas(m, Window(0, 2.5, 0, OMEGA0))
    expected = np.pi**2 / (2.5 * OMEGA0)
    npt.assert_allclose(rep.mean_area, expected, rtol=2e-2)
    assert rep.sub_fourier is True
    npt.assert_allclose(rep.tau_spacings, np.pi / OMEGA0, rtol=1e-2)
    npt.assert_allclose(rep.omega_spacings, np.pi / 2.5, rtol=1e-2)
    npt.assert_allclose(
        rep.cell_areas,
        np.outer(rep.tau_spacings, rep.omega_spacings).ravel(),
    )
    assert rep.window.tau_halfwidth == 2.5


def test_cell_areas_small_separation_not_sub_fourier():
    rep = cell_areas(compass_map(t0=1.25), Window(0, 1.25, 0, OMEGA0))
    npt.assert_allclose(rep.mean_area, np.pi**2 / (1.25 * OMEGA0), rtol=2e-2)
    assert rep.sub_fourier is False


def test_cell_areas_gaussian_insufficient():
    g = make_grid(1024, 0.02, -10.24)
    m = shg_frog(gaussian_pulse(g, PulseSpec(0, 0, SIGMA)), g.dt * np.arange(-200, 201))
    with pytest.raises(InsufficientStructureError):
        cell_areas(m, Window(0, 2.0, 0, OMEGA0))


def test_cell_areas_auto_window():
    m = compass_map(t0=2.0)
    win = _auto_window(m)
    assert abs(win.tau_halfwidth - 2.0) < 0.05
    assert abs(win.omega_halfwidth - OMEGA0) < 0.15
    rep = cell_areas(m)
    npt.assert_allclose(rep.mean_area, np.pi**2 / (2.0 * OMEGA0), rtol=2e-2)


def test_cell_areas_rejects_wrong_type():
    g = make_grid(512, 0.04, -10.24)
    wm = wigner(compass_state(g, CompassSpec(2.0, OMEGA0, SIGMA)))
    with pytest.raises(ConfigError):
        cell_areas(wm, Window(0, 1, 0, 1))
    with pytest.raises(ConfigError):
        wigner_cell_areas(compass_map(t0=1.5, n=512, dt=0.04), Window(0, 1, 0, 1))


# ----------------------------------------------------- Wigner cell areas


def test_wigner_cell_areas_compass():
    g = make_grid(512, 0.04, -10.24)
    wm = wigner(compass_state(g, CompassSpec(2.5, OMEGA0, SIGMA)))
    rep = wigner_cell_areas(wm, Window(0, 1.25, 0, OMEGA0 / 2))
    expected = np.pi**2 / (4 * 2.5 * OMEGA0)
    npt.assert_allclose(rep.mean_area, expected, rtol=2e-2)
    assert rep.sub_fourier is True
    # quarter of the spectrogram-coordinate cell area
    frog_rep = cell_areas(compass_map(t0=2.5), Window(0, 2.5, 0, OMEGA0))
    npt.assert_allclose(rep.mean_area, frog_rep.mean_area / 4, rtol=2e-2)
    npt.assert_allclose(rep.tau_spacings, np.pi / (2 * OMEGA0), rtol=2e-2)
    npt.assert_allclose(rep.omega_spacings, np.pi / 5, rtol=2e-2)


def test_wigner_cell_areas_cat_one_direction():
    g = make_grid(512, 0.04, -10.24)
    t = g.times()
    h = np.exp(-((t - 2.0) ** 2) / (2 * SIGMA**2)) + np.exp(-((t + 2.0) ** 2) / (2 * SIGMA**2))
    h = h / np.sqrt(np.sum(np.abs(h) ** 2) * g.dt)
    rep = wigner_cell_areas(wigner(ComplexField(g, h)), Window(0, 1.0, 0, OMEGA0 / 2))
    assert rep.mean_area is None and rep.sub_fourier is None
    assert rep.tau_spacings.size == 0 and rep.cell_areas.size == 0
    npt.assert_allclose(rep.omega_spacings, np.pi / 4, rtol=1e-2)


def test_wigner_cell_areas_gaussian_insufficient():
    g = make_grid(512, 0.04, -10.24)
    wm = wigner(gaussian_pulse(g, PulseSpec(0, 0, SIGMA)))
    with pytest.raises(InsufficientStructureError):
        wigner_cell_areas(wm)


# ----------------------------------------------------------------- sweep


def test_sweep_matches_area_law_and_flips_once():
    pts = sweep_separation(CompassSpec(1.0, OMEGA0, SIGMA), [1.25, 1.75, 2.0, 2.5])
    assert [p.status for p in pts] == ["ok"] * 4
    means = [p.mean_area for p in pts]
    for p in pts:
        npt.assert_allclose(p.mean_area, np.pi**2 / (p.t0 * OMEGA0), rtol=2e-2)
    assert all(a > b for a, b in zip(means, means[1:]))
    assert [p.sub_fourier for p in pts] == [False, False, True, True]


def test_sweep_empty():
    assert sweep_separation(CompassSpec(1.0, OMEGA0, SIGMA), []) == ()


def test_sweep_records_bad_point():
    pts = sweep_separation(CompassSpec(1.0, OMEGA0, SIGMA), [0.1, 2.0])
    assert pts[0].status == "error"
    assert pts[0].mean_area is None and pts[0].sub_fourier is None
    assert "zero" in pts[0].message or "sample" in pts[0].message
    assert pts[1].status == "ok"


# ----------------------------------------------------------- compare_maps


def test_compare_map_with_itself():
    m = compass_map(t0=2.0, n=1024, dt=0.02)
    assert compare_maps(m, m) == pytest.approx(1.0, abs=1e-12)


def test_compare_perturbed_amplitudes():
    a = compass_map(t0=2.0, n=1024, dt=0.02)
    b = compass_map(t0=2.0, n=1024, dt=0.02, amplitudes=(1.0, 0.8, 1.0, 0.9))
    score = compare_maps(a, b)
    assert 0.9 < score < 0.9999


def test_compare_against_gaussian():
    a = compass_map(t0=2.0, n=1024, dt=0.02)
    g = make_grid(1024, 0.02, -10.24)
    b = shg_frog(gaussian_pulse(g, PulseSpec(0, 0, SIGMA)), g.dt * np.arange(-250, 251))
    assert compare_maps(a, b) < 0.5


def test_compare_wigner_maps():
    g = make_grid(512, 0.04, -10.24)
    wa = wigner(compass_state(g, CompassSpec(2.0, OMEGA0, SIGMA)))
    assert compare_maps(wa, wa) == pytest.approx(1.0, abs=1e-12)


def test_compare_rejects():
    from chronomap import Spectrogram

    a = compass_map(t0=1.5, n=512, dt=0.04)
    g = make_grid(512, 0.04, -10.24)
    wm = wigner(compass_state(g, CompassSpec(1.5, OMEGA0, SIGMA)))
    with pytest.raises(ConfigError):
        compare_maps(a, wm)
    far = Spectrogram(a.tau_axis + 1000.0, a.omega_axis, a.values.copy(), a.scale)
    with pytest.raises(DomainError):
        compare_maps(a, far)
