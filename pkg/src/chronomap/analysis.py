"""Measurements on time-frequency maps.

Cross-section extraction, zero finding on signed and intensity data,
central-chessboard cell areas with a sub-Fourier verdict against the
uncertainty-relation unit 0.5, pulse-separation sweeps, and map
similarity scoring.
"""

import dataclasses
import math

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import (
    ComputeError,
    ConfigError,
    DataError,
    DomainError,
    InsufficientStructureError,
)
from .fieldcore import SampleGrid, make_grid
from .transforms import Spectrogram, WignerMap, shg_frog
from .fieldcore import CompassSpec, compass_state

SUB_FOURIER_LIMIT = 0.5

# Fraction of the global peak a lobe must reach to count as a satellite
# when deriving the default central window.
SATELLITE_FLOOR = 0.05

# Zeros of sampled interference patterns fall between grid nodes, so the
# sampled minimum bottoms out near (fringe rate x half step)^2 of the
# flanking maxima; the default accepts those minima with margin while
# still rejecting percent-level noise wiggles.
DEFAULT_NOISE_FLOOR = 0.05

# Sign changes whose neighborhood amplitude stays below this fraction of
# the slice peak are roundoff chatter, not interference fringes.
SIGN_CHATTER_FLOOR = 1e-9


@dataclasses.dataclass(frozen=True)
class Window:
    """Axis-aligned central region of a map.

    For spectrograms the fields are delay (ps) and angular frequency
    (rad/ps); for Wigner maps the same fields are read as the time-like
    and frequency-like phase-space coordinates.
    """

    tau_center: float
    tau_halfwidth: float
    omega_center: float
    omega_halfwidth: float

    def __post_init__(self):
        for name in ("tau_center", "tau_halfwidth", "omega_center", "omega_halfwidth"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ConfigError(f"window {name} must be finite, got {v!r}")
        if self.tau_halfwidth <= 0 or self.omega_halfwidth <= 0:
            raise ConfigError("window halfwidths must be positive")


@dataclasses.dataclass(frozen=True)
class CrossSection:
    """One-dimensional slice of a map.

    ``kind`` is ``"intensity"`` for spectrogram slices (non-negative)
    and ``"signed"`` for Wigner slices. ``fixed_coordinate`` records the
    held axis by name together with the held value.
    """

    axis: np.ndarray
    values: np.ndarray
    kind: str
    fixed_coordinate: tuple

    def __post_init__(self):
        ax = np.asarray(self.axis, float)
        vals = np.asarray(self.values, float)
        if ax.ndim != 1 or ax.size < 2 or vals.shape != ax.shape:
            raise ConfigError("cross-section axis and values must be matching 1D arrays")
        steps = np.diff(ax)
        if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise ConfigError("cross-section axis must be uniform and increasing")
        if self.kind not in ("intensity", "signed"):
            raise ConfigError(f"unknown cross-section kind {self.kind!r}")
        if self.kind == "intensity" and np.any(vals[np.isfinite(vals)] < 0):
            raise ConfigError("intensity cross-section values must be non-negative")
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "values", vals)
        ax.setflags(write=False)
        vals.setflags(write=False)


@dataclasses.dataclass(frozen=True)
class ZeroSet:
    """Ordered zero positions of a cross-section and the method used."""

    positions: np.ndarray
    method: str

    def __post_init__(self):
        pos = np.asarray(self.positions, float)
        if pos.ndim != 1:
            raise ConfigError("zero positions must form a 1D array")
        if pos.size > 1 and np.any(np.diff(pos) <= 0):
            raise ConfigError("zero positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)
        pos.setflags(write=False)


@dataclasses.dataclass(frozen=True)
class CellAreaReport:
    """Central-chessboard cell statistics.

    Spacing lists hold the interior zero spacings actually used to form
    cells (edge cells excluded); ``cell_areas`` holds every product of
    an interior delay spacing with an interior frequency spacing. When
    only one axis carries interference the other lists are empty and
    ``mean_area`` and ``sub_fourier`` are ``None``.
    """

    tau_spacings: np.ndarray
    omega_spacings: np.ndarray
    cell_areas: np.ndarray
    mean_area: float | None
    sub_fourier: bool | None
    window: Window

    def __post_init__(self):
        for name in ("tau_spacings", "omega_spacings", "cell_areas"):
            arr = np.asarray(getattr(self, name), float)
            object.__setattr__(self, name, arr)
            arr.setflags(write=False)
        if self.mean_area is not None and not self.mean_area > 0:
            raise ConfigError("mean cell area must be positive when defined")


@dataclasses.dataclass(frozen=True)
class SweepPoint:
    """One pulse-separation sweep result; errors are recorded per point."""

    t0: float
    mean_area: float | None
    sub_fourier: bool | None
    status: str
    message: str = ""


def _map_axes(m):
    if isinstance(m, Spectrogram):
        return m.tau_axis, m.omega_axis, "delay", "frequency", "intensity"
    if isinstance(m, WignerMap):
        return m.q_axis, m.p_axis, "delay", "frequency", "signed"
    raise ConfigError(f"cannot take cross-sections of {type(m).__name__}")


def cross_section(m, axis_choice: str, fixed_value: float) -> CrossSection:
    """Slice a map along one axis with the other held fixed.

    Parameters
    ----------
    m : Spectrogram or WignerMap
    axis_choice : str
        ``"delay"`` slices along the time-like axis holding the
        frequency-like coordinate at ``fixed_value``; ``"frequency"``
        the converse.
    fixed_value : float
        Held coordinate. Values between grid lines interpolate linearly
        between the two nearest lines; a value on a grid line extracts
        that row or column exactly.
    """
    ax_t, ax_w, name_t, name_w, kind = _map_axes(m)
    if axis_choice == name_t:
        run_axis, held_axis, held_name = ax_t, ax_w, name_w
        gather = lambda j, w0, w1: w0 * m.values[:, j] + w1 * m.values[:, j + 1]
        exact = lambda j: m.values[:, j]
    elif axis_choice == name_w:
        run_axis, held_axis, held_name = ax_w, ax_t, name_t
        gather = lambda j, w0, w1: w0 * m.values[j, :] + w1 * m.values[j + 1, :]
        exact = lambda j: m.values[j, :]
    else:
        raise ConfigError(
            f"axis_choice must be {name_t!r} or {name_w!r}, got {axis_choice!r}"
        )
    v = float(fixed_value)
    if not math.isfinite(v):
        raise ConfigError("fixed coordinate must be finite")
    if v < held_axis[0] or v > held_axis[-1]:
        raise DomainError(
            f"fixed {held_name} {v:g} outside the map range "
            f"[{held_axis[0]:g}, {held_axis[-1]:g}]"
        )
    step = held_axis[1] - held_axis[0]
    pos = (v - held_axis[0]) / step
    j = min(int(np.floor(pos)), held_axis.size - 2)
    frac = pos - j
    if frac < 1e-9:
        values = exact(j)
    elif frac > 1 - 1e-9:
        values = exact(j + 1)
    else:
        values = gather(j, 1 - frac, frac)
    return CrossSection(run_axis.copy(), np.array(values, float), kind,
                        (held_name, v))


def find_zeros(section: CrossSection, noise_floor: float = DEFAULT_NOISE_FLOOR) -> ZeroSet:
    """Locate zeros of a cross-section.

    Signed data yields sign-change positions by linear interpolation;
    crossings at roundoff amplitude (below :data:`SIGN_CHATTER_FLOOR`
    of the slice peak) are discarded. For intensity data,
    ``noise_floor`` sets the criterion: local minima qualify when their
    value falls below ``noise_floor`` times the smaller of the two
    flanking local maxima, with the position refined by a parabolic fit
    through the bracketing samples. The default floor works for both
    simulated maps (whose sampled minima sit quadratically above zero,
    see :data:`DEFAULT_NOISE_FLOOR`) and measured traces (which never
    reach exact zero).
    """
    if not 0 <= noise_floor < 1:
        raise ConfigError(f"noise_floor must lie in [0, 1), got {noise_floor!r}")
    x = section.axis
    y = section.values
    if x.size < 3:
        raise ConfigError("zero finding needs at least 3 samples")
    if not np.all(np.isfinite(y)):
        raise DataError("cross-section contains non-finite values")
    if section.kind == "signed":
        return ZeroSet(_sign_change_zeros(x, y), "sign-change")
    return ZeroSet(_intensity_zeros(x, y, noise_floor), "minimum-below-threshold")


def _sign_change_zeros(x, y):
    gate = SIGN_CHATTER_FLOOR * np.max(np.abs(y))
    out = []
    s = np.sign(y)
    for i in range(y.size - 1):
        if s[i] == 0:
            # a node sitting exactly on zero counts once, as a crossing
            if 0 < i and s[i - 1] * s[i + 1] < 0 and max(abs(y[i - 1]), abs(y[i + 1])) >= gate:
                out.append(x[i])
        elif s[i + 1] != 0 and s[i] != s[i + 1]:
            if max(abs(y[i]), abs(y[i + 1])) >= gate:
                out.append(x[i] - y[i] * (x[i + 1] - x[i]) / (y[i + 1] - y[i]))
    return np.array(out)


def _intensity_zeros(x, y, noise_floor):
    n = y.size
    maxima = [i for i in range(1, n - 1) if y[i] > y[i - 1] and y[i] >= y[i + 1]]
    out = []
    for i in range(1, n - 1):
        if not (y[i] < y[i - 1] and y[i] <= y[i + 1]):
            continue
        left = [m for m in maxima if m < i]
        right = [m for m in maxima if m > i]
        if not left or not right:
            continue
        flank = min(y[left[-1]], y[right[0]])
        if flank <= 0 or y[i] >= noise_floor * flank:
            continue
        # parabola through the bracketing triple; vertex clamped inside
        d2 = y[i - 1] - 2 * y[i] + y[i + 1]
        shift = 0.0 if d2 <= 0 else 0.5 * (y[i - 1] - y[i + 1]) / d2
        shift = min(1.0, max(-1.0, shift))
        out.append(x[i] + shift * (x[i + 1] - x[i]))
    return np.array(out)


def interior_spacings(spacings) -> np.ndarray:
    """Drop edge spacings, keeping at least the three central ones.

    Outer zero spacings are biased by the wings of the satellite lobes
    just outside the central window; up to two per side are discarded
    when enough remain.
    """
    s = np.asarray(spacings, float)
    k = min(2, max(0, (s.size - 3) // 2))
    return s[k : s.size - k] if k else s


def _satellite_halfwidth(axis, profile, fallback):
    """Half the centroid position of the outermost strong lobe cluster.

    Fringed lobes produce runs of local maxima; runs are split where the
    gap between maxima clearly exceeds the typical fringe spacing, and
    the outermost run's intensity-weighted centroid marks the satellite
    center. Returns ``fallback`` when no distinct outer cluster exists.
    """
    peak = profile.max()
    if peak <= 0:
        return fallback
    idx = [
        i
        for i in range(1, profile.size - 1)
        if profile[i] >= profile[i - 1]
        and profile[i] >= profile[i + 1]
        and profile[i] > SATELLITE_FLOOR * peak
    ]
    if len(idx) < 2:
        return fallback
    pos = axis[idx]
    val = profile[idx]
    gaps = np.diff(pos)
    cut = max(3 * np.median(gaps), 5 * (axis[1] - axis[0]))
    starts = [0] + [i + 1 for i in range(gaps.size) if gaps[i] > cut]
    bounds = starts + [pos.size]
    clusters = [
        (pos[a:b], val[a:b]) for a, b in zip(bounds[:-1], bounds[1:])
    ]
    if len(clusters) < 2:
        return fallback
    centroids = [float(np.sum(p * v) / np.sum(v)) for p, v in clusters]
    outermost = max(abs(c) for c in centroids)
    if outermost <= 3 * (axis[1] - axis[0]):
        return fallback
    return outermost / 2


def _auto_window(m) -> Window:
    """Default central window: halfway out to the satellite lobes.

    Satellites are located on the two center-line slices (the
    projections mix central and satellite fringes without a gap). When
    a slice shows no separated satellites the halfwidth falls back to a
    quarter of the axis span; callers that know the synthesis
    parameters should pass an explicit window instead.
    """
    ax_t, ax_w, *_ = _map_axes(m)
    c_t = 0.0 if ax_t[0] <= 0 <= ax_t[-1] else (ax_t[0] + ax_t[-1]) / 2
    c_w = 0.0 if ax_w[0] <= 0 <= ax_w[-1] else (ax_w[0] + ax_w[-1]) / 2
    mid_t = np.abs(cross_section(m, "delay", c_w).values)
    mid_w = np.abs(cross_section(m, "frequency", c_t).values)
    half_t = _satellite_halfwidth(ax_t - c_t, mid_t, (ax_t[-1] - ax_t[0]) / 4)
    half_w = _satellite_halfwidth(ax_w - c_w, mid_w, (ax_w[-1] - ax_w[0]) / 4)
    return Window(c_t, half_t, c_w, half_w)


def _windowed_section(m, axis_choice, center, lo, hi) -> CrossSection:
    sec = cross_section(m, axis_choice, center)
    keep = (sec.axis >= lo) & (sec.axis <= hi)
    if np.count_nonzero(keep) < 3:
        raise InsufficientStructureError(
            "window spans fewer than 3 samples along the "
            f"{axis_choice} axis"
        )
    return CrossSection(sec.axis[keep], sec.values[keep], sec.kind,
                        sec.fixed_coordinate)


def _windowed_zero_pair(m, window, noise_floor):
    sec_t = _windowed_section(
        m, "delay", window.omega_center,
        window.tau_center - window.tau_halfwidth,
        window.tau_center + window.tau_halfwidth,
    )
    sec_w = _windowed_section(
        m, "frequency", window.tau_center,
        window.omega_center - window.omega_halfwidth,
        window.omega_center + window.omega_halfwidth,
    )
    zt = find_zeros(sec_t, noise_floor).positions
    zw = find_zeros(sec_w, noise_floor).positions
    return zt, zw


def _build_report(zt, zw, window) -> CellAreaReport:
    has_t, has_w = zt.size >= 2, zw.size >= 2
    if not has_t and not has_w:
        raise InsufficientStructureError(
            "fewer than 2 zeros along both axes; no interference cells"
        )
    st = interior_spacings(np.diff(zt)) if has_t else np.array([])
    sw = interior_spacings(np.diff(zw)) if has_w else np.array([])
    if has_t and has_w:
        areas = np.outer(st, sw).ravel()
        mean = float(areas.mean())
        return CellAreaReport(st, sw, areas, mean, bool(mean < SUB_FOURIER_LIMIT), window)
    # single-direction interference: spacing report only, no verdict
    return CellAreaReport(st, sw, np.array([]), None, None, window)


def cell_areas(m: Spectrogram, window: Window | None = None,
               noise_floor: float = DEFAULT_NOISE_FLOOR) -> CellAreaReport:
    """Measure central-chessboard cells of a spectrogram.

    Zeros are located on the two central axis-aligned slices inside
    ``window`` (default: halfway out to the satellite lobes, which for
    an ideal four-pulse state means delays within the pulse separation
    and frequencies within the carrier offset). Cells are products of
    adjacent interior zero spacings; the verdict compares their mean
    with the uncertainty-relation unit 0.5. Fewer than 2 zeros along
    either axis raises :class:`InsufficientStructureError`.
    """
    if not isinstance(m, Spectrogram):
        raise ConfigError("cell_areas expects a Spectrogram")
    win = _auto_window(m) if window is None else window
    zt, zw = _windowed_zero_pair(m, win, noise_floor)
    if zt.size < 2 or zw.size < 2:
        raise InsufficientStructureError(
            f"need at least 2 zeros per axis, found {zt.size} delay / "
            f"{zw.size} frequency zeros in the central window"
        )
    return _build_report(zt, zw, win)


def wigner_cell_areas(m: WignerMap, window: Window | None = None) -> CellAreaReport:
    """Measure interference cells of a Wigner map by sign-change zeros.

    As :func:`cell_areas` but on the signed distribution. A state with
    interference along only one phase-space direction yields a
    one-directional spacing report with ``mean_area`` and
    ``sub_fourier`` left ``None``; no sign changes along either
    direction raises :class:`InsufficientStructureError`.
    """
    if not isinstance(m, WignerMap):
        raise ConfigError("wigner_cell_areas expects a WignerMap")
    win = _auto_window(m) if window is None else window
    zt, zw = _windowed_zero_pair(m, win, 0.0)
    return _build_report(zt, zw, win)


def sweep_separation(base: CompassSpec, t0_values, grid: SampleGrid | None = None,
                     noise_floor: float = DEFAULT_NOISE_FLOOR) -> tuple:
    """Run the pulse-separation sweep: state, spectrogram, cell areas.

    Each separation in ``t0_values`` replaces ``base.t0`` and is
    analyzed inside the window reaching halfway to the satellite
    positions (delays within the pulse separation, frequencies within
    the carrier offset). Failures (synthesis span, insufficient
    structure) are recorded in the returned :class:`SweepPoint` entries
    rather than raised, so a partial series survives bad points.
    """
    if grid is None:
        grid = make_grid(2048, 0.02, -20.48)
    points = []
    for t0 in t0_values:
        t0 = float(t0)
        try:
            spec = dataclasses.replace(base, t0=t0)
            field = compass_state(grid, spec)
            tau_max = 2 * t0 + 1.0
            steps = int(round(tau_max / grid.dt))
            taus = grid.dt * np.arange(-steps, steps + 1)
            window = Window(0.0, t0, 0.0, base.omega0)
            report = cell_areas(shg_frog(field, taus), window, noise_floor)
            points.append(SweepPoint(t0, report.mean_area, report.sub_fourier, "ok"))
        except (ConfigError, ComputeError, DataError) as exc:
            points.append(SweepPoint(t0, None, None, "error", str(exc)))
    return tuple(points)


def compare_maps(a, b) -> float:
    """Similarity of two maps of the same kind in [-1, 1].

    Both maps are resampled bilinearly onto the intersection of their
    axis ranges (step: the finer of the two per axis), peak-normalized,
    and scored by the correlation of the overlapping patches.
    """
    if type(a) is not type(b):
        raise ConfigError("compare_maps needs two maps of the same type")
    ax_t_a, ax_w_a, *_ = _map_axes(a)
    ax_t_b, ax_w_b, *_ = _map_axes(b)
    patches = []
    lo_t, hi_t = max(ax_t_a[0], ax_t_b[0]), min(ax_t_a[-1], ax_t_b[-1])
    lo_w, hi_w = max(ax_w_a[0], ax_w_b[0]), min(ax_w_a[-1], ax_w_b[-1])
    if lo_t >= hi_t or lo_w >= hi_w:
        raise DomainError("maps do not overlap; nothing to compare")
    step_t = min(ax_t_a[1] - ax_t_a[0], ax_t_b[1] - ax_t_b[0])
    step_w = min(ax_w_a[1] - ax_w_a[0], ax_w_b[1] - ax_w_b[0])
    ts = np.linspace(lo_t, hi_t, max(2, int(round((hi_t - lo_t) / step_t)) + 1))
    ws = np.linspace(lo_w, hi_w, max(2, int(round((hi_w - lo_w) / step_w)) + 1))
    T, W = np.meshgrid(ts, ws, indexing="ij")
    pts = np.stack([T.ravel(), W.ravel()], axis=-1)
    for m, ax_t, ax_w in ((a, ax_t_a, ax_w_a), (b, ax_t_b, ax_w_b)):
        interp = RegularGridInterpolator((ax_t, ax_w), m.values, method="linear")
        patch = interp(pts)
        peak = np.max(np.abs(patch))
        if peak == 0:
            raise ComputeError("map is identically zero on the shared region")
        patches.append(patch / peak)
    x, y = patches
    sx, sy = x.std(), y.std()
    if sx == 0 or sy == 0:
        raise ComputeError("map has no variation on the shared region")
    r = float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))
    return max(-1.0, min(1.0, r))
