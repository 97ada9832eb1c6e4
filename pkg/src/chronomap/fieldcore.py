"""Sampling grids, complex field containers, and pulse synthesis.

Everything downstream operates on a uniform time grid and its conjugate
angular-frequency grid. The transform convention is fixed once here and
inherited by every other module:

    forward:  S(w) = integral E(t) exp(+i w t) dt
    inverse:  E(t) = (1/2 pi) integral S(w) exp(-i w t) dw

Units are picoseconds for time and rad/ps for angular frequency, so
time-frequency areas are dimensionless. Carriers are stored relative to
a reference carrier (baseband representation); a pulse whose samples
carry exp(-i w_c t) has its spectral peak at w = +w_c under the forward
convention above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, ShapingError, SynthesisError

__all__ = [
    "SampleGrid",
    "ComplexField",
    "PulseSpec",
    "CompassSpec",
    "ShaperMask",
    "make_grid",
    "energy",
    "spectrum",
    "field_from_spectrum",
    "upsample2",
    "gaussian_pulse",
    "chirped_gaussian",
    "compass_state",
    "apply_shaper",
]

# Relative band-edge level below which a field counts as negligible when
# checking sampling headroom for nonlinear products.
SUPPORT_FLOOR = 1e-10


@dataclass(frozen=True)
class SampleGrid:
    """Uniform time grid with its conjugate angular-frequency grid.

    Parameters
    ----------
    n : int
        Sample count; must be a power of two, at least 16.
    dt : float
        Time step in ps.
    t_start : float
        First sample time in ps.

    Notes
    -----
    The conjugate grid has step ``dw = 2*pi/(n*dt)`` and is centered on
    zero: ``w_j = (j - n//2)*dw``. Adequacy of the frequency span for a
    given pulse is validated at synthesis time, not here.
    """

    n: int
    dt: float
    t_start: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ConfigError(f"grid size must be a power of two >= 16, got {self.n!r}")
        if not (isinstance(self.dt, (int, float)) and math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"grid step must be a positive finite number, got {self.dt!r}")
        if not (isinstance(self.t_start, (int, float)) and math.isfinite(self.t_start)):
            raise ConfigError(f"grid start must be finite, got {self.t_start!r}")

    @property
    def dw(self) -> float:
        """Angular-frequency step in rad/ps."""
        return 2.0 * math.pi / (self.n * self.dt)

    @property
    def t_end(self) -> float:
        """Last sample time in ps."""
        return self.t_start + (self.n - 1) * self.dt

    def times(self) -> np.ndarray:
        """Time samples, length ``n``."""
        return self.t_start + self.dt * np.arange(self.n)

    def ang_freqs(self) -> np.ndarray:
        """Centered conjugate angular-frequency samples, length ``n``."""
        return (np.arange(self.n) - self.n // 2) * self.dw

    @property
    def w_max(self) -> float:
        """Largest representable |w| common to both grid halves."""
        return (self.n // 2 - 1) * self.dw

    def delay_steps(self, tau: float) -> int:
        """Snap a delay to an integer number of grid steps.

        Delays must coincide with the sample lattice so that shifted
        copies of a field are again on-grid samples; this keeps the FFT
        and direct-summation transform paths exactly equivalent.

        Raises
        ------
        ConfigError
            If ``tau`` is not a multiple of ``dt`` (tolerance 1e-6 dt).
        DomainError
            If the shift exceeds the grid span.
        """
        if not math.isfinite(tau):
            raise ConfigError(f"delay must be finite, got {tau!r}")
        s = round(tau / self.dt)
        if abs(tau - s * self.dt) > 1e-6 * self.dt:
            raise ConfigError(
                f"delay {tau} ps is not on the sample lattice (step {self.dt} ps)"
            )
        if abs(s) > self.n - 1:
            raise DomainError(f"delay {tau} ps exceeds the grid span of {self.n * self.dt} ps")
        return int(s)


def make_grid(n: int, dt: float, t_start: float) -> SampleGrid:
    """Construct a :class:`SampleGrid`.

    Parameters
    ----------
    n : int
        Power-of-two sample count, >= 16.
    dt : float
        Time step in ps, > 0.
    t_start : float
        First sample time in ps.

    Returns
    -------
    SampleGrid

    Raises
    ------
    ConfigError
        On a non-power-of-two count or non-positive step.
    """
    return SampleGrid(n=n, dt=dt, t_start=t_start)


@dataclass(frozen=True)
class ComplexField:
    """Complex field samples bound to their grid.

    Samples are coerced to complex128, must all be finite, and are
    frozen read-only after construction; all operations on fields are
    pure functions returning new objects.
    """

    grid: SampleGrid
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.shape != (self.grid.n,):
            raise ConfigError(
                f"field has {s.shape} samples for a grid of {self.grid.n}"
            )
        if not np.all(np.isfinite(s.view(np.float64))):
            raise ConfigError("field samples must be finite")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)


def energy(f: ComplexField) -> float:
    """Squared norm ``sum |E|^2 dt`` of a field."""
    return float(np.sum(np.abs(f.samples) ** 2) * f.grid.dt)


def spectrum(f: ComplexField) -> np.ndarray:
    """Field spectrum on the grid's conjugate axis.

    Evaluates ``S(w_j) = sum_k E(t_k) exp(+i w_j t_k) dt`` exactly (an
    FFT plus the start-time phase factor), aligned with
    ``grid.ang_freqs()``.
    """
    g = f.grid
    s = np.fft.fftshift(g.n * np.fft.ifft(f.samples))
    return (g.dt * np.exp(1j * g.ang_freqs() * g.t_start)) * s


def field_from_spectrum(grid: SampleGrid, values: np.ndarray) -> ComplexField:
    """Inverse of :func:`spectrum` on the same grid (exact round trip)."""
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (grid.n,):
        raise ConfigError(f"spectrum has {values.shape} samples for a grid of {grid.n}")
    b = values * np.exp(-1j * grid.ang_freqs() * grid.t_start)
    samples = np.fft.fft(np.fft.ifftshift(b)) / (grid.n * grid.dt)
    return ComplexField(grid, samples)


def upsample2(f: ComplexField) -> ComplexField:
    """Resample a field onto the twice-finer grid over the same span.

    Spectral zero padding; exact trigonometric interpolation for fields
    that respect the sampling headroom enforced at synthesis.
    """
    g = f.grid
    fine = SampleGrid(2 * g.n, g.dt / 2.0, g.t_start)
    s = spectrum(f)
    big = np.zeros(fine.n, dtype=np.complex128)
    big[g.n // 2 : g.n // 2 + g.n] = s
    return field_from_spectrum(fine, big)


def spectral_support(f: ComplexField, floor: float = SUPPORT_FLOOR) -> float:
    """Largest |w| at which the spectrum exceeds ``floor`` times its peak."""
    s = np.abs(spectrum(f))
    peak = s.max()
    if peak == 0.0:
        return 0.0
    idx = np.nonzero(s > floor * peak)[0]
    w = f.grid.ang_freqs()
    return float(np.max(np.abs(w[idx])))


@dataclass(frozen=True)
class PulseSpec:
    """Parameters of a single Gaussian pulse.

    Parameters
    ----------
    center_time : float
        Temporal center in ps.
    center_ang_freq : float
        Carrier in rad/ps, relative to the reference carrier.
    sigma : float
        Gaussian width parameter in ps (exponent ``-(t-t0)^2/(2 sigma^2)``).
    amplitude : float
        Linear amplitude factor, >= 0.
    phase : float
        Constant phase in radians.
    """

    center_time: float
    center_ang_freq: float
    sigma: float
    amplitude: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ConfigError(f"pulse width must be positive, got {self.sigma!r}")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ConfigError(f"pulse amplitude must be >= 0, got {self.amplitude!r}")
        for name in ("center_time", "center_ang_freq", "phase"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"pulse {name} must be finite")


@dataclass(frozen=True)
class CompassSpec:
    """Four-pulse superposition spread along both conjugate axes.

    The four component pulses sit at the phase-space points
    ``(time, carrier) = (+t0, -omega0), (-t0, -omega0), (+t0, +omega0),
    (-t0, +omega0)``, in that order; ``amplitudes`` and ``phases`` are
    indexed accordingly. Equal amplitudes with zero phases give the
    real, even canonical state; zeroing one carrier pair
    (e.g. ``amplitudes=(1, 1, 0, 0)``) leaves a two-pulse cat.
    """

    t0: float
    omega0: float
    sigma: float
    amplitudes: tuple = (1.0, 1.0, 1.0, 1.0)
    phases: tuple = (0.0, 0.0, 0.0, 0.0)

    # Signs defining the pulse positions, index-aligned with amplitudes.
    TIME_SIGNS = (+1.0, -1.0, +1.0, -1.0)
    FREQ_SIGNS = (-1.0, -1.0, +1.0, +1.0)

    def __post_init__(self):
        for name in ("t0", "omega0", "sigma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"compass {name} must be positive, got {v!r}")
        amps = tuple(float(a) for a in self.amplitudes)
        phis = tuple(float(p) for p in self.phases)
        if len(amps) != 4 or len(phis) != 4:
            raise ConfigError("compass states take exactly four amplitudes and four phases")
        if not all(math.isfinite(a) and a >= 0 for a in amps):
            raise ConfigError("compass amplitudes must be finite and >= 0")
        if not any(a > 0 for a in amps):
            raise ConfigError("at least one compass amplitude must be positive")
        if not all(math.isfinite(p) for p in phis):
            raise ConfigError("compass phases must be finite")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "phases", phis)


@dataclass(frozen=True)
class ShaperMask:
    """Pulse-shaper transfer function: spectral block plus cosine mask.

    ``mask_t0`` parameterizes the cosine transfer
    ``M(w) = cos(w*mask_t0) * exp(-i*w*mask_t0)``, which splits a pulse
    into two replicas separated by ``2*mask_t0``; ``mask_t0 = 0`` is the
    identity. A band of halfwidth ``block_halfwidth`` around
    ``block_center`` is zeroed (0 disables blocking).
    """

    mask_t0: float = 0.0
    block_center: float = 0.0
    block_halfwidth: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.mask_t0) and self.mask_t0 >= 0):
            raise ConfigError(f"mask delay must be >= 0, got {self.mask_t0!r}")
        if not (math.isfinite(self.block_halfwidth) and self.block_halfwidth >= 0):
            raise ConfigError(f"block halfwidth must be >= 0, got {self.block_halfwidth!r}")
        if not math.isfinite(self.block_center):
            raise ConfigError("block center must be finite")


def _check_time_span(grid: SampleGrid, lo: float, hi: float, what: str):
    if lo < grid.t_start or hi > grid.t_end:
        raise SynthesisError(
            f"{what} needs time coverage [{lo:g}, {hi:g}] ps but the grid spans "
            f"[{grid.t_start:g}, {grid.t_end:g}] ps"
        )


def _check_freq_span(grid: SampleGrid, needed: float, what: str):
    if needed > grid.w_max:
        raise SynthesisError(
            f"{what}: required bandwidth {needed:g} rad/ps exceeds the grid's "
            f"{grid.w_max:g} rad/ps; reduce dt or widen the grid"
        )


def gaussian_pulse(grid: SampleGrid, spec: PulseSpec) -> ComplexField:
    """Synthesize a single Gaussian pulse.

    Parameters
    ----------
    grid : SampleGrid
    spec : PulseSpec

    Returns
    -------
    ComplexField
        Samples ``amplitude * exp(-(t-center_time)^2/(2 sigma^2))
        * exp(-i*center_ang_freq*t + i*phase)``, unnormalized.

    Raises
    ------
    SynthesisError
        If the grid does not cover the pulse in time (5 sigma) or in
        frequency (carrier plus 5/sigma), or if the amplitude is zero
        (zero-norm field).
    """
    _check_time_span(grid, spec.center_time - 5 * spec.sigma,
                     spec.center_time + 5 * spec.sigma, "pulse")
    _check_freq_span(grid, abs(spec.center_ang_freq) + 5.0 / spec.sigma,
                     f"carrier {spec.center_ang_freq:g} rad/ps")
    t = grid.times()
    samples = spec.amplitude * np.exp(
        -((t - spec.center_time) ** 2) / (2.0 * spec.sigma**2)
        - 1j * spec.center_ang_freq * t
        + 1j * spec.phase
    )
    out = ComplexField(grid, samples)
    if energy(out) <= 0.0:
        raise SynthesisError("pulse with zero amplitude yields a zero-norm field")
    return out


def chirped_gaussian(grid: SampleGrid, sigma: float, chirp: float,
                     center_time: float = 0.0, center_ang_freq: float = 0.0,
                     amplitude: float = 1.0, phase: float = 0.0) -> ComplexField:
    """Gaussian pulse with a quadratic temporal phase.

    Samples follow ``amplitude * exp(-(1 + i*chirp)*(t-t_c)^2/(2 sigma^2))
    * exp(-i*center_ang_freq*t + i*phase)``. ``chirp = 0`` reduces to
    :func:`gaussian_pulse`. Used to probe behavior outside the
    real-envelope, linear-phase regime.
    """
    if not (math.isfinite(sigma) and sigma > 0):
        raise ConfigError(f"pulse width must be positive, got {sigma!r}")
    if not math.isfinite(chirp):
        raise ConfigError("chirp must be finite")
    if not (math.isfinite(amplitude) and amplitude > 0):
        raise ConfigError("amplitude must be positive")
    _check_time_span(grid, center_time - 5 * sigma, center_time + 5 * sigma, "pulse")
    # Chirp broadens the spectrum by sqrt(1 + chirp^2).
    _check_freq_span(grid, abs(center_ang_freq) + 5.0 * math.sqrt(1 + chirp**2) / sigma,
                     f"carrier {center_ang_freq:g} rad/ps (chirped)")
    t = grid.times()
    samples = amplitude * np.exp(
        -(1.0 + 1j * chirp) * (t - center_time) ** 2 / (2.0 * sigma**2)
        - 1j * center_ang_freq * t
        + 1j * phase
    )
    return ComplexField(grid, samples)


def compass_state(grid: SampleGrid, spec: CompassSpec) -> ComplexField:
    """Synthesize the four-pulse compass superposition, unit energy.

    The coherent sum of four Gaussian pulses at ``(+-t0, -+omega0)``
    (ordering documented on :class:`CompassSpec`), each weighted by its
    amplitude and phase, normalized to unit energy.

    Raises
    ------
    SynthesisError
        If the grid does not cover ``+-(t0 + 5 sigma)`` in time or
        ``+-(omega0 + 5/sigma)`` in frequency.
    """
    _check_time_span(grid, -(spec.t0 + 5 * spec.sigma), spec.t0 + 5 * spec.sigma,
                     "compass state")
    _check_freq_span(grid, spec.omega0 + 5.0 / spec.sigma,
                     f"carrier +-{spec.omega0:g} rad/ps")
    t = grid.times()
    samples = np.zeros(grid.n, dtype=np.complex128)
    for a, phi, st, sf in zip(spec.amplitudes, spec.phases,
                              CompassSpec.TIME_SIGNS, CompassSpec.FREQ_SIGNS):
        if a == 0.0:
            continue
        samples += a * np.exp(
            -((t - st * spec.t0) ** 2) / (2.0 * spec.sigma**2)
            - 1j * (sf * spec.omega0) * t
            + 1j * phi
        )
    out = ComplexField(grid, samples)
    e = energy(out)
    if e <= 0.0:
        raise SynthesisError("compass amplitudes produced a zero-norm field")
    return ComplexField(grid, out.samples / math.sqrt(e))


def apply_shaper(f: ComplexField, mask: ShaperMask) -> ComplexField:
    """Apply a shaper mask to a field in the spectral domain.

    Multiplies the spectrum by the cosine transfer
    ``cos(w*mask_t0)*exp(-i*w*mask_t0)``, zeroes the blocked band
    ``|w - block_center| < block_halfwidth``, and transforms back. The
    cosine transfer realizes ``(E(t) + E(t + 2*mask_t0))/2``; energy is
    never renormalized, so the in-band fraction is preserved exactly.

    Raises
    ------
    ShapingError
        If the blocked band extends beyond the grid's frequency span,
        or if blocking removes (essentially) all field energy
        (output below 1e-12 of input energy).
    """
    g = f.grid
    w = g.ang_freqs()
    if mask.block_halfwidth > 0:
        lo = mask.block_center - mask.block_halfwidth
        hi = mask.block_center + mask.block_halfwidth
        if lo < w[0] or hi > w[-1]:
            raise ShapingError(
                f"blocked band [{lo:g}, {hi:g}] rad/ps lies outside the grid span "
                f"[{w[0]:g}, {w[-1]:g}] rad/ps"
            )
    s = spectrum(f)
    if mask.mask_t0 != 0.0:
        s = s * (np.cos(w * mask.mask_t0) * np.exp(-1j * w * mask.mask_t0))
    if mask.block_halfwidth > 0:
        s = np.where(np.abs(w - mask.block_center) < mask.block_halfwidth, 0.0, s)
    out = field_from_spectrum(g, s)
    if energy(out) <= 1e-12 * energy(f):
        raise ShapingError("mask removed all field energy (over-blocking)")
    return out
