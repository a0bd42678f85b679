"""Far-field two-slit screen amplitudes and screen probability densities.

Each path amplitude is a shared Gaussian envelope times a linear phase,

    <x|psi_j> = g(x) * exp(i * (-1)**j * pi * x / period),
    g(x)      = (2 pi w^2)**(-1/4) * exp(-x^2 / (4 w^2)),

so ``g**2`` is a unit-area normal density of standard deviation ``w`` and
the two amplitudes overlap by ``exp(-2 (pi w / period)**2)``, which is
below 1e-70 once ``w / period >= 3``. The algebra below treats the overlap
as exactly zero.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .hilbert import NORM_TOL

DENSITY_INTEGRAL_TOL = 1e-6
MIN_ENVELOPE_PERIODS = 3.0

FACTOR_LAYOUTS = {
    1: (),
    2: ("detector",),
    4: ("detector", "ancilla"),
}


@dataclass(frozen=True)
class SlitGeometry:
    """Slit separation, wavelength, screen distance and envelope width, in meters."""

    slit_separation: float = 10e-6
    wavelength: float = 500e-9
    screen_distance: float = 1.0
    envelope_width: float = 0.15

    def __post_init__(self):
        for name in ("slit_separation", "wavelength", "screen_distance", "envelope_width"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite length, got {value!r}")
        ratio = self.envelope_width / self.fringe_period
        if ratio < MIN_ENVELOPE_PERIODS * (1 - 1e-12):
            raise ValueError(
                f"envelope_width / fringe_period = {ratio:.4g} < {MIN_ENVELOPE_PERIODS:g}; "
                "path amplitudes would not be orthogonal"
            )

    @property
    def fringe_period(self) -> float:
        return self.wavelength * self.screen_distance / self.slit_separation

    @property
    def wavenumber(self) -> float:
        """Angular fringe frequency ``2 pi / period`` on the screen."""
        return 2.0 * math.pi / self.fringe_period

    @property
    def path_overlap(self) -> float:
        """Residual ``<psi_1|psi_2>`` of the Gaussian model (real, positive)."""
        return math.exp(-2.0 * (math.pi * self.envelope_width / self.fringe_period) ** 2)

    @property
    def default_window(self) -> float:
        return 5.0 * self.envelope_width


DEFAULT_GEOMETRY = SlitGeometry()
DEFAULT_N_POINTS = 4096


@dataclass(frozen=True)
class QuantonEnvironmentState:
    """The joint state ``sum_j |psi_j> (x) |chi_j>`` over the two paths.

    ``chi`` has shape ``(2, env_dim)``; row ``j`` is the environment vector
    attached to path ``j + 1``. ``env_dim`` is 1 for a bare quanton, 2 with
    a path detector, 4 with detector and ancilla (detector index major).
    """

    chi: np.ndarray
    factor_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        chi = np.array(self.chi, dtype=np.complex128)
        if chi.ndim != 2 or chi.shape[0] != 2:
            raise ValueError(f"chi must have shape (2, env_dim), got {chi.shape}")
        if chi.shape[1] not in FACTOR_LAYOUTS:
            raise ValueError(f"env_dim must be one of {sorted(FACTOR_LAYOUTS)}, got {chi.shape[1]}")
        if not np.all(np.isfinite(chi)):
            raise ValueError("chi has non-finite amplitudes")
        total = float(np.sum(np.abs(chi) ** 2))
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {total!r})")
        chi.setflags(write=False)
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "factor_names", FACTOR_LAYOUTS[chi.shape[1]])

    @property
    def env_dim(self) -> int:
        return self.chi.shape[1]

    @property
    def env_dims(self) -> tuple[int, ...]:
        return (2,) * len(self.factor_names) if self.factor_names else (1,)

    def coherence(self) -> complex:
        """``<chi_1|chi_2>``, the factor multiplying ``psi_1^* psi_2``."""
        return complex(np.vdot(self.chi[0], self.chi[1]))


def bare_quanton() -> QuantonEnvironmentState:
    """Equal superposition of the two slits with no which-path record."""
    return QuantonEnvironmentState(np.full((2, 1), 1 / math.sqrt(2)))


def envelope(x, geom: SlitGeometry):
    """Gaussian amplitude envelope ``g(x)``."""
    w = geom.envelope_width
    return (2.0 * math.pi * w * w) ** -0.25 * np.exp(-np.square(x) / (4.0 * w * w))


def envelope_density(x, geom: SlitGeometry):
    """``g(x)**2``: normal density with standard deviation ``envelope_width``."""
    return np.square(envelope(x, geom))


def slit_amplitude(x, j: int, geom: SlitGeometry):
    """Screen amplitude ``<x|psi_j>`` for slit ``j`` in {1, 2}."""
    if j not in (1, 2):
        raise ValueError(f"slit index must be 1 or 2, got {j!r}")
    sign = -1.0 if j == 1 else 1.0
    return envelope(x, geom) * np.exp(1j * sign * math.pi * np.asarray(x) / geom.fringe_period)


def screen_density(state: QuantonEnvironmentState, x, geom: SlitGeometry):
    """Probability density per meter of hitting the screen at ``x``.

    Evaluates ``sum_jk psi_j(x) conj(psi_k(x)) <chi_k|chi_j>``; accepts a
    scalar or an array of positions.
    """
    x_arr = np.asarray(x, dtype=float)
    psi1 = slit_amplitude(x_arr, 1, geom)
    psi2 = slit_amplitude(x_arr, 2, geom)
    chi1, chi2 = state.chi
    n11 = np.vdot(chi1, chi1).real
    n22 = np.vdot(chi2, chi2).real
    c12 = np.vdot(chi1, chi2)
    cross = psi1 * np.conj(psi2) * np.conj(c12)
    rho = n11 * np.abs(psi1) ** 2 + n22 * np.abs(psi2) ** 2 + 2.0 * cross.real
    rho = np.maximum(rho, 0.0)
    return float(rho) if np.ndim(x) == 0 else rho


def screen_density_expanded(state: QuantonEnvironmentState, x, geom: SlitGeometry):
    """Density by expanding the state over the environment basis.

    Sums ``|sum_j psi_j(x) <e_m|chi_j>|**2`` over basis vectors ``e_m``;
    independent of the closed form in :func:`screen_density`.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    psi = np.stack([slit_amplitude(x_arr, 1, geom), slit_amplitude(x_arr, 2, geom)])
    total = np.zeros(x_arr.shape)
    for m in range(state.env_dim):
        amp = psi[0] * state.chi[0, m] + psi[1] * state.chi[1, m]
        total += np.abs(amp) ** 2
    return float(total[0]) if np.ndim(x) == 0 else total


@dataclass(frozen=True)
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray
    integral: float
    normalization_warning: bool = False

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x_m", "density_per_m"])
        for x, v in zip(self.grid, self.values):
            writer.writerow([repr(float(x)), repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DensityCurve":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["x_m", "density_per_m"]:
            raise ValueError("expected header x_m,density_per_m")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        grid, values = data[:, 0], data[:, 1]
        integral = float(np.trapezoid(values, grid))
        return cls(grid, values, integral, abs(integral - 1.0) > DENSITY_INTEGRAL_TOL)


def density_curve(
    state: QuantonEnvironmentState,
    geom: SlitGeometry = DEFAULT_GEOMETRY,
    x_max: float | None = None,
    n_points: int = DEFAULT_N_POINTS,
) -> DensityCurve:
    """Sample :func:`screen_density` on a uniform grid over ``[-x_max, x_max]``.

    The result carries ``normalization_warning`` when the trapezoid integral
    misses 1 by more than 1e-6, which happens when the window clips the
    envelope (below about ``5 w``).
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    if x_max is None:
        x_max = geom.default_window
    if not x_max > 0:
        raise ValueError("x_max must be positive")
    grid = np.linspace(-x_max, x_max, n_points)
    values = screen_density(state, grid, geom)
    integral = float(np.trapezoid(values, grid))
    return DensityCurve(grid, values, integral, abs(integral - 1.0) > DENSITY_INTEGRAL_TOL)


def fringe_maxima(curve: DensityCurve) -> np.ndarray:
    """Positions of the interior local maxima of a curve."""
    v = curve.values
    idx = np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]))[0] + 1
    return curve.grid[idx]
