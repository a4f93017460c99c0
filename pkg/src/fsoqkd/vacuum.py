"""Vacuum-propagation mode sets and their power coupling matrices.

Two families of spatial modes are modeled over the same pupil pair:

* Laguerre-Gauss (LG) modes over soft Gaussian pupils.  These are the
  vacuum normal modes, so their vacuum coupling matrix is diagonal with
  transmissivity depending only on the mode order q = 2p + |l| + 1.
* Focused-beam (FB) tiles over hard square pupils: an N x N grid of
  flat-top beams, each focused onto the matching receiver pixel.  The
  vacuum coupling factorizes into per-axis overlap integrals that depend
  only on the pixel-index differences, so matrices are Toeplitz in each
  axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .channel import DerivedChannel, HardSquare, SoftGaussian
from .numerics import integrate_1d

__all__ = [
    "LGMode",
    "HGMode",
    "FBPixel",
    "ModeId",
    "CouplingMatrix",
    "mode_label",
    "lg_vacuum_eta",
    "lg_modes_up_to",
    "lg_mode_count",
    "lg_mode_scale",
    "lg_vacuum_matrix",
    "fb_pixel_grid",
    "fb_vacuum_eta",
    "fb_vacuum_matrix",
    "qkd_capacity",
    "lg_vacuum_capacity",
]


@dataclass(frozen=True)
class LGMode:
    """Laguerre-Gauss mode with radial index p >= 0 and azimuthal index l."""

    p: int
    l: int

    def __post_init__(self) -> None:
        if self.p < 0:
            raise ValueError(f"radial index must be >= 0, got {self.p}")

    @property
    def order(self) -> int:
        """Mode order q = 2p + |l| + 1 (the vacuum transmissivity exponent)."""
        return 2 * self.p + abs(self.l) + 1


@dataclass(frozen=True)
class HGMode:
    """Hermite-Gauss mode with x index n >= 0 and y index m >= 0."""

    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 0 or self.m < 0:
            raise ValueError(f"HG indices must be >= 0, got ({self.n}, {self.m})")

    @property
    def order(self) -> int:
        return self.n + self.m + 1


@dataclass(frozen=True)
class FBPixel:
    """Focused beam aimed at pixel (n, m) of an N x N receiver grid, 1-based."""

    n: int
    m: int
    grid: int

    def __post_init__(self) -> None:
        if self.grid < 1:
            raise ValueError(f"grid size must be >= 1, got {self.grid}")
        if not (1 <= self.n <= self.grid and 1 <= self.m <= self.grid):
            raise ValueError(
                f"pixel ({self.n}, {self.m}) outside 1..{self.grid} grid"
            )


ModeId = Union[LGMode, HGMode, FBPixel]


def mode_label(mode: ModeId) -> str:
    if isinstance(mode, LGMode):
        return f"lg(p={mode.p},l={mode.l:+d})"
    if isinstance(mode, HGMode):
        return f"hg(n={mode.n},m={mode.m})"
    if isinstance(mode, FBPixel):
        return f"fb(n={mode.n},m={mode.m};N={mode.grid})"
    raise TypeError(f"not a mode id: {mode!r}")


@dataclass(frozen=True)
class CouplingMatrix:
    """Dense power-coupling matrix eta[i, j] from modes[i] into modes[j].

    Entries are average power transmissivities in [0, 1]; each row sums to
    at most 1 (power into the modeled output set cannot exceed the power
    sent).  ``provenance`` records which propagation model produced the
    entries: "vacuum", "square-law", or "five-thirds".
    """

    modes: Tuple[ModeId, ...]
    eta: np.ndarray
    provenance: str

    # Numerical slack for clamping quadrature noise at the domain edges.
    _NEG_CLAMP = 1e-8
    _ROW_SLACK = 1e-6

    def __post_init__(self) -> None:
        eta = np.asarray(self.eta, dtype=float)
        n = len(self.modes)
        if eta.shape != (n, n):
            raise ValueError(f"eta shape {eta.shape} does not match {n} modes")
        if np.any(eta < -self._NEG_CLAMP) or np.any(eta > 1.0 + self._ROW_SLACK):
            raise ValueError("coupling entries outside [0, 1] beyond tolerance")
        eta = np.clip(eta, 0.0, 1.0)
        rows = eta.sum(axis=1)
        if np.any(rows > 1.0 + self._ROW_SLACK):
            worst = float(rows.max())
            raise ValueError(f"row power sum {worst} exceeds 1")
        object.__setattr__(self, "eta", eta)

    def __len__(self) -> int:
        return len(self.modes)

    def index(self, mode: ModeId) -> int:
        return self.modes.index(mode)

    def entry(self, mode_from: ModeId, mode_to: ModeId) -> float:
        return float(self.eta[self.index(mode_from), self.index(mode_to)])

    def row_sums(self) -> np.ndarray:
        return self.eta.sum(axis=1)

    def dump(self) -> str:
        """Plain-text table: one row per (from, to, eta), 12 significant digits."""
        lines = [f"# from_mode to_mode eta ({self.provenance})"]
        for i, mi in enumerate(self.modes):
            for j, mj in enumerate(self.modes):
                lines.append(
                    f"{mode_label(mi)} {mode_label(mj)} {self.eta[i, j]:.11e}"
                )
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Laguerre-Gauss vacuum quantities
# --------------------------------------------------------------------------


def _eta_base(fresnel_product: float) -> float:
    """Per-order transmissivity base (1 + 2 D_f - sqrt(1 + 4 D_f)) / (2 D_f).

    Evaluated as 2 D_f / (1 + 2 D_f + sqrt(1 + 4 D_f)), which is the same
    number without the small-D_f cancellation.
    """
    df = fresnel_product
    if df < 0:
        raise ValueError(f"Fresnel number product must be >= 0, got {df}")
    if df == 0.0:
        return 0.0
    return 2.0 * df / (1.0 + 2.0 * df + math.sqrt(1.0 + 4.0 * df))


def lg_vacuum_eta(q: int, fresnel_product: float) -> float:
    """Vacuum transmissivity of every LG mode of order q over Gaussian pupils."""
    if q < 1:
        raise ValueError(f"mode order must be >= 1, got {q}")
    return _eta_base(fresnel_product) ** q


def lg_modes_up_to(q_max: int) -> Tuple[LGMode, ...]:
    """All LG modes with order <= q_max, sorted by (order, l)."""
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    modes: List[LGMode] = []
    for q in range(1, q_max + 1):
        top = q - 1
        for l in range(-top, top + 1, 2):
            modes.append(LGMode(p=(top - abs(l)) // 2, l=l))
    return tuple(modes)


def lg_mode_count(q_max: int) -> int:
    """Number of LG modes with order <= q_max; each order q holds q modes."""
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    return q_max * (q_max + 1) // 2


def lg_mode_scale(ch: DerivedChannel) -> float:
    """1/e^2-intensity scale sigma of the vacuum normal-mode LG/HG set.

    The LG modes that diagonalize the Gaussian-pupil vacuum channel carry
    envelope exp(-r^2 / (2 sigma^2)) and a focusing phase exp(-i k r^2 / 2L),
    with sigma set by the pupil radius and the Fresnel number product:

        gamma^2 = R^2 / (1 + sqrt(1 + 4 D_f)),
        sigma^2 = gamma^2 R^2 / (2 (R^2 - gamma^2)).
    """
    if not isinstance(ch.pupil, SoftGaussian):
        raise ValueError("LG mode scale requires soft Gaussian pupils")
    r2 = ch.pupil.radius ** 2
    gamma2 = r2 / (1.0 + math.sqrt(1.0 + 4.0 * ch.fresnel_product))
    return math.sqrt(gamma2 * r2 / (2.0 * (r2 - gamma2)))


def lg_vacuum_matrix(q_max: int, ch: DerivedChannel) -> CouplingMatrix:
    """Diagonal vacuum coupling matrix for all LG modes of order <= q_max."""
    if not isinstance(ch.pupil, SoftGaussian):
        raise ValueError("LG modes require soft Gaussian pupils")
    modes = lg_modes_up_to(q_max)
    eta = np.diag([lg_vacuum_eta(m.order, ch.fresnel_product) for m in modes])
    return CouplingMatrix(modes=modes, eta=eta, provenance="vacuum")


# --------------------------------------------------------------------------
# Focused-beam vacuum quantities
# --------------------------------------------------------------------------


def fb_pixel_grid(n_grid: int) -> Tuple[FBPixel, ...]:
    """Row-major tuple of the N x N focused-beam pixels."""
    if n_grid < 1:
        raise ValueError(f"grid size must be >= 1, got {n_grid}")
    return tuple(
        FBPixel(n=n, m=m, grid=n_grid)
        for n in range(1, n_grid + 1)
        for m in range(1, n_grid + 1)
    )


def _require_square(ch: DerivedChannel) -> HardSquare:
    if not isinstance(ch.pupil, HardSquare):
        raise ValueError("focused-beam modes require hard square pupils")
    return ch.pupil


def _fb_axis_vacuum(d: int, n_grid: int, ch: DerivedChannel) -> float:
    """Per-axis vacuum coupling factor for pixel-index difference d.

    I(d) = (sqrt(D_f)/N) * integral_{d-1/2}^{d+1/2} sinc^2(pi sqrt(D_f) xi / N) dxi,
    with sinc(z) = sin(z)/z.  Even in d.
    """
    c = math.sqrt(ch.fresnel_product) / n_grid
    val = integrate_1d(
        lambda xi: np.sinc(c * xi) ** 2, d - 0.5, d + 0.5, rel_tol=1e-11, abs_tol=1e-16
    )
    return c * val


def fb_vacuum_eta(pixel_from: FBPixel, pixel_to: FBPixel, ch: DerivedChannel) -> float:
    """Vacuum power coupling from one focused beam into one receiver pixel."""
    _require_square(ch)
    if pixel_from.grid != pixel_to.grid:
        raise ValueError("pixels belong to different grids")
    n_grid = pixel_from.grid
    return _fb_axis_vacuum(pixel_from.n - pixel_to.n, n_grid, ch) * _fb_axis_vacuum(
        pixel_from.m - pixel_to.m, n_grid, ch
    )


def fb_vacuum_matrix(n_grid: int, ch: DerivedChannel) -> CouplingMatrix:
    """Vacuum coupling matrix over the full N x N focused-beam set."""
    _require_square(ch)
    modes = fb_pixel_grid(n_grid)
    axis = np.array(
        [_fb_axis_vacuum(d, n_grid, ch) for d in range(n_grid)]
    )
    eta = np.empty((len(modes), len(modes)))
    for i, a in enumerate(modes):
        for j, b in enumerate(modes):
            eta[i, j] = axis[abs(a.n - b.n)] * axis[abs(a.m - b.m)]
    return CouplingMatrix(modes=modes, eta=eta, provenance="vacuum")


# --------------------------------------------------------------------------
# Capacity bound
# --------------------------------------------------------------------------


def qkd_capacity(etas: Iterable[float], nu: float) -> float:
    """Secret-key capacity bound -nu * sum log2(1 - eta) over parallel modes."""
    if nu <= 0:
        raise ValueError(f"pulse rate must be > 0, got {nu}")
    total = 0.0
    for eta in etas:
        if not 0.0 <= eta < 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1), got {eta}")
        total -= math.log2(1.0 - eta)
    return nu * total


def lg_vacuum_capacity(ch: DerivedChannel, nu: float, tail_tol: float = 1e-16) -> float:
    """Capacity bound over the full vacuum LG spectrum with order degeneracy.

    Sums -q * log2(1 - base^q) until the remaining geometric tail is
    negligible relative to the accumulated value.
    """
    if nu <= 0:
        raise ValueError(f"pulse rate must be > 0, got {nu}")
    base = _eta_base(ch.fresnel_product)
    if base == 0.0:
        return 0.0
    total = 0.0
    q = 1
    while True:
        term = -q * math.log2(1.0 - base ** q)
        total += term
        # Remaining tail is below sum_{j>q} j base^j / ln 2.
        tail = base ** (q + 1) * (q + 1 + base) / ((1 - base) ** 2 * math.log(2))
        if tail < tail_tol * total or q > 200000:
            break
        q += 1
    return nu * total
