"""Regular Glauber-Sudarshan P densities and their negative volume.

Densities are normalised against the flat measure d^2 alpha, i.e.
``sum(values) * h**2 == 1`` on the sampling grid.  The grid is node-centred:
nodes sit at ``-L + k h`` for ``k = 0..2L/h`` and each node carries the
weight of the h-by-h cell around it, so 0 is always a node and
convolutions of two grids land back on nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.signal import fftconvolve

from .errors import AlphaCohError, HeadroomError, QuadratureError, SingularPError

DEFAULT_L = 6.0
DEFAULT_H = 0.05
TOL_QUAD = 1e-4
TOL_NEG = 1e-12

Density = Callable[[np.ndarray], np.ndarray]


def thermal_p(nbar: float) -> Density:
    def f(alpha):
        return np.exp(-np.abs(alpha) ** 2 / nbar) / (np.pi * nbar)
    return f


def photon_added_thermal_p(nbar: float) -> Density:
    """P function of a^dag rho_th a / (nbar + 1).

    Normal-ordering a^dag . a on the thermal Gaussian gives
    ((nbar+1)|a|^2 - nbar) exp(-|a|^2/nbar) / (pi nbar^3), negative inside
    |a|^2 < nbar / (nbar + 1).
    """
    def f(alpha):
        x = np.abs(alpha) ** 2
        return ((nbar + 1.0) * x - nbar) * np.exp(-x / nbar) / (np.pi * nbar ** 3)
    return f


def _grid_size(L: float, h: float) -> int:
    m = 2.0 * L / h
    if abs(m - round(m)) > 1e-9 or round(m) < 2:
        raise ValueError(f"2L/h must be an integer >= 2 (L={L}, h={h})")
    return int(round(m)) + 1


@dataclass(frozen=True)
class PDensity:
    """A P density, either analytic (callable) or sampled on a grid."""

    kind: str
    params: dict = field(default_factory=dict)
    L: float = DEFAULT_L
    h: float = DEFAULT_H
    func: Optional[Density] = field(default=None, repr=False, compare=False)
    grid_values: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "vacuum":
            return
        _grid_size(self.L, self.h)
        if self.func is None and self.grid_values is None:
            raise ValueError("need either an analytic function or grid values")
        if self.grid_values is not None:
            g = np.asarray(self.grid_values, dtype=float)
            n = _grid_size(self.L, self.h)
            if g.shape != (n, n):
                raise ValueError(f"grid must be {n}x{n} for L={self.L}, h={self.h}")
            if not np.all(np.isfinite(g)):
                raise ValueError("grid values must be finite")
            g.setflags(write=False)
            object.__setattr__(self, "grid_values", g)

    # factories -----------------------------------------------------------
    @classmethod
    def thermal(cls, nbar: float, L: float = DEFAULT_L, h: float = DEFAULT_H) -> "PDensity":
        if not nbar > 0:
            raise ValueError("thermal occupation must be > 0")
        return cls("thermal", {"nbar": nbar}, L, h, thermal_p(nbar))

    @classmethod
    def displaced_thermal(cls, nbar: float, gamma: complex, L: float = DEFAULT_L,
                          h: float = DEFAULT_H) -> "PDensity":
        if not nbar > 0:
            raise ValueError("thermal occupation must be > 0")
        base = thermal_p(nbar)
        gamma = complex(gamma)
        return cls("displaced_thermal", {"nbar": nbar, "gamma": gamma}, L, h,
                   lambda a: base(a - gamma))

    @classmethod
    def photon_added_thermal(cls, nbar: float, L: float = DEFAULT_L,
                             h: float = DEFAULT_H) -> "PDensity":
        if not nbar > 0:
            raise ValueError("thermal occupation must be > 0")
        return cls("photon_added_thermal", {"nbar": nbar}, L, h, photon_added_thermal_p(nbar))

    @classmethod
    def from_grid(cls, values, L: float, h: float) -> "PDensity":
        return cls("grid", {}, L, h, None, np.asarray(values, dtype=float))

    @classmethod
    def vacuum(cls) -> "PDensity":
        """Point mass at the origin; usable only as a beam-splitter ancilla."""
        return cls("vacuum")

    # sampling ------------------------------------------------------------
    @property
    def axis(self) -> np.ndarray:
        n = _grid_size(self.L, self.h)
        return -self.L + self.h * np.arange(n)

    def points(self) -> np.ndarray:
        ax = self.axis
        return ax[:, None] + 1j * ax[None, :]

    def sample(self) -> np.ndarray:
        """Values at the grid nodes; ``[i, j]`` is alpha = axis[i] + i axis[j]."""
        if self.kind == "vacuum":
            raise SingularPError("the vacuum P function is a point mass, not a regular density")
        if self.grid_values is not None:
            return self.grid_values
        return np.asarray(self.func(self.points()), dtype=float)

    def evaluate(self, alpha) -> np.ndarray:
        """Density at arbitrary points (linear interpolation for grid kinds, zero outside)."""
        alpha = np.asarray(alpha, dtype=complex)
        if self.kind == "vacuum":
            raise SingularPError("the vacuum P function is a point mass")
        if self.func is not None:
            return np.asarray(self.func(alpha), dtype=float)
        coords = np.stack([(alpha.real + self.L) / self.h, (alpha.imag + self.L) / self.h])
        return map_coordinates(self.grid_values, coords.reshape(2, -1), order=1,
                               mode="constant", cval=0.0).reshape(alpha.shape)

    def normalization(self) -> float:
        return float(self.sample().sum() * self.h ** 2)

    def check_normalized(self, tol_quad: float = TOL_QUAD) -> float:
        total = self.normalization()
        if abs(total - 1.0) > tol_quad:
            raise QuadratureError(
                f"P density integrates to {total:.6g} on the window (L={self.L}, h={self.h})"
            )
        return total

    def with_quadrature(self, L: float | None = None, h: float | None = None) -> "PDensity":
        """Same density on another window/spacing (grid kinds are interpolated)."""
        L = self.L if L is None else L
        h = self.h if h is None else h
        if self.func is not None:
            return PDensity(self.kind, self.params, L, h, self.func)
        tmp = PDensity("grid", {}, L, h, func=self.evaluate)
        return PDensity.from_grid(tmp.sample(), L, h)

    # file format ---------------------------------------------------------
    def save_csv(self, path) -> None:
        values = self.sample()
        with open(path, "w") as fh:
            fh.write("L,h,rows\n")
            fh.write(f"{self.L!r},{self.h!r},{values.shape[0]}\n")
            np.savetxt(fh, values, delimiter=",", fmt="%.12g")

    @classmethod
    def load_csv(cls, path) -> "PDensity":
        path = Path(path)
        with open(path) as fh:
            header = fh.readline().strip().lower().replace(" ", "")
            if header != "l,h,rows":
                raise ValueError(f"{path}: expected header 'L,h,rows'")
            try:
                L, h, rows = fh.readline().split(",")
                L, h, rows = float(L), float(h), int(rows)
            except ValueError as exc:
                raise ValueError(f"{path}: malformed quadrature line") from exc
            values = np.loadtxt(fh, delimiter=",", ndmin=2)
        if values.shape != (rows, rows):
            raise ValueError(f"{path}: expected {rows}x{rows} values, got {values.shape}")
        return cls.from_grid(values, L, h)


@dataclass(frozen=True)
class NegativityReport:
    value: float
    negative_region_area: float
    L: float
    h: float
    min_value: float
    normalization: float

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "negative_region_area": self.negative_region_area,
            "quadrature": {"L": self.L, "h": self.h},
            "min_value": self.min_value,
            "normalization": self.normalization,
        }


def negativity(p: PDensity, tol_neg: float = TOL_NEG, tol_quad: float = TOL_QUAD) -> NegativityReport:
    """Negative volume -int_{p<0} p d^2alpha by midpoint quadrature on the grid."""
    total = p.check_normalized(tol_quad)
    values = p.sample()
    mask = values < -tol_neg
    cell = p.h ** 2
    value = float(-values[mask].sum() * cell) if mask.any() else 0.0
    return NegativityReport(value, float(mask.sum() * cell), p.L, p.h,
                            float(values.min()), total)


def is_classical(p: PDensity, tol_neg: float = TOL_NEG, tol_quad: float = TOL_QUAD) -> bool:
    return negativity(p, tol_neg, tol_quad).value == 0.0


def mix(p: PDensity, q: PDensity, r: float) -> PDensity:
    """P density of r*rho_p + (1-r)*rho_q on p's grid."""
    if not 0.0 <= r <= 1.0:
        raise ValueError("mixing weight must lie in [0, 1]")
    if (p.L, p.h) != (q.L, q.h):
        q = q.with_quadrature(p.L, p.h)
    return PDensity.from_grid(r * p.sample() + (1.0 - r) * q.sample(), p.L, p.h)


def _resampled(p: PDensity, mapping: Callable[[np.ndarray], np.ndarray], jacobian: float,
               tol_quad: float, what: str) -> PDensity:
    pts = p.points()
    values = jacobian * p.evaluate(mapping(pts))
    out = PDensity.from_grid(values, p.L, p.h)
    total = out.normalization()
    if abs(total - 1.0) > tol_quad:
        raise HeadroomError(f"{what} moves P weight out of the window (integral {total:.6g})")
    return out


def transform_displace(p: PDensity, gamma: complex, tol_quad: float = TOL_QUAD) -> PDensity:
    """p'(alpha) = p(alpha - gamma)."""
    gamma = complex(gamma)
    if gamma == 0:
        return p
    return _resampled(p, lambda a: a - gamma, 1.0, tol_quad, f"displacement by {gamma}")


def transform_phase(p: PDensity, theta: float, tol_quad: float = TOL_QUAD) -> PDensity:
    """p'(alpha) = p(e^{-i theta} alpha)."""
    if theta == 0:
        return p
    rot = np.exp(-1j * theta)
    return _resampled(p, lambda a: rot * a, 1.0, tol_quad, f"rotation by {theta}")


def transform_beamsplitter(p1: PDensity, p2: PDensity, t: float,
                           tol_quad: float = TOL_QUAD) -> PDensity:
    """Output-mode P density of a beam splitter with transmissivity ``t``.

    Coherent inputs |a>|a'> leave the kept port as |sqrt(t) a + sqrt(1-t) a'>,
    so the output density is the convolution of the two rescaled inputs.
    ``p2`` is the ancilla and must be classical.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    if p2.kind != "vacuum" and not is_classical(p2, tol_quad=tol_quad):
        raise AlphaCohError("beam-splitter ancilla must have a nonnegative P density")
    if t == 1.0:
        return PDensity.from_grid(p1.sample(), p1.L, p1.h)
    s1, s2 = math.sqrt(t), math.sqrt(1.0 - t)
    if p2.kind == "vacuum":
        if t == 0.0:
            raise SingularPError("output is the vacuum, whose P function is singular")
        return _resampled(p1, lambda a: a / s1, 1.0 / t, tol_quad, "beam splitter")
    if t == 0.0:
        return _resampled(p2, lambda a: a, 1.0, tol_quad, "beam splitter")
    pts = p1.points()
    q1 = p1.evaluate(pts / s1) / t
    q2 = p2.evaluate(pts / s2) / (1.0 - t)
    n = pts.shape[0]
    full = fftconvolve(q1, q2, mode="full") * p1.h ** 2
    # node k of the full convolution sits at -2L + k h; keep the original window
    off = (n - 1) // 2
    out = PDensity.from_grid(full[off:off + n, off:off + n], p1.L, p1.h)
    total = out.normalization()
    if abs(total - 1.0) > tol_quad:
        raise HeadroomError(f"beam-splitter output integrates to {total:.6g} on the window")
    return out


def parse_density(spec: str, L: float = DEFAULT_L, h: float = DEFAULT_H) -> PDensity:
    """``thermal:nbar``, ``dthermal:nbar,re,im``, ``pat:nbar`` or ``grid:path``.

    States with singular P functions (fock, squeezed, coherent, cat) are
    rejected with :class:`SingularPError`.
    """
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "thermal":
            return PDensity.thermal(float(arg), L, h)
        if kind in ("dthermal", "displaced_thermal", "displaced-thermal"):
            nbar, re, im = (float(x) for x in arg.split(","))
            return PDensity.displaced_thermal(nbar, complex(re, im), L, h)
        if kind in ("pat", "photon_added_thermal", "photon-added-thermal"):
            return PDensity.photon_added_thermal(float(arg), L, h)
    except ValueError as exc:
        raise ValueError(f"cannot parse density spec {spec!r}: {exc}") from exc
    if kind == "grid":
        return PDensity.load_csv(arg)
    if kind in ("fock", "squeezed", "coherent", "cat-even", "cat-odd", "cat", "vacuum"):
        raise SingularPError(
            f"{kind!r} states have a singular P function; only regular densities "
            "(thermal, dthermal, pat, grid) have a defined negative volume"
        )
    raise ValueError(f"unknown density kind {kind!r}")
