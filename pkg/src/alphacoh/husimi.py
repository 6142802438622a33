"""Global maximisation of |<alpha|psi>|^2 over the complex plane.

The search is a dense square grid clipped to a disk followed by
Nelder-Mead polishing of every promising grid peak.  Degenerate maxima are
reported explicitly: a finite set of isolated peaks (``discrete``) or a full
circle of equal maxima (``orbit``), of which a fixed number of evenly spaced
representatives is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Union

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaincc, gammaln

from .errors import ConsistencyError, VanishedResidualError
from .fock import FockDensity, FockVector

StateLike = Union[FockVector, FockDensity, np.ndarray]

# irrational multiples of 2*pi used to probe continuous rotational symmetry
_PROBE_FRACTIONS = tuple(((k * (math.sqrt(5) - 1) / 2) % 1.0) for k in range(1, 13))
_VALUE_FLOOR = 1e-15


@dataclass(frozen=True)
class SearchConfig:
    grid_points: int = 121
    margin: float = 3.0
    refine_iters: int = 200
    refine_ftol: float = 1e-10
    refine_xtol: float = 1e-8
    tol_deg: float = 1e-6
    tol_cluster: float = 1e-4
    k_orbit: int = 8
    tol_residual: float = 1e-12
    candidate_ratio: float = 0.8
    max_candidates: int = 24

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")
        for name in ("margin", "refine_ftol", "refine_xtol", "tol_deg", "tol_cluster",
                     "tol_residual"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.refine_iters < 1 or self.k_orbit < 2 or self.max_candidates < 1:
            raise ValueError("refine_iters >= 1, k_orbit >= 2 and max_candidates >= 1 required")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SearchConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown search options: {sorted(unknown)}")
        return cls(**known)


@dataclass(frozen=True)
class MaximizerSet:
    maximizers: tuple[complex, ...]
    value: float
    degeneracy_kind: str
    search_radius: float
    values: tuple[float, ...] = field(default=(), repr=False)
    grid_best: float = field(default=0.0, repr=False)

    @property
    def canonical(self) -> complex:
        return self.maximizers[0]


class _Objective:
    """alpha -> <alpha|rho|alpha> for a pure vector or a density matrix.

    Coherent vectors are the renormalised truncated ones, so the value is
    exactly what a projector built from :func:`coherent_vector` would give.
    """

    def __init__(self, state: StateLike):
        if isinstance(state, FockVector):
            data = state.amplitudes
        elif isinstance(state, FockDensity):
            data = state.matrix
        else:
            data = np.asarray(state, dtype=complex)
        self.pure = data.ndim == 1
        self.n_max = data.shape[0] - 1
        n = np.arange(self.n_max + 1)
        self._inv_sqrt_fact = np.exp(-0.5 * gammaln(n + 1))
        if self.pure:
            self.psi = data
            w = np.abs(data) ** 2
            self.norm_sq = float(w.sum())
            self.photon = float(np.dot(n, w))
            self.first_moment = complex(np.vdot(data[:-1], np.sqrt(n[1:]) * data[1:]))
            self._coefs = data * self._inv_sqrt_fact
            self._coef_list = [complex(c) for c in self._coefs[::-1]]
        else:
            self.rho = data
            diag = np.diag(data).real
            self.norm_sq = float(diag.sum())
            self.photon = float(np.dot(n, diag))
            self.first_moment = complex(np.sum(np.sqrt(n[1:]) * np.diag(data, -1)))

    def mean_photon(self) -> float:
        return self.photon / self.norm_sq

    def center(self) -> complex:
        return self.first_moment / self.norm_sq

    def _norm_factor(self, x):
        # e^{-x} / P(N <= n_max) for the renormalised truncated coherent vector
        return np.exp(-x) / np.maximum(gammaincc(self.n_max + 1, x), 1e-300)

    def grid(self, alphas: np.ndarray) -> np.ndarray:
        alphas = np.asarray(alphas, dtype=complex)
        x = np.abs(alphas) ** 2
        if self.pure:
            z = alphas.conj()
            f = np.zeros_like(z)
            for c in self._coefs[::-1]:
                f = f * z + c
            return np.abs(f) ** 2 * self._norm_factor(x)
        v = np.empty(alphas.shape + (self.n_max + 1,), dtype=complex)
        v[..., 0] = 1.0
        for k in range(1, self.n_max + 1):
            v[..., k] = v[..., k - 1] * alphas / math.sqrt(k)
        q = np.einsum("...m,mn,...n->...", v.conj(), self.rho, v).real
        return q * self._norm_factor(x)

    def __call__(self, alpha: complex) -> float:
        if not self.pure:
            return float(self.grid(np.array([alpha]))[0])
        z = complex(alpha).conjugate()
        f = 0j
        for c in self._coef_list:
            f = f * z + c
        x = abs(alpha) ** 2
        return (f.real ** 2 + f.imag ** 2) * math.exp(-x) / max(gammaincc(self.n_max + 1, x), 1e-300)


def husimi(state: StateLike, alpha: complex) -> float:
    """|<alpha|psi>|^2 (or <alpha|rho|alpha>) with the truncated coherent vector."""
    return float(_Objective(state)(complex(alpha)))


def _grid_local_maxima(q: np.ndarray) -> np.ndarray:
    padded = np.pad(q, 1, constant_values=-np.inf)
    g = q.shape[0]
    is_max = np.ones_like(q, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_max &= q >= padded[1 + di:1 + di + g, 1 + dj:1 + dj + g]
    return np.flatnonzero(is_max & np.isfinite(q))


def _refine(obj: _Objective, start: complex, step: float, scale: float,
            config: SearchConfig) -> tuple[complex, float]:
    def neg(p):
        return -obj(complex(p[0], p[1])) / scale

    x0 = np.array([start.real, start.imag])
    simplex = np.array([x0, x0 + [step, 0.0], x0 + [0.0, step]])
    res = minimize(neg, x0, method="Nelder-Mead",
                   options={"maxiter": config.refine_iters, "initial_simplex": simplex,
                            "xatol": config.refine_xtol, "fatol": config.refine_ftol})
    return complex(res.x[0], res.x[1]), float(-res.fun * scale)


def _is_orbit(obj: _Objective, best: complex, value: float, center: complex,
              config: SearchConfig) -> bool:
    radius = abs(best - center)
    if radius < 10 * config.tol_cluster:
        return False
    for frac in _PROBE_FRACTIONS:
        probe = center + (best - center) * np.exp(2j * np.pi * frac)
        if obj(probe) < value * (1.0 - config.tol_deg):
            return False
    return True


def maximize_overlap(state: StateLike, config: SearchConfig | None = None) -> MaximizerSet:
    """All global maximisers of the Husimi function of ``state``.

    ``state`` may be a sub-normalised residual; the returned ``value`` is the
    raw maximal squared overlap.  Maximisers are sorted by (Re, Im).
    """
    config = config or SearchConfig()
    obj = _Objective(state)
    if obj.norm_sq <= config.tol_residual:
        raise VanishedResidualError(f"state norm^2 {obj.norm_sq:.3g} is below tol_residual")

    radius = math.sqrt(max(obj.mean_photon(), 0.0)) + config.margin
    axis = np.linspace(-radius, radius, config.grid_points)
    step = axis[1] - axis[0]
    grid = axis[:, None] + 1j * axis[None, :]
    q = obj.grid(grid)
    q = np.where(np.abs(grid) <= radius + 1e-12, q, -np.inf)
    flat = q.ravel()
    grid_best = float(flat.max())

    peaks = _grid_local_maxima(q)
    peaks = peaks[flat[peaks] >= config.candidate_ratio * grid_best]
    # stable sort keeps flat-index order among equal values -> deterministic
    order = np.argsort(-flat[peaks], kind="stable")
    peaks = peaks[order][: config.max_candidates]
    scale = max(grid_best, _VALUE_FLOOR)

    def polish(idx):
        start = complex(grid.ravel()[idx])
        alpha, val = _refine(obj, start, 0.5 * step, scale, config)
        if val < flat[idx]:
            return start, float(flat[idx])
        return alpha, val

    # a continuous ring of maxima is recognised from the best peak alone, so the
    # remaining ring candidates need no polishing
    center = obj.center()
    best_alpha, best_val = polish(peaks[0])
    if best_val < _VALUE_FLOOR:
        raise ConsistencyError("no maximiser above the numerical floor; internal error")

    if _is_orbit(obj, best_alpha, best_val, center, config):
        r = best_alpha - center
        reps = [center + abs(r) * np.exp(2j * np.pi * k / config.k_orbit)
                for k in range(config.k_orbit)]
        kind = "orbit"
        vals = [obj(a) for a in reps]
        best_val = max(best_val, max(vals))
    else:
        refined = [(best_alpha, best_val)] + [polish(idx) for idx in peaks[1:]]
        best_val = max(v for _, v in refined)
        clusters: list[tuple[complex, float]] = []
        for alpha, val in sorted(refined, key=lambda t: -t[1]):
            if val < best_val * (1.0 - config.tol_deg):
                continue
            if all(abs(alpha - c) > config.tol_cluster for c, _ in clusters):
                clusters.append((alpha, val))
        reps = [c for c, _ in clusters]
        vals = [v for _, v in clusters]
        kind = "unique" if len(reps) == 1 else "discrete"
        if len(reps) >= config.k_orbit:
            dist = np.abs(np.array(reps) - np.mean(reps))
            if np.ptp(dist) < 1e-3 * max(dist.max(), 1.0):
                kind = "orbit"

    order = sorted(range(len(reps)), key=lambda i: (reps[i].real, reps[i].imag))
    return MaximizerSet(
        maximizers=tuple(complex(reps[i]) for i in order),
        value=float(best_val),
        degeneracy_kind=kind,
        search_radius=float(radius),
        values=tuple(float(vals[i]) for i in order),
        grid_best=grid_best,
    )
