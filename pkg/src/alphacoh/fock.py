"""Truncated Fock-space states of a single bosonic mode.

All constructors return immutable :class:`FockVector` objects whose amplitudes
are renormalised after truncation; the weight lost to truncation is kept in
``truncation_deficit`` so callers can decide whether it matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.special import gammainc, gammaln

from .errors import DimensionError, HeadroomError, TruncationError

DEFAULT_N_MAX = 60
TOL_NORM = 1e-10
TOL_HERM = 1e-10
TOL_PSD = 1e-9
# analytic tail weight above which strict constructors refuse to truncate
STRICT_TAIL = 1e-6


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FockVector:
    """Pure state as complex amplitudes on photon numbers ``0..n_max``."""

    amplitudes: np.ndarray
    truncation_deficit: float = 0.0
    tol_norm: float = field(default=TOL_NORM, repr=False, compare=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise DimensionError("amplitudes must be a 1-D array with n_max >= 1")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > self.tol_norm:
            raise ValueError(f"state is not normalised (norm^2 = {norm_sq!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def from_amplitudes(cls, amplitudes, truncation_deficit: float = 0.0) -> "FockVector":
        """Normalise arbitrary amplitudes and wrap them."""
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalise the zero vector")
        return cls(amps / norm, truncation_deficit)

    def to_json(self) -> dict:
        return {
            "n_max": self.n_max,
            "amplitudes": [[float(c.real), float(c.imag)] for c in self.amplitudes],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FockVector":
        try:
            amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
            n_max = int(data["n_max"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed state JSON: {exc}") from exc
        if amps.size != n_max + 1:
            raise DimensionError(f"n_max={n_max} but {amps.size} amplitudes given")
        return cls.from_amplitudes(amps)

    def density(self) -> "FockDensity":
        return FockDensity(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class FockDensity:
    """Hermitian, positive, unit-trace matrix on the truncated Fock space."""

    matrix: np.ndarray
    tol_norm: float = field(default=TOL_NORM, repr=False, compare=False)
    tol_herm: float = field(default=TOL_HERM, repr=False, compare=False)
    tol_psd: float = field(default=TOL_PSD, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise DimensionError("density must be a square matrix of size >= 2")
        if np.max(np.abs(m - m.conj().T)) > self.tol_herm:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > self.tol_norm:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < -self.tol_psd:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def n_max(self) -> int:
        return self.matrix.shape[0] - 1

    @classmethod
    def from_mixture(cls, components: Iterable[tuple[float, FockVector]]) -> "FockDensity":
        comps = list(components)
        if not comps:
            raise ValueError("empty mixture")
        dims = {v.dim for _, v in comps}
        if len(dims) != 1:
            raise DimensionError("mixture components have different n_max")
        rho = sum(w * np.outer(v.amplitudes, v.amplitudes.conj()) for w, v in comps)
        return cls(rho)


def _check_n_max(n_max: int) -> int:
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    return int(n_max)


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """Raw (not renormalised) amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n <= n_max."""
    n_max = _check_n_max(n_max)
    alpha = complex(alpha)
    if not np.isfinite(alpha):
        raise ValueError("coherent label must be finite")
    n = np.arange(n_max + 1)
    out = np.zeros(n_max + 1, dtype=complex)
    r = abs(alpha)
    if r == 0.0:
        out[0] = 1.0
        return out
    log_mag = -0.5 * r * r + n * np.log(r) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def coherent_deficit(alpha: complex, n_max: int) -> float:
    """Poisson tail weight P(n > n_max) with mean |alpha|^2."""
    x = abs(complex(alpha)) ** 2
    if x == 0:
        return 0.0
    # regularised lower incomplete gamma P(n_max+1, x) equals the Poisson tail
    return float(gammainc(n_max + 1, x))


def coherent_vector(alpha: complex, n_max: int = DEFAULT_N_MAX, strict: bool = False) -> FockVector:
    """Truncated coherent state |alpha>, renormalised.

    With ``strict=True`` the label is rejected when |alpha|^2 > n_max/2 or the
    discarded Poisson tail exceeds ``STRICT_TAIL``.
    """
    n_max = _check_n_max(n_max)
    deficit = coherent_deficit(alpha, n_max)
    if strict and (abs(complex(alpha)) ** 2 > n_max / 2 or deficit > STRICT_TAIL):
        raise TruncationError(
            f"|alpha|^2 = {abs(complex(alpha)) ** 2:.4g} does not fit n_max = {n_max} "
            f"(tail weight {deficit:.3g})"
        )
    return FockVector.from_amplitudes(coherent_amplitudes(alpha, n_max), deficit)


def overlap(a: FockVector, b: FockVector) -> complex:
    """Inner product <a|b>."""
    if a.dim != b.dim:
        raise DimensionError(f"n_max mismatch: {a.n_max} vs {b.n_max}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: FockVector, b: FockVector) -> float:
    """|<a|b>|^2, i.e. fidelity of rays (global phase is irrelevant)."""
    return abs(overlap(a, b)) ** 2


def cat_state(alpha: complex, parity: str = "even", n_max: int = DEFAULT_N_MAX) -> FockVector:
    """Normalised |alpha> + |-alpha> (even) or |alpha> - |-alpha> (odd)."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    alpha = complex(alpha)
    if parity == "odd" and alpha == 0:
        raise ValueError("odd cat state is undefined at alpha = 0")
    raw = coherent_amplitudes(alpha, n_max)
    n = np.arange(raw.size)
    # selection rule applied by index so forbidden amplitudes are exactly zero
    keep = (n % 2 == 0) if parity == "even" else (n % 2 == 1)
    amps = np.where(keep, raw, 0.0)
    x = abs(alpha) ** 2
    # untruncated weight of the kept parity sector: e^{-x} cosh x or e^{-x} sinh x
    ideal = 0.5 * (1.0 + np.exp(-2.0 * x)) if parity == "even" else -0.5 * np.expm1(-2.0 * x)
    kept = float(np.sum(np.abs(amps) ** 2))
    deficit = max(0.0, 1.0 - kept / ideal)
    return FockVector.from_amplitudes(amps, deficit)


def fock_state(n: int, n_max: int = DEFAULT_N_MAX) -> FockVector:
    n_max = _check_n_max(n_max)
    if int(n) != n or not 0 <= n <= n_max:
        raise ValueError(f"photon number {n!r} outside 0..{n_max}")
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[int(n)] = 1.0
    return FockVector(amps)


def squeezed_vacuum(r: float, theta: float = 0.0, n_max: int = DEFAULT_N_MAX,
                    strict: bool = False) -> FockVector:
    """S(r e^{i theta})|0> in the Fock basis; odd amplitudes are exactly zero."""
    n_max = _check_n_max(n_max)
    if n_max < 2:
        raise ValueError("squeezed vacuum needs n_max >= 2")
    if not r >= 0:
        raise ValueError(f"squeezing r must be >= 0, got {r!r}")
    amps = np.zeros(n_max + 1, dtype=complex)
    if r == 0:
        amps[0] = 1.0
        return FockVector(amps)
    m = np.arange(n_max // 2 + 1)
    t = np.tanh(r)
    log_mag = (-0.5 * np.log(np.cosh(r)) + m * np.log(t)
               + 0.5 * gammaln(2 * m + 1) - m * np.log(2.0) - gammaln(m + 1))
    phase = (-np.exp(1j * theta)) ** m
    amps[2 * m] = np.exp(log_mag) * phase
    deficit = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if strict and deficit > STRICT_TAIL:
        raise TruncationError(f"squeezing r={r} leaves tail weight {deficit:.3g} above n_max={n_max}")
    return FockVector.from_amplitudes(amps, deficit)


def annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def displacement_matrix(gamma: complex, dim: int) -> np.ndarray:
    """exp(gamma a^dag - gamma^* a) on the first ``dim`` Fock levels."""
    a = annihilation(dim - 1)
    gamma = complex(gamma)
    return expm(gamma * a.conj().T - gamma.conjugate() * a)


def apply_displacement(state: FockVector, gamma: complex, tol_tail: float = STRICT_TAIL,
                       pad: int | None = None) -> FockVector:
    """D(gamma)|state>.

    The generator is exponentiated on an enlarged space (``pad`` extra levels,
    default n_max) and the result truncated back; the weight pushed beyond
    n_max must stay below ``tol_tail`` or :class:`HeadroomError` is raised.
    """
    gamma = complex(gamma)
    if gamma == 0:
        return state
    pad = state.n_max if pad is None else int(pad)
    big = state.dim + pad
    vec = np.zeros(big, dtype=complex)
    vec[: state.dim] = state.amplitudes
    out = displacement_matrix(gamma, big) @ vec
    lost = float(np.sum(np.abs(out[state.dim:]) ** 2))
    if lost > tol_tail:
        raise HeadroomError(
            f"displacement by {gamma} pushes weight {lost:.3g} above n_max={state.n_max}"
        )
    return FockVector.from_amplitudes(out[: state.dim], state.truncation_deficit + lost)


def apply_phase_rotation(state: FockVector, theta: float) -> FockVector:
    """exp(i theta n)|state>."""
    n = np.arange(state.dim)
    return FockVector(state.amplitudes * np.exp(1j * theta * n), state.truncation_deficit)


def mean_photon(state: FockVector | np.ndarray) -> float:
    amps = state.amplitudes if isinstance(state, FockVector) else np.asarray(state)
    w = np.abs(amps) ** 2
    return float(np.dot(np.arange(w.size), w) / np.sum(w))


def random_state(coeffs: Sequence[complex], n_max: int = DEFAULT_N_MAX) -> FockVector:
    """Normalised state from explicitly listed low-lying amplitudes."""
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[: len(coeffs)] = coeffs
    return FockVector.from_amplitudes(amps)
