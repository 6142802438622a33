"""Finite-dimensional coherence functionals and the alpha-coherence driver."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Iterable, Sequence

import numpy as np

from .fock import FockDensity, FockVector, cat_state, fock_state, mean_photon, squeezed_vacuum
from .gram_schmidt import GreedyDecomposition, greedy_decompose, gs_map_density, gs_project
from .husimi import SearchConfig

MEASURES = ("rel_entropy", "l1")
CONVERGED = "CONVERGED"
NOT_CONVERGED = "NOT_CONVERGED"


def _entropy(eigs: np.ndarray) -> float:
    eigs = eigs[eigs > 0]
    return float(-np.sum(eigs * np.log(eigs)))


def _as_density(rho, tol: float = 1e-8) -> np.ndarray:
    m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("density must be a square matrix")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValueError("density is not Hermitian")
    if abs(np.trace(m).real - 1.0) > tol:
        raise ValueError("density trace differs from 1")
    if np.linalg.eigvalsh(m).min() < -tol:
        raise ValueError("density is not positive semidefinite")
    return m


def _as_probabilities(p, tol: float = 1e-8) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
        raise ValueError("probability vector must be nonnegative and sum to 1")
    return np.clip(p, 0.0, None)


def rel_entropy_coherence(rho) -> float:
    """S(diag rho) - S(rho) in nats.

    A 1-D input is read as the probability vector of a pure state in the
    tagged basis, for which the value is its Shannon entropy.
    """
    arr = np.asarray(rho)
    if arr.ndim == 1:
        value = _entropy(_as_probabilities(arr))
    else:
        m = _as_density(arr)
        value = _entropy(np.diag(m).real.copy()) - _entropy(np.linalg.eigvalsh(m))
    return 0.0 if value < 1e-12 else value


def l1_coherence(rho) -> float:
    """Sum of absolute off-diagonal elements (1-D input: pure-state probabilities)."""
    arr = np.asarray(rho)
    if arr.ndim == 1:
        s = np.sqrt(_as_probabilities(arr)).sum()
        return max(0.0, float(s * s - 1.0))
    m = _as_density(arr)
    return float(np.sum(np.abs(m)) - np.sum(np.abs(np.diag(m))))


_MEASURE_FUNCS = {"rel_entropy": rel_entropy_coherence, "l1": l1_coherence}


def coherence(rho, measure: str = "rel_entropy") -> float:
    try:
        return _MEASURE_FUNCS[measure](rho)
    except KeyError:
        raise ValueError(f"unknown measure {measure!r}; choose from {MEASURES}") from None


@dataclass(frozen=True)
class ConvergenceSchedule:
    n_schedule: tuple[int, ...] = (2, 4, 8, 16, 32, 64)
    tol_tail: float = 1e-4
    tol_conv: float = 1e-3
    branch_budget: int = 8
    # greedy recursion keeps going until the residual drops below this
    tol_stop: float = 1e-7

    def __post_init__(self):
        sched = tuple(int(n) for n in self.n_schedule)
        if not sched or any(n < 1 for n in sched) or list(sched) != sorted(set(sched)):
            raise ValueError("n_schedule must be strictly increasing positive integers")
        object.__setattr__(self, "n_schedule", sched)
        if not (self.tol_tail > 0 and self.tol_conv > 0 and self.tol_stop > 0):
            raise ValueError("tolerances must be > 0")
        if self.branch_budget < 1:
            raise ValueError("branch_budget must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_schedule"] = list(self.n_schedule)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ConvergenceSchedule":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown schedule options: {sorted(unknown)}")
        return cls(**data)


@dataclass
class CoherenceReport:
    value: float
    measure: str
    N_used: int
    residual_tail: float
    branch_values: list[tuple[str, float]]
    probabilities: np.ndarray
    upper_bound_flag: bool
    status: str = CONVERGED
    canonical_value: float = 0.0
    history: list[tuple[int, float, float]] = field(default_factory=list)
    decomposition: GreedyDecomposition | None = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def branch_count(self) -> int:
        return len(self.branch_values)

    def to_json(self, dump_decomposition: bool = False) -> dict:
        out = {
            "value": self.value,
            "measure": self.measure,
            "N_used": self.N_used,
            "residual_tail": self.residual_tail,
            "branch_values": [[b, v] for b, v in self.branch_values],
            "probabilities": [float(p) for p in self.probabilities],
            "upper_bound_flag": self.upper_bound_flag,
            "status": self.status,
            "canonical_value": self.canonical_value,
            "history": [{"N": n, "value": v, "residual": r} for n, v, r in self.history],
        }
        if dump_decomposition and self.decomposition is not None:
            out["decomposition"] = self.decomposition.to_json()
        return out


def _best_at(branches: Sequence[GreedyDecomposition], n_terms: int, measure: str):
    """(value, prefix) of every branch truncated to n_terms, best first."""
    scored = []
    for b in branches:
        pre = b.prefix(n_terms)
        scored.append((coherence(gs_project(pre), measure), pre))
    return scored


def reports_from_branches(branches: Sequence[GreedyDecomposition], measure: str,
                          schedule: ConvergenceSchedule) -> CoherenceReport:
    """Run the schedule on an already computed set of greedy branches.

    Truncating a branch explored to depth ``max(n_schedule)`` gives exactly the
    decomposition a run with the smaller ``max_terms`` would produce.
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    history = []
    status = NOT_CONVERGED
    final = None
    for n in schedule.n_schedule:
        scored = _best_at(branches, n, measure)
        value, pre = min(scored, key=lambda t: t[0])
        prev_value = min(v for v, _ in _best_at(branches, max(n // 2, 1), measure))
        history.append((n, value, pre.residual_norm_sq))
        final = (value, pre, scored)
        if (pre.residual_norm_sq <= schedule.tol_tail
                and abs(value - prev_value) <= schedule.tol_conv):
            status = CONVERGED
            break
    value, pre, scored = final
    canonical = next(v for v, p in scored if set(p.path) <= {0})
    upper = any(b.orbit_sampled or b.budget_exhausted for b in branches)
    return CoherenceReport(
        value=float(value), measure=measure, N_used=len(pre.terms),
        residual_tail=float(pre.residual_norm_sq),
        branch_values=[(p.branch_id, float(v)) for v, p in scored],
        probabilities=gs_project(pre), upper_bound_flag=upper, status=status,
        canonical_value=float(canonical), history=history, decomposition=pre,
    )


def alpha_coherence(state: FockVector, measure: str = "rel_entropy",
                    schedule: ConvergenceSchedule | None = None,
                    search: SearchConfig | None = None) -> CoherenceReport:
    """Alpha-coherence of a pure state with convergence in the number of terms.

    The value is the minimum over explored degenerate branches; when an
    orbit of maximisers had to be sampled, or the branch budget ran out, the
    report carries ``upper_bound_flag``.
    """
    return alpha_coherence_multi(state, (measure,), schedule, search)[measure]


def alpha_coherence_multi(state: FockVector, measures: Iterable[str] = MEASURES,
                          schedule: ConvergenceSchedule | None = None,
                          search: SearchConfig | None = None) -> dict[str, CoherenceReport]:
    schedule = schedule or ConvergenceSchedule()
    branches = greedy_decompose(state, max(schedule.n_schedule), schedule.tol_stop,
                                schedule.branch_budget, search)
    return {m: reports_from_branches(branches, m, schedule) for m in measures}


def mixed_coherence_bound(rho: FockDensity, N: int, measure: str = "rel_entropy",
                          search: SearchConfig | None = None) -> tuple[float, bool]:
    """Coherence of the Gram-Schmidt map of the trivial extension (an upper bound)."""
    res = gs_map_density(rho, N, search)
    return coherence(res.density, measure), True


def tagged_mixture_bound(components: Sequence[tuple[float, FockVector]],
                         measure: str = "rel_entropy",
                         schedule: ConvergenceSchedule | None = None,
                         search: SearchConfig | None = None) -> float:
    """Coherence of the extension sum_i w_i |psi_i><psi_i| (x) |e_i><e_i|.

    Each component is orthogonalised on its own tag block; the resulting
    block-diagonal state is measured in the joint tagged basis.
    """
    weights = np.array([w for w, _ in components], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-10:
        raise ValueError("weights must be nonnegative and sum to 1")
    blocks = []
    for w, psi in components:
        rep = alpha_coherence(psi, measure, schedule, search)
        amp = np.sqrt(rep.probabilities)
        blocks.append(w * np.outer(amp, amp))
    size = sum(b.shape[0] for b in blocks)
    joint = np.zeros((size, size))
    at = 0
    for b in blocks:
        k = b.shape[0]
        joint[at:at + k, at:at + k] = b
        at += k
    return coherence(joint, measure)


# --------------------------------------------------------------------------
# curves

FAMILIES = ("cat_even", "cat_odd", "fock", "squeezed")


def family_state(family: str, param: float, n_max: int = 60) -> FockVector:
    family = family.replace("-", "_")
    if family == "cat_even":
        return cat_state(param, "even", n_max)
    if family == "cat_odd":
        return cat_state(param, "odd", n_max)
    if family == "fock":
        if abs(param - round(param)) > 1e-9:
            raise ValueError(f"Fock family needs integer photon numbers, got {param}")
        return fock_state(int(round(param)), n_max)
    if family == "squeezed":
        return squeezed_vacuum(param, 0.0, n_max)
    raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")


@dataclass
class CurveRow:
    family: str
    param: float
    mean_photon: float
    reports: dict[str, CoherenceReport]

    @property
    def status(self) -> str:
        return self.reports["rel_entropy"].status


def _curve_point(args) -> CurveRow:
    family, param, n_max, schedule, search = args
    psi = family_state(family, param, n_max)
    reps = alpha_coherence_multi(psi, MEASURES, schedule, search)
    return CurveRow(family, float(param), mean_photon(psi), reps)


def coherence_curve(family: str, params: Sequence[float], n_max: int = 60,
                    schedule: ConvergenceSchedule | None = None,
                    search: SearchConfig | None = None, workers: int = 1) -> list[CurveRow]:
    """One row per parameter value, computed for both measures.

    ``workers > 1`` evaluates points in separate processes; rows always come
    back in parameter order.
    """
    family = family.replace("-", "_")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    schedule = schedule or ConvergenceSchedule()
    search = search or SearchConfig()
    jobs = [(family, float(p), n_max, schedule, search) for p in params]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_curve_point, jobs))
    return [_curve_point(j) for j in jobs]


def match_mean_photon(family: str, target: float, tol: float = 1e-3) -> float:
    """Family parameter whose state has mean photon number ``target``.

    Odd cats never go below one photon; a target at that edge is met from
    above at ``target + tol / 2``, inside the tolerance.
    """
    from scipy.optimize import brentq

    family = family.replace("-", "_")
    if family == "fock":
        return float(round(target))
    if family == "squeezed":
        return float(math.asinh(math.sqrt(target)))
    if family == "cat_even":
        f = lambda a: a * a * math.tanh(a * a) - target
    elif family == "cat_odd":
        if target < 1.0 + tol / 2:
            target = 1.0 + tol / 2
        f = lambda a: a * a / math.tanh(a * a) - target
    else:
        raise ValueError(f"unknown family {family!r}")
    return float(brentq(f, 1e-6, 10.0, xtol=1e-14))
