"""Property and cross-check suites shared by ``alphacoh verify`` and the tests."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import RunConfig
from .fock import (FockVector, apply_displacement, apply_phase_rotation, cat_state,
                   coherent_vector, fidelity, fock_state, overlap, random_state,
                   squeezed_vacuum)
from .gram_schmidt import (build_cnot_unitary, greedy_decompose, gs_unitary_simulate)
from .husimi import maximize_overlap
from .measures import alpha_coherence, l1_coherence, rel_entropy_coherence
from .pdist import (PDensity, mix, negativity, transform_beamsplitter, transform_displace,
                    transform_phase)

# fixed amplitudes for the two "random" members of the oracle test set
RANDOM_A = (0.6, 0.3 + 0.4j, -0.2 + 0.1j, 0.25j, 0.1)
RANDOM_B = (0.2 - 0.1j, 0.5, 0.1 + 0.6j, -0.3, 0.2j, 0.15, -0.1 + 0.05j)


def oracle_test_set(n_max: int = 60) -> dict[str, FockVector]:
    """Ten fixed states used by the oracle-equivalence and invariance checks."""
    return {
        "cat_even_1": cat_state(1.0, "even", n_max),
        "cat_even_2": cat_state(2.0, "even", n_max),
        "cat_odd_0.5": cat_state(0.5, "odd", n_max),
        "cat_odd_1.5": cat_state(1.5, "odd", n_max),
        "fock_1": fock_state(1, n_max),
        "fock_2": fock_state(2, n_max),
        "fock_3": fock_state(3, n_max),
        "squeezed_0.5": squeezed_vacuum(0.5, 0.0, n_max),
        "random_A": random_state(RANDOM_A, n_max),
        "random_B": random_state(RANDOM_B, n_max),
    }


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tol: float
    passed: bool

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name}: measured {self.measured:.3e} (tol {self.tol:.1e})"


def _le(name: str, measured: float, tol: float) -> Check:
    return Check(name, float(measured), tol, bool(measured <= tol))


def oracle_deviation(psi: FockVector, n_terms: int, config: RunConfig):
    """(max sector deviation, max unitarity defect) for the canonical greedy branch."""
    branch = greedy_decompose(psi, n_terms, 1e-12, 1, config.search)[0]
    labels = branch.labels
    joint = gs_unitary_simulate(psi, labels)
    weights = joint.sector_weights()
    dev = max(np.max(np.abs(weights[1:] - np.abs(branch.coefficients) ** 2)),
              abs(weights[0] - branch.residual_norm_sq))
    amp_dev = max(np.max(np.abs(joint.sector(i + 1)
                                - c * coherent_vector(a, psi.n_max).amplitudes))
                  for i, (a, c) in enumerate(branch.terms))
    unit = 0.0
    for i, a in enumerate(labels, start=1):
        u = build_cnot_unitary(a, i, psi.n_max, len(labels))
        unit = max(unit, float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))))
    return float(max(dev, amp_dev)), unit


def suite_fock(config: RunConfig) -> list[Check]:
    n_max = config.n_max
    worst = 0.0
    pts = [0, 1.5, -2 + 1j, 3j, 2.1 - 2.1j, 0.7 + 0.2j]
    for a in pts:
        for b in pts:
            got = abs(overlap(coherent_vector(a, n_max), coherent_vector(b, n_max))) ** 2
            worst = max(worst, abs(got - math.exp(-abs(a - b) ** 2)))
    checks = [_le("coherent overlap law |<a|b>|^2 = exp(-|a-b|^2)", worst, 1e-8)]
    disp = apply_displacement(fock_state(0, n_max), 1.0)
    checks.append(_le("D(1)|0> vs |1>: 1 - fidelity", 1 - fidelity(disp, coherent_vector(1.0, n_max)), 1e-8))
    odd_even = max(np.max(np.abs(cat_state(1.3, "even", n_max).amplitudes[1::2])),
                   np.max(np.abs(cat_state(1.3, "odd", n_max).amplitudes[0::2])),
                   np.max(np.abs(squeezed_vacuum(0.7, 0.3, n_max).amplitudes[1::2])))
    checks.append(_le("parity selection rules (exact zeros)", odd_even, 0.0))
    return checks


def suite_husimi(config: RunConfig) -> list[Check]:
    psi = cat_state(1.5, "odd", config.n_max)
    theta = 0.6
    a = maximize_overlap(psi, config.search)
    b = maximize_overlap(apply_phase_rotation(psi, theta), config.search)
    rotated = sorted((m * np.exp(1j * theta) for m in a.maximizers),
                     key=lambda z: (z.real, z.imag))
    pos = max(abs(x - y) for x, y in zip(rotated, b.maximizers))
    again = maximize_overlap(psi, config.search)
    return [
        _le("rotation covariance of maximisers", pos, 1e-5),
        _le("rotation invariance of maximal value", abs(a.value - b.value), 1e-8),
        _le("refinement never loses (grid - refined)", max(0.0, a.grid_best - a.value), 0.0),
        Check("determinism of maximiser set", 0.0, 0.0, again == a),
    ]


def suite_gs_oracle(config: RunConfig, n_terms: int = 8) -> list[Check]:
    worst_dev, worst_unit = 0.0, 0.0
    for psi in oracle_test_set(config.n_max).values():
        dev, unit = oracle_deviation(psi, n_terms, config)
        worst_dev, worst_unit = max(worst_dev, dev), max(worst_unit, unit)
    return [
        _le("greedy vs unitary simulation, max deviation", worst_dev, 1e-6),
        _le("max ||U^dag U - 1||", worst_unit, 1e-8),
    ]


def suite_measures(config: RunConfig) -> list[Check]:
    plus = np.array([[0.5, 0.5], [0.5, 0.5]])
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]])
    rho = 0.75 * plus + 0.25 * minus
    h_quarter = -(0.25 * math.log(0.25) + 0.75 * math.log(0.75))
    cat = alpha_coherence(cat_state(3.0, "even", config.n_max), "rel_entropy",
                          config.schedule, config.search)
    coh = alpha_coherence(coherent_vector(1.3, config.n_max), "rel_entropy",
                          config.schedule, config.search)
    return [
        _le("C_rel(1/2, 1/2) = log 2", abs(rel_entropy_coherence([0.5, 0.5]) - math.log(2)), 1e-12),
        _le("C_rel(incoherent) = 0", rel_entropy_coherence([1.0, 0.0, 0.0]), 0.0),
        _le("C_rel mixed qubit = log 2 - H(1/4)",
            abs(rel_entropy_coherence(rho) - (math.log(2) - h_quarter)), 1e-12),
        _le("C_l1(uniform d=3) = 2", abs(l1_coherence([1 / 3] * 3) - 2.0), 1e-12),
        _le("alpha-coherence of cat(3) vs log 2", abs(cat.value - math.log(2)), 0.05),
        _le("alpha-coherence of coherent state", coh.value, 1e-6),
    ]


def invariance_deviation(psi: FockVector, config: RunConfig) -> float:
    """Largest |C_rel(psi) - C_rel(D(g) R(theta) psi)| over g in {0.5, 1}, theta in {0, pi/4}."""
    base = alpha_coherence(psi, "rel_entropy", config.schedule, config.search).value
    worst = 0.0
    for gamma in (0.5, 1.0):
        for theta in (0.0, math.pi / 4):
            moved = apply_displacement(apply_phase_rotation(psi, theta), gamma)
            val = alpha_coherence(moved, "rel_entropy", config.schedule, config.search).value
            worst = max(worst, abs(val - base))
    return worst


def suite_invariance(config: RunConfig) -> list[Check]:
    states = oracle_test_set(config.n_max)
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            devs = list(pool.map(invariance_deviation, states.values(),
                                 [config] * len(states)))
    else:
        devs = [invariance_deviation(psi, config) for psi in states.values()]
    return [_le(f"C_rel invariance under displacement and phase, {name}", dev, 2e-3)
            for name, dev in zip(states, devs)]


def beamsplitter_sweep(p: PDensity, ancilla: PDensity) -> float:
    """Largest increase of negativity over t in {0.1..0.9} (<= 0 means monotone)."""
    base = negativity(p).value
    return max(negativity(transform_beamsplitter(p, ancilla, t)).value - base
               for t in np.round(np.arange(0.1, 1.0, 0.1), 10))


def suite_p_monotone(config: RunConfig) -> list[Check]:
    L, h = config.quadrature.L, config.quadrature.h
    pat = PDensity.photon_added_thermal(0.5, L, h)
    anc = PDensity.thermal(0.2, L, h)
    worst_sweep = beamsplitter_sweep(pat, anc)
    convex = 0.0
    others = [PDensity.thermal(1.0, L, h), PDensity.displaced_thermal(0.3, 0.5 - 0.5j, L, h),
              PDensity.photon_added_thermal(0.8, L, h)]
    for q in others:
        for r in (0.2, 0.5, 0.8):
            lhs = negativity(mix(pat, q, r)).value
            rhs = r * negativity(pat).value + (1 - r) * negativity(q).value
            convex = max(convex, lhs - rhs)
    base = negativity(pat).value
    inv = max(abs(negativity(transform_displace(pat, 0.7 + 0.4j)).value - base),
              abs(negativity(transform_phase(pat, 1.1)).value - base))
    return [
        _le("beam-splitter sweep: max negativity increase", max(worst_sweep, 0.0), 1e-3),
        _le("convexity excess on grid mixtures", max(convex, 0.0), 1e-6),
        _le("displacement/phase invariance of negativity", inv, 1e-3),
    ]


SUITES: dict[str, Callable[[RunConfig], list[Check]]] = {
    "fock": suite_fock,
    "husimi": suite_husimi,
    "gs-oracle": suite_gs_oracle,
    "measures": suite_measures,
    "invariance": suite_invariance,
    "p-monotone": suite_p_monotone,
}
