"""Coherent-state orthogonalisation.

Two independent routes to the same numbers:

* :func:`greedy_decompose` runs the residual recursion directly on Fock
  vectors (matching pursuit over the coherent-state dictionary);
* :func:`gs_unitary_simulate` builds every CNOT-type tagging unitary as an
  explicit matrix on signal (x) ancilla and applies them in order.

The ancilla tags are exact orthonormal basis vectors of an ``N + 1``
dimensional register; index 0 is the untagged slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, DimensionError, VanishedResidualError
from .fock import FockDensity, FockVector, coherent_vector
from .husimi import SearchConfig, maximize_overlap

# maximal squared overlap below which a residual is treated as exhausted
COEFF_FLOOR = 1e-12


@dataclass(frozen=True)
class GreedyDecomposition:
    terms: tuple[tuple[complex, complex], ...]
    residual_norm_sq: float
    captured_weight: float
    branch_id: str
    residual_history: tuple[float, ...] = field(default=(), repr=False)
    orbit_sampled: bool = False
    budget_exhausted: bool = False

    @property
    def labels(self) -> list[complex]:
        return [a for a, _ in self.terms]

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=complex)

    @property
    def path(self) -> tuple[int, ...]:
        return _parse_branch_id(self.branch_id)

    def prefix(self, n_terms: int) -> "GreedyDecomposition":
        """The decomposition truncated to its first ``n_terms`` steps."""
        k = min(n_terms, len(self.terms))
        if k == len(self.terms):
            return self
        captured = float(sum(abs(c) ** 2 for _, c in self.terms[:k]))
        residual = self.residual_history[k - 1] if k else 1.0 - captured
        return GreedyDecomposition(self.terms[:k], residual, captured, self.branch_id,
                                   self.residual_history[:k], self.orbit_sampled,
                                   self.budget_exhausted)

    def to_json(self) -> dict:
        return {
            "branch_id": self.branch_id,
            "terms": [[a.real, a.imag, c.real, c.imag] for a, c in self.terms],
            "residual": self.residual_norm_sq,
            "captured_weight": self.captured_weight,
        }


def _parse_branch_id(branch_id: str) -> tuple[int, ...]:
    return tuple(int(p) for p in branch_id.split(".")) if branch_id else ()


@dataclass
class _Branch:
    path: tuple[int, ...]
    residual: np.ndarray
    terms: list
    history: list
    orbit: bool = False
    done: bool = False


def greedy_decompose(state: FockVector, max_terms: int, tol_tail: float = 1e-4,
                     branch_budget: int = 8,
                     search: SearchConfig | None = None) -> list[GreedyDecomposition]:
    """Greedy coherent-state decomposition, exploring degenerate choices.

    At every step each live branch picks a maximiser of its residual's
    Husimi function.  The canonical (first) maximiser always continues the
    branch; alternative maximisers spawn new branches breadth-first while the
    total number of branches is below ``branch_budget``.
    """
    if not isinstance(state, FockVector):
        raise TypeError("greedy_decompose expects a FockVector")
    norm_sq = float(np.vdot(state.amplitudes, state.amplitudes).real)
    if abs(norm_sq - 1.0) > 1e-8:
        raise ValueError(f"input must be unit norm (norm^2 = {norm_sq})")
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    if not tol_tail > 0:
        raise ValueError("tol_tail must be > 0")
    if branch_budget < 1:
        raise ValueError("branch_budget must be >= 1")
    search = search or SearchConfig()

    branches = [_Branch((), np.array(state.amplitudes), [], [])]
    exhausted = False
    n_max = state.n_max
    for _ in range(max_terms):
        if all(b.done for b in branches):
            break
        spawned: list[_Branch] = []
        for b in branches:
            if b.done:
                continue
            res_sq = b.history[-1] if b.history else norm_sq
            if res_sq <= tol_tail:
                b.done = True
                continue
            try:
                ms = maximize_overlap(b.residual, search)
            except VanishedResidualError:
                b.done = True
                continue
            if ms.value < COEFF_FLOOR:
                b.done = True
                continue
            orbit = ms.degeneracy_kind == "orbit"
            for k, alpha in enumerate(ms.maximizers[1:], start=1):
                if len(branches) + len(spawned) >= branch_budget:
                    exhausted = True
                    break
                child = _Branch(b.path + (k,), b.residual.copy(), list(b.terms),
                                list(b.history), b.orbit or orbit)
                _step(child, alpha, n_max)
                spawned.append(child)
            b.path = b.path + (0,)
            b.orbit = b.orbit or orbit
            _step(b, ms.maximizers[0], n_max)
        branches.extend(spawned)
        branches.sort(key=lambda br: br.path)

    out = []
    for b in branches:
        captured = float(sum(abs(c) ** 2 for _, c in b.terms))
        residual = b.history[-1] if b.history else norm_sq
        out.append(GreedyDecomposition(
            terms=tuple(b.terms), residual_norm_sq=float(residual), captured_weight=captured,
            branch_id=".".join(str(p) for p in b.path), residual_history=tuple(b.history),
            orbit_sampled=b.orbit, budget_exhausted=exhausted,
        ))
    return out


def _step(b: _Branch, alpha: complex, n_max: int) -> None:
    v = coherent_vector(alpha, n_max).amplitudes
    c = complex(np.vdot(v, b.residual))
    b.residual = b.residual - c * v
    b.terms.append((complex(alpha), c))
    b.history.append(float(np.vdot(b.residual, b.residual).real))


# --------------------------------------------------------------------------
# explicit unitary route


def build_cnot_unitary(label: complex, tag_index: int, n_max: int, N: int) -> np.ndarray:
    """Matrix of U = P(x)|b><0| + P(x)|0><b| + (1 - P(x)|0><0| - P(x)|b><b|).

    P is the projector on the renormalised truncated coherent vector of
    ``label`` and ``b`` the ancilla basis vector ``tag_index``.  Ordering of
    the joint basis is ``n * (N + 1) + j``.
    """
    if not 1 <= tag_index <= N:
        raise ValueError(f"tag_index {tag_index} outside 1..{N}")
    v = coherent_vector(label, n_max).amplitudes
    proj = np.outer(v, v.conj())
    d_anc = N + 1

    def ket_bra(i, j):
        m = np.zeros((d_anc, d_anc))
        m[i, j] = 1.0
        return m

    dim = (n_max + 1) * d_anc
    return (np.kron(proj, ket_bra(tag_index, 0)) + np.kron(proj, ket_bra(0, tag_index))
            + np.eye(dim) - np.kron(proj, ket_bra(0, 0))
            - np.kron(proj, ket_bra(tag_index, tag_index)))


@dataclass(frozen=True)
class JointState:
    """Signal (x) ancilla amplitudes, shape ``(n_max + 1, N + 1)``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"joint state norm {norm} differs from 1")

    def sector(self, j: int) -> np.ndarray:
        return self.amplitudes[:, j]

    def sector_weights(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)


def gs_unitary_simulate(state: FockVector, labels: Sequence[complex],
                        coefficients: Sequence[complex] | None = None,
                        tol: float = 1e-6) -> JointState:
    """Apply the ordered product of tagging unitaries to ``state (x) |0>``.

    When greedy ``coefficients`` are supplied each ancilla sector ``i`` is
    checked against ``c_i |alpha_i>``; disagreement raises
    :class:`ConsistencyError` (typically n_max too small).
    """
    N = len(labels)
    if N < 1:
        raise ValueError("need at least one label")
    d_anc = N + 1
    joint = np.zeros((state.dim, d_anc), dtype=complex)
    joint[:, 0] = state.amplitudes
    vec = joint.reshape(-1)
    for i, alpha in enumerate(labels, start=1):
        vec = build_cnot_unitary(alpha, i, state.n_max, N) @ vec
    out = vec.reshape(state.dim, d_anc)
    if coefficients is not None:
        if len(coefficients) != N:
            raise DimensionError("one coefficient per label required")
        for i, (alpha, c) in enumerate(zip(labels, coefficients), start=1):
            expected = c * coherent_vector(alpha, state.n_max).amplitudes
            dev = np.max(np.abs(out[:, i] - expected))
            if dev > tol:
                raise ConsistencyError(
                    f"ancilla sector {i} deviates from greedy amplitude by {dev:.3g}"
                )
    return JointState(out)


def gs_project(decomp: GreedyDecomposition) -> np.ndarray:
    """Probabilities |c_i|^2 / sum |c|^2 on the tagged orthonormal basis."""
    if not decomp.captured_weight > 0:
        raise ValueError("decomposition captured no weight")
    p = np.abs(decomp.coefficients) ** 2
    return p / p.sum()


# --------------------------------------------------------------------------
# mixed states


def _apply_tag(x: np.ndarray, v: np.ndarray, i: int) -> np.ndarray:
    """U_alpha acting on axes (signal, ancilla) of ``x`` with shape (d, N+1, ...)."""
    out = x.copy()
    x0, xi = x[:, 0], x[:, i]
    p0 = np.outer(v, np.tensordot(v.conj(), x0, axes=(0, 0))).reshape(x0.shape)
    pi = np.outer(v, np.tensordot(v.conj(), xi, axes=(0, 0))).reshape(xi.shape)
    out[:, 0] = x0 - p0 + pi
    out[:, i] = xi - pi + p0
    return out


@dataclass(frozen=True)
class GSMapResult:
    density: np.ndarray
    labels: tuple[complex, ...]
    trace: float
    upper_bound: bool = True


def gs_map_density(rho: FockDensity, N: int, search: SearchConfig | None = None) -> GSMapResult:
    """Gram-Schmidt map of ``rho (x) |0><0|`` (the trivial extension).

    Returns the normalised projected density in the tagged basis
    ``{|alpha_i>|b_i>}``.  Other extensions can only lower the coherence, so
    the result is an upper bound for mixed inputs.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    search = search or SearchConfig()
    d = rho.n_max + 1
    d_anc = N + 1
    joint = np.zeros((d, d_anc, d, d_anc), dtype=complex)
    joint[:, 0, :, 0] = rho.matrix
    labels: list[complex] = []
    vecs: list[np.ndarray] = []
    for i in range(1, N + 1):
        block = joint[:, 0, :, 0]
        if np.trace(block).real <= search.tol_residual:
            break
        ms = maximize_overlap(block, search)
        if ms.value < COEFF_FLOOR:
            break
        alpha = ms.canonical
        v = coherent_vector(alpha, rho.n_max).amplitudes
        # U is Hermitian, so conjugation is U rho U applied on both index pairs
        joint = _apply_tag(joint, v, i)
        joint = _apply_tag(joint.transpose(2, 3, 0, 1).conj(), v, i).transpose(2, 3, 0, 1).conj()
        labels.append(alpha)
        vecs.append(v)
    n = len(labels)
    proj = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            proj[a, b] = vecs[a].conj() @ joint[:, a + 1, :, b + 1] @ vecs[b]
    tr = float(np.trace(proj).real)
    if tr < 1e-12:
        raise ConsistencyError(f"projected trace {tr:.3g} collapsed")
    return GSMapResult(proj / tr, tuple(labels), tr)


@dataclass(frozen=True)
class ClassicalCertificate:
    value: float
    weights: tuple[float, ...]
    labels: tuple[complex, ...]
    extension: np.ndarray
    max_offdiag: float
    reduced_error: float


def classical_certificate(mixture: Sequence[tuple[float, complex]],
                          n_max: int = 60) -> ClassicalCertificate:
    """Zero-coherence witness for a finite mixture of coherent states.

    Builds the extension sum_j w_j |a_j><a_j| (x) |e_j><e_j| with orthonormal
    tags, checks that it is diagonal in the tagged basis and that tracing
    out the tags gives back the mixture.
    """
    if not mixture:
        raise ValueError("empty mixture")
    weights = np.array([float(w) for w, _ in mixture])
    labels = [complex(a) for _, a in mixture]
    if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-10:
        raise ValueError("weights must be positive and sum to 1")
    m = len(mixture)
    d = n_max + 1
    vecs = [coherent_vector(a, n_max).amplitudes for a in labels]
    ext = np.zeros((d, m, d, m), dtype=complex)
    for j, (w, v) in enumerate(zip(weights, vecs)):
        ext[:, j, :, j] += w * np.outer(v, v.conj())
    tagged = np.empty((m, m), dtype=complex)
    for a in range(m):
        for b in range(m):
            tagged[a, b] = vecs[a].conj() @ ext[:, a, :, b] @ vecs[b]
    offdiag = float(np.max(np.abs(tagged - np.diag(np.diag(tagged))))) if m > 1 else 0.0
    reduced = np.einsum("ajbj->ab", ext)
    target = sum(w * np.outer(v, v.conj()) for w, v in zip(weights, vecs))
    red_err = float(np.max(np.abs(reduced - target)))
    if offdiag > 1e-10 or red_err > 1e-10:
        raise ConsistencyError("tagged extension failed its diagonal/marginal check")
    return ClassicalCertificate(0.0, tuple(weights), tuple(labels), tagged, offdiag, red_err)
