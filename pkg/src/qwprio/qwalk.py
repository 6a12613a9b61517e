"""Continuous-time quantum walks with seed self-loops.

The walk Hamiltonian is the adjacency matrix with ``alpha`` added to the
diagonal of every seed node. Its propagator is never formed: the action of
``exp(-i t H)`` on a block of vectors is evaluated with a truncated
Chebyshev expansion whose length is chosen from a rigorous tail bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from scipy import special

from . import kernels
from .errors import ConvergenceError, DataError, NumericalError
from .graph import Graph
from .ingest import SeedSet
from .scores import ScoreVector

DEFAULT_T = 0.11
DEFAULT_ALPHA = 5.0
DEFAULT_TOL = 1e-12
MAX_TERMS = 200_000
SEED_BLOCK = 32


def _seed_indices(seeds) -> tuple[int, ...]:
    if isinstance(seeds, SeedSet):
        return seeds.seed_indices
    return tuple(sorted({int(s) for s in seeds}))


@dataclass(frozen=True)
class WalkParams:
    t: float = DEFAULT_T
    alpha: float = DEFAULT_ALPHA
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0):
            raise DataError(f"t must be finite and >= 0, got {self.t}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise DataError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not 0 < self.tolerance <= 1e-3:
            raise DataError(f"tolerance must lie in (0, 1e-3], got {self.tolerance}")


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """``adjacency + alpha * diag(seed_mask)`` as a real symmetric CSR matrix."""

    matrix: sp.csr_matrix
    alpha: float
    seed_mask: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def spectral_bounds(self) -> tuple[float, float]:
        return gershgorin_bounds(self.matrix)


def build_hamiltonian(g: Graph, seeds, alpha: float = DEFAULT_ALPHA) -> Hamiltonian:
    if not (math.isfinite(alpha) and alpha >= 0):
        raise DataError(f"alpha must be finite and >= 0, got {alpha}")
    idx = _seed_indices(seeds)
    mask = np.zeros(g.n_nodes, dtype=np.int8)
    mask[list(idx)] = 1
    matrix = g.adjacency.copy()
    if alpha != 0 and idx:
        matrix = (matrix + sp.diags(alpha * mask.astype(np.float64), format="csr")).tocsr()
        matrix.sort_indices()
    mask.setflags(write=False)
    return Hamiltonian(matrix, float(alpha), mask)


def gershgorin_bounds(matrix: sp.spmatrix) -> tuple[float, float]:
    """Interval guaranteed to contain the spectrum of a symmetric matrix."""
    m = sp.csr_matrix(matrix)
    if m.shape[0] == 0:
        return 0.0, 0.0
    diag = m.diagonal()
    radius = np.asarray(abs(m).sum(axis=1)).ravel() - np.abs(diag)
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def _series_tail_bound(z: float, start: int) -> float:
    """Upper bound on sum_{k>=start} (|z|/2)^k / k! * exp(z^2 / (4 (start+1))).

    Bounds both |J_k(z)| and I_k(|z|) summed from ``start`` on.
    """
    z = abs(z)
    if z == 0:
        return 0.0
    q = (z / 2) / (start + 1)
    if q >= 1:
        return math.inf
    log_first = start * math.log(z / 2) - math.lgamma(start + 1) + z * z / (4 * (start + 1))
    return math.exp(log_first) / (1 - q)


def chebyshev_coefficients(kind: str, tau: float, center: float, radius: float,
                           tol: float, max_terms: int = MAX_TERMS) -> np.ndarray:
    """Truncated Chebyshev coefficients of exp(-i tau x) or exp(-tau x).

    ``x`` ranges over [center - radius, center + radius]. The returned
    series has error at most ``tol`` in sup norm on that interval; the term
    budget grows like 2 |tau| radius and is capped by ``max_terms``.
    """
    z = tau * radius
    budget = min(int(math.ceil(2 * abs(z))) + 64, max_terms)
    k = np.arange(budget + 1)
    eps = np.where(k == 0, 1.0, 2.0)
    if kind == "unitary":
        prefactor = 1.0
        coeffs = np.exp(-1j * tau * center) * eps * (-1j) ** k * special.jv(k, z)
    elif kind == "heat":
        prefactor = math.exp(-tau * center)
        # I_k(z) = ive(k, z) * e^|z|
        scaled = math.exp(-tau * center + abs(z)) * special.ive(k, z)
        coeffs = (eps * (-1.0) ** k * scaled).astype(np.complex128)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if not np.all(np.isfinite(coeffs)):
        raise NumericalError("non-finite expansion coefficients")
    beyond = 2 * prefactor * _series_tail_bound(z, budget + 1)
    tails = np.cumsum(np.abs(coeffs)[::-1])[::-1]
    # tails[j] bounds the error of dropping terms j.. onward
    tails = np.append(tails[1:], 0.0) + beyond
    ok = np.flatnonzero(tails <= tol)
    if ok.size == 0:
        raise ConvergenceError(
            f"Chebyshev series needs more than {budget + 1} terms "
            f"(|tau|*radius = {abs(z):.3g}, tol = {tol:g})")
    return coeffs[:ok[0] + 1]


def expm_multiply(matrix: sp.spmatrix, tau: float, block: np.ndarray, *,
                  kind: str = "unitary", tol: float = DEFAULT_TOL,
                  bounds: tuple[float, float] | None = None,
                  max_terms: int = MAX_TERMS, backend: str | None = None) -> np.ndarray:
    """Apply exp(-i tau M) (``kind="unitary"``) or exp(-tau M) (``"heat"``) to ``block``.

    ``matrix`` must be real symmetric. Error in 2-norm is at most
    ``tol * ||block||`` per column.
    """
    if not math.isfinite(tau):
        raise NumericalError(f"non-finite time {tau}")
    block = np.asarray(block)
    vector = block.ndim == 1
    b = block.reshape(block.shape[0], -1).astype(np.complex128)
    if not np.all(np.isfinite(b)):
        raise NumericalError("non-finite input vector")
    m = sp.csr_matrix(matrix, dtype=np.float64)
    if m.shape != (b.shape[0], b.shape[0]):
        raise DataError(f"dimension mismatch: matrix {m.shape}, vector length {b.shape[0]}")
    if not np.all(np.isfinite(m.data)):
        raise NumericalError("non-finite matrix entries")
    if tau == 0 or b.shape[1] == 0:
        out = b.copy()
    else:
        lo, hi = bounds if bounds is not None else gershgorin_bounds(m)
        center, radius = (lo + hi) / 2, (hi - lo) / 2
        if radius == 0:
            factor = np.exp(-1j * tau * center) if kind == "unitary" else np.exp(-tau * center)
            out = factor * b
        else:
            coeffs = chebyshev_coefficients(kind, tau, center, radius, tol, max_terms)
            out = kernels.chebyshev_series(m, center, radius, coeffs, b, backend=backend)
    return out[:, 0] if vector else out


def expm_action(h: Hamiltonian, t: float, b: np.ndarray, tol: float = DEFAULT_TOL,
                backend: str | None = None) -> np.ndarray:
    """exp(-i t H) b for a walk Hamiltonian (vector or (n, m) block)."""
    if not 0 < tol <= 1e-3:
        raise DataError(f"tolerance must lie in (0, 1e-3], got {tol}")
    return expm_multiply(h.matrix, t, b, kind="unitary", tol=tol,
                         bounds=h.spectral_bounds(), backend=backend)


def _basis_block(n: int, columns: Iterable[int]) -> np.ndarray:
    columns = list(columns)
    block = np.zeros((n, len(columns)), dtype=np.complex128)
    block[columns, np.arange(len(columns))] = 1.0
    return block


def transition_probabilities_from(h: Hamiltonian, t: float, u: int,
                                  tol: float = DEFAULT_TOL) -> np.ndarray:
    """Measurement probabilities |<v| exp(-i t H) |u>|^2 over all v."""
    if not 0 <= u < h.n:
        raise IndexError(f"node {u} out of range for {h.n} nodes")
    psi = expm_action(h, t, _basis_block(h.n, [u]), tol)[:, 0]
    return np.abs(psi) ** 2


def transition_probabilities(h: Hamiltonian, t: float, sources: Iterable[int],
                             tol: float = DEFAULT_TOL,
                             block_size: int = SEED_BLOCK) -> np.ndarray:
    """(n, len(sources)) array whose column j is the row for ``sources[j]``."""
    sources = list(sources)
    out = np.empty((h.n, len(sources)))
    for start in range(0, len(sources), block_size):
        chunk = sources[start:start + block_size]
        psi = expm_action(h, t, _basis_block(h.n, chunk), tol)
        out[:, start:start + len(chunk)] = np.abs(psi) ** 2
    return out


def score_qa(g: Graph, seeds, params: WalkParams | None = None) -> ScoreVector:
    """Sum over seeds s of P_vs(t) for every node v.

    The Hamiltonian is real symmetric, so P_vs = P_sv and each seed needs a
    single propagation from its basis vector.
    """
    params = params or WalkParams()
    idx = _seed_indices(seeds)
    if not idx:
        raise DataError("score_qa needs at least one seed")
    h = build_hamiltonian(g, idx, params.alpha)
    probs = transition_probabilities(h, params.t, idx, params.tolerance)
    return ScoreVector(
        "QA", probs.sum(axis=1),
        {"t": params.t, "alpha": params.alpha, "tolerance": params.tolerance},
        idx,
    )
