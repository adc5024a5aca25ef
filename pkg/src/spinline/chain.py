"""Excitation-sector dynamics of an open spin-1/2 XY chain.

With the interior sites starting in their ground state the dynamics never
leaves the span of 0-, 1- and 2-excitation states, so propagators are built
per excitation sector.  The one-excitation block has the closed-form
sine-mode spectrum of the open chain; two-excitation amplitudes follow from
2x2 determinants of one-excitation amplitudes (free-fermion structure).

Conventions shared by the whole package: bit value 1 marks an excited spin,
site 1 (the sender) is the most significant position of any bit pattern and
site N (the receiver) the least significant.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

HAMILTONIAN_KINDS = ("xy-nearest-neighbor",)

ORACLE_MAX_NODES = 8  # dense 2^N propagator guard


@dataclass(frozen=True)
class ChainSpec:
    """Physical description of the communication line."""

    n_nodes: int
    coupling: float = 1.0
    hamiltonian_kind: str = "xy-nearest-neighbor"

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError("chain needs at least 2 nodes")
        if not self.coupling > 0:
            raise ValueError("coupling must be positive")
        if self.hamiltonian_kind not in HAMILTONIAN_KINDS:
            raise ValueError(f"unknown hamiltonian kind {self.hamiltonian_kind!r}")


@dataclass(frozen=True)
class ExcitationBasis:
    """Ordered bases of the 0..k excitation sectors.

    Sector states are tuples of excited 1-based site indices, ordered
    lexicographically.  ``rank`` and ``unrank`` convert between a state and
    its ordinal inside its sector.
    """

    n_nodes: int
    sectors: tuple[tuple[tuple[int, ...], ...], ...]

    def sector_size(self, k: int) -> int:
        return len(self.sectors[k])

    def rank(self, state: tuple[int, ...]) -> int:
        k = len(state)
        try:
            return self.sectors[k].index(tuple(state))
        except ValueError:
            raise ValueError(f"state {state} not in sector {k}") from None

    def unrank(self, k: int, i: int) -> tuple[int, ...]:
        return self.sectors[k][i]


def build_basis(spec: ChainSpec, max_excitations: int) -> ExcitationBasis:
    """Enumerate excitation sectors 0..max_excitations (at most 2)."""
    if not 0 <= max_excitations <= 2:
        raise ValueError("only sectors with at most 2 excitations are supported")
    sites = range(1, spec.n_nodes + 1)
    sectors = tuple(
        tuple(combinations(sites, k)) for k in range(max_excitations + 1)
    )
    return ExcitationBasis(spec.n_nodes, sectors)


def sector_hamiltonian(spec: ChainSpec, k: int) -> np.ndarray:
    """Real symmetric Hamiltonian block of the k-excitation sector."""
    n, d = spec.n_nodes, spec.coupling
    if k == 0:
        return np.zeros((1, 1))
    if k == 1:
        h = np.zeros((n, n))
        i = np.arange(n - 1)
        h[i, i + 1] = h[i + 1, i] = d / 2.0
        return h
    if k == 2:
        basis = build_basis(spec, 2)
        states = basis.sectors[2]
        index = {s: i for i, s in enumerate(states)}
        m = len(states)
        h = np.zeros((m, m))
        for i, (a, b) in enumerate(states):
            for site in (a, b):
                other = b if site == a else a
                for nb in (site - 1, site + 1):
                    if 1 <= nb <= n and nb != other:
                        j = index[tuple(sorted((other, nb)))]
                        h[j, i] += d / 2.0
        return h
    raise ValueError("only sectors 0..2 are supported")


@dataclass(frozen=True)
class Propagator:
    """Per-sector unitaries U_k(t) = exp(-i H_k t)."""

    time: float
    sector_unitaries: tuple[np.ndarray, ...]

    def unitarity_defect(self) -> float:
        worst = 0.0
        for u in self.sector_unitaries:
            worst = max(worst, np.abs(u @ u.conj().T - np.eye(len(u))).max())
        return worst


def propagator(spec: ChainSpec, t: float, max_excitations: int = 2) -> Propagator:
    """Sector propagators by eigendecomposition of the real symmetric blocks."""
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    blocks = []
    for k in range(max_excitations + 1):
        h = sector_hamiltonian(spec, k)
        evals, evecs = np.linalg.eigh(h)
        u = (evecs * np.exp(-1j * evals * t)) @ evecs.T
        blocks.append(u)
    return Propagator(float(t), tuple(blocks))


def single_particle_amplitudes(spec: ChainSpec, t: float) -> np.ndarray:
    """One-excitation transition amplitudes f_{jn}(t) of the open chain.

    f is complex symmetric and unitary; column n is the wavefunction at time
    t of an excitation initially at site n.
    """
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    n, d = spec.n_nodes, spec.coupling
    k = np.arange(1, n + 1)
    modes = np.sqrt(2.0 / (n + 1)) * np.sin(
        np.pi * np.outer(np.arange(1, n + 1), k) / (n + 1)
    )
    phases = np.exp(-1j * d * t * np.cos(np.pi * k / (n + 1)))
    return (modes * phases) @ modes.T


def two_particle_amplitude(
    f: np.ndarray, source: tuple[int, int], target: tuple[int, int]
) -> complex:
    """Two-excitation amplitude from site pair ``source`` to ``target``.

    Both pairs are strictly increasing 1-based site pairs; the amplitude is
    the 2x2 determinant of one-excitation amplitudes.
    """
    m, n = source
    p, q = target
    size = f.shape[0]
    for a, b in ((m, n), (p, q)):
        if not (1 <= a < b <= size):
            raise ValueError(f"site pair {(a, b)} must be ordered within 1..{size}")
    return f[p - 1, m - 1] * f[q - 1, n - 1] - f[p - 1, n - 1] * f[q - 1, m - 1]


def basis_state_index(n_nodes: int, sites: tuple[int, ...]) -> int:
    """Full-Hilbert-space index of the pattern with the given sites excited."""
    idx = 0
    for s in sites:
        idx |= 1 << (n_nodes - s)
    return idx


def oracle_full_propagator(spec: ChainSpec, t: float) -> np.ndarray:
    """Dense 2^N propagator for cross-checks (N <= 8 only)."""
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    n = spec.n_nodes
    if n > ORACLE_MAX_NODES:
        raise ValueError(f"dense propagator restricted to N <= {ORACLE_MAX_NODES}")
    dim = 1 << n
    h = np.zeros((dim, dim))
    half = spec.coupling / 2.0
    for site in range(1, n):
        m1 = 1 << (n - site)
        m2 = 1 << (n - site - 1)
        for b in range(dim):
            if bool(b & m1) != bool(b & m2):
                h[b ^ m1 ^ m2, b] += half
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.T
