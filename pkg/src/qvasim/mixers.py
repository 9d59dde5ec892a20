"""Phase-shift and mixing unitaries, plus dense oracles for testing them.

Conventions fixed here and relied on everywhere else:

* The discrete Fourier transform is the unitary one, kernel
  ``exp(-2j*pi*m*n/N) / sqrt(N)`` (``numpy.fft`` with ``norm="ortho"``).
* Grid dimension d lives on tensor axis D-1-d (flat index k carries
  dimension 0 in its least-significant base-N digits).
* Mixers are pure: they return a new state and never renormalise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .grid import ObjectiveTable, SolutionGrid
from .states import StateVector

DENSE_ORACLE_CAP = 4096


def phase_shift(state: StateVector, gamma: float, table: ObjectiveTable) -> StateVector:
    """Multiply amplitude_k by exp(-i*gamma*f_k)."""
    if table.values.size != state.total_points:
        raise ValueError(
            f"table has {table.values.size} values, state has {state.total_points}"
        )
    phase = table.values * (-1j * gamma)
    np.exp(phase, out=phase)
    phase *= state.amplitudes
    return StateVector(phase, state.tensor_shape)


# --------------------------------------------------------------------------
# Circulant graphs and the QMOA walk
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CirculantGraph:
    """Symmetric circulant graph on ``size`` vertices with 0/1 weights.

    ``connection_set`` holds offsets j in {1, ..., size // 2}; offset j
    couples vertex n to n +/- j (mod size). The offset size/2, when present,
    contributes a single edge per vertex.
    """

    size: int
    connection_set: frozenset[int] = field(repr=False)

    def __post_init__(self) -> None:
        offsets = frozenset(int(j) for j in self.connection_set)
        if not offsets:
            raise ValueError("connection set must not be empty")
        if any(j < 1 or j > self.size // 2 for j in offsets):
            raise ValueError(
                f"offsets must lie in [1, {self.size // 2}] for size {self.size}"
            )
        object.__setattr__(self, "connection_set", offsets)

    @property
    def degree(self) -> int:
        half = self.size // 2 if self.size % 2 == 0 else None
        return sum(1 if j == half else 2 for j in self.connection_set)

    @classmethod
    def complete(cls, size: int) -> "CirculantGraph":
        return cls(size, frozenset(range(1, size // 2 + 1)))

    @classmethod
    def cycle(cls, size: int) -> "CirculantGraph":
        return cls(size, frozenset({1}))

    @classmethod
    def banded(cls, size: int, bandwidth: int) -> "CirculantGraph":
        return cls(size, frozenset(range(1, bandwidth + 1)))


def circulant_eigenvalues(graph: CirculantGraph) -> np.ndarray:
    """Closed-form real spectrum; entry n pairs with DFT frequency n."""
    n = np.arange(graph.size)
    eig = np.zeros(graph.size)
    for j in graph.connection_set:
        if graph.size % 2 == 0 and j == graph.size // 2:
            eig = eig + np.cos(np.pi * n)
        else:
            eig = eig + 2.0 * np.cos(2.0 * np.pi * n * j / graph.size)
    return eig


def _broadcast_shape(dims: int, dim: int, n: int) -> list[int]:
    shape = [1] * dims
    shape[dims - 1 - dim] = n
    return shape


def qmoa_mixer(
    state: StateVector, times: np.ndarray, graphs: tuple[CirculantGraph, ...]
) -> StateVector:
    """Separable continuous-time walk: one circulant graph per dimension.

    Realised spectrally: forward DFT along every dimension, multiply by
    exp(-i * sum_d t_d * eigenvalue_d), inverse DFT along every dimension.
    """
    shape = state.tensor_shape
    dims = len(shape)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 1 and dims > 1:
        times = np.repeat(times, dims)
    if times.size != dims or len(graphs) != dims:
        raise ValueError(f"need one walk time and one graph per dimension (D={dims})")
    for d, g in enumerate(graphs):
        if g.size != shape[dims - 1 - d]:
            raise ValueError(
                f"graph for dimension {d} has {g.size} vertices, grid has {shape[dims - 1 - d]}"
            )
    # exp(-i sum_d t_d L_d) built as a product of per-dimension factors: D
    # small exponentials instead of one K-sized one
    phase = np.ones((1,) * dims, dtype=np.complex128)
    for d, g in enumerate(graphs):
        eig = circulant_eigenvalues(g)
        factor = np.exp(-1j * times[d] * eig)
        phase = phase * factor.reshape(_broadcast_shape(dims, d, g.size))
    spectrum = sfft.fftn(state.as_tensor(), norm="ortho")
    spectrum *= phase
    out = sfft.ifftn(spectrum, norm="ortho", overwrite_x=True)
    return StateVector(out.ravel(), shape)


def qaoa_complete_mixer(state: StateVector, t: float) -> StateVector:
    """Walk on the complete graph over all K states, O(K) via the global mean.

    The leading global phase exp(i*t) of the closed form is kept so the
    operator matches exp(-i*t*A) for the complete-graph adjacency exactly.
    """
    k_total = state.total_points
    mean = np.mean(state.amplitudes)
    out = np.exp(1j * t) * (
        state.amplitudes + (np.exp(-1j * t * k_total) - 1.0) * mean
    )
    return StateVector(out, state.tensor_shape)


def hypercube_mixer(state: StateVector, t: float) -> StateVector:
    """Walk on the M-qubit hypercube as M pairwise butterfly passes.

    Equivalent to the product of commuting single-qubit rotations
    cos(t)*I - i*sin(t)*X applied to each of the M = log2(K) qubits.
    """
    k_total = state.total_points
    m = k_total.bit_length() - 1
    if 1 << m != k_total:
        raise ValueError(f"hypercube mixer needs K = 2^M states, got K={k_total}")
    c = np.cos(t)
    s = np.sin(t)
    amps = state.amplitudes.copy()
    for i in range(m):
        pairs = amps.reshape(-1, 2, 1 << i)
        a = pairs[:, 0, :].copy()
        b = pairs[:, 1, :]
        pairs[:, 0, :] = c * a - 1j * s * b
        pairs[:, 1, :] = c * b - 1j * s * a
    return StateVector(amps, state.tensor_shape)


# --------------------------------------------------------------------------
# Momentum-space machinery for the wavepacket-evolution mixer
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentumGrid:
    """Centred momentum-space grid conjugate to a solution grid.

    Per dimension: dk = 2*pi / (N * dx), kappa_0 = dk * (-N + 1 + (N-1)//2),
    kappa_n = kappa_0 + n * dk, which places kappa = 0 on-grid and spans
    [-N*dk/2, N*dk/2). The position-grid origin and spacing are kept because
    the centred transform's phases depend on both grids.
    """

    kappa_0: np.ndarray
    delta_kappa: np.ndarray
    values: np.ndarray
    position_origin: np.ndarray
    position_spacing: np.ndarray

    @classmethod
    def from_grid(cls, grid: SolutionGrid) -> "MomentumGrid":
        n = grid.points_per_dim
        dk = 2.0 * np.pi / (n * grid.spacing)
        k0 = dk * (-n + 1 + (n - 1) // 2)
        values = k0[:, None] + np.arange(n)[None, :] * dk[:, None]
        return cls(k0, dk, values, grid.lower.copy(), grid.spacing.copy())

    @property
    def dims(self) -> int:
        return self.kappa_0.size

    @property
    def points_per_dim(self) -> int:
        return self.values.shape[1]


def centred_fourier(
    state: StateVector,
    dim: int,
    grid: SolutionGrid,
    momentum: MomentumGrid,
    direction: str = "forward",
) -> StateVector:
    """Unitary with elements exp(-i*kappa_m*x_n)/sqrt(N) along one dimension.

    Factors exactly as diagonal-phase o unitary DFT o diagonal-phase using
    dk*dx = 2*pi/N; ``direction="inverse"`` applies the conjugate transpose.
    """
    dims = len(state.tensor_shape)
    if not 0 <= dim < dims:
        raise ValueError(f"dimension {dim} out of range for D={dims}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    n = grid.points_per_dim
    axis = dims - 1 - dim
    x0 = grid.lower[dim]
    dx = grid.spacing[dim]
    k0 = momentum.kappa_0[dim]
    dk = momentum.delta_kappa[dim]
    idx = np.arange(n)
    pre = np.exp(-1j * k0 * dx * idx).reshape(_broadcast_shape(dims, dim, n))
    post = np.exp(-1j * dk * x0 * idx).reshape(_broadcast_shape(dims, dim, n))
    scalar = np.exp(-1j * k0 * x0)
    psi = state.as_tensor()
    if direction == "forward":
        psi = np.fft.fft(psi * pre, axis=axis, norm="ortho")
        psi = psi * post * scalar
    else:
        psi = np.fft.ifft(psi * post.conj() * scalar.conj(), axis=axis, norm="ortho")
        psi = psi * pre.conj()
    return StateVector(psi.ravel(), state.tensor_shape)


def qowe_mixer(
    state: StateVector,
    times: np.ndarray,
    momentum: MomentumGrid,
    grid: SolutionGrid | None = None,
) -> StateVector:
    """Kinetic-energy evolution: F^-1 exp(-i sum_d t_d kappa_d^2) F.

    Walk times are per-dimension. ``grid`` may be omitted; the momentum grid
    carries the matching position-grid origin and spacing.
    """
    dims = len(state.tensor_shape)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 1 and dims > 1:
        times = np.repeat(times, dims)
    if times.size != dims or momentum.dims != dims:
        raise ValueError(f"need one walk time per dimension (D={dims})")
    if grid is None:
        grid = SolutionGrid(
            dims,
            momentum.points_per_dim,
            momentum.position_origin,
            momentum.position_origin
            + (momentum.points_per_dim - 1) * momentum.position_spacing,
            momentum.position_spacing,
        )
    out = state
    for d in range(dims):
        out = centred_fourier(out, d, grid, momentum, "forward")
    phase = np.ones((1,) * dims, dtype=np.complex128)
    for d in range(dims):
        factor = np.exp(-1j * times[d] * momentum.values[d] ** 2)
        phase = phase * factor.reshape(
            _broadcast_shape(dims, d, momentum.points_per_dim)
        )
    out = StateVector(out.as_tensor() * phase, state.tensor_shape)
    for d in range(dims):
        out = centred_fourier(out, d, grid, momentum, "inverse")
    return out


# --------------------------------------------------------------------------
# Dense oracles (testing only; capped at K <= 4096)
# --------------------------------------------------------------------------


def dense_walk_oracle(adjacency: np.ndarray, t: float) -> np.ndarray:
    """exp(-i*t*A) via dense eigendecomposition of a symmetric adjacency."""
    adjacency = np.asarray(adjacency, dtype=float)
    k = adjacency.shape[0]
    if adjacency.shape != (k, k) or k > DENSE_ORACLE_CAP:
        raise ValueError(f"adjacency must be square with K <= {DENSE_ORACLE_CAP}")
    if not np.allclose(adjacency, adjacency.T, atol=1e-12):
        raise ValueError("adjacency must be symmetric")
    eigvals, eigvecs = np.linalg.eigh(adjacency)
    return (eigvecs * np.exp(-1j * t * eigvals)) @ eigvecs.conj().T


def adjacency_matrix(graph: CirculantGraph) -> np.ndarray:
    """Dense adjacency of a circulant graph."""
    n = graph.size
    a = np.zeros((n, n))
    for j in graph.connection_set:
        for v in range(n):
            a[v, (v + j) % n] = 1.0
            a[v, (v - j) % n] = 1.0
    return a


def hypercube_adjacency(m: int) -> np.ndarray:
    """Dense adjacency of the M-dimensional hypercube on 2^M vertices."""
    k = 1 << m
    a = np.zeros((k, k))
    for v in range(k):
        for i in range(m):
            a[v, v ^ (1 << i)] = 1.0
    return a


def lifted_adjacency(graphs: tuple[CirculantGraph, ...]) -> np.ndarray:
    """sum_d I x ... x A_d x ... x I with dimension 0 least significant."""
    dims = len(graphs)
    sizes = [g.size for g in graphs]
    k = int(np.prod(sizes))
    total = np.zeros((k, k))
    for d, g in enumerate(graphs):
        term = adjacency_matrix(g)
        for lower in range(d):
            term = np.kron(term, np.eye(sizes[lower]))
        for upper in range(d + 1, dims):
            term = np.kron(np.eye(sizes[upper]), term)
        total += term
    return total


def centred_fourier_matrix(momentum: MomentumGrid, dim: int) -> np.ndarray:
    """Dense one-dimensional centred transform, elements exp(-i*k_m*x_n)/sqrt(N)."""
    n = momentum.points_per_dim
    x = momentum.position_origin[dim] + np.arange(n) * momentum.position_spacing[dim]
    kappa = momentum.values[dim]
    return np.exp(-1j * np.outer(kappa, x)) / np.sqrt(n)
