"""State vectors for one and two walkers on a finite 1D lattice.

Amplitudes are dense complex arrays indexed by (position, coin) for a single
walker and by (position_a, coin_a, position_b, coin_b) for a pair. Positions
run x = -L..+L; array index 0 corresponds to x = -L.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

NORM_TOL = 1e-10
EIGENVALUE_TOL = 1e-10
HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class LatticeWindow:
    """Symmetric window of 2*half_width + 1 sites centred on the origin."""

    half_width: int

    def __post_init__(self):
        if self.half_width < 1:
            raise ValueError(f"half_width must be >= 1, got {self.half_width}")

    @property
    def size(self) -> int:
        return 2 * self.half_width + 1

    def positions(self) -> np.ndarray:
        return np.arange(-self.half_width, self.half_width + 1)

    def index(self, x: int) -> int:
        if abs(x) > self.half_width:
            raise ValueError(f"position {x} outside window |x| <= {self.half_width}")
        return x + self.half_width


def window_for_steps(n_steps: int) -> LatticeWindow:
    """Window guaranteed to contain an origin walk: support grows one site per step."""
    return LatticeWindow(n_steps + 1)


@dataclass
class SingleParticleState:
    window: LatticeWindow
    amps: np.ndarray  # (size, 2) complex

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))


@dataclass
class TwoParticleState:
    window: LatticeWindow
    amps: np.ndarray  # (size, 2, size, 2) complex

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))


def make_single_state(window: LatticeWindow, x0: int, coin_amps) -> SingleParticleState:
    """Walker localized at x0 with the given normalized 2-component coin state."""
    coin = np.asarray(coin_amps, dtype=complex)
    if coin.shape != (2,):
        raise ValueError(f"coin_amps must have 2 components, got shape {coin.shape}")
    if abs(np.sum(np.abs(coin) ** 2) - 1.0) > NORM_TOL:
        raise ValueError("coin_amps must be normalized")
    if abs(x0) >= window.half_width:
        raise ValueError(f"x0={x0} must satisfy |x0| < {window.half_width}")
    amps = np.zeros((window.size, 2), dtype=complex)
    amps[window.index(x0)] = coin
    return SingleParticleState(window, amps)


def tensor_pair(a: SingleParticleState, b: SingleParticleState) -> TwoParticleState:
    """Product state of two single walkers sharing the same window."""
    if a.window != b.window:
        raise ValueError("tensor_pair requires identical windows")
    return TwoParticleState(a.window, np.einsum("ia,jb->iajb", a.amps, b.amps))


def position_distribution(state: SingleParticleState) -> np.ndarray:
    """P(x) with the coin traced out; sums to 1 for a normalized state."""
    return np.sum(np.abs(state.amps) ** 2, axis=1)


def distribution_sigma(positions: np.ndarray, probs: np.ndarray) -> float:
    """Standard deviation of a position distribution."""
    mean = float(np.dot(probs, positions))
    return float(np.sqrt(np.dot(probs, positions.astype(float) ** 2) - mean**2))


def reduce_to_coin(state: SingleParticleState | TwoParticleState) -> np.ndarray:
    """Coin-space density matrix after tracing out every position index.

    Returns a 2x2 matrix for a single walker and a 4x4 matrix over the pair
    coin basis (c_a, c_b) ordered 00, 01, 10, 11.
    """
    if isinstance(state, SingleParticleState):
        return state.amps.T @ state.amps.conj()
    if isinstance(state, TwoParticleState):
        n = state.window.size
        m = state.amps.transpose(0, 2, 1, 3).reshape(n * n, 4)
        return m.T @ m.conj()
    raise TypeError(f"unsupported state type {type(state).__name__}")


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy -sum(lam * log2(lam)) of a Hermitian unit-trace matrix, in bits.

    Eigenvalues in [-EIGENVALUE_TOL, 0) are rounding noise and are clipped to
    zero; anything more negative means the input is not a density matrix.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
        raise NumericalError("density matrix is not Hermitian")
    evals = np.linalg.eigvalsh(rho)
    if float(evals.min()) < -EIGENVALUE_TOL:
        raise NumericalError(f"invalid density matrix: eigenvalue {evals.min():.3e} < 0")
    lam = np.clip(evals, 0.0, 1.0)
    lam = lam[lam > 0.0]
    return float(-(lam * np.log2(lam)).sum())
