"""Two noninteracting walkers: product evolution, joint distributions, pair entropy.

The pair state carries axes (x_a, c_a, x_b, c_b). Each time step applies
particle A's split step on the first axis pair and particle B's on the second,
with independent angle fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .states import (
    LatticeWindow,
    SingleParticleState,
    TwoParticleState,
    position_distribution,
    reduce_to_coin,
    von_neumann_entropy,
)
from .walk import AngleField, _split_step_amps, evolve

PAIR_KIND_ALIASES = {
    "psi+": "psi_plus",
    "psi-": "psi_minus",
    "sep": "separable",
    "psi_plus": "psi_plus",
    "psi_minus": "psi_minus",
    "separable": "separable",
}

CLIP_TOL = 1e-12
DISTRIBUTION_TOL = 1e-8


@dataclass(frozen=True)
class InitialPairState:
    """Initial coin configuration of the pair; both walkers sit at `positions`.

    kind "separable" is coin |01>; "psi_plus"/"psi_minus" are (|01> +- |10>)/sqrt(2),
    labels ordered (c_a, c_b).
    """

    kind: str = "psi_plus"
    positions: tuple[int, int] = (0, 0)

    def __post_init__(self):
        canonical = PAIR_KIND_ALIASES.get(self.kind)
        if canonical is None:
            raise ValueError(f"unknown pair state kind {self.kind!r}")
        object.__setattr__(self, "kind", canonical)
        object.__setattr__(self, "positions", (int(self.positions[0]), int(self.positions[1])))


@dataclass
class JointDistribution:
    """P(i, j): particle A at site i, particle B at site j."""

    window: LatticeWindow
    values: np.ndarray  # (size, size) real, nonnegative, sums to 1


@dataclass
class EntropySeries:
    steps: list[int] = field(default_factory=list)
    entropy_bits: list[float] = field(default_factory=list)


def make_pair_state(init: InitialPairState, window: LatticeWindow) -> TwoParticleState:
    xa, xb = init.positions
    if abs(xa) >= window.half_width or abs(xb) >= window.half_width:
        raise ValueError(f"positions {init.positions} must satisfy |x| < {window.half_width}")
    ia, ib = window.index(xa), window.index(xb)
    amps = np.zeros((window.size, 2, window.size, 2), dtype=complex)
    if init.kind == "separable":
        amps[ia, 0, ib, 1] = 1.0
    elif init.kind == "psi_plus":
        amps[ia, 0, ib, 1] = 1.0 / np.sqrt(2.0)
        amps[ia, 1, ib, 0] = 1.0 / np.sqrt(2.0)
    else:
        amps[ia, 0, ib, 1] = 1.0 / np.sqrt(2.0)
        amps[ia, 1, ib, 0] = -1.0 / np.sqrt(2.0)
    return TwoParticleState(window, amps)


def pair_split_step(
    state: TwoParticleState, field_a: AngleField, field_b: AngleField, step: int
) -> TwoParticleState:
    """One product step: A's split step on (x_a, c_a), then B's on (x_b, c_b)."""
    amps = _split_step_amps(state.amps, field_a, step)
    amps = np.ascontiguousarray(amps.transpose(2, 3, 0, 1))
    amps = _split_step_amps(amps, field_b, step)
    amps = np.ascontiguousarray(amps.transpose(2, 3, 0, 1))
    return TwoParticleState(state.window, amps)


def evolve_pair(
    state: TwoParticleState,
    field_a: AngleField,
    field_b: AngleField,
    n_steps: int,
    observers=None,
):
    """Evolve the pair n_steps steps; see walk.evolve for the observer contract."""
    return evolve(
        state,
        lambda s, step: pair_split_step(s, field_a, field_b, step),
        n_steps,
        observers,
    )


def iter_pair_trajectory(
    state: TwoParticleState, field_a: AngleField, field_b: AngleField, n_steps: int
):
    """Yield the pair state at step 0 and after each of n_steps steps."""
    yield state
    for step in range(n_steps):
        state = pair_split_step(state, field_a, field_b, step)
        yield state


def joint_distribution_direct(state: TwoParticleState) -> JointDistribution:
    """Ground-truth P(i, j) by summing |amplitude|^2 over both coins."""
    values = np.einsum("iajb->ij", np.abs(state.amps) ** 2)
    return JointDistribution(state.window, values)


def joint_distribution_interference(
    coin0_a: SingleParticleState,
    coin1_a: SingleParticleState,
    coin0_b: SingleParticleState | None = None,
    coin1_b: SingleParticleState | None = None,
    sign: int = +1,
) -> JointDistribution:
    """P(i, j) for a (|01> +- |10>)/sqrt(2) pair from four single-walker runs.

    coin0_x / coin1_x are the states of a lone walker evolved for the same
    number of steps under particle x's own angle field, starting from coin |0>
    and coin |1> at the pair's initial position. With both coin labels present
    in the superposition, the distribution splits into the two product terms
    plus an exchange interference term built from the coin-summed overlap
    I(i) = sum_c amp_coin0(i, c) * conj(amp_coin1(i, c)) of each particle:

        P(i, j) = 1/2 * [ P0_a(i) P1_b(j) + P1_a(i) P0_b(j)
                          +- 2 Re( I_a(i) conj(I_b(j)) ) ]

    The +- matches the sign in the initial superposition. Entries in
    [-CLIP_TOL, 0) are rounding noise and are clipped to zero.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if coin0_b is None:
        coin0_b = coin0_a
    if coin1_b is None:
        coin1_b = coin1_a
    windows = {s.window for s in (coin0_a, coin1_a, coin0_b, coin1_b)}
    if len(windows) != 1:
        raise ValueError("all four walker states must share one window")
    window = coin0_a.window

    p0_a = position_distribution(coin0_a)
    p1_a = position_distribution(coin1_a)
    p0_b = position_distribution(coin0_b)
    p1_b = position_distribution(coin1_b)
    cross_a = np.sum(coin0_a.amps * coin1_a.amps.conj(), axis=1)
    cross_b = np.sum(coin0_b.amps * coin1_b.amps.conj(), axis=1)

    values = 0.5 * (
        np.outer(p0_a, p1_b)
        + np.outer(p1_a, p0_b)
        + sign * 2.0 * np.real(np.outer(cross_a, cross_b.conj()))
    )
    low = float(values.min())
    if low < -CLIP_TOL:
        raise NumericalError(f"interference joint distribution has entry {low:.3e} < 0")
    values = np.clip(values, 0.0, None)
    total = float(values.sum())
    if abs(total - 1.0) > DISTRIBUTION_TOL:
        raise NumericalError(
            f"interference joint distribution sums to {total:.12f}; "
            "walker inputs are inconsistent"
        )
    return JointDistribution(window, values)


def marginals(joint: JointDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Per-particle position distributions (rows for A, columns for B)."""
    return joint.values.sum(axis=1), joint.values.sum(axis=0)


def pair_entropy_series(trajectory) -> EntropySeries:
    """Coin entanglement entropy of each state in a trajectory, in bits."""
    series = EntropySeries()
    for step, state in enumerate(trajectory):
        series.steps.append(step)
        series.entropy_bits.append(von_neumann_entropy(reduce_to_coin(state)))
    return series


# -- product decomposition -----------------------------------------------------
# A noninteracting pair started in a superposition of coin products stays a
# superposition of products of single-walker states, so pair observables can be
# assembled from four single runs. Used as a fast exact path for angle sweeps;
# tests pin it against the direct tensor evolution.


def product_terms(init: InitialPairState) -> list[tuple[complex, int, int]]:
    """The initial pair state as [(coefficient, coin_a, coin_b), ...]."""
    rt = 1.0 / np.sqrt(2.0)
    if init.kind == "separable":
        return [(1.0 + 0.0j, 0, 1)]
    if init.kind == "psi_plus":
        return [(rt, 0, 1), (rt, 1, 0)]
    return [(rt, 0, 1), (-rt, 1, 0)]


def pair_coin_density_from_singles(
    walkers_a: tuple[SingleParticleState, SingleParticleState],
    walkers_b: tuple[SingleParticleState, SingleParticleState],
    terms: list[tuple[complex, int, int]],
) -> np.ndarray:
    """4x4 coin density matrix of the evolved pair, from per-particle walks.

    walkers_x[c] is the lone-walker state evolved under particle x's field from
    coin |c> at that particle's start site. Tracing the positions of a product
    superposition reduces to 2x2 position-overlap (Gram) matrices between the
    coin-0 and coin-1 runs of each particle.
    """

    def gram(u: SingleParticleState, v: SingleParticleState) -> np.ndarray:
        return u.amps.T @ v.amps.conj()

    rho = np.zeros((4, 4), dtype=complex)
    for coef_t, ca_t, cb_t in terms:
        for coef_u, ca_u, cb_u in terms:
            ga = gram(walkers_a[ca_t], walkers_a[ca_u])
            gb = gram(walkers_b[cb_t], walkers_b[cb_u])
            rho += coef_t * np.conj(coef_u) * np.kron(ga, gb)
    return rho
