"""Path detector, UQSD ancilla coupling and single-shot path discrimination.

The environment of the quanton is a two-level path detector, optionally
followed by a two-level ancilla. Environment vectors are indexed
``2 * detector + ancilla``. The ancilla starts in ``a0``, which is taken to be
the same basis vector as the conclusive outcome ``a1``; ``a2`` is the other
basis vector.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import hilbert
from .optics import QuantonEnvironmentState

EMPTY_BRANCH_TOL = 1e-20
# outcome probabilities below this are rounding residue of exact zeros
PROBABILITY_FLOOR = 1e-14

ANCILLA_A0 = hilbert.basis(2, 0)
ANCILLA_A1 = hilbert.basis(2, 0)
ANCILLA_A2 = hilbert.basis(2, 1)


class AncillaOutcome(enum.IntEnum):
    A1 = 1  # conclusive branch
    A2 = 2  # inconclusive branch


class PathVerdict(enum.IntEnum):
    INCONCLUSIVE = 0
    SLIT1 = 1
    SLIT2 = 2


def _check_overlap(c: float) -> float:
    c = float(c)
    if not (0.0 <= c <= 1.0):
        raise ValueError(f"detector overlap must lie in [0, 1], got {c!r}")
    return c


@dataclass(frozen=True)
class DetectorPair:
    """Detector states ``d1 = (1, 0)`` and ``d2 = (c, sqrt(1 - c^2))``."""

    c: float
    d1: np.ndarray
    d2: np.ndarray
    norm_correction: float = 0.0

    @property
    def overlap(self) -> complex:
        return hilbert.inner(self.d1, self.d2)


def make_detector_pair(c: float) -> DetectorPair:
    c = _check_overlap(c)
    d1 = hilbert.basis(2, 0)
    d2, correction = hilbert.normalize([c, math.sqrt(1.0 - c * c)])
    return DetectorPair(c, d1, d2, correction)


def correlated_state(pair: DetectorPair, with_ancilla: bool = False) -> QuantonEnvironmentState:
    """Quanton entangled with the detector, ``(psi1 d1 + psi2 d2) / sqrt(2)``.

    With ``with_ancilla`` the ancilla is appended in its ready state ``a0``.
    """
    chis = [pair.d1, pair.d2]
    if with_ancilla:
        chis = [hilbert.tensor(d, ANCILLA_A0) for d in chis]
    return QuantonEnvironmentState(np.stack(chis) / math.sqrt(2.0))


@dataclass(frozen=True)
class UqsdUnitary:
    """Detector-ancilla unitary that discriminates ``d1`` from ``d2`` without error.

    ``U (d_i a0) = alpha p_i a1 + beta q a2`` with ``alpha = sqrt(1 - c)`` and
    ``beta = sqrt(c)``.
    """

    pair: DetectorPair
    alpha: float
    beta: float
    matrix: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    q: np.ndarray

    @property
    def c(self) -> float:
        return self.pair.c

    def inputs(self) -> list[np.ndarray]:
        return [hilbert.tensor(d, ANCILLA_A0) for d in (self.pair.d1, self.pair.d2)]

    def targets(self) -> list[np.ndarray]:
        tail = self.beta * hilbert.tensor(self.q, ANCILLA_A2)
        return [self.alpha * hilbert.tensor(p, ANCILLA_A1) + tail for p in (self.p1, self.p2)]

    def image_residual(self) -> float:
        """Largest entry error of ``U (d_i a0)`` against the prescribed images."""
        return max(
            float(np.max(np.abs(self.matrix @ x - y)))
            for x, y in zip(self.inputs(), self.targets())
        )

    def outcome_table(self) -> np.ndarray:
        """``table[j, m, a]``: probability that path ``j`` ends in detector ``m``, ancilla ``a``."""
        table = np.empty((2, 2, 2))
        for j, x in enumerate(self.inputs()):
            probs = np.abs(self.matrix @ x) ** 2
            probs[probs < PROBABILITY_FLOOR] = 0.0
            table[j] = (probs / probs.sum()).reshape(2, 2)
        return table


def build_uqsd(c: float) -> UqsdUnitary:
    pair = make_detector_pair(c)
    alpha = math.sqrt(1.0 - pair.c)
    beta = math.sqrt(pair.c)
    p1 = hilbert.basis(2, 0)
    p2 = hilbert.basis(2, 1)
    q = np.full(2, 1 / math.sqrt(2.0), dtype=np.complex128)
    draft = UqsdUnitary(pair, alpha, beta, np.eye(4, dtype=np.complex128), p1, p2, q)
    matrix = hilbert.complete_unitary(list(zip(draft.inputs(), draft.targets())))
    return UqsdUnitary(pair, alpha, beta, matrix, p1, p2, q)


def apply_uqsd(state: QuantonEnvironmentState, u: UqsdUnitary) -> QuantonEnvironmentState:
    """Let the ancilla interact with the detector on both path branches."""
    if state.env_dim != 4:
        raise ValueError(f"UQSD acts on detector x ancilla (dim 4), state has env_dim {state.env_dim}")
    return QuantonEnvironmentState(state.chi @ u.matrix.T)


def project_ancilla(
    state: QuantonEnvironmentState, outcome: AncillaOutcome
) -> tuple[float, QuantonEnvironmentState]:
    """Probability of an ancilla outcome and the renormalized conditional state."""
    if state.env_dim != 4:
        raise ValueError("ancilla projection needs a detector x ancilla state")
    outcome = AncillaOutcome(outcome)
    keep = 0 if outcome is AncillaOutcome.A1 else 1
    mask = np.zeros(4)
    mask[keep::2] = 1.0
    projected = state.chi * mask
    prob = float(np.sum(np.abs(projected) ** 2))
    if prob <= EMPTY_BRANCH_TOL:
        raise ValueError(f"empty branch: outcome {outcome.name} has probability {prob:.3g}")
    return prob, QuantonEnvironmentState(projected / math.sqrt(prob))


def uqsd_success_probability(c: float) -> float:
    """Best zero-error success probability for two equiprobable states of overlap ``c``."""
    return 1.0 - _check_overlap(c)


def _verdicts(true_paths, u1, u2, table) -> np.ndarray:
    probs = table[np.asarray(true_paths) - 1]
    p_a1 = probs[:, :, 0].sum(axis=1)
    conclusive = u1 < p_a1
    with np.errstate(invalid="ignore", divide="ignore"):
        p_slit1 = np.where(p_a1 > 0, probs[:, 0, 0] / p_a1, 0.0)
    slit = np.where(u2 < p_slit1, PathVerdict.SLIT1, PathVerdict.SLIT2)
    return np.where(conclusive, slit, PathVerdict.INCONCLUSIVE).astype(np.int8)


def discriminate_batch(true_paths, u: UqsdUnitary, rng: np.random.Generator) -> np.ndarray:
    """Vectorized :func:`discriminate`; returns ``PathVerdict`` codes as ``int8``."""
    true_paths = np.asarray(true_paths)
    if true_paths.size and not np.isin(true_paths, (1, 2)).all():
        raise ValueError("true paths must be 1 or 2")
    n = true_paths.size
    u1 = rng.random(n)
    u2 = rng.random(n)
    return _verdicts(true_paths, u1, u2, u.outcome_table())


def discriminate(true_path: int, u: UqsdUnitary, rng: np.random.Generator) -> PathVerdict:
    """Run one UQSD shot on ``d_true_path``.

    The ancilla is measured first; on ``a1`` the detector is measured in the
    ``{p1, p2}`` basis and the outcome names the slit, on ``a2`` the shot is
    inconclusive.
    """
    if true_path not in (1, 2):
        raise ValueError(f"true path must be 1 or 2, got {true_path!r}")
    return PathVerdict(int(discriminate_batch([true_path], u, rng)[0]))
