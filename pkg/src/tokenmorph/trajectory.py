"""Morphing trajectories between two token sets.

A trajectory has J+2 frames at blend values beta = alpha / (J+1). Each
frame is a pairwise barycenter; the initialization of its support is
what distinguishes the modes:

* ``sequential`` warm-starts every frame with the previous frame's
  converged support (frame 0 starts from the source), which keeps steps
  even and avoids jumps between distant configurations.
* ``linear_init`` optimizes every frame independently from the
  index-wise lerp of source and target.
* ``naive_lerp`` skips optimization entirely and emits the raw lerp.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .barycenter import BarycenterConfig, pairwise_barycenter
from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidWeightsError,
    SolverFailureError,
)
from .ot import solve_exact_ot, w2_distance
from .tokens import TokenSet, index_lerp

INIT_MODES = ("sequential", "linear_init", "naive_lerp")


@dataclass(frozen=True)
class MorphConfig:
    """Trajectory shape: number of intermediate frames and init mode."""

    J: int = 6
    init_mode: str = "sequential"
    barycenter_config: BarycenterConfig = field(default_factory=BarycenterConfig)

    def __post_init__(self):
        if int(self.J) != self.J or self.J < 0:
            raise InvalidParameterError("J must be an integer >= 0")
        if self.init_mode not in INIT_MODES:
            raise InvalidParameterError(
                f"init_mode must be one of {INIT_MODES}, got {self.init_mode!r}"
            )


@dataclass(frozen=True)
class FrameDiagnostics:
    iterations_used: int
    converged: bool
    objective: float


@dataclass(frozen=True)
class MorphTrajectory:
    """Ordered frames Z_0 .. Z_{J+1} with per-frame and per-step diagnostics."""

    frames: tuple[TokenSet, ...]
    betas: tuple[float, ...]
    frame_diagnostics: tuple[FrameDiagnostics, ...]
    step_w2: tuple[float, ...]
    init_mode: str


def morph_geometry(
    source: TokenSet, target: TokenSet, config: MorphConfig | None = None
) -> MorphTrajectory:
    """Compute the geometric morphing trajectory from source to target.

    Args:
        source: source token set (uniform weights required).
        target: target token set, same size and dimension as source.
        config: frame count J, init mode, and barycenter settings.

    Returns:
        MorphTrajectory with exactly J+2 frames at beta = alpha/(J+1).

    Raises:
        DimensionMismatchError: on size or dimension mismatch.
        InvalidWeightsError: if either set has non-uniform weights.
        SolverFailureError: if any frame's optimization fails; the
            message names the failing frame index.
    """
    if config is None:
        config = MorphConfig()
    if source.m != target.m:
        raise DimensionMismatchError(
            f"embedding dimensions differ: {source.m} vs {target.m}"
        )
    if source.n != target.n:
        raise DimensionMismatchError(f"token counts differ: {source.n} vs {target.n}")
    if not (source.has_uniform_weights() and target.has_uniform_weights()):
        raise InvalidWeightsError("morphing requires uniform token weights")

    steps = config.J + 1
    betas = tuple(alpha / steps for alpha in range(config.J + 2))

    frames: list[TokenSet] = []
    diagnostics: list[FrameDiagnostics] = []
    previous: TokenSet | None = None
    for alpha, beta in enumerate(betas):
        try:
            if config.init_mode == "naive_lerp":
                frame = index_lerp(source, target, beta)
                objective = _blend_objective(source, target, frame, beta)
                diag = FrameDiagnostics(0, True, objective)
            else:
                if config.init_mode == "sequential":
                    init = source if previous is None else previous
                else:
                    init = index_lerp(source, target, beta)
                result = pairwise_barycenter(
                    source, target, beta, init, config.barycenter_config
                )
                frame = result.support
                diag = FrameDiagnostics(
                    result.iterations_used, result.converged, result.objective
                )
        except SolverFailureError as exc:
            raise SolverFailureError(f"frame alpha={alpha} failed: {exc}") from exc
        frames.append(frame)
        diagnostics.append(diag)
        previous = frame

    steps_w2 = _consecutive_w2(frames)
    return MorphTrajectory(
        frames=tuple(frames),
        betas=betas,
        frame_diagnostics=tuple(diagnostics),
        step_w2=steps_w2,
        init_mode=config.init_mode,
    )


def step_lengths(trajectory: MorphTrajectory) -> np.ndarray:
    """W2 distances between consecutive frames."""
    if len(trajectory.frames) < 2:
        raise InvalidParameterError("trajectory must have at least 2 frames")
    return np.asarray(_consecutive_w2(list(trajectory.frames)))


def endpoint_errors(
    trajectory: MorphTrajectory, source: TokenSet, target: TokenSet
) -> tuple[float, float]:
    """(W2 of first frame to source, W2 of last frame to target)."""
    return (
        w2_distance(trajectory.frames[0], source),
        w2_distance(trajectory.frames[-1], target),
    )


def _consecutive_w2(frames: list[TokenSet]) -> tuple[float, ...]:
    return tuple(
        w2_distance(frames[k], frames[k + 1]) for k in range(len(frames) - 1)
    )


def _blend_objective(
    source: TokenSet, target: TokenSet, frame: TokenSet, beta: float
) -> float:
    to_source = solve_exact_ot(frame, source).total_cost
    to_target = solve_exact_ot(frame, target).total_cost
    return (1.0 - beta) * to_source + beta * to_target
