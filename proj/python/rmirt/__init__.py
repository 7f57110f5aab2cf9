"""Region-based motion-compensated iterative CT reconstruction."""

from ._rmirt import (
    DivergenceError,
    ProjGeom,
    backproject,
    dice,
    forward,
    gradients,
    make_phantom,
    mse,
    num_threads,
    objective,
    project,
    run_experiment,
    selfcheck,
    set_num_threads,
    warp,
)

__all__ = [
    "DivergenceError",
    "ProjGeom",
    "backproject",
    "dice",
    "forward",
    "gradients",
    "make_phantom",
    "mse",
    "num_threads",
    "objective",
    "project",
    "run_experiment",
    "selfcheck",
    "set_num_threads",
    "warp",
]
