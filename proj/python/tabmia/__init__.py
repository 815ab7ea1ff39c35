"""Membership-inference privacy audit for tabular diffusion models."""

from tabmia._core import (  # noqa: F401
    Denoiser,
    DivergenceError,
    MissingArtifactError,
    NoiseSchedule,
    ValidationError,
    __version__,
    dcr_score,
    deterministic_diffuse,
    diffusion_loss,
    nn_attack,
    roc,
    run_pipeline,
    sample_rows,
    stat_attack,
    t_error_matrix,
    train_denoiser,
)
