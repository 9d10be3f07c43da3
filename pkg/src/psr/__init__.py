"""PSR module - core-test extraction and the predictive loss"""

from .core_tests import CoreTestSample, CoreTestSpec, PSRBatch, build_psr_batch, extract_core_tests
from .loss import anchor_latents, prediction_accuracy, psr_loss, psr_loss_terms

__all__ = [
    "CoreTestSample",
    "CoreTestSpec",
    "PSRBatch",
    "build_psr_batch",
    "extract_core_tests",
    "anchor_latents",
    "prediction_accuracy",
    "psr_loss",
    "psr_loss_terms",
]
