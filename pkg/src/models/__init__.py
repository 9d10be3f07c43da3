"""Models module - shared embedding, history summarizers and future predictor"""

from .embedding import SharedEmbedding, history_inputs, split_widths
from .predictor import FuturePrediction, FuturePredictor
from .representation import RepresentationModel
from .summarizer import (
    BACKBONES,
    GRUSummarizer,
    StatelessSummarizer,
    TransformerSummarizer,
    build_summarizer,
)

__all__ = [
    "SharedEmbedding",
    "history_inputs",
    "split_widths",
    "FuturePrediction",
    "FuturePredictor",
    "RepresentationModel",
    "BACKBONES",
    "GRUSummarizer",
    "StatelessSummarizer",
    "TransformerSummarizer",
    "build_summarizer",
]
