"""Parameter initialization"""

import math

from torch import nn

EMBEDDING_STD = 0.02


def initialize_module(module: nn.Module) -> nn.Module:
    """
    Initialize every submodule in place:
    - Linear: uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weight and bias
    - Embedding: normal(0, 0.02)
    - GRU: uniform(-1/sqrt(hidden), 1/sqrt(hidden))
    - LayerNorm: unit scale, zero shift
    """
    for m in module.modules():
        if isinstance(m, nn.Linear):
            bound = 1.0 / math.sqrt(m.in_features)
            nn.init.uniform_(m.weight, -bound, bound)
            if m.bias is not None:
                nn.init.uniform_(m.bias, -bound, bound)
        elif isinstance(m, nn.Embedding):
            nn.init.normal_(m.weight, mean=0.0, std=EMBEDDING_STD)
        elif isinstance(m, nn.GRU):
            bound = 1.0 / math.sqrt(m.hidden_size)
            for param in m.parameters():
                nn.init.uniform_(param, -bound, bound)
        elif isinstance(m, nn.LayerNorm):
            nn.init.ones_(m.weight)
            nn.init.zeros_(m.bias)
    return module
