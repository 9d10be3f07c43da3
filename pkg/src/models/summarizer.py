"""
History Summarizers

Map a sequence of embedded tokens to one latent per prefix. The latent at t
only depends on tokens at positions <= t.
- TransformerSummarizer: GPT-style causal transformer with learned absolute
  positions and pre-LayerNorm blocks
- GRUSummarizer: left-to-right recurrence
- StatelessSummarizer: a projection of the current token only (memoryless baseline)
"""

import math

import torch
from torch import nn
from torch.nn import functional as F


class CausalSelfAttention(nn.Module):
    def __init__(self, embed_dim: int, num_heads: int, max_len: int):
        super().__init__()
        if embed_dim % num_heads != 0:
            raise ValueError(f"embed_dim {embed_dim} not divisible by num_heads {num_heads}")
        self.num_heads = num_heads
        self.qkv = nn.Linear(embed_dim, 3 * embed_dim)
        self.proj = nn.Linear(embed_dim, embed_dim)
        self.register_buffer(
            "mask",
            torch.tril(torch.ones(max_len, max_len, dtype=torch.bool)).view(1, 1, max_len, max_len),
            persistent=False,
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        B, T, D = x.shape
        q, k, v = self.qkv(x).split(D, dim=2)
        q = q.view(B, T, self.num_heads, D // self.num_heads).transpose(1, 2)
        k = k.view(B, T, self.num_heads, D // self.num_heads).transpose(1, 2)
        v = v.view(B, T, self.num_heads, D // self.num_heads).transpose(1, 2)

        att = (q @ k.transpose(-2, -1)) / math.sqrt(k.size(-1))
        att = att.masked_fill(~self.mask[:, :, :T, :T], float("-inf"))
        att = F.softmax(att, dim=-1)
        y = (att @ v).transpose(1, 2).contiguous().view(B, T, D)
        return self.proj(y)


class Block(nn.Module):
    def __init__(self, embed_dim: int, num_heads: int, max_len: int):
        super().__init__()
        self.ln_1 = nn.LayerNorm(embed_dim)
        self.attn = CausalSelfAttention(embed_dim, num_heads, max_len)
        self.ln_2 = nn.LayerNorm(embed_dim)
        self.mlp = nn.Sequential(
            nn.Linear(embed_dim, 4 * embed_dim),
            nn.GELU(),
            nn.Linear(4 * embed_dim, embed_dim),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.ln_1(x))
        return x + self.mlp(self.ln_2(x))


class TransformerSummarizer(nn.Module):
    def __init__(self, embed_dim: int, num_layers: int, num_heads: int, max_len: int):
        super().__init__()
        self.max_len = max_len
        self.position = nn.Embedding(max_len, embed_dim)
        self.blocks = nn.ModuleList(Block(embed_dim, num_heads, max_len) for _ in range(num_layers))
        self.ln_f = nn.LayerNorm(embed_dim)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        T = tokens.size(1)
        if T > self.max_len:
            raise ValueError(f"sequence length {T} exceeds horizon {self.max_len}")
        x = tokens + self.position(torch.arange(T, device=tokens.device))
        for block in self.blocks:
            x = block(x)
        return self.ln_f(x)


class GRUSummarizer(nn.Module):
    def __init__(self, embed_dim: int, num_layers: int = 1):
        super().__init__()
        self.gru = nn.GRU(embed_dim, embed_dim, num_layers=num_layers, batch_first=True)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        out, _ = self.gru(tokens)
        return out


class StatelessSummarizer(nn.Module):
    def __init__(self, embed_dim: int):
        super().__init__()
        self.proj = nn.Linear(embed_dim, embed_dim)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        return torch.tanh(self.proj(tokens))


BACKBONES = ("transformer", "gru", "stateless")


def build_summarizer(backbone: str, embed_dim: int, num_layers: int, num_heads: int, max_len: int) -> nn.Module:
    if backbone == "transformer":
        return TransformerSummarizer(embed_dim, num_layers, num_heads, max_len)
    if backbone == "gru":
        return GRUSummarizer(embed_dim, num_layers)
    if backbone == "stateless":
        return StatelessSummarizer(embed_dim)
    raise ValueError(f"Unknown backbone '{backbone}', use one of {BACKBONES}")
