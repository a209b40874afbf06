"""Word-level CNN: convolution over word windows, max-over-time pooling, dense softmax."""

from typing import Sequence

import torch
import torch.nn as nn
import torch.nn.functional as F


def glorot_uniform_(
    weight: torch.Tensor, fan_in: int, fan_out: int, generator: torch.Generator
) -> None:
    """Fill ``weight`` from U(-a, a) with ``a = sqrt(6 / (fan_in + fan_out))``."""
    bound = (6.0 / (fan_in + fan_out)) ** 0.5
    with torch.no_grad():
        weight.uniform_(-bound, bound, generator=generator)


class WordCnnModel(nn.Module):
    """Text CNN over a (frozen by default) embedding table.

    For each window size ``h`` and filter, ``c_i = relu(w . x_{i:i+h-1} + b)``
    over every window position, max-pooled over positions; the ``|H| * F``
    pooled features feed a dense layer producing class logits.
    """

    def __init__(
        self,
        vocab_size: int,
        dim: int,
        n_classes: int,
        window_sizes: Sequence[int] = (2, 3, 4, 5),
        filters: int = 20,
        fine_tune_embeddings: bool = False,
        generator: torch.Generator = None,
    ):
        super().__init__()
        generator = generator or torch.Generator().manual_seed(0)
        self.pad_index = vocab_size
        self.window_sizes = tuple(window_sizes)
        self.embedding = nn.Embedding(vocab_size + 1, dim, padding_idx=self.pad_index)
        self.embedding.weight.requires_grad_(fine_tune_embeddings)
        self.convs = nn.ModuleList(nn.Conv1d(dim, filters, h) for h in self.window_sizes)
        self.dense = nn.Linear(len(self.window_sizes) * filters, n_classes)

        for conv, h in zip(self.convs, self.window_sizes):
            glorot_uniform_(conv.weight, fan_in=h * dim, fan_out=h * filters, generator=generator)
            nn.init.zeros_(conv.bias)
        glorot_uniform_(
            self.dense.weight,
            fan_in=self.dense.in_features,
            fan_out=n_classes,
            generator=generator,
        )
        nn.init.zeros_(self.dense.bias)

    @property
    def min_length(self) -> int:
        return max(self.window_sizes)

    def pooled_features(self, tokens: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        """Max-over-time pooled convolution features, ``B x (|H| * F)``.

        Windows reaching into padding are excluded whenever the document has
        at least one full window; shorter documents keep their single
        zero-padded window.
        """
        x = self.embedding(tokens).transpose(1, 2)
        pooled = []
        for conv, h in zip(self.convs, self.window_sizes):
            c = F.relu(conv(x))
            positions = torch.arange(c.shape[2], device=c.device)
            last_valid = (lengths - h).clamp(min=0)
            valid = positions.unsqueeze(0) <= last_valid.unsqueeze(1)
            c = c.masked_fill(~valid.unsqueeze(1), float("-inf"))
            pooled.append(c.max(dim=2).values)
        return torch.cat(pooled, dim=1)

    def forward(self, tokens: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        """Class logits for a padded batch.

        Args:
            tokens: ``B x T`` token indices, padded with ``pad_index``.
            lengths: Real document lengths.

        Returns:
            ``B x m`` logits.
        """
        return self.dense(self.pooled_features(tokens, lengths))
