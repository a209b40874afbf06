"""Bag-of-embeddings baseline: mean word vector into a dense softmax layer."""

import torch
import torch.nn as nn

from src.classifiers.word_cnn import glorot_uniform_


class BagOfEmbeddingsModel(nn.Module):
    """Order-insensitive classifier over the mean embedding of a document."""

    def __init__(
        self,
        vocab_size: int,
        dim: int,
        n_classes: int,
        fine_tune_embeddings: bool = False,
        generator: torch.Generator = None,
    ):
        super().__init__()
        generator = generator or torch.Generator().manual_seed(0)
        self.pad_index = vocab_size
        self.embedding = nn.Embedding(vocab_size + 1, dim, padding_idx=self.pad_index)
        self.embedding.weight.requires_grad_(fine_tune_embeddings)
        self.dense = nn.Linear(dim, n_classes)
        glorot_uniform_(self.dense.weight, fan_in=dim, fan_out=n_classes, generator=generator)
        nn.init.zeros_(self.dense.bias)

    @property
    def min_length(self) -> int:
        return 1

    def forward(self, tokens: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        # padding rows are zero, so the sum only covers real tokens
        summed = self.embedding(tokens).sum(dim=1)
        mean = summed / lengths.unsqueeze(1).to(summed.dtype)
        return self.dense(mean)
