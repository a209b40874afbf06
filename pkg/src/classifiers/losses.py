"""KL-divergence loss against soft targets."""

from typing import Union

import numpy as np
import torch
import torch.nn.functional as F

ArrayLike = Union[np.ndarray, torch.Tensor]


def kl_divergence_from_log_probs(targets: torch.Tensor, log_probs: torch.Tensor) -> torch.Tensor:
    """``sum_ij l_ij (ln l_ij - ln y_ij)`` with ``0 ln 0 = 0``, as a tensor."""
    return F.kl_div(log_probs, targets, reduction="sum")


def kl_loss(targets: ArrayLike, predictions: ArrayLike) -> float:
    """Summed KL divergence of predictions from targets.

    Args:
        targets: ``n x m`` row-stochastic target matrix ``L``.
        predictions: ``n x m`` strictly positive predictions ``Y``.

    Returns:
        ``sum_i sum_j l_ij ln(l_ij / y_ij)``.
    """
    L = torch.as_tensor(np.asarray(targets, dtype=np.float64))
    Y = torch.as_tensor(np.asarray(predictions, dtype=np.float64))
    return float(kl_divergence_from_log_probs(L, torch.log(Y)))
