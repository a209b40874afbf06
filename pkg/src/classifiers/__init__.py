"""Probabilistic document classifiers trained with KL loss against soft targets."""

from src.classifiers.base import NeuralClassifier, build_classifier
from src.classifiers.losses import kl_loss

__all__ = ["NeuralClassifier", "build_classifier", "kl_loss"]
