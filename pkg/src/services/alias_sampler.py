"""Walker/Vose alias tables for O(1) categorical draws."""

import numpy as np


class AliasSampler:
    """Alias table over a fixed categorical distribution.

    Building the table is O(K); each draw costs one uniform index and one
    biased coin.
    """

    def __init__(self, probs: np.ndarray):
        """Build the alias table.

        Args:
            probs: Non-negative weights; normalized internally.
        """
        probs = np.asarray(probs, dtype=np.float64)
        size = probs.shape[0]
        scaled = probs * (size / probs.sum())
        self.prob = np.zeros(size, dtype=np.float64)
        self.alias = np.zeros(size, dtype=np.int64)

        smaller = [i for i in range(size) if scaled[i] < 1.0]
        larger = [i for i in range(size) if scaled[i] >= 1.0]
        while smaller and larger:
            small = smaller.pop()
            large = larger.pop()
            self.prob[small] = scaled[small]
            self.alias[small] = large
            scaled[large] = (scaled[large] + scaled[small]) - 1.0
            if scaled[large] < 1.0:
                smaller.append(large)
            else:
                larger.append(large)

        # leftovers are 1 up to rounding
        for i in larger + smaller:
            self.prob[i] = 1.0
            self.alias[i] = i

    def __len__(self) -> int:
        return int(self.prob.shape[0])

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``n`` outcome indices.

        Args:
            n: Number of draws.
            rng: Random generator.

        Returns:
            Integer array of outcomes.
        """
        columns = rng.integers(0, len(self), size=n)
        coins = rng.uniform(size=n)
        return np.where(coins < self.prob[columns], columns, self.alias[columns])
