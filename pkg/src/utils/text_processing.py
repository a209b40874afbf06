"""Text processing utilities."""

import re
from typing import List

_TOKEN_PATTERN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> List[str]:
    """Split text into lowercased alphanumeric tokens.

    Any run of non-alphanumeric characters (underscore included) separates
    tokens; digits are kept.

    Args:
        text: Input text.

    Returns:
        Token strings in input order, possibly empty.
    """
    if not text:
        return []
    return _TOKEN_PATTERN.findall(text.lower())


def normalize_label_name(name: str) -> List[str]:
    """Normalize a class surface name into its constituent tokens.

    Args:
        name: Label name such as ``"Real Estate"``.

    Returns:
        Lowercased tokens of the name.
    """
    return tokenize(name.replace("_", " "))
