"""Corpus ingestion: tokenization, vocabulary, background distribution and tf-idf."""

import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.exceptions import AllDocumentsEmpty, EmptySubset, InvalidCorpusFormat
from src.utils.text_processing import tokenize

logger = logging.getLogger(__name__)

RawLabel = Optional[Union[int, str]]


@dataclass(frozen=True)
class Document:
    """A tokenized corpus document.

    ``id`` is the 0-based line index in the input, so ids stay stable when
    empty documents are dropped.
    """

    id: int
    tokens: np.ndarray
    gold_label: Optional[int] = None

    def __len__(self) -> int:
        return int(self.tokens.shape[0])


@dataclass(frozen=True)
class Vocabulary:
    """Dense word <-> index mapping with corpus frequencies."""

    words: Tuple[str, ...]
    index_of: Dict[str, int]
    counts: np.ndarray
    total_tokens: int

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index_of

    def fingerprint(self) -> str:
        """SHA-256 of the ordered word list, used to pin checkpoints."""
        digest = hashlib.sha256()
        for word in self.words:
            digest.update(word.encode("utf-8"))
            digest.update(b"\n")
        return digest.hexdigest()


@dataclass(frozen=True)
class BackgroundDistribution:
    """Corpus unigram distribution p_B."""

    probs: np.ndarray


@dataclass(frozen=True)
class TfIdfIndex:
    """Corpus-wide document frequencies and ``idf = ln(n / df)``."""

    idf: np.ndarray
    doc_freq: np.ndarray
    n_documents: int


@dataclass
class Corpus:
    """Filtered documents plus the vocabulary they index into."""

    documents: List[Document]
    vocabulary: Vocabulary
    dropped: int = 0
    label_names: Optional[List[str]] = None
    _by_id: Dict[int, Document] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._by_id = {doc.id: doc for doc in self.documents}

    def __len__(self) -> int:
        return len(self.documents)

    def get(self, doc_id: int) -> Optional[Document]:
        """Look a document up by its line id."""
        return self._by_id.get(doc_id)

    @property
    def has_gold_labels(self) -> bool:
        """True when every document carries a gold label."""
        return bool(self.documents) and all(d.gold_label is not None for d in self.documents)

    def gold_labels(self) -> Optional[np.ndarray]:
        """Gold labels in document order, or None when any is missing."""
        if not self.has_gold_labels:
            return None
        return np.array([d.gold_label for d in self.documents], dtype=np.int64)

    def mean_length(self) -> float:
        """Average number of tokens per document."""
        return float(np.mean([len(d) for d in self.documents]))


def _resolve_labels(
    raw_labels: Sequence[RawLabel], label_names: Optional[Sequence[str]]
) -> Tuple[List[Optional[int]], Optional[List[str]]]:
    present = [label for label in raw_labels if label is not None]
    if not present:
        return [None] * len(raw_labels), None

    def as_int(label: RawLabel) -> Optional[int]:
        if isinstance(label, int):
            return label
        try:
            return int(str(label).strip())
        except ValueError:
            return None

    if all(as_int(label) is not None for label in present):
        return [as_int(label) for label in raw_labels], None

    names = list(label_names) if label_names else sorted({str(label) for label in present})
    lookup = {name: i for i, name in enumerate(names)}
    resolved: List[Optional[int]] = []
    for label in raw_labels:
        if label is None:
            resolved.append(None)
        elif str(label) not in lookup:
            raise InvalidCorpusFormat(f"Gold label '{label}' is not a known class name")
        else:
            resolved.append(lookup[str(label)])
    return resolved, names


def build_corpus(
    lines: Iterable[Union[str, Tuple[str, RawLabel]]],
    min_count: int = 5,
    label_names: Optional[Sequence[str]] = None,
) -> Tuple[Corpus, Vocabulary]:
    """Tokenize documents, build the vocabulary and filter rare words.

    Args:
        lines: Document texts, or ``(text, label)`` pairs.
        min_count: Minimum corpus frequency for a word to enter the vocabulary.
        label_names: Class names used to map non-integer gold labels.

    Returns:
        Tuple of (corpus, vocabulary).

    Raises:
        AllDocumentsEmpty: If no document survives filtering.
    """
    tokenized: List[List[str]] = []
    raw_labels: List[RawLabel] = []
    for line in lines:
        text, label = (line, None) if isinstance(line, str) else line
        tokenized.append(tokenize(text))
        raw_labels.append(label)

    counter: Counter = Counter()
    for tokens in tokenized:
        counter.update(tokens)

    words = tuple(sorted(w for w, c in counter.items() if c >= min_count))
    if not words:
        raise AllDocumentsEmpty(f"No word reaches min_count={min_count}")
    index_of = {w: i for i, w in enumerate(words)}
    counts = np.array([counter[w] for w in words], dtype=np.int64)
    vocabulary = Vocabulary(
        words=words, index_of=index_of, counts=counts, total_tokens=int(counts.sum())
    )

    gold, resolved_names = _resolve_labels(raw_labels, label_names)

    documents: List[Document] = []
    dropped = 0
    for line_id, tokens in enumerate(tokenized):
        ids = [index_of[t] for t in tokens if t in index_of]
        if not ids:
            dropped += 1
            continue
        documents.append(
            Document(id=line_id, tokens=np.array(ids, dtype=np.int64), gold_label=gold[line_id])
        )

    if not documents:
        raise AllDocumentsEmpty("Every document is empty after filtering")
    if dropped:
        logger.warning(f"Dropped {dropped} documents that were empty after filtering")
    logger.info(
        f"Built corpus: {len(documents)} documents, {len(words)} words, "
        f"{vocabulary.total_tokens} tokens"
    )
    corpus = Corpus(
        documents=documents,
        vocabulary=vocabulary,
        dropped=dropped,
        label_names=list(label_names) if label_names else resolved_names,
    )
    return corpus, vocabulary


def read_corpus_file(path: Union[str, Path], fmt: str = "text") -> List[Tuple[str, RawLabel]]:
    """Read a corpus file.

    Args:
        path: UTF-8 file with one document per line.
        fmt: ``"text"`` or ``"labeled"`` (``label<TAB>text``).

    Returns:
        ``(text, label)`` pairs in line order.

    Raises:
        InvalidCorpusFormat: If a labeled line has no tab separator.
    """
    rows: List[Tuple[str, RawLabel]] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if fmt == "labeled":
                if "\t" not in line:
                    raise InvalidCorpusFormat(f"{path}:{line_no}: expected 'label<TAB>text'")
                label, text = line.split("\t", 1)
                rows.append((text, label))
            else:
                rows.append((line, None))
    return rows


def background_distribution(corpus: Corpus) -> BackgroundDistribution:
    """Compute the corpus unigram distribution.

    Args:
        corpus: Non-empty corpus.

    Returns:
        Distribution with ``probs[w] = counts[w] / total_tokens``.
    """
    vocabulary = corpus.vocabulary
    probs = vocabulary.counts.astype(np.float64) / float(vocabulary.total_tokens)
    return BackgroundDistribution(probs=probs)


def build_tfidf_index(corpus: Corpus) -> TfIdfIndex:
    """Count document frequencies and derive idf over the whole corpus."""
    size = len(corpus.vocabulary)
    doc_freq = np.zeros(size, dtype=np.int64)
    for doc in corpus.documents:
        doc_freq[np.unique(doc.tokens)] += 1
    n = len(corpus.documents)
    with np.errstate(divide="ignore"):
        idf = np.where(doc_freq > 0, np.log(n / np.maximum(doc_freq, 1)), 0.0)
    return TfIdfIndex(idf=idf, doc_freq=doc_freq, n_documents=n)


def tfidf_keywords(
    docs: Sequence[Document], index: TfIdfIndex, vocabulary: Vocabulary, t: int
) -> List[str]:
    """Rank the words of a document subset by average tf-idf weight.

    tf is the within-document relative frequency; the average runs over the
    subset, with absent words contributing zero.

    Args:
        docs: Document subset.
        index: Corpus-wide idf.
        vocabulary: Vocabulary the documents index into.
        t: Number of words to return.

    Returns:
        Up to ``t`` words, highest score first, ties broken lexicographically.

    Raises:
        EmptySubset: If ``docs`` is empty.
    """
    if not docs:
        raise EmptySubset("Cannot extract keywords from an empty document subset")

    size = len(vocabulary)
    scores = np.zeros(size, dtype=np.float64)
    present = np.zeros(size, dtype=bool)
    # fixed summation order keeps the ranking independent of subset order
    for doc in sorted(docs, key=lambda d: d.id):
        tf = np.bincount(doc.tokens, minlength=size) / float(len(doc))
        scores += tf * index.idf
        present[doc.tokens] = True
    scores /= float(len(docs))

    candidates = np.flatnonzero(present)
    ranked = sorted(candidates.tolist(), key=lambda w: (-scores[w], vocabulary.words[w]))
    return [vocabulary.words[w] for w in ranked[:t]]
