"""Seed expansion: turn weak supervision into per-class keyword vectors."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Union

import numpy as np

from src.core.exceptions import (
    AllSeedsOutOfVocabulary,
    InvalidSupervision,
    NameOutOfVocabulary,
    NoDisjointExpansion,
)
from src.services.corpus import Corpus, TfIdfIndex, tfidf_keywords
from src.services.embedding_service import EmbeddingMatrix, normalize_rows, rank_by_score
from src.utils.text_processing import normalize_label_name

logger = logging.getLogger(__name__)

SupervisionKind = Literal["labels", "keywords", "docs"]


@dataclass(frozen=True)
class Supervision:
    """Exactly one weak-supervision source for ``m`` classes."""

    kind: SupervisionKind
    label_names: Optional[List[str]] = None
    keyword_lists: Optional[List[List[str]]] = None
    labeled_docs: Optional[List[List[int]]] = None

    @property
    def n_classes(self) -> int:
        source = {
            "labels": self.label_names,
            "keywords": self.keyword_lists,
            "docs": self.labeled_docs,
        }[self.kind]
        return len(source or [])


@dataclass(frozen=True)
class ClassKeywords:
    """Per-class keyword lists with their unit vectors."""

    words: List[List[str]]
    vectors: List[np.ndarray]
    t_used: int

    @property
    def n_classes(self) -> int:
        return len(self.words)


def _check_classes(kind: str, per_class: Sequence[Sequence]) -> None:
    if len(per_class) < 2:
        raise InvalidSupervision(
            f"{kind} supervision needs at least 2 classes, got {len(per_class)}"
        )
    for j, entries in enumerate(per_class):
        if not entries:
            raise InvalidSupervision(f"{kind} supervision has no entries for class {j}")


def _group_by_class(rows: Dict[int, list], path: Union[str, Path]) -> List[list]:
    if not rows:
        return []
    m = max(rows) + 1
    missing = [j for j in range(m) if j not in rows]
    if missing or min(rows) < 0:
        raise InvalidSupervision(f"{path}: class indices must cover 0..{m - 1}, missing {missing}")
    return [rows[j] for j in range(m)]


def read_supervision(kind: SupervisionKind, path: Union[str, Path]) -> Supervision:
    """Parse a supervision file.

    Formats: label names one per line (line order is class order); keywords
    ``class_index<TAB>w1,w2,w3``; labeled documents ``class_index<TAB>doc_id``.

    Args:
        kind: ``"labels"``, ``"keywords"`` or ``"docs"``.
        path: File to read.

    Returns:
        Parsed supervision.

    Raises:
        InvalidSupervision: On malformed lines or inconsistent classes.
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f if line.strip()]

    if kind == "labels":
        names = [line.strip() for line in lines]
        _check_classes(kind, [[n] for n in names])
        return Supervision(kind="labels", label_names=names)

    rows: Dict[int, list] = {}
    for line_no, line in enumerate(lines, start=1):
        if "\t" not in line:
            raise InvalidSupervision(f"{path}:{line_no}: expected 'class_index<TAB>value'")
        head, value = line.split("\t", 1)
        try:
            j = int(head)
        except ValueError:
            raise InvalidSupervision(f"{path}:{line_no}: class index '{head}' is not an integer")
        if kind == "keywords":
            rows.setdefault(j, []).extend(w.strip().lower() for w in value.split(",") if w.strip())
        else:
            try:
                rows.setdefault(j, []).append(int(value.strip()))
            except ValueError:
                raise InvalidSupervision(
                    f"{path}:{line_no}: document id '{value}' is not an integer"
                )

    per_class = _group_by_class(rows, path)
    _check_classes(kind, per_class)
    if kind == "keywords":
        return Supervision(kind="keywords", keyword_lists=per_class)
    return Supervision(kind="docs", labeled_docs=per_class)


def write_supervision(path: Union[str, Path], supervision: Supervision) -> None:
    """Write supervision in the format ``read_supervision`` expects."""
    with open(path, "w", encoding="utf-8") as f:
        if supervision.kind == "labels":
            for name in supervision.label_names or []:
                f.write(f"{name}\n")
        elif supervision.kind == "keywords":
            for j, words in enumerate(supervision.keyword_lists or []):
                f.write(f"{j}\t{','.join(words)}\n")
        else:
            for j, doc_ids in enumerate(supervision.labeled_docs or []):
                for doc_id in doc_ids:
                    f.write(f"{j}\t{doc_id}\n")


def disjoint_expansion_size(queries: np.ndarray, embeddings: EmbeddingMatrix) -> int:
    """Largest t for which the per-class top-t neighbor sets are pairwise disjoint.

    Scans t upward from 1 and stops at the first collision.

    Args:
        queries: ``m x p`` unit query vectors, one per class.
        embeddings: Unit word embeddings.

    Returns:
        The largest collision-free t, 0 when classes collide at t=1.
    """
    m = queries.shape[0]
    rankings = [rank_by_score(embeddings.vectors @ q, embeddings.words) for q in queries]
    owner: Dict[int, int] = {}
    max_t = len(embeddings) // m
    for t in range(1, max_t + 1):
        for j in range(m):
            word = int(rankings[j][t - 1])
            if word in owner and owner[word] != j:
                return t - 1
            owner[word] = j
    return max_t


def _keywords_from_indices(
    per_class: List[List[int]], embeddings: EmbeddingMatrix, t_used: int
) -> ClassKeywords:
    return ClassKeywords(
        words=[[embeddings.words[i] for i in idx] for idx in per_class],
        vectors=[embeddings.vectors[idx] for idx in per_class],
        t_used=t_used,
    )


def expand_label_names(names: Sequence[str], embeddings: EmbeddingMatrix) -> ClassKeywords:
    """Expand label names to their nearest words under the disjointness rule.

    Multi-word names query with the normalized mean of their word vectors.

    Args:
        names: One surface name per class.
        embeddings: Unit word embeddings.

    Returns:
        Exactly t words per class, t the largest disjoint size.

    Raises:
        NameOutOfVocabulary: If a name has no in-vocabulary word.
        NoDisjointExpansion: If two classes share their nearest word.
    """
    queries = []
    for j, name in enumerate(names):
        tokens = [w for w in normalize_label_name(name) if w in embeddings.index_of]
        if not tokens:
            raise NameOutOfVocabulary(j, name)
        mean = np.mean([embeddings.vector(w) for w in tokens], axis=0)
        queries.append(mean)
    queries_arr = normalize_rows(np.vstack(queries))

    t = disjoint_expansion_size(queries_arr, embeddings)
    if t == 0:
        raise NoDisjointExpansion("Label names share a nearest neighbor even at t=1")
    per_class = [
        rank_by_score(embeddings.vectors @ q, embeddings.words)[:t].tolist() for q in queries_arr
    ]
    logger.info(f"Expanded {len(names)} label names to t={t} keywords each")
    return _keywords_from_indices(per_class, embeddings, t)


def expand_keywords(
    keyword_lists: Sequence[Sequence[str]],
    embeddings: EmbeddingMatrix,
    t: Optional[int] = None,
    min_t: int = 10,
) -> ClassKeywords:
    """Expand seed keywords by mean similarity to each class's seeds.

    Seeds are always kept and count within t. Without an explicit ``t`` the
    disjointness rule on the normalized seed means decides, floored at
    ``min_t``.

    Args:
        keyword_lists: Seed keywords per class.
        embeddings: Unit word embeddings.
        t: Words per class; ``None`` for the default rule.
        min_t: Floor of the default rule.

    Returns:
        Keyword lists ordered by mean similarity.

    Raises:
        AllSeedsOutOfVocabulary: If a class keeps no seed.
    """
    seeds: List[List[int]] = []
    for j, keywords in enumerate(keyword_lists):
        kept = []
        for word in keywords:
            if word in embeddings.index_of:
                if embeddings.index_of[word] not in kept:
                    kept.append(embeddings.index_of[word])
            else:
                logger.warning(f"Seed keyword '{word}' of class {j} is out of vocabulary")
        if not kept:
            raise AllSeedsOutOfVocabulary(j)
        seeds.append(kept)

    scores = [(embeddings.vectors @ embeddings.vectors[idx].T).mean(axis=1) for idx in seeds]
    if t is None:
        means = normalize_rows(np.vstack([embeddings.vectors[idx].mean(axis=0) for idx in seeds]))
        t = max(min_t, disjoint_expansion_size(means, embeddings))
    t_used = min(max(t, max(len(idx) for idx in seeds)), len(embeddings))

    per_class = []
    for idx, score in zip(seeds, scores):
        seed_set = set(idx)
        ranked = rank_by_score(score, embeddings.words).tolist()
        chosen = list(idx) + [w for w in ranked if w not in seed_set][: t_used - len(idx)]
        chosen_set = set(chosen)
        per_class.append([w for w in ranked if w in chosen_set])
    logger.info(f"Expanded seed keywords of {len(seeds)} classes to t={t_used}")
    return _keywords_from_indices(per_class, embeddings, t_used)


def expand_labeled_docs(
    labeled_docs: Sequence[Sequence[int]],
    corpus: Corpus,
    tfidf: TfIdfIndex,
    embeddings: EmbeddingMatrix,
    t: int,
) -> ClassKeywords:
    """Extract the top-t tf-idf keywords of each class's labeled documents.

    Args:
        labeled_docs: Document ids per class.
        corpus: Corpus the ids refer to.
        tfidf: Corpus-wide idf.
        embeddings: Unit word embeddings.
        t: Keywords per class.

    Returns:
        Keyword lists in tf-idf order; words without a vector are skipped.

    Raises:
        InvalidSupervision: If an id is not a corpus document.
    """
    per_class = []
    for j, doc_ids in enumerate(labeled_docs):
        docs = []
        for doc_id in doc_ids:
            doc = corpus.get(doc_id)
            if doc is None:
                raise InvalidSupervision(
                    f"Labeled document {doc_id} of class {j} is not in the corpus"
                )
            docs.append(doc)
        words = tfidf_keywords(docs, tfidf, corpus.vocabulary, t)
        per_class.append([embeddings.index_of[w] for w in words if w in embeddings.index_of])
    logger.info(f"Extracted t={t} tf-idf keywords for {len(per_class)} classes")
    return _keywords_from_indices(per_class, embeddings, t)


def expand_supervision(
    supervision: Supervision,
    embeddings: EmbeddingMatrix,
    corpus: Corpus,
    tfidf: TfIdfIndex,
    t: Optional[int] = None,
    min_t: int = 10,
) -> ClassKeywords:
    """Dispatch to the expansion matching the supervision kind."""
    if supervision.kind == "labels":
        return expand_label_names(supervision.label_names or [], embeddings)
    if supervision.kind == "keywords":
        return expand_keywords(supervision.keyword_lists or [], embeddings, t=t, min_t=min_t)
    return expand_labeled_docs(
        supervision.labeled_docs or [], corpus, tfidf, embeddings, t or min_t
    )


def sample_labeled_docs(
    corpus: Corpus, per_class: int, rng: np.random.Generator
) -> List[List[int]]:
    """Randomly draw gold-labeled document ids for each class.

    Args:
        corpus: Corpus with gold labels.
        per_class: Documents to draw per class.
        rng: Random generator.

    Returns:
        Sorted document ids per class.

    Raises:
        InvalidSupervision: If the corpus has no gold labels.
    """
    gold = corpus.gold_labels()
    if gold is None:
        raise InvalidSupervision("Sampling labeled documents requires gold labels")
    ids = np.array([d.id for d in corpus.documents], dtype=np.int64)
    result = []
    for j in range(int(gold.max()) + 1):
        pool = ids[gold == j]
        if pool.shape[0] < per_class:
            logger.warning(f"Class {j} has only {pool.shape[0]} documents; using all of them")
        take = min(per_class, pool.shape[0])
        result.append(sorted(rng.choice(pool, size=take, replace=False).tolist()))
    return result
