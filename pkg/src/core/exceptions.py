"""Error hierarchy shared by the library modules and the workflow agents."""

from typing import Optional

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_MISSING_ARTIFACT = 3


class SeedClassifierError(Exception):
    """Base class for every error raised by the package.

    Attributes:
        exit_code: Process exit status the CLI reports for this error.
    """

    exit_code: int = EXIT_RUNTIME


# Corpus
class AllDocumentsEmpty(SeedClassifierError):
    """No document survived tokenization and min-count filtering."""


class EmptySubset(SeedClassifierError):
    """A keyword extraction was asked for an empty document subset."""


class InvalidCorpusFormat(SeedClassifierError):
    """A corpus line does not match the declared file format."""


# Embedding
class VocabularyTooSmall(SeedClassifierError):
    """Skip-Gram training needs at least two vocabulary words."""


class MalformedHeader(SeedClassifierError):
    """The word2vec header line is not of the form ``"V p"``."""


class DimensionMismatch(SeedClassifierError):
    """A vector row disagrees with the dimensionality in the header."""


# Seed expansion
class InvalidSupervision(SeedClassifierError):
    """The supervision source is malformed or inconsistent with the corpus."""

    exit_code = EXIT_VALIDATION


class NameOutOfVocabulary(SeedClassifierError):
    """A label name has no in-vocabulary word."""

    def __init__(self, class_index: int, name: str):
        self.class_index = class_index
        self.name = name
        super().__init__(f"Label name '{name}' of class {class_index} has no in-vocabulary word")


class NoDisjointExpansion(SeedClassifierError):
    """Two classes already share a nearest neighbor at t=1."""


class AllSeedsOutOfVocabulary(SeedClassifierError):
    """Every seed keyword of a class is missing from the vocabulary."""

    def __init__(self, class_index: int):
        self.class_index = class_index
        super().__init__(f"All seed keywords of class {class_index} are out of vocabulary")


# vMF
class ZeroResultant(SeedClassifierError):
    """The resultant vector vanishes, so the mean direction is undefined."""


# Classifier
class EmptyDocument(SeedClassifierError):
    """A classifier was given a document with no tokens."""


class CheckpointMismatch(SeedClassifierError):
    """A checkpoint was trained against a different vocabulary or format."""


# Self-training and evaluation
class DegenerateFrequency(SeedClassifierError):
    """A class received zero total predicted mass."""


class LengthMismatch(SeedClassifierError):
    """Two label sequences that must align have different lengths."""


class LabelOutOfRange(SeedClassifierError):
    """A label is outside ``[0, m)``."""


class EmptyMatrix(SeedClassifierError):
    """A metric was requested on a confusion matrix with no counts."""


# Pipeline
class ConfigValidationError(SeedClassifierError):
    """The pipeline configuration failed validation."""

    exit_code = EXIT_VALIDATION


class MissingArtifact(SeedClassifierError):
    """A stage was run before the artifact it consumes was produced."""

    exit_code = EXIT_MISSING_ARTIFACT

    def __init__(self, stage: str, artifact: str, path: Optional[str] = None):
        self.stage = stage
        self.artifact = artifact
        self.path = path
        location = f" at {path}" if path else ""
        super().__init__(f"Stage '{stage}' requires artifact '{artifact}'{location}")
