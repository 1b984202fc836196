"""Exception types shared across the pipeline."""


class EngageError(Exception):
    """Base class for all pipeline errors."""


# -- corpus --------------------------------------------------------------

class MalformedInput(EngageError):
    """Transcript stream does not match the declared schema."""


class UnknownSpeaker(EngageError):
    """Speaker tag cannot be mapped to therapist or client."""


class EmptyTranscript(EngageError):
    """Transcript contains no turns."""


# -- backends ------------------------------------------------------------

class BackendUnavailable(EngageError):
    """Model service unreachable after bounded retries."""


class DimensionMismatch(EngageError):
    """Embedding dimensions inconsistent with the declared contract."""


class EmptySentence(EngageError):
    """Empty or whitespace-only text where a sentence is required."""


# -- features ------------------------------------------------------------

class EmptyList(EngageError):
    """Statistic requested over an empty sequence."""


class TooFewSentences(EngageError):
    """Similarity sets need at least two sentences."""


class ZeroVector(EngageError):
    """Cosine similarity is undefined for zero-norm vectors."""


# -- pipeline ------------------------------------------------------------

class UnlabeledRow(EngageError):
    """Dataset assembly requires every row to carry a label."""


class DuplicateSessionId(EngageError):
    """Two feature vectors share a session id."""


# -- preprocess ----------------------------------------------------------

class AllMissingFeature(EngageError):
    """A feature has no observed values to impute from."""


class TooFewRows(EngageError):
    """Operation needs more rows than the dataset has."""


class ClassTooSmall(EngageError):
    """A class has fewer rows than the requested holdout size."""


# -- resample ------------------------------------------------------------

class ClassOfSizeOne(EngageError):
    """SMOTE cannot interpolate within a single-member class."""


class DegenerateSample(EngageError):
    """KDE needs at least two distinct values."""


# -- models / evaluate ---------------------------------------------------

class DegenerateLabels(EngageError):
    """Training data contains a single class."""


class NonConvergence(EngageError):
    """Solver stopped before reaching its tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ClassSmallerThanK(EngageError):
    """Stratified k-fold needs at least k rows per class."""


class SingleClassTruth(EngageError):
    """AUC is undefined when y_true has one class."""
