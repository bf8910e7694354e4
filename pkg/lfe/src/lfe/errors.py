"""Exception types for the local feature extractor."""


class LfeError(Exception):
    """Base class for extractor errors."""


class MissingPretrainedWeights(LfeError):
    pass


class SplitEmpty(LfeError):
    pass


class ShapeMismatch(LfeError):
    pass


class MalformedFile(LfeError):
    pass
