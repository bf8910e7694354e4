"""Exception types raised across the toolkit."""


class CnTextureError(Exception):
    """Base class for all toolkit errors."""


# --- imaging ---

class UnreadableFile(CnTextureError):
    pass


class UnsupportedFormat(CnTextureError):
    pass


class DegenerateTarget(CnTextureError):
    pass


class NonFiniteValue(CnTextureError):
    pass


# --- pixel graph / measures ---

class EmptyImage(CnTextureError):
    pass


class SingleNodeGraph(CnTextureError):
    pass


class ConvergenceFailure(CnTextureError):
    pass


# --- LBP encoding ---

class BorderPixel(CnTextureError):
    pass


class ImageTooSmall(CnTextureError):
    pass


class BandMismatch(CnTextureError):
    pass


# --- reduction ---

class DegenerateData(CnTextureError):
    pass


class InvalidThreshold(CnTextureError):
    pass


class DimensionMismatch(CnTextureError):
    pass


class NegativeFeature(CnTextureError):
    pass


class BadK(CnTextureError):
    pass


# --- classification ---

class SingleClass(CnTextureError):
    pass


class EmptyData(CnTextureError):
    pass


class LengthMismatch(CnTextureError):
    pass


# --- fusion / vector files ---

class NonFiniteLocal(CnTextureError):
    pass


class MalformedHeader(CnTextureError):
    pass


class RecordDimMismatch(CnTextureError):
    pass


# --- pipeline ---

class TooFewSamples(CnTextureError):
    pass


class MisalignedLocalVectors(CnTextureError):
    pass
