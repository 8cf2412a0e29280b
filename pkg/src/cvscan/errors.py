"""Exception types raised across the cvscan pipeline."""


class CvscanError(Exception):
    """Base class for all cvscan errors."""


class TableFormatError(CvscanError):
    """A token table definition violates the 91-entry contract."""


class UnbalancedBracesError(CvscanError):
    """Source text ends inside a function body."""

    def __init__(self, offset: int):
        super().__init__(f"unmatched '{{' at offset {offset}")
        self.offset = offset


class UnterminatedStringError(CvscanError):
    """A string literal is never closed."""

    def __init__(self, offset: int):
        super().__init__(f"unterminated string literal at offset {offset}")
        self.offset = offset


class UnterminatedCommentError(CvscanError):
    """A block comment is never closed."""

    def __init__(self, offset: int):
        super().__init__(f"unterminated comment at offset {offset}")
        self.offset = offset


class OutOfRangeError(CvscanError):
    """A token id falls outside the 0..90 vocabulary."""


class NotATokenError(CvscanError):
    """A bit vector decodes to a value with no vocabulary entry."""


class FileUnreadableError(CvscanError):
    """A corpus or model file cannot be opened or read."""


class EmptyCorpusError(CvscanError):
    """An operation requires at least one valid sample."""


class DegenerateCorpusError(CvscanError):
    """Balancing needs both buggy and clean samples present."""


class ShapeMismatchError(CvscanError):
    """An array does not have the shape a layer requires."""


class TableMismatchError(CvscanError):
    """Model and data were produced under different token tables."""


class CorruptFileError(CvscanError):
    """A model file fails its magic or checksum validation."""


class VersionMismatchError(CvscanError):
    """A model file was written by an unsupported format version."""


class NoPositivesError(CvscanError):
    """A PR curve needs at least one positive sample."""


class RecallUnreachableError(CvscanError):
    """No threshold on the curve reaches the requested recall."""


class ModelLoadError(CvscanError):
    """The scanner could not load its model."""


class NoInputsError(CvscanError):
    """Scanning found no C source files under the given paths."""
