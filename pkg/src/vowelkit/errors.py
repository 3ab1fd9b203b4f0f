"""Exception types shared across the toolkit.

Each class maps to a distinct failure the CLI reports with its own exit
code: usage problems (1), unreadable or malformed data (2), and numeric
failures of the analysis itself (3).
"""


class VowelkitError(Exception):
    """Base class for all toolkit errors."""


class AudioFormatError(VowelkitError):
    """WAV container or encoding cannot be decoded."""


class SilentSignalError(VowelkitError):
    """Signal (or frame) carries no usable energy."""


class UnstableModelError(VowelkitError):
    """LPC recursion hit a reflection coefficient with magnitude >= 1."""


class FormantsNotFoundError(VowelkitError):
    """Fewer than two pole candidates survived the formant gates."""


class ManifestError(VowelkitError):
    """Corpus manifest is missing, empty, or malformed."""
