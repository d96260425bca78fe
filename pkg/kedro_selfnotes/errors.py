"""Exceptions raised by the workbench."""


class SelfNotesError(Exception):
    """Base class for every workbench error."""


class InvalidConfig(SelfNotesError, ValueError):
    """A configuration value is out of range or unknown."""


class GenerationExhausted(SelfNotesError):
    """No sample satisfying the request was found within the reroll bound."""


class Unanswerable(SelfNotesError):
    """The question has no answer in the world."""


class Ambiguous(SelfNotesError):
    """The question has more than one answer in the world."""


class UndefinedVariable(SelfNotesError, KeyError):
    """A program read a variable before assigning it."""


class MalformedProgram(SelfNotesError, ValueError):
    """Tokens do not follow the program grammar."""


class EmptyFile(SelfNotesError):
    """An input file contains no usable lines."""


class MalformedGame(SelfNotesError, ValueError):
    """A game line cannot be parsed as a move list."""


class IllegalReplay(SelfNotesError):
    """A move starts from an empty square."""


class CutOutOfRange(SelfNotesError, IndexError):
    """A move cut lies outside the game."""


class ContextOverflow(SelfNotesError):
    """A sequence does not fit the model positions."""


class NonFiniteLoss(SelfNotesError, FloatingPointError):
    """Training produced a NaN or infinite loss."""


class MissingNotes(SelfNotesError):
    """The regime needs gold notes that a sample lacks."""


class BucketViolation(SelfNotesError):
    """A sample matches zero or several evaluation buckets."""


class RunLocked(SelfNotesError):
    """Another run holds the output directory."""
