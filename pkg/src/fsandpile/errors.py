"""Exception hierarchy shared by every module of the package."""


class FSPPError(Exception):
    """Base class for all errors raised by :mod:`fsandpile`."""


class InternalBoundViolation(FSPPError):
    """Stabilization took more parallel steps than there are cells."""


class OutOfBounds(FSPPError):
    pass


class InvalidSchedule(FSPPError):
    pass


class NotSimple(FSPPError):
    pass


class WrongAlphabet(FSPPError):
    pass


class ChainMismatch(FSPPError):
    pass


class TooManyTwos(FSPPError):
    pass


class UnknownSubject(FSPPError):
    pass


class ParseError(FSPPError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
