"""Exception hierarchy shared by all qwprio modules."""


class QwprioError(Exception):
    """Base class for every error raised by qwprio."""


class DataError(QwprioError, ValueError):
    """Input data is missing, malformed, or inconsistent."""


class GraphFormatError(DataError):
    """An edge-list file could not be parsed."""

    def __init__(self, message, path=None, line_number=None):
        self.path = path
        self.line_number = line_number
        where = ""
        if path is not None:
            where = f"{path}"
            if line_number is not None:
                where += f":{line_number}"
            where += ": "
        super().__init__(where + message)


class NumericalError(QwprioError, ArithmeticError):
    """A numerical kernel failed."""


class ConvergenceError(NumericalError):
    """An iterative method exhausted its iteration budget."""
