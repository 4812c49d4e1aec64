"""Exception hierarchy shared by every module.

Each exception carries a ``kind`` string so the command line front end can
report the failing error class without importing every module.
"""


class SchottkyError(Exception):
    kind = "SchottkyError"


class ImageIsLine(SchottkyError):
    kind = "ImageIsLine"


class DiscsOverlapOrNested(SchottkyError):
    kind = "DiscsOverlapOrNested"


class IsIdentity(SchottkyError):
    kind = "IsIdentity"


class NotAdmissible(SchottkyError):
    kind = "NotAdmissible"


class BudgetExceeded(SchottkyError):
    kind = "BudgetExceeded"


class InfeasibleMargin(SchottkyError):
    kind = "InfeasibleMargin"


class BadLengths(SchottkyError):
    kind = "BadLengths"


class OutOfDomain(SchottkyError):
    kind = "OutOfDomain"


class HypothesisViolated(SchottkyError):
    kind = "HypothesisViolated"


class NotAHomeomorphism(SchottkyError):
    kind = "NotAHomeomorphism"


class ParseError(SchottkyError):
    kind = "ParseError"

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class SchemaError(SchottkyError):
    kind = "SchemaError"

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class IoError(SchottkyError):
    kind = "IoError"
