"""Exception hierarchy shared by all modules."""


class QctlError(Exception):
    """Base class for all toolkit errors."""


class FormulaSyntaxError(QctlError):
    def __init__(self, message: str, position: int = -1):
        self.position = position
        if position >= 0:
            message = f"{message} (at position {position})"
        super().__init__(message)


class StructureError(QctlError):
    """Malformed Kripke structure or structure file."""


class FragmentError(QctlError):
    """Formula outside the fragment an operation supports."""


class BudgetError(QctlError):
    """A configured enumeration or size budget was exceeded."""


class EnumerationBudgetError(BudgetError):
    pass


class BlowUpError(BudgetError):
    def __init__(self, message: str, level: int | None = None):
        self.level = level
        if level is not None:
            message = f"{message} (recursion level {level})"
        super().__init__(message)


class ScaleError(BudgetError):
    """Input exceeds the scale an oracle supports."""


class UndecidableError(QctlError):
    """The requested problem is undecidable."""
