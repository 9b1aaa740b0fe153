"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class MissingEmptyOrFull(WorkbenchError):
    pass


class NotClosedUnderUnion(WorkbenchError):
    def __init__(self, a, b):
        self.witness = (a, b)
        super().__init__(f"opens not closed under union: {sorted(a)} | {sorted(b)}")


class NotClosedUnderIntersection(WorkbenchError):
    def __init__(self, a, b):
        self.witness = (a, b)
        super().__init__(f"opens not closed under intersection: {sorted(a)} & {sorted(b)}")


class OutOfRangePoint(WorkbenchError):
    pass


class NotPreorder(WorkbenchError):
    pass


class EmptyList(WorkbenchError):
    pass


class SizeTooLarge(WorkbenchError):
    pass


class NotContinuous(WorkbenchError):
    pass


class IndexOutOfRange(WorkbenchError):
    pass


class NoTopology(WorkbenchError):
    pass


class NoChangSystem(WorkbenchError):
    pass


class NotSubsetOfUnit(WorkbenchError):
    pass


class TooManyAtoms(WorkbenchError):
    pass


class UnboundVariable(WorkbenchError):
    pass


class TooLargeForExhaustive(WorkbenchError):
    pass


class NotClosed(WorkbenchError):
    pass


class TooLarge(WorkbenchError):
    pass


class DimTooSmall(WorkbenchError):
    pass


class DimUnsupported(WorkbenchError):
    pass


class BudgetExceeded(WorkbenchError):
    pass


class ScriptRefuted(WorkbenchError):
    pass
