"""Exception hierarchy shared by every module of the workbench."""


class WorkbenchError(Exception):
    """Base class for all errors raised by testlimits."""


class ValidationError(WorkbenchError, ValueError):
    """A model, setup or file failed a structural check."""


class CycleDetected(ValidationError):
    def __init__(self, a, b):
        super().__init__(f"order is not antisymmetric: {a!r} <= {b!r} and {b!r} <= {a!r}")
        self.pair = (a, b)


class BoundViolation(ValidationError):
    def __init__(self, which, bound, element):
        rel = "<=" if which == "bot" else ">="
        super().__init__(f"{which} {bound!r} is not {rel} {element!r}")
        self.which = which
        self.element = element


class UnknownElement(ValidationError, KeyError):
    def __init__(self, element):
        super().__init__(f"unknown element {element!r}")
        self.element = element

    def __str__(self):
        return self.args[0]


class UnknownObservation(ValidationError, KeyError):
    def __init__(self, observation):
        super().__init__(f"unknown observation {observation!r}")
        self.observation = observation

    def __str__(self):
        return self.args[0]


class ModelMismatch(ValidationError):
    pass


class NotOrderPreserving(ValidationError):
    def __init__(self, lower, upper, missing):
        super().__init__(
            f"alpha is not order-preserving: {lower!r} <= {upper!r} but "
            f"alpha({lower!r}) has {missing!r} not in alpha({upper!r})"
        )
        self.pair = (lower, upper)
        self.missing = missing


class SizeLimitExceeded(ValidationError):
    """Raised when an exhaustive construction would exceed a configured cap."""


class ModelTooLarge(SizeLimitExceeded):
    pass


class BoundTooLarge(SizeLimitExceeded):
    pass


class ObservationSpaceTooLarge(SizeLimitExceeded):
    pass


class UniverseTooLarge(SizeLimitExceeded):
    pass


class BoundTooSmallForChain(ValidationError):
    pass


class UnknownRequirementName(ValidationError, KeyError):
    def __str__(self):
        return self.args[0]


class SpawnFailure(WorkbenchError, OSError):
    pass


class ProtocolViolation(WorkbenchError):
    def __init__(self, line, input_value=None):
        super().__init__(f"non-numeric output line {line!r} (input {input_value!r})")
        self.line = line
        self.input_value = input_value


class ParseError(WorkbenchError, ValueError):
    def __init__(self, message, line=None, column=None, path=None):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        super().__init__(message + (f" ({'; '.join(where)})" if where else ""))
        self.line = line
        self.column = column
        self.path = path
