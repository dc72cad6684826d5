"""Exception hierarchy shared by all commat modules."""


class CommatError(Exception):
    """Base class for all errors raised by commat."""


class DimensionMismatch(CommatError, ValueError):
    pass


class NonCommuting(CommatError):
    """Two generators of a proposed action fail to commute."""

    def __init__(self, pair, column):
        self.pair = tuple(pair)
        self.column = column
        super().__init__(
            f"generators {pair[0]!r} and {pair[1]!r} do not commute "
            f"(bracket is nonzero on basis vector {column})"
        )


class DiagramError(CommatError):
    """Base class for diagram DSL errors; carries an optional source position."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(self._format())

    def _format(self):
        if self.line is None:
            return self.message
        if self.col is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, col {self.col}: {self.message}"


class DiagramSyntaxError(DiagramError):
    pass


class DuplicateEdge(DiagramError):
    def __init__(self, vertex, generator, line=None, col=None):
        self.vertex = vertex
        self.generator = generator
        super().__init__(
            f"second {generator!r}-edge leaving vertex {vertex!r}", line, col)


class UnknownName(DiagramError):
    def __init__(self, name, kind, line=None, col=None):
        self.name = name
        self.kind = kind
        super().__init__(f"unknown {kind} {name!r}", line, col)


class CyclicDiagram(DiagramError):
    def __init__(self, generator, cycle):
        self.generator = generator
        self.cycle = tuple(cycle)
        super().__init__(
            f"generator {generator!r} has a cycle through {', '.join(cycle)}; "
            "generators must be nilpotent")


class FieldTooSmall(CommatError, ValueError):
    pass


class UnknownFamily(CommatError, KeyError):
    def __str__(self):
        return f"unknown family {self.args[0]!r}"


class NotFiniteLength(CommatError, ValueError):
    pass


class IllFormedEndo(CommatError, ValueError):
    pass


class NotIsomorphic(CommatError, ValueError):
    pass


class IdealsIntersect(CommatError, ValueError):
    pass


class LengthTooLarge(CommatError, ValueError):
    pass


class NotFaithful(CommatError, ValueError):
    pass


class NotLocal(CommatError, ValueError):
    """Structure constants do not describe a commutative local algebra."""


class BudgetExceeded(CommatError):
    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)
