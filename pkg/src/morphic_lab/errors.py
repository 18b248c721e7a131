"""Exception hierarchy. ``exit_code`` is the CLI exit status for each family."""


class MorphicLabError(Exception):
    exit_code = 1
    kind = "error"

    def to_json(self) -> dict:
        return {"error": type(self).__name__, "kind": self.kind, "message": str(self)}


class InputError(MorphicLabError, ValueError):
    exit_code = 2
    kind = "input"


class CapError(MorphicLabError):
    exit_code = 3
    kind = "budget"


class PreconditionError(MorphicLabError, ValueError):
    exit_code = 4
    kind = "precondition"


class DimensionMismatch(InputError):
    pass


class ParameterOutOfRange(InputError):
    pass


class OddPrimeRequired(InputError):
    pass


class NotAssociative(InputError):
    def __init__(self, triple):
        self.triple = tuple(triple)
        a, b, c = self.triple
        super().__init__(f"(a*b)*c != a*(b*c) for a={a}, b={b}, c={c}")


class NoIdentity(InputError):
    def __init__(self, element: int = 0):
        self.element = element
        super().__init__(f"element 0 is not a two-sided identity (fails at {element})")


class NoInverse(InputError):
    def __init__(self, element: int):
        self.element = element
        super().__init__(f"element {element} has no inverse")


class NotAPermutation(InputError):
    def __init__(self, index: int, detail: str = ""):
        self.index = index
        super().__init__(f"generator {index} is not a permutation{': ' + detail if detail else ''}")


class GroupFileError(InputError):
    def __init__(self, message: str, position: str = ""):
        self.position = position
        super().__init__(f"{position}: {message}" if position else message)

    def to_json(self) -> dict:
        out = super().to_json()
        out["position"] = self.position
        return out


class ClosureExceedsCap(CapError):
    pass


class OrderCapExceeded(CapError):
    pass


class SearchBudgetExceeded(CapError):
    pass


class BudgetExceeded(CapError):
    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class NotAPGroup(PreconditionError):
    pass


class NotAbelian(PreconditionError):
    pass


class AbelianInput(PreconditionError):
    pass


class NotNormal(PreconditionError):
    def __init__(self, conjugator: int, element: int):
        self.conjugator = conjugator
        self.element = element
        super().__init__(
            f"subgroup is not normal: conjugating {element} by {conjugator} leaves it"
        )


class ParentMismatch(PreconditionError):
    pass


class NotElementaryAbelian(PreconditionError):
    pass


class AonU(PreconditionError):
    pass


class NotMaximal(PreconditionError):
    pass


class InternalConsistencyError(MorphicLabError):
    """A proven identity failed to hold; indicates a bug, not a result."""

    exit_code = 1
    kind = "internal"
