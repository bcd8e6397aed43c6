"""Exception hierarchy shared by all modules."""


class SlafError(Exception):
    """Base class for library errors."""


class ClauseExplosion(SlafError):
    def __init__(self, limit: int):
        super().__init__(f"clause count exceeded guard of {limit}")
        self.limit = limit


class VocabularyTooLarge(SlafError):
    pass


class MixedVocabulary(SlafError):
    pass


class BeliefTooLarge(SlafError):
    pass


class InconsistentObservation(SlafError):
    pass


class InconsistentBelief(SlafError):
    def __init__(self, step: int, fluent: str):
        super().__init__(f"belief became unsatisfiable at step {step} (fluent {fluent})")
        self.step = step
        self.fluent = fluent


class ParseError(SlafError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f" at line {line}, column {column}" if line else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class PddlTypeError(SlafError):
    pass


class OffParameterFluent(SlafError):
    pass


class DeadEnd(SlafError):
    pass


class SolverFailure(SlafError):
    pass
