"""Exception types raised across the package."""


class SelinfError(Exception):
    """Base class for all library errors."""


class ZeroVarianceColumn(SelinfError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} is constant; cannot normalize")


class SingularDesign(SelinfError):
    pass


class DidNotConverge(SelinfError):
    def __init__(self, max_iter, beta, gap):
        self.max_iter = max_iter
        self.beta = beta
        self.gap = gap
        super().__init__(f"coordinate descent did not converge in {max_iter} sweeps (gap={gap:.3e})")


class TooManySignPatterns(SelinfError):
    def __init__(self, m, cap):
        self.m = m
        self.cap = cap
        super().__init__(
            f"2^{m} sign patterns exceed the cap of {cap}; use the line-search region instead"
        )


class CollinearCandidate(SelinfError):
    pass


class NoFeasibleEntry(SelinfError):
    pass


class DegenerateDenominator(SelinfError):
    pass


class InfeasibleAtObservation(SelinfError):
    pass


class NoFeasibleComponent(SelinfError):
    pass


class SelectorFailure(SelinfError):
    pass


class DegenerateMass(SelinfError):
    pass


class BracketFailure(SelinfError):
    def __init__(self, message, lo=None, hi=None, f_lo=None, f_hi=None):
        self.lo, self.hi, self.f_lo, self.f_hi = lo, hi, f_lo, f_hi
        super().__init__(message)


class OutsideRegion(SelinfError):
    pass


class ModelNotNested(SelinfError):
    pass


class MissingNextKnot(SelinfError):
    pass


class ParseError(SelinfError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        super().__init__(message)


class NonNumericCell(ParseError):
    pass


class MissingResponse(SelinfError):
    pass
