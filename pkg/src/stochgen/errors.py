"""Exception hierarchy shared by all modules.

Domain errors derive from :class:`StochGenError`; the CLI maps them to exit code 1.
"""


class StochGenError(Exception):
    """Base class for domain errors."""

    code = "domain_error"

    def to_json(self):
        return {"error": self.code, "message": str(self)}


class NegativeEntry(StochGenError):
    code = "negative_entry"

    def __init__(self, row, col, value):
        super().__init__(f"entry ({row}, {col}) is negative: {value}")
        self.row, self.col, self.value = row, col, value


class ColumnSumMismatch(StochGenError):
    code = "column_sum_mismatch"

    def __init__(self, col, actual):
        super().__init__(f"column {col} sums to {actual}, expected 1")
        self.col, self.actual = col, actual


class DimMismatch(StochGenError):
    code = "dim_mismatch"


class DimTooLarge(StochGenError):
    code = "dim_too_large"


class PreconditionViolated(StochGenError):
    code = "precondition_violated"


class CapExceeded(StochGenError):
    code = "cap_exceeded"

    def __init__(self, cap):
        super().__init__(f"closure grew past cap={cap}")
        self.cap = cap


class NotABaseCase(StochGenError):
    code = "not_a_base_case"


class ParameterOrderViolated(StochGenError):
    code = "parameter_order_violated"


class InternalInvariantViolation(StochGenError):
    """Raised when a proven invariant fails at runtime. Always a bug."""

    code = "internal_invariant_violation"


class NotGenerated(StochGenError):
    """The matrix is not a product of the available generators."""

    code = "not_generated"
