"""Exception types shared across the package.

Each error carries a short machine-readable ``code`` so that reports and the
command line can record a failed query as ``{"error": code}`` instead of
aborting.
"""


class WeakValueError(Exception):
    code = "error"


class BasisMismatch(WeakValueError):
    code = "basis_mismatch"


class ZeroVector(WeakValueError):
    code = "zero_vector"


class NotHermitian(WeakValueError):
    code = "not_hermitian"


class NotUnitary(WeakValueError):
    code = "not_unitary"


class InvalidSpectrum(WeakValueError):
    code = "invalid_spectrum"


class PostSelectionOrthogonal(WeakValueError):
    """The post-selected state has no overlap with the evolved pre-selected state."""

    code = "post_selection_orthogonal"


class NoConsistentHistory(WeakValueError):
    """No intermediate outcome connects the pre- and post-selected states."""

    code = "no_consistent_history"


class DegenerateInput(WeakValueError):
    code = "degenerate_input"


class EvalError(WeakValueError):
    code = "eval_error"
