"""Weak values, ABL probabilities and Gaussian-pointer readouts for
pre- and post-selected quantum systems."""

__version__ = "0.1.0"

from .errors import (BasisMismatch, DegenerateInput, EvalError, NoConsistentHistory,  # noqa: E402
                     NotHermitian, PostSelectionOrthogonal, WeakValueError, ZeroVector)
from .hilbert import (Basis, OperatorMatrix, StateVector, inner, is_unitary,  # noqa: E402
                      projector_onto, tensor, tensor_op)
from .measure import (ABLDistribution, PrePost, SpectralData, abl_from_weak,  # noqa: E402
                      abl_probability, born_probabilities, eigendecompose_hermitian,
                      mean_value, weak_from_abl, weak_value)
from .meter import MeterOutcome, PointerModel, simulate_pointer, weak_shift_ratio  # noqa: E402
from .scenarios import (BeamSplitter, ScenarioReport, hardy, mzi, mzi_sweep,  # noqa: E402
                        three_box)
