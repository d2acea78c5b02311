"""Expected position of a random walk on the nonnegative integers whose
steps from the origin follow an arbitrary finite jump law.

Four routes to ``E(X_n | X_0 = j)``: exact forward evolution (:mod:`.dp`),
exact generating-function coefficients (:mod:`.series`), the large-n
expansion (:mod:`.asymptotics`), and simulation (:mod:`.montecarlo`).
"""

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticBreakdown,
    Constants,
    asymptotic_expectation,
    constants_closed_form,
    constants_root_sum,
    darboux_predict,
    decomposition_eval,
)
from .dp import expected_position_dp, expected_positions_dp, f_bivariate_residual, step
from .errors import WalkError
from .jump_model import (
    Case,
    CaseTag,
    JumpDistribution,
    RationalPoly,
    classify_case,
    moment,
    phi_polynomial,
    validate,
)
from .montecarlo import MCEstimate, estimate_expectation, simulate_path
from .series import TruncatedSeries, binomial_series, expected_position_series, h_series, rho_series
from .spectral import SpectrumReport, poly_roots, psi_polynomial, spectrum_report, squarefree_check
