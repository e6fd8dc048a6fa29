"""Diffraction of OAM modes on opaque screens and the resulting bi-photon entanglement loss."""

__version__ = "0.1.0"

from .analysis import (
    ModalSpectrum,
    OverlapReport,
    SymmetryViolationError,
    bg_spectrum,
    count_phase_singularities,
    lg_spectrum,
    mutual_overlap,
    phase_correlation_length,
    z_invariance_check,
)
from .entanglement import (
    BiphotonScenario,
    ConcurrenceDomainError,
    ConcurrenceResult,
    concurrence_normalized,
    concurrence_paper,
    purity_bruteforce,
    purity_from_overlap,
    run_scenario,
)
from .fields import (
    BlockedFieldError,
    IncompatibleFieldsError,
    ScalarField,
    TransverseGrid,
    inner_product,
    norm,
    normalize,
)
from .modes import ModeSpec, bg_mode, lg_mode, lg_waist_for_obstacle
from .obstacle import ObstacleSpec, apply_obstacle, transmission
from .propagator import TransferFunction, propagate
