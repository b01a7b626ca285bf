"""Polarization-aware models of Dove-prism Sagnac sorters for orbital angular momentum."""

__version__ = "0.1.0"

from .algebra import Basis, CompositeState, Path, Pol, rotation_matrix
from .errors import (
    DoveSagnacError,
    InconsistentMeasurementError,
    InvalidArgumentError,
    NoSolutionError,
    NoTotalInternalReflectionError,
    UnderdeterminedFitError,
    UnsupportedInputError,
)
from .fresnel import (
    LOSSLESS_DOVE,
    MEASURED_DOVE,
    DoveParams,
    PrismGeometry,
    dove_params_from_physics,
    max_tir_phase,
    min_index_for_phase,
)
from .elements import POLARIZATIONS, beam_splitter, dove_jones, hwp, oam_phase, qwp
from .interferometers import (
    InterferometerConfig,
    Kind,
    PortOutput,
    closed_form_bssi,
    closed_form_pbssi,
    expected_port,
    pbssi_overlap,
    run,
    run_bssi,
    run_modified_bssi,
    run_pbssi,
)
from .metrics import bssi_fidelity, pbssi_fidelity, sorting_fidelity
from .characterization import fit_transmissions, invert_delta_phi, simulate_hwp_sweep
from .experiments import (
    ImperfectionSpec,
    SweepSpec,
    SweepVariable,
    imperfection_study,
    sweep_bssi_alpha,
    sweep_bssi_delta_phi,
    sweep_pbssi_alpha,
)
from .bench import BenchDocument, format_bench, parse_bench
