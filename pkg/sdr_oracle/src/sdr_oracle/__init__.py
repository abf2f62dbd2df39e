"""Semidefinite-relaxation reference solver used to cross-validate the
duality-based beamformer through shared scenario and artifact formats."""

from .compare import MissingArtifact, compare_report, pattern_deviation_db
from .extract import ExtractionResult, RandomizationFailed, extract_beamformers
from .scenario import OracleScenario, load_oracle_scenario
from .sdp import SdrSolution, SolverFailed, fim_of_gram, solve_sdr, trace_inverse

__version__ = "0.1.0"
