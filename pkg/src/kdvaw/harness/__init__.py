"""Environments, prequential runs, bound checks and rate fits."""
from .bounds import (BoundCheck, FTRLHistory, approximation_loss_bound, certify_dvaw, check_meta_regret,
                     dvaw_bound, ensemble_bound, path_length, path_length_bound)
from .config import config_hash, expand_sweep, parse_config
from .environment import ComparatorConfig, EnvironmentConfig, generate_environment, load_csv_stream
from .prequential import HintPolicy, PrequentialStream, RegretTrace, run_prequential
from .runner import execute, write_outputs
from .scaling import fit_exponent, regret_scaling_report
