"""Spectral experiments on the band of analyticity for u_t + u u_x + P u = 0 on periodic domains."""

__version__ = "0.1.0"

from .bessel import bessel_i, bessel_i_sequence
from .config import RunConfig, load_config, parse_config, serialize_config
from .diagnostics import analyze_window, band_from_tail, bootstrap_inequality_check, gamma_sweep, h_profile
from .errors import (BlowUpError, ConfigError, FitDomainError, FormatError, KsbandError, PreconditionError,
                     RangeError, ResolutionError, SingularSymbolError)
from .field import Grid, SpectralField, read_checkpoint, write_checkpoint
from .integrator import integrate
from .nonlinear import NonlinearWorkspace, nonlinear_term
from .symbols import SymbolSpec, certify_dissipation, eval_symbol, symbol_table
