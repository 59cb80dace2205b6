"""Order-book models of stock-market fluctuations and their measurement suite."""

__version__ = "0.1.0"

from .bps import BpsConfig, BpsState, bps_init, bps_run, bps_step
from .core import Book, BookError, Order, PricePath, RngStream, Side
from .errors import ConfigError
from .genoa import (GenoaConfig, GenoaState, genoa_hysteresis, genoa_phase_diagram, genoa_run,
                    genoa_step, genoa_sweep_gc, genoa_update_volatility, genoa_window)
from .maslov import MaslovConfig, MaslovState, maslov_event_probs, maslov_run, maslov_step
from .stigler import StiglerConfig, StiglerState, stigler_run, stigler_step
from .udm import UdmConfig, UdmState, udm_run, udm_step

__all__ = [
    "__version__", "Book", "BookError", "Order", "PricePath", "RngStream", "Side", "ConfigError",
    "BpsConfig", "BpsState", "bps_init", "bps_run", "bps_step",
    "StiglerConfig", "StiglerState", "stigler_run", "stigler_step",
    "GenoaConfig", "GenoaState", "genoa_run", "genoa_step", "genoa_update_volatility",
    "genoa_window", "genoa_sweep_gc", "genoa_hysteresis", "genoa_phase_diagram",
    "MaslovConfig", "MaslovState", "maslov_event_probs", "maslov_run", "maslov_step",
    "UdmConfig", "UdmState", "udm_run", "udm_step",
]
