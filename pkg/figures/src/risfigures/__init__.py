"""Figure rendering for risdecoy experiment exports."""

__version__ = "0.1.0"

from .render import (RENDERERS, TableError, load_table, render_beampattern,
                     render_leakage_ratio, render_ml_spectrum, render_peb_map,
                     render_rho_ub)
