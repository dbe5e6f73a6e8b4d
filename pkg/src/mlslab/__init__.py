"""Numerical laboratory for marked length spectra of perturbed flat tori
and of the Bolza surface."""

__version__ = "0.1.0"

from .homotopy import CyclicWord, TorusClass, canonicalize, enumerate_classes  # noqa: E402
from .models import TorusModel, background_length, bolza, liouville_average  # noqa: E402
from .geodesic_solver import SolverOptions, solve_geodesic, spectrum_batch  # noqa: E402
from .xray import xray_batch, xray_tensor  # noqa: E402

__all__ = [
    "CyclicWord", "TorusClass", "canonicalize", "enumerate_classes",
    "TorusModel", "background_length", "bolza", "liouville_average",
    "SolverOptions", "solve_geodesic", "spectrum_batch", "xray_batch", "xray_tensor",
]
