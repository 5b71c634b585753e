"""Exact intersection theory on the Hilbert square of a surface and slope checks for tautological sheaves."""
from .chow import CycleBlowup, box, diag, exc, integrate, mul_blowup
from .cyclelang import evaluate, format_cycle, parse
from .exactmath import AlwaysFrom, CoeffPoly, IdenticallyZero, NeverEventually, eventually_positive
from .surface import SurfaceData, load_surface, load_surface_file, preset
from .taut import LineClass, TautSpec, destabilize_verdict, exclusion_filter, slope

__all__ = [
    "AlwaysFrom",
    "CoeffPoly",
    "CycleBlowup",
    "IdenticallyZero",
    "LineClass",
    "NeverEventually",
    "SurfaceData",
    "TautSpec",
    "box",
    "destabilize_verdict",
    "diag",
    "evaluate",
    "eventually_positive",
    "exc",
    "exclusion_filter",
    "format_cycle",
    "integrate",
    "load_surface",
    "load_surface_file",
    "mul_blowup",
    "parse",
    "preset",
    "slope",
]

__version__ = "0.1.0"
