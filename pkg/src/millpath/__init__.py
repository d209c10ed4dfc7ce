"""Locally optimal ball-end milling tool-path simulation.

Library layout:

- mesh: triangle meshes, STL/OBJ ingestion, normal-plane sectioning
- offsetting: per-plane offset polylines with gap filling and trimming
- contact: tool/offset intersection and processed-patch boundaries
- analysis: patch diameters, widest-stripe and disc curvature directions
- planner: isophote point, beta angle, bisector and blended directions
- surfaces: analytic surface catalog, isophote tracing, projections
- pathing: path stepping, side steps, diagnostics
- cli: command-line driver (patch / path / offset / report)
"""

from .errors import ComputationError, InputError, MeshError, MillError

__all__ = ["MillError", "InputError", "MeshError", "ComputationError"]

__version__ = "0.1.0"
