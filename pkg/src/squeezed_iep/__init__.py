"""Irreversible entropy production and its geometric bounds for a qubit in a squeezed thermal bath."""

from .dephasing import DephasingParams
from .dissipation import DissipationParams
from .entropy_geometry import d_qf, d_wy, iep, lower_bound, relative_entropy, upper_bound
from .qmat2 import DensityMatrix, from_bloch, to_bloch
from .report import IrrevReport, build_report

__all__ = [
    "DensityMatrix",
    "DephasingParams",
    "DissipationParams",
    "IrrevReport",
    "build_report",
    "d_qf",
    "d_wy",
    "from_bloch",
    "iep",
    "lower_bound",
    "relative_entropy",
    "to_bloch",
    "upper_bound",
]
