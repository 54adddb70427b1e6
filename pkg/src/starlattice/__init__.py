"""Star-graph reentrant-honeycomb lattices: validity, counting, scaling,
kinematics and a shape compiler."""

from .model import (
    EdgeProfile,
    GeometryParams,
    HeightMap,
    JointGrid,
    LatticeEncoding,
    LatticeError,
    SymbolicOffset,
    parse_encoding,
    parse_heightmap,
    serialize_encoding,
    serialize_heightmap,
)
from .validity import ValidityReport, check_validity, compute_joint_offsets, is_valid, numeric_offsets
from .counting import CountRecord, count, count_bruteforce, count_dp, valid_probability
from .scaling import FitModel, fit_scaling, predict_count, reference_dataset, validate_fit
from .kinematics import Bias, classify_transition, compressed_cell, global_poisson, lattice_footprint
from .design import Mode, approximate_profile, generate_lattice, heightmap_to_layers, letter_to_layers

__version__ = "0.1.0"
