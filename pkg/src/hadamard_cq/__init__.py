"""Corrected fractional BDF convolution quadrature for Caputo-Hadamard subdiffusion.

Submodules:

* ``special_functions``: gamma, zeta, polylogarithm
* ``mesh``: exponential time meshes
* ``cq``: fractional BDF-p weights and generalized Newton-Gregory symbols
* ``correction``: startup correction coefficients and symbol functions
* ``hadamard_ops``: discrete Hadamard derivative and truncation studies
* ``fem1d``: 1D Lagrange finite elements
* ``expr``: expression parser, evaluator and Taylor jets
* ``solver``: the time-stepping scheme and convergence studies
* ``cli``: command-line entry point
"""
from .correction import CorrectionTable, correction_table
from .cq import cq_weights
from .fem1d import build_space
from .mesh import ExpMesh, build_mesh
from .solver import ProblemSpec, convergence_study, final_error, problem_from_expressions, step_all

__version__ = "0.1.0"

__all__ = [
    "CorrectionTable",
    "correction_table",
    "cq_weights",
    "build_space",
    "ExpMesh",
    "build_mesh",
    "ProblemSpec",
    "convergence_study",
    "final_error",
    "problem_from_expressions",
    "step_all",
]
