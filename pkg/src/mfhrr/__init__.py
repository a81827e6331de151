"""Exact Hirzebruch-Riemann-Roch and Cardy checks for matrix factorizations."""
from .chern import (ChernClass, VerificationReport, boundary_bulk, calibrate, cardy_rhs,
                    chern_local, dual_class, hrr_rhs, todd_series, verify_cardy, verify_hrr)
from .ext import cardy_lhs, euler_char, ext_basis, ext_dims_graded, ext_dims_groebner, hom_complex
from .groebner import INFINITE, buchberger, normal_form, quotient_dim, syzygy_basis
from .mf import (MatrixFactorization, dual_mf, explicit_mf, koszul_mf, parse_mf, shift_mf,
                 sum_mf, tensor_mf, validate_mf)
from .milnor import milnor_ring, residue
from .poly import Poly, Ring, parse_poly

__all__ = [name for name in dir() if not name.startswith("_")]
