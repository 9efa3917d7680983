from . import hermitian
from .hermitian import (HERMITICITY_TOL, Spectrum, as_matrix, check_hermitian, hermitize, hermiticity_error, kron,
                        partial_trace, partial_transpose, eigh, eigvalsh, lambda_min, lambda_max,
                        trace_norm, operator_norm, positive_negative_parts, positive_part_trace,
                        hs_inner, is_psd, project_psd, sqrtm_psd, maximally_entangled,
                        omega_projector, swap, hermitian_basis, hermitian_coordinates,
                        tomographic_states, random_density, random_unitary)
