"""Arithmetic structure: LCDs, small coordinates, correlations, compressibility."""
from .lcd import (LcdEstimate, L_preset, lattice_dist, lcd_condition, lcd_lower_bound,
                  lcd_matrix2, lcd_subspace_upper, lcd_vector)
from .lattice import lll_reduce, near_lattice_points
from .correlation import (CauchyBinetAudit, CorrelationResult, cauchy_binet_audit, compress_class,
                          gram_det_sqrt, rc_correlation, real_imag_matrix, sm_set, small_count)
