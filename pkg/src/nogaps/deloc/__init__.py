"""Delocalization functionals, deterministic audits, nets and Monte Carlo drivers."""

from .audits import (DecompositionAudit, ReductionAudit, RowDeletionAudit, SecondMomentAudit, SplitResult,
                     decomposition_bound_audit, interior_threshold, neg_second_moment_audit,
                     plus_lower_bound_violations, reduction_audit, row_deletion_audit, split_spectral_subspaces)
from .experiments import (audit_experiment, audit_trial, deloc_experiment, deloc_trial, distance_experiment,
                          distance_trial, eps_key, kernel_lcd_experiment, kernel_lcd_trial, kernel_threshold,
                          planted_kernel_control, planted_kernel_matrix, smin_experiment, smin_trial)
from .functionals import (DelocReport, deloc_profile, deloc_report, loc_event, localization_norm, set_size,
                          smallest_coords)
from .nets import (DiscNet, compressible_net_bound, disc_net, levelset_d0, levelset_gamma, levelset_net_bound,
                   log_levelset_net_bound)
