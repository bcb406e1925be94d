"""Bergman projections of conjugate holomorphic functions on Reinhardt domains."""
from .covering import (CoverCertificate, LocalPatch, LogHull, build_patch, finite_subcover,
                       log_convex_hull, transversal_direction)
from .domains import (AnnulusProduct, DomainError, HartogsDomain, LogProfileDomain, boundary_samples,
                      contains, domain_from_config, domain_to_config, index_window, log_ball, log_box,
                      log_ellipsoid)
from .extension import (Certificate, ExtensionWindow, TouchesAxesError, certify_extension,
                        comp_estimate_ratio, decay_backstop, extension_product, project_and_extend)
from .friedrichs import (InadmissibleSupportError, friedrichs_matrix, project_conjugate,
                         project_conjugate_by_quadrature)
from .kernel import QuadratureSpec, TruncatedKernel, kernel_eval, reproducing_check
from .norms import NormTable, admissible, norm_sq
from .quadrature import QuadratureError, integrate_region
from .series import LaurentSeries, evaluate

