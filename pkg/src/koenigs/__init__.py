"""Numerical potential theory on planar domains.

Logarithmic capacity (closed forms, Leja products, simplex energy
maximization), equilibrium-measure diagnostics, walk-on-spheres harmonic
measure, Hardy numbers of domains and of explicit disc maps, and the
dynamics of non-elliptic self-maps of the unit disc.
"""

from .geometry import (Arc, ClosedDisc, CompactSet, FinitePoints, Segment,
                       build_kn, normalize_to_quarter_disc, query)
from .domains import (BoundaryPartition, CertificateError, CircleSlitDomain,
                      ComplementOfCompact, DomainSpec, HalfPlane, Sector,
                      Strip, TranslatedUnionComplement, boundary_partition)
from .measures import (AlphaCoefficients, DiscreteMeasure, alpha_coefficients,
                       energy, gamma_diagnostic, interval_equilibrium_density,
                       potential, sigma_measure, sigma_potential_report)
from .capacity import (CapacityEstimate, NonConvergenceError,
                       capacity_closed_form, capacity_estimate_energy,
                       capacity_estimate_leja, kn_capacity_experiment,
                       leja_points)
from .wos import (HarmonicMeasureEstimate, WosConfig, ZeroHitError,
                  annulus_outer_probability, halfplane_disc_outer_probability,
                  harmonic_measure, omega_scan, wos_exit)
from .hardy import (HardyEstimate, PrescribedDomainResult,
                    construct_prescribed_domain, hardy_closed_form,
                    hardy_estimate, hardy_of_map_integral_means,
                    koenigs_lower_bound_experiment)
from .dynamics import (KoenigsModel, OrbitReport, abel_residual, classify,
                       classify_orbit, halfplane_model, iterate_orbit,
                       model_self_map, pseudo_hyperbolic_distance,
                       sector_model, strip_model)

__version__ = "0.1.0"
