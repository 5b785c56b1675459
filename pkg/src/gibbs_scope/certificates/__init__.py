"""Sufficient-condition certificates for Gibbsianness (mean-field and lattice)."""

from .lattice import (
    DobrushinMatrix,
    LatticeInteractionSpec,
    cbar_matrix_t,
    fineapp_certificate,
    genthm_certificate,
    genthm_t_max,
    goodness_matrix_Q,
    lattice_L_constants,
    neumann_series,
    posterior_metric_distance,
)
from .meanfield import (
    MeanFieldInteractionSpec,
    cor3,
    cor3_constant,
    fineness_certificate_mf,
    mf_cfg_constant,
    mf_gibbs_certificate,
    minimal_arc_count,
    quadratic_rotator_spec,
    thm2_threshold,
)
