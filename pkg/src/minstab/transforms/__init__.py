"""Disk and plane quadrature, the operators P and T, and inequality checks."""

from .checks import (
    EnergyAreaResult,
    IdentityResiduals,
    NeumannSolution,
    energy_area_after_precomposition,
    equivalence_residual,
    equivalent_beltrami_family,
    identity_P1_P2_check,
    nmi_infinitesimal_analytic,
    nmi_infinitesimal_check,
    normal_solution_neumann,
    rs_along_path,
    sample_variation,
    second_variation_fd,
)
from .functionals import (
    InequalityResult,
    F_field,
    F_quadrature,
    disk_integral,
    holds_tolerance,
    nmi_finite_check,
    random_beltrami,
    random_compact_beltrami,
    reich_strebel_delta,
)
from .oracles import beurling_oracle, cauchy_oracle
from .plane import (
    PlaneGrid,
    beurling_T,
    beurling_multiplier,
    cauchy_P,
    fd_dz_dzbar,
    read_field,
    write_field,
)
from .variations import BlendedExtension, CutoffExtension, smooth_step
from ..quadrature import DiskGrid
