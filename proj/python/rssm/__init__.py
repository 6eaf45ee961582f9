"""Randomized submanifold subgradient method on the Stiefel manifold.

Thin python layer over the C++ core: geometric kernels (polar projection,
retraction, tangent projection), the RSSM and RSM solvers, and the robust
subspace recovery / orthogonal dictionary learning benchmark problems.
"""

from ._core import (  # noqa: F401
    ConfigError,
    DimensionError,
    OdlInstance,
    RsrInstance,
    SingularityError,
    __version__,
    feasibility_error,
    gen_odl,
    gen_rsr,
    inv_sqrt,
    load_odl,
    load_rsr,
    make_uniform_partition,
    nuclear_norm,
    odl_error,
    odl_subgradient,
    odl_value,
    operator_norm,
    polar_project,
    random_stiefel,
    retract,
    riemannian_subgradient,
    rsr_error,
    rsr_init,
    rsr_subgradient,
    rsr_value,
    run_rsm,
    run_rssm,
    save_odl,
    save_rsr,
    skew,
    stationarity_proxy,
    step_size,
    sym,
    tangent_project,
)
