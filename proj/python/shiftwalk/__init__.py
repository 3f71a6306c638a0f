"""Shift-periodic interval maps and their stochastic scaling limits.

Thin Python layer over the C++ core: map construction and validation,
integer-jump walks, invariant-density approximations, stable laws, rescaled
walk marginals, and the small-hole continuous-time random walk.
"""

try:  # installed layout: extension lives inside the package
    from ._shiftwalk import (  # noqa: F401
        HomeomorphismApprox,
        IndependenceResult,
        JumpRecord,
        KsResult,
        Map,
        ScalingPlan,
        StableParams,
        TailFit,
        TransitionTable,
        UlamApproximation,
        WaitingTimeReport,
        WalkRecord,
        build_h,
        builtin,
        builtin_names,
        cond_invariant_density,
        conjugacy_residual,
        ctrw_gamma,
        empirical_transitions,
        example1_adaptive_grid,
        hole_measure,
        increment_independence_test,
        iterate,
        ks_test,
        ks_two_sample,
        scaling_plan,
        simulate_ctrw_ensemble,
        simulate_vn_ensemble,
        stable_cdf,
        stable_samples,
        tail_constants,
        transition_table,
        ulam_invariant_density,
        ulam_invariant_density_on,
        validate,
        waiting_time_test,
    )
except ImportError:  # build-tree layout: extension on sys.path
    from _shiftwalk import (  # noqa: F401
            HomeomorphismApprox,
        IndependenceResult,
        JumpRecord,
        KsResult,
        Map,
        ScalingPlan,
        StableParams,
        TailFit,
        TransitionTable,
        UlamApproximation,
        WaitingTimeReport,
        WalkRecord,
        build_h,
        builtin,
        builtin_names,
        cond_invariant_density,
        conjugacy_residual,
        ctrw_gamma,
        empirical_transitions,
        example1_adaptive_grid,
        hole_measure,
        increment_independence_test,
        iterate,
        ks_test,
        ks_two_sample,
        scaling_plan,
        simulate_ctrw_ensemble,
        simulate_vn_ensemble,
        stable_cdf,
        stable_samples,
        tail_constants,
        transition_table,
        ulam_invariant_density,
        ulam_invariant_density_on,
        validate,
        waiting_time_test,
    )

__version__ = "0.1.0"
