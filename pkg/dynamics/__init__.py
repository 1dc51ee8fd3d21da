from dynamics.policy_base import FlipPolicy
from dynamics.policies    import CutoffFlips, UnconditionalFlips, create_policy
from dynamics.runner      import DynTrajectory, run_dynamics, run_eps_cutoff, uniform_rates
from dynamics.ctmc        import (
    JumpSkeleton,
    RateMatrix,
    build_exact_ctmc,
    jump_skeleton,
    state_coloring,
    state_index,
    two_time_correlation,
)
