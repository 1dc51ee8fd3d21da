from pivotal.flips    import SymmetricDifference, eps_pivotal_mask, is_eps_pivotal, loop_symmetric_difference
from pivotal.arms     import (
    AnnulusSpec,
    ArmBox,
    alternating_arms_by_flow,
    has_alternating_arms,
    importance_scale,
    is_A_important,
    rho_important_set,
)
from pivotal.measures import FourArmEstimate, four_arm_probability, occupation_estimate, pivotal_measure
