from percolation.coloring import Coloring, as_triangulation
from pivotal.flips import is_eps_pivotal
from dynamics.policy_base import FlipPolicy
from state.schema import AtomicMeasure, DynamicsMode


class UnconditionalFlips(FlipPolicy):
    """Plain dynamical percolation: every ring flips."""

    mode = DynamicsMode.FULL

    def accepts(self, coloring: Coloring, v: int) -> bool:
        return True

    def describe(self) -> dict:
        return {"mode": self.mode.value}


class CutoffFlips(FlipPolicy):
    """
    ε-cutoff dynamic: a ring at v flips it iff v is ε-pivotal for the
    pre-ring configuration, with loop areas measured by `area`
    (unit counting when None).
    """

    mode = DynamicsMode.CUTOFF

    def __init__(self, target, eps: float, area=None):
        if eps < 0:
            raise ValueError(f"ε must be nonnegative, got {eps}")
        self.tri  = as_triangulation(target)
        self.eps  = float(eps)
        self.area = area

    def accepts(self, coloring: Coloring, v: int) -> bool:
        return is_eps_pivotal(self.tri, coloring, v, self.eps, self.area)

    def describe(self) -> dict:
        area = self.area.params if isinstance(self.area, AtomicMeasure) else ("counting" if self.area is None else "weights")
        return {"mode": self.mode.value, "eps": self.eps, "area": area}


def create_policy(spec: dict, target=None, area=None) -> FlipPolicy:
    """
    Factory that returns the FlipPolicy for spec["mode"]: "full" or
    "cutoff" (which also reads spec["eps"] and needs the map).
    """
    mode = str(spec.get("mode", "full")).lower()

    if mode == DynamicsMode.FULL.value:
        return UnconditionalFlips()

    elif mode == DynamicsMode.CUTOFF.value:
        if target is None:
            raise ValueError("cutoff dynamics needs the map or lattice domain to test pivotality on")
        return CutoffFlips(target, spec.get("eps", 0.0), area)

    else:
        raise ValueError(f"Unknown dynamics mode: '{mode}'. Valid options: full, cutoff")
