from abc import ABC, abstractmethod

from percolation.coloring import Coloring
from state.schema import DynamicsMode


class FlipPolicy(ABC):
    """
    Decides what happens when the clock of vertex v rings.
    The runner calls accepts() with the pre-ring configuration ω_{t⁻}.
    """

    mode: DynamicsMode

    @abstractmethod
    def accepts(self, coloring: Coloring, v: int) -> bool:
        """True if the ring at v flips its color."""
        ...

    @abstractmethod
    def describe(self) -> dict:
        """JSON-ready description, echoed into trajectory metadata."""
        ...
