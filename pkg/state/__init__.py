from state.schema import (
    AtomicMeasure,
    BoundaryKind,
    Color,
    DynamicsMode,
    PivotalMode,
)
