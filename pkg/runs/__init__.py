from runs             import dynamics, embedding, field, maps, percolation, pivotal
from runs.context     import DOMAINS, RunContext, build_domain, read_maps

COMMAND_MODULES = [maps, percolation, embedding, pivotal, field, dynamics]


def register_all(subparsers) -> None:
    for module in COMMAND_MODULES:
        module.register(subparsers)


__all__ = ["COMMAND_MODULES", "DOMAINS", "RunContext", "build_domain", "read_maps", "register_all"]
