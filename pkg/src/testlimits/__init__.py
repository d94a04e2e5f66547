"""Refutability and verifiability of requirements over bounded system models."""
__version__ = "0.1.0"

from . import kernels  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .order import (  # noqa: E402
    Classification,
    Requirement,
    SystemModel,
    build_model,
    classify,
    combine,
    down_closure,
    join,
    meet,
    powerset_model,
    requirement,
    up_closure,
)
from .testsetup import (  # noqa: E402
    RefutabilityReport,
    TestSetup,
    alpha_hat,
    build_setup,
    induced_obligations,
    is_more_permissive,
    is_refutable,
    is_verifiable,
    reflexive_setup,
    separating_requirement,
)
from .workbench import Workbench, parse_file  # noqa: E402

__all__ = [
    "kernels",
    "SystemModel",
    "Requirement",
    "Classification",
    "build_model",
    "powerset_model",
    "requirement",
    "up_closure",
    "down_closure",
    "classify",
    "combine",
    "meet",
    "join",
    "TestSetup",
    "RefutabilityReport",
    "build_setup",
    "reflexive_setup",
    "alpha_hat",
    "induced_obligations",
    "is_refutable",
    "is_verifiable",
    "is_more_permissive",
    "separating_requirement",
    "Workbench",
    "parse_file",
]
