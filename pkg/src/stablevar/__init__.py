"""Small-ball laboratory for the strong p-variation of strictly stable processes."""

__version__ = "0.1.0"

from .errors import DomainError, InfeasibleError
from .stable_core import (
    StableLaw,
    SubordinatorLaw,
    from_gaussian,
    from_levy_measure,
    from_subordinator,
    from_symmetric,
    sample_one_sided,
    sample_stable,
    sp_law,
)

__all__ = [
    "DomainError",
    "InfeasibleError",
    "StableLaw",
    "SubordinatorLaw",
    "from_gaussian",
    "from_levy_measure",
    "from_subordinator",
    "from_symmetric",
    "sample_one_sided",
    "sample_stable",
    "sp_law",
]
