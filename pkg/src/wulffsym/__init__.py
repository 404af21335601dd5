"""Anisotropic symmetrization of BV functions on planar and spatial grids.

Submodules
----------
anisotropy
    Norms ``H``, their polars and the Wulff constant.
fields
    Grid fields, jump sets and classical rearrangements.
rearrange
    Wulff-radial symmetrizations and the gradient rearrangement.
variation
    Anisotropic total variation, perimeters and inequality checks.
torsion
    Penalized torsion and insulation problems.
cli
    The ``wulffsym`` command.
"""

from .anisotropy import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .fields import *  # noqa: F401,F403
from .rearrange import *  # noqa: F401,F403
from .torsion import *  # noqa: F401,F403
from .variation import *  # noqa: F401,F403

__version__ = "0.1.0"
