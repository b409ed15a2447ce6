"""Consistency tests on Grassmann and shortcode graphs over GF(2).

The core types (vectors, matrices, subspaces) live in :mod:`shortcode.gf2`;
hot loops are compiled when the extension is available and fall back to
numpy otherwise (see :data:`BACKEND`).
"""

from .embedding import Embedding, projection_fraction
from .errors import (
    DomainError,
    FormatError,
    ParameterError,
    PreconditionError,
    ResourceError,
    ShortcodeError,
)
from .expansion import (
    cayley_eigenvalue,
    decode_grassmann,
    decode_shortcode,
    expansion_soundness_bridge,
    grassmann_expansion,
    nice_density,
    spectrum_by_rank,
    stay_probability,
)
from .gf2 import Basis, GF2Matrix, GF2Tensor, GF2Vector, Prng, Subspace
from .graphs import GrassmannGraph, ShortcodeGraph, TensorGraph
from .kernels import BACKEND
from .nicesets import NiceSetGrassmann, NiceSetShortcode
from .strategies import (
    GrassmannStrategy,
    LinearFunctional,
    ShortcodeStrategy,
    TensorStrategy,
    make_planted,
    read_strategy,
    write_strategy,
)
from .testers import TestKind, pass_probability

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Basis", "DomainError", "Embedding", "FormatError", "GF2Matrix", "GF2Tensor",
    "GF2Vector", "GrassmannGraph", "GrassmannStrategy", "LinearFunctional", "NiceSetGrassmann",
    "NiceSetShortcode", "ParameterError", "PreconditionError", "Prng", "ResourceError",
    "ShortcodeError", "ShortcodeGraph", "ShortcodeStrategy", "Subspace", "TensorGraph",
    "TensorStrategy", "TestKind", "cayley_eigenvalue", "decode_grassmann", "decode_shortcode",
    "expansion_soundness_bridge", "grassmann_expansion", "make_planted", "nice_density",
    "pass_probability", "projection_fraction", "read_strategy", "spectrum_by_rank",
    "stay_probability", "write_strategy",
]
