"""Multi-layer stable marriage: checkers, solvers and reduction generators."""
from .core import (
    AgentId,
    AlphaQuery,
    Concept,
    Matching,
    MultiLayerProfile,
    Side,
    format_matching,
    format_profile,
    is_single_layered,
    is_uniform,
    parse_matching,
    parse_profile,
    random_profile,
    validate_profile,
)
from .fixtures import fixture, load_fixture

__version__ = "0.1.0"
