"""Discrete-time quantum walks built from graph embeddings and shunt-decompositions."""

from qwalk.embeddings import (
    Embedding,
    Gem,
    RotationSystem,
    build_gem,
    embed,
    enumerate_rotation_systems,
    facial_walks,
    gem_quotient,
    genus,
    parse_rotation_system,
)
from qwalk.errors import (
    CoinCompatibilityError,
    InternalConsistencyError,
    InvalidOrdersError,
    ParameterError,
    ParseError,
    PreconditionError,
    QWalkError,
)
from qwalk.factorizations import (
    LinearOrders,
    ShuntDecomposition,
    enumerate_shunt_decompositions,
    validate_linear_orders_for_shunt_model,
)
from qwalk.graph import Graph, bipartite_double_cover, parse_graph6, write_graph6
from qwalk.spectral import (
    AverageMixingMatrix,
    SpectralDecomposition,
    average_mixing_matrix,
    spectral_decomposition,
)
from qwalk.walks import (
    Coin,
    MarkovChain,
    TransitionUnitary,
    arc_reversal_from_rotation,
    arc_reversal_unitary,
    make_coin,
    shunt_unitary,
    szegedy_unitary,
)

__version__ = "0.1.0"
