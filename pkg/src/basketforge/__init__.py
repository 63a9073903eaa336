"""Exact basket arithmetic, packing search and volume bounds for threefolds of general type."""

from .core import (
    Basket,
    BasketSyntaxError,
    FormalBasket,
    InvalidPair,
    OutOfDomain,
    Pair,
    UnpackingRangeError,
    canonical_chain,
    elementary_basket,
    elementary_decomposition,
    fmt_q,
    local_contribution,
    parse_basket,
    parse_formal,
    plurigenera,
    plurigenus,
    reduce_pair,
    step_unpack,
    volume,
)
from .lattice import (
    PackingChain,
    PackingMove,
    ResourceError,
    descendant_closure,
    dominates,
    merge_dominates,
    minimal_positive_descendants,
    prime_packing,
)

__version__ = "0.1.0"
