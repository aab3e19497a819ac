"""Infinite-bin model: configurations, moves, explicit coupling words,
exhaustive verification, synchronizing words and seeded simulation."""

from ._backend import BACKEND
from .config import (
    Configuration,
    LazyInfiniteConfiguration,
    MoveWord,
    apply_move,
    apply_move_infinite,
    apply_word,
    parse_configuration,
    parse_lazy,
    parse_word,
    project,
)
from .coupling import (
    CouplingParams,
    CouplingPlan,
    build_coupling_plan,
    build_psi,
    build_psi1,
    derive_params,
    f_map,
    make_X,
    make_Y,
    plan_length_accounting,
)
from .errors import (
    DomainError,
    IndexOutOfRange,
    InfiniteBinError,
    InvalidDistribution,
    InvalidParams,
    LetterTooLarge,
    MoveTooLarge,
    NotSynchronizable,
    ParseError,
    ProjectionTooLarge,
    ResourceCapExceeded,
    SubsetSpaceTooLarge,
    UniverseTooLarge,
)

__version__ = "0.1.0"
