"""Truncated tensor algebra, path signatures, signature-of-signature and R-tree certification."""

from .errors import CapacityError, DomainError, InputError, ShapeError, SigalgError
from .tensor_algebra import (
    GroupElement,
    TruncatedTensor,
    antipode,
    exp,
    group_distance,
    homogeneous_norm,
    inverse,
    level_norm,
    log,
    mul,
    unit,
)
from .words import coeff, is_group_like, is_lie_element, ordered_shuffles, permute_block, shuffle
from .paths import (
    PiecewiseLinearPath,
    SignaturePath,
    concat,
    p_var_distance,
    p_variation,
    pushforward_path,
    reparametrize,
    reverse,
    signature,
    tensor_pushforward,
)

__version__ = "0.1.0"
