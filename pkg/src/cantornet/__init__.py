"""CantorNet: recursion-based and DNF ReLU representations of a Cantor-like
decision manifold, with exact equivalence checks."""

from .relu_core import (
    ActivationPattern,
    AffineLayer,
    ForwardTrace,
    ReluNetwork,
    activation_pattern,
    affine_gradient,
    binarize,
    deserialize,
    forward,
    layer_count,
    neuron_count,
    relu,
    serialize,
)
from .recursive import (
    ManifoldLabel,
    boundary_height,
    build_recursive_net,
    build_recursive_net_1d,
    generating_function,
    membership_oracle,
    nested_generating,
)
from .triadic import activation_code, code_to_pattern, interval_index, pattern_fast, triadic_digits
from .dnf import boundary_pieces, build_dnf, dnf_value, extract_dents, structural_counts
from .minmax import build_max_net, build_min_net, dnf_to_relu, verify_ternary_weights

__version__ = "0.1.0"
