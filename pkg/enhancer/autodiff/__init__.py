from enhancer.autodiff.tensor import (
    Function,
    Tensor,
    as_tensor,
    default_dtype,
    enable_grad,
    is_grad_enabled,
    no_grad,
    precision,
    set_check_nonfinite,
)
from enhancer.autodiff.graph import Graph, backward, frozen, grad
from enhancer.autodiff.gradcheck import grad_check
from enhancer.autodiff import functions

__all__ = [
    'Function', 'Tensor', 'as_tensor', 'default_dtype', 'enable_grad', 'is_grad_enabled', 'no_grad',
    'precision', 'set_check_nonfinite', 'Graph', 'backward', 'frozen', 'grad', 'grad_check', 'functions',
]
