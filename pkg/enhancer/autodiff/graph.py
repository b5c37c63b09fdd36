"""Graph traversal: topological ordering, `grad` and `backward`."""
import contextlib
import logging

import numpy as np

from enhancer.autodiff.tensor import Tensor, no_grad, enable_grad, check_nonfinite_enabled
from enhancer.exceptions import NonFiniteError, ShapeError

logger = logging.getLogger(__name__)


class Graph:
    """Tensors reachable from a root, in topological order (inputs first, root last)."""

    def __init__(self, nodes):
        self.nodes = nodes

    @classmethod
    def trace(cls, root):
        order = []
        visited = set()
        stack = [(root, False)]
        while stack:
            tensor, expanded = stack.pop()
            if expanded:
                order.append(tensor)
                continue
            if id(tensor) in visited:
                continue
            visited.add(id(tensor))
            stack.append((tensor, True))
            if tensor.node is not None:
                for parent in tensor.node.inputs:
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))
        return cls(order)

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


def _on_path(graph, targets):
    """Ids of graph tensors from which some target is reachable going towards the inputs."""
    keep = set()
    for tensor in graph.nodes:
        if id(tensor) in targets or (
                tensor.node is not None and any(id(parent) in keep for parent in tensor.node.inputs)):
            keep.add(id(tensor))
    return keep


def _propagate(root, seed, create_graph, targets=None):
    graph = Graph.trace(root)
    keep = None if targets is None else _on_path(graph, targets)
    grads = {id(root): seed}
    leaves = {}
    context = enable_grad() if create_graph else no_grad()
    with context:
        for tensor in reversed(graph.nodes):
            grad = grads.get(id(tensor))
            if grad is None:
                continue
            if tensor.node is None:
                leaves[id(tensor)] = tensor
                continue
            # interior gradients are not needed once passed on
            if keep is None or id(tensor) not in targets:
                del grads[id(tensor)]
            node = tensor.node
            # reset on every sweep: the same node can be shared by a later, unpruned one
            node.needs_input_grad = tuple(
                parent.requires_grad and (keep is None or id(parent) in keep) for parent in node.inputs)
            input_grads = node.backward(grad)
            for parent, parent_grad, needed in zip(node.inputs, input_grads, node.needs_input_grad):
                if parent_grad is None or not needed:
                    continue
                if parent_grad.shape != parent.shape:
                    raise ShapeError(
                        f"{type(tensor.node).__name__} returned a gradient of shape {parent_grad.shape} "
                        f"for an input of shape {parent.shape}"
                    )
                previous = grads.get(id(parent))
                grads[id(parent)] = parent_grad if previous is None else previous + parent_grad
    return grads, leaves


def _check_scalar(output):
    if output.size != 1:
        raise ShapeError(f"gradients need a scalar output, got shape {output.shape}")


def grad(output, inputs, create_graph=False):
    """Gradients of scalar `output` w.r.t. each tensor in `inputs`.

    With `create_graph` the returned tensors are themselves graph nodes and can be
    differentiated again. Inputs the output does not depend on get zeros.
    """
    _check_scalar(output)
    if not output.requires_grad:
        return [Tensor(np.zeros_like(t.data), dtype=t.dtype) for t in inputs]
    seed = Tensor(np.ones_like(output.data), dtype=output.dtype)
    grads, _ = _propagate(output, seed, create_graph, targets={id(t) for t in inputs})
    result = []
    for tensor in inputs:
        g = grads.get(id(tensor))
        result.append(g if g is not None else Tensor(np.zeros_like(tensor.data), dtype=tensor.dtype))
    return result


def backward(loss, inputs=None):
    """Accumulate d(loss)/d(leaf) into the `grad` buffer of every leaf requiring grad.

    `inputs` restricts accumulation to the given leaves. Repeated calls without
    zeroing accumulate.
    """
    _check_scalar(loss)
    if check_nonfinite_enabled() and not np.all(np.isfinite(loss.data)):
        raise NonFiniteError(f"loss is not finite ({loss.item()})")
    if not loss.requires_grad:
        return
    seed = Tensor(np.ones_like(loss.data), dtype=loss.dtype)
    allowed = None if inputs is None else {id(t) for t in inputs}
    grads, leaves = _propagate(loss, seed, create_graph=False, targets=allowed)
    for key, leaf in leaves.items():
        if allowed is not None and key not in allowed:
            continue
        value = grads[key].data
        if check_nonfinite_enabled() and not np.all(np.isfinite(value)):
            name = leaf.name or f"leaf{leaf.shape}"
            raise NonFiniteError(f"non-finite gradient for '{name}'")
        leaf.grad = value.copy() if leaf.grad is None else leaf.grad + value


@contextlib.contextmanager
def frozen(tensors):
    """Temporarily mark `tensors` as not requiring grad."""
    flags = [t.requires_grad for t in tensors]
    for t in tensors:
        t.requires_grad = False
    try:
        yield
    finally:
        for t, flag in zip(tensors, flags):
            t.requires_grad = flag
