"""Dense float64 tensors with reverse-mode differentiation.

The graph is define-by-run: every op that touches a tensor requiring
gradients records its inputs and a vector-Jacobian closure on the output.
``backward`` walks the recorded graph once, in reverse topological order,
and returns a gradient map over the requiring leaves. Gradients flow both
to parameters (training) and to inputs (attack generation).

Broadcasting is deliberately narrow: operand shapes must match exactly,
or one operand must be a scalar or a trailing suffix of the other's shape
(e.g. adding a ``(n,)`` bias to a ``(b, n)`` activation).
"""

import numpy as np

from .errors import DomainError, GraphError, ShapeError


class Tensor:
    """Row-major float64 array plus optional gradient bookkeeping."""

    __slots__ = ("data", "requires_grad", "_parents", "_vjp")

    def __init__(self, data, requires_grad=False):
        # asarray with order="C" keeps 0-d shapes; ascontiguousarray would not
        self.data = np.asarray(data, dtype=np.float64, order="C")
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._vjp = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        """Copy of the values, cut off from the graph."""
        return Tensor(self.data.copy())

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    # operator sugar; scalars hit the constant paths
    def __add__(self, other):
        return add(self, _as_tensor(other))

    def __radd__(self, other):
        return add(_as_tensor(other), self)

    def __sub__(self, other):
        return sub(self, _as_tensor(other))

    def __rsub__(self, other):
        return sub(_as_tensor(other), self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scalar_mul(other, self)
        return mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return scalar_mul(1.0 / other, self)
        raise TypeError("tensor/tensor division is not supported")

    def __neg__(self):
        return scalar_mul(-1.0, self)

    def __matmul__(self, other):
        return matmul(self, other)

    def sum(self, axis=None) -> "Tensor":
        return _sum(self, axis)

    def mean(self) -> "Tensor":
        n = self.data.size
        return scalar_mul(1.0 / n, _sum(self, None))

    @property
    def T(self) -> "Tensor":
        return transpose(self)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _make(data, parents, vjp) -> Tensor:
    if not np.all(np.isfinite(data)):
        raise DomainError("operation produced non-finite values")
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._vjp = vjp
    return out


def _broadcast_shape(sa, sb):
    """Output shape under the exact / scalar / trailing-suffix rules."""
    if sa == sb:
        return sa
    if sa == ():
        return sb
    if sb == ():
        return sa
    small, big = (sa, sb) if len(sa) < len(sb) else (sb, sa)
    if len(small) < len(big) and big[len(big) - len(small):] == small:
        return big
    raise ShapeError(
        f"shapes {sa} and {sb} do not broadcast (exact or trailing-axis only)"
    )


def _reduce_to(grad, shape):
    """Sum a broadcast gradient back down to the operand's shape."""
    if grad.shape == shape:
        return grad
    if shape == ():
        return np.asarray(grad.sum())
    return grad.sum(axis=tuple(range(grad.ndim - len(shape))))


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a.shape, b.shape)

    def vjp(g):
        return _reduce_to(g, a.shape), _reduce_to(g, b.shape)

    return _make(a.data + b.data, (a, b), vjp)


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a.shape, b.shape)

    def vjp(g):
        return _reduce_to(g, a.shape), _reduce_to(-g, b.shape)

    return _make(a.data - b.data, (a, b), vjp)


def mul(a, b) -> Tensor:
    """Elementwise (Hadamard) product."""
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a.shape, b.shape)

    def vjp(g):
        return _reduce_to(g * b.data, a.shape), _reduce_to(g * a.data, b.shape)

    return _make(a.data * b.data, (a, b), vjp)


def scalar_mul(c, x) -> Tensor:
    """Product with a non-differentiable python scalar."""
    c = float(c)
    x = _as_tensor(x)

    def vjp(g):
        return (c * g,)

    return _make(c * x.data, (x,), vjp)


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError(f"matmul needs 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dimensions differ: {a.shape} @ {b.shape}")

    def vjp(g):
        return g @ b.data.T, a.data.T @ g

    return _make(a.data @ b.data, (a, b), vjp)


def tanh(x) -> Tensor:
    x = _as_tensor(x)
    y = np.tanh(x.data)

    def vjp(g):
        return ((1.0 - y * y) * g,)

    return _make(y, (x,), vjp)


def relu(x) -> Tensor:
    x = _as_tensor(x)
    mask = x.data > 0  # derivative at 0 taken as 0

    def vjp(g):
        return (mask * g,)

    return _make(np.where(mask, x.data, 0.0), (x,), vjp)


def exp(x) -> Tensor:
    x = _as_tensor(x)
    with np.errstate(over="ignore"):
        y = np.exp(x.data)  # overflow becomes inf and trips the finite check

    def vjp(g):
        return (y * g,)

    return _make(y, (x,), vjp)


def log(x) -> Tensor:
    x = _as_tensor(x)
    if np.any(x.data <= 0):
        raise DomainError("log of non-positive value")
    y = np.log(x.data)

    def vjp(g):
        return (g / x.data,)

    return _make(y, (x,), vjp)


def l2_normalize(x) -> Tensor:
    """Scale each row of a (b, d) tensor to unit Euclidean norm.

    The gradient keeps the projection term: components of the upstream
    gradient along the normalized row do not pass through.
    """
    x = _as_tensor(x)
    if x.data.ndim != 2:
        raise ShapeError(f"l2_normalize needs a 2-D tensor, got {x.shape}")
    norms = np.sqrt((x.data * x.data).sum(axis=1, keepdims=True))
    if np.any(norms <= 1e-12):
        raise DomainError("l2_normalize: row with near-zero norm")
    y = x.data / norms

    def vjp(g):
        along = (g * y).sum(axis=1, keepdims=True)
        return ((g - y * along) / norms,)

    return _make(y, (x,), vjp)


def _sum(x, axis) -> Tensor:
    x = _as_tensor(x)
    if axis is None:
        y = np.asarray(x.data.sum())

        def vjp(g):
            return (np.full(x.shape, float(g)),)

    else:
        y = x.data.sum(axis=axis)

        def vjp(g):
            return (np.broadcast_to(np.expand_dims(g, axis), x.shape).copy(),)

    return _make(y, (x,), vjp)


def transpose(x) -> Tensor:
    x = _as_tensor(x)
    if x.data.ndim != 2:
        raise ShapeError(f"transpose needs a 2-D tensor, got {x.shape}")

    def vjp(g):
        return (np.ascontiguousarray(g.T),)

    return _make(np.ascontiguousarray(x.data.T), (x,), vjp)


def backward(loss: Tensor) -> dict:
    """Gradients of a scalar loss for every requiring leaf in its graph.

    Returns a dict keyed by leaf ``Tensor`` (identity), valued by a float64
    ndarray of the leaf's shape. Interior nodes are visited exactly once;
    tensors themselves are never mutated.
    """
    if loss.shape != ():
        raise GraphError(f"loss must be scalar, got shape {loss.shape}")
    if not loss.requires_grad:
        raise GraphError("loss is not connected to any tensor requiring grad")

    # iterative post-order DFS; deep graphs would blow the recursion limit
    topo = []
    visited = set()
    stack = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))

    grads = {id(loss): np.ones((), dtype=np.float64)}
    leaves = {}
    for node in reversed(topo):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node._vjp is None:
            leaves[node] = g
            continue
        for parent, pg in zip(node._parents, node._vjp(g)):
            if not parent.requires_grad:
                continue
            acc = grads.get(id(parent))
            grads[id(parent)] = pg.copy() if acc is None else acc + pg
    return leaves
