"""Autodiferenciación en modo inverso sobre arrays de numpy.

Cada operación crea un Tensor que recuerda sus padres y una función que,
dado el gradiente de la salida, devuelve el gradiente de cada padre.
`backward()` recorre el grafo en orden topológico inverso y acumula los
gradientes en las hojas con requires_grad=True.

Example:
    >>> w = Tensor([1.0, 2.0], requires_grad=True)
    >>> loss = (w * Tensor([3.0, 4.0])).sum()
    >>> loss.backward()
    >>> w.grad
    array([3., 4.])
"""

from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ShapeError, UsageError

Number = Union[int, float]
GradFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


class Tensor:
    """Array con gradiente opcional y registro de la operación que lo creó."""

    __array_priority__ = 100.0

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        _parents: Tuple['Tensor', ...] = (),
        _grad_fn: Optional[GradFn] = None,
        name: str = "",
    ):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._parents = _parents
        self._grad_fn = _grad_fn
        self.name = name

    # -------------------------------------------------------------------------
    # Propiedades
    # -------------------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def detach(self) -> 'Tensor':
        return Tensor(self.data.copy())

    def zero_grad(self) -> None:
        self.grad = None

    def grad_or_zeros(self) -> np.ndarray:
        """Gradiente acumulado; ceros si el tensor no está conectado a la pérdida."""
        return np.zeros_like(self.data) if self.grad is None else self.grad

    def __repr__(self) -> str:
        label = f" '{self.name}'" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, requires_grad={self.requires_grad})"

    # -------------------------------------------------------------------------
    # Backward
    # -------------------------------------------------------------------------

    def backward(self) -> None:
        """Propaga d(self)/d(hoja) a todas las hojas con requires_grad."""
        if self.data.size != 1:
            raise UsageError(f"backward() exige una pérdida escalar; forma {self.shape}")
        if not self.requires_grad:
            return

        order = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))

        grads = {id(self): np.ones_like(self.data)}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._grad_fn is None:
                node.grad = g.copy() if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._grad_fn(g)):
                if pg is None or not parent.requires_grad:
                    continue
                if id(parent) in grads:
                    grads[id(parent)] = grads[id(parent)] + pg
                else:
                    grads[id(parent)] = pg

    # -------------------------------------------------------------------------
    # Operadores
    # -------------------------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return mul(self, -1.0)

    def __pow__(self, exponent: Number):
        return power(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return take(self, index)

    def sum(self, axis=None, keepdims: bool = False) -> 'Tensor':
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> 'Tensor':
        return tmean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape) -> 'Tensor':
        return reshape(self, shape[0] if len(shape) == 1 and isinstance(shape[0], tuple) else shape)

    def transpose(self) -> 'Tensor':
        return swap_last(self)

    @property
    def T(self) -> 'Tensor':
        return swap_last(self)


# =============================================================================
# UTILIDADES
# =============================================================================

def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _make(data: np.ndarray, parents: Sequence[Tensor], grad_fn: GradFn) -> Tensor:
    needs = any(p.requires_grad for p in parents)
    if not needs:
        return Tensor(data)
    return Tensor(data, requires_grad=True, _parents=tuple(parents), _grad_fn=grad_fn)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Suma el gradiente sobre los ejes añadidos o expandidos por broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# =============================================================================
# ARITMÉTICA
# =============================================================================

def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return _make(a.data + b.data, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return _make(a.data - b.data, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return _make(
        a.data * b.data,
        (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
    )


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data / b.data
    return _make(
        out,
        (a, b),
        lambda g: (_unbroadcast(g / b.data, a.shape), _unbroadcast(-g * out / b.data, b.shape)),
    )


def power(a, exponent: Number) -> Tensor:
    a = as_tensor(a)
    return _make(a.data ** exponent, (a,), lambda g: (g * exponent * a.data ** (exponent - 1),))


def exp(a) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.data)
    return _make(out, (a,), lambda g: (g * out,))


def log(a) -> Tensor:
    a = as_tensor(a)
    return _make(np.log(a.data), (a,), lambda g: (g / a.data,))


def sqrt(a) -> Tensor:
    a = as_tensor(a)
    out = np.sqrt(a.data)
    return _make(out, (a,), lambda g: (g / (2.0 * out),))


GELU_C = np.sqrt(2.0 / np.pi)


def gelu(a) -> Tensor:
    """GELU (aproximación tanh): suave en cero y gelu(0) = 0."""
    a = as_tensor(a)
    x = a.data
    inner = GELU_C * (x + 0.044715 * x ** 3)
    t = np.tanh(inner)
    out = 0.5 * x * (1.0 + t)

    def grad_fn(g):
        d_inner = GELU_C * (1.0 + 3 * 0.044715 * x ** 2)
        return (g * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t ** 2) * d_inner),)

    return _make(out, (a,), grad_fn)


# =============================================================================
# REDUCCIONES Y FORMA
# =============================================================================

def tsum(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def grad_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _make(out, (a,), grad_fn)


def tmean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    count = a.data.size if axis is None else np.prod([a.shape[i] for i in np.atleast_1d(axis)])
    return tsum(a, axis=axis, keepdims=keepdims) * (1.0 / count)


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    return _make(a.data.reshape(shape), (a,), lambda g: (g.reshape(a.shape),))


def swap_last(a) -> Tensor:
    a = as_tensor(a)
    return _make(np.swapaxes(a.data, -1, -2), (a,), lambda g: (np.swapaxes(g, -1, -2),))


def _is_basic_index(index) -> bool:
    parts = index if isinstance(index, tuple) else (index,)
    return all(isinstance(p, (slice, int)) or p is Ellipsis for p in parts)


def take(a, index) -> Tensor:
    a = as_tensor(a)

    def grad_fn(g):
        full = np.zeros_like(a.data)
        if _is_basic_index(index):
            full[index] += g
        else:
            np.add.at(full, index, g)
        return (full,)

    return _make(a.data[index], (a,), grad_fn)


def matmul(a, b) -> Tensor:
    """Producto matricial con lotes (ndim ≥ 2 en ambos operandos)."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(f"matmul exige ndim ≥ 2: {a.shape} @ {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul incompatible: {a.shape} @ {b.shape}")

    def grad_fn(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return _make(np.matmul(a.data, b.data), (a, b), grad_fn)


def l2_normalize(a, axis: int = -1, eps: float = 1e-24) -> Tensor:
    """a / ‖a‖₂ a lo largo de `axis`."""
    a = as_tensor(a)
    norm = sqrt(tsum(a * a, axis=axis, keepdims=True) + eps)
    return a / norm


# =============================================================================
# CONVOLUCIÓN
# =============================================================================

def conv1d_same(x, weight, bias=None, dilation: int = 1) -> Tensor:
    """Correlación cruzada dilatada con padding de ceros ('same').

    Args:
        x: Entrada L×C_in o B×L×C_in
        weight: Núcleo C_out×C_in×K (K impar)
        bias: Sesgo C_out (opcional)
        dilation: Tasa de dilatación ≥ 1

    Returns:
        Tensor L×C_out o B×L×C_out (misma longitud L).
    """
    x, weight = as_tensor(x), as_tensor(weight)
    squeeze = x.ndim == 2
    xd = x.data[None] if squeeze else x.data
    if xd.ndim != 3 or weight.ndim != 3:
        raise ShapeError(f"conv1d: formas no válidas x={x.shape}, w={weight.shape}")
    c_out, c_in, k = weight.shape
    if xd.shape[2] != c_in:
        raise ShapeError(f"conv1d: C_in={xd.shape[2]} no coincide con el núcleo ({c_in})")
    if k % 2 == 0:
        raise ShapeError(f"conv1d: tamaño de núcleo par ({k})")
    if dilation < 1:
        raise ShapeError(f"conv1d: dilatación {dilation} < 1")

    length = xd.shape[1]
    batch = xd.shape[0]
    pad = dilation * (k - 1) // 2
    xp = np.pad(xd, ((0, 0), (pad, pad), (0, 0)))
    # im2col: columnas (B·L)×(K·C_in) y núcleo (K·C_in)×C_out, un solo matmul
    cols = np.concatenate([xp[:, tap * dilation:tap * dilation + length, :] for tap in range(k)], axis=-1)
    cols = cols.reshape(batch * length, k * c_in)
    w2 = weight.data.transpose(2, 1, 0).reshape(k * c_in, c_out)
    out = (cols @ w2).reshape(batch, length, c_out)
    parents = [x, weight]
    if bias is not None:
        bias = as_tensor(bias)
        out = out + bias.data
        parents.append(bias)

    def grad_fn(g):
        g2 = (g[None] if squeeze else g).reshape(batch * length, c_out)
        gw = (cols.T @ g2).reshape(k, c_in, c_out).transpose(2, 1, 0)
        gcols = (g2 @ w2.T).reshape(batch, length, k, c_in)
        gxp = np.zeros_like(xp)
        for tap in range(k):
            off = tap * dilation
            gxp[:, off:off + length, :] += gcols[:, :, tap, :]
        gx = gxp[:, pad:pad + length, :]
        grads = [gx[0] if squeeze else gx, gw]
        if bias is not None:
            grads.append(g2.sum(axis=0))
        return tuple(grads)

    return _make(out[0] if squeeze else out, parents, grad_fn)
