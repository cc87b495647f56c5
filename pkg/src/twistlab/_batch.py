"""Vectorized quaternion kernels on (..., 4) float arrays.

Internal plumbing for batch sampling and batch word evaluation; the scalar
group arithmetic lives in su2.GroupElement.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    w = a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3]
    x = a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0] + a[..., 2] * b[..., 3] - a[..., 3] * b[..., 2]
    y = a[..., 0] * b[..., 2] + a[..., 2] * b[..., 0] + a[..., 3] * b[..., 1] - a[..., 1] * b[..., 3]
    z = a[..., 0] * b[..., 3] + a[..., 3] * b[..., 0] + a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    return np.stack([w, x, y, z], axis=-1)


def qinv(a: np.ndarray) -> np.ndarray:
    out = -a.copy()
    out[..., 0] = a[..., 0]
    return out


def haar_batch(rng: np.random.Generator, count: int) -> np.ndarray:
    """(count, 4) uniform unit quaternions."""
    v = rng.standard_normal((count, 4))
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / n


def class_batch(rng: np.random.Generator, trace_value: float, count: int) -> np.ndarray:
    """(count, 4) uniform draws from the conjugacy class with given trace."""
    w = 0.5 * trace_value
    r = np.sqrt(max(0.0, 1.0 - w * w))
    axis = rng.standard_normal((count, 3))
    axis /= np.linalg.norm(axis, axis=-1, keepdims=True)
    out = np.empty((count, 4))
    out[:, 0] = w
    out[:, 1:] = r * axis
    return out


def word_product(letters: Sequence[int], values: np.ndarray) -> np.ndarray:
    """Evaluate a word over values[k] of shape (count, 4); identity for the empty word."""
    count = values.shape[1]
    out = np.zeros((count, 4))
    out[:, 0] = 1.0
    for l in letters:
        v = values[l - 1] if l > 0 else qinv(values[-l - 1])
        out = qmul(out, v)
    return out


def word_trace(letters: Sequence[int], values: np.ndarray) -> np.ndarray:
    return 2.0 * word_product(letters, values)[:, 0]
