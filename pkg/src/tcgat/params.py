"""Parameter initialization and named-tensor collection.

Every parameter-holding dataclass in the model exposes its tensors through
:func:`named_tensors`, which walks dataclass fields (nested dataclasses and
lists included) and yields stable dotted names.  Those names are the
contract shared by the optimizer and the checkpoint file.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .autodiff import Tensor, parameter


def xavier(rng, rows, cols):
    """Glorot-uniform float32 matrix."""
    bound = math.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size=(rows, cols)).astype(np.float32)


def weight(rng, rows, cols):
    return parameter(xavier(rng, rows, cols))


def bias(cols, value=0.0):
    return parameter(np.full((1, cols), value, dtype=np.float32))


class DropoutKeys:
    """Hands each dropout site a distinct (seed, counter) pair.

    Counters advance in call order, so a fixed seed and a deterministic
    forward pass reproduce every mask exactly.
    """

    def __init__(self, seed):
        self.seed = int(seed)
        self._next = 0

    def take(self):
        counter = self._next
        self._next += 1
        return self.seed, counter


def named_tensors(obj, prefix=""):
    """Flatten an object's Tensor fields into {dotted name: Tensor}.

    Recurses into nested dataclasses and into lists/tuples of dataclasses
    or tensors; non-tensor leaves (ints, strings) are skipped.
    """
    out = {}
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        key = prefix + f.name
        if isinstance(value, Tensor):
            out[key] = value
        elif dataclasses.is_dataclass(value):
            out.update(named_tensors(value, key + "."))
        elif isinstance(value, (list, tuple)):
            for k, item in enumerate(value):
                if isinstance(item, Tensor):
                    out[f"{key}.{k}"] = item
                elif dataclasses.is_dataclass(item):
                    out.update(named_tensors(item, f"{key}.{k}."))
    return out
