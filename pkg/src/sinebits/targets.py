"""Builtin target functions with known Hölder constants, plus table import."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .core import TargetFunction

BUILTINS = ("x", "norm", "sq", "cosmix", "const")


def builtin_target(name: str, d: int, **params) -> TargetFunction:
    """Construct a builtin target on [0,1]^d.

    x       f = x_1                        mu = 1,            range [0, 1]
    norm    f = |x|_2 / sqrt(d)            mu = 1/sqrt(d),    range [0, 1]
    sq      f = |x|_2^2 / d                mu = 2/sqrt(d),    range [0, 1]
    cosmix  f = 1/2 + mean_i cos(2 pi x_i)/4
                                           mu = pi/(2 sqrt d), range [1/4, 3/4]
    const   f = c                          mu = 0,            range [c, c+1]

    All are Lipschitz (alpha = 1).
    """
    rd = math.sqrt(d)
    if name == "x":
        return TargetFunction(lambda X: X[:, 0].copy(), d, (1.0, 1.0), (0.0, 1.0), "x")
    if name == "norm":
        return TargetFunction(
            lambda X: np.sqrt(np.sum(X * X, axis=1)) / rd, d, (1.0 / rd, 1.0), (0.0, 1.0), "norm"
        )
    if name == "sq":
        return TargetFunction(lambda X: np.sum(X * X, axis=1) / d, d, (2.0 / rd, 1.0), (0.0, 1.0), "sq")
    if name == "cosmix":
        return TargetFunction(
            lambda X: 0.5 + 0.25 * np.mean(np.cos(2 * np.pi * X), axis=1),
            d,
            (math.pi / (2 * rd), 1.0),
            (0.25, 0.75),
            "cosmix",
        )
    if name == "const":
        c = float(params.get("c", 0.5))
        return TargetFunction(
            lambda X: np.full(X.shape[0], c), d, (0.0, 1.0), (c, c + 1.0), "const"
        )
    raise ValueError(f"unknown builtin target {name!r}; choose from {BUILTINS}")


def table_target(path: str | Path) -> TargetFunction:
    """Multilinear interpolant of a tensor-grid CSV with header x1,...,xd,f.

    The range is the exact min/max of the tabulated values, which encloses the
    interpolant.  No Hölder descriptor is attached.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    if not header or header[-1].strip() != "f":
        raise ValueError(f"{path}: last column must be 'f'")
    data = np.asarray(rows, dtype=np.float64)
    d = data.shape[1] - 1
    axes = [np.unique(data[:, i]) for i in range(d)]
    shape = tuple(len(a) for a in axes)
    if int(np.prod(shape)) != data.shape[0]:
        raise ValueError(f"{path}: points do not form a full tensor grid")
    order = np.lexsort(tuple(data[:, i] for i in reversed(range(d))))
    values = data[order, d].reshape(shape)
    interp = RegularGridInterpolator(axes, values, bounds_error=False, fill_value=None)
    lo, hi = float(values.min()), float(values.max())
    return TargetFunction(lambda X: interp(X), d, None, (lo, hi), f"table:{path.name}")
