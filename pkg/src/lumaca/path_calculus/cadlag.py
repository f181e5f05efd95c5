from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from lumaca.exceptions import ConfigurationError, GridMismatchError
from lumaca.timechange.paths import _GridPath

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping

    from lumaca.typing import ArrayLike, FloatArray, Interpolation

__all__ = [
    "CadlagPath",
    "IntegralResult",
    "align",
    "refine",
    "same_grid",
    "union_grid",
]


class CadlagPath(_GridPath):
    """
    Real-valued right-continuous path with left limits on a grid.

    Parameters
    ----------
    grid
        Strictly increasing time points starting at 0.
    values
        Path values at the grid points.
    jumps
        Sparse records ``{grid index: left limit}`` of genuine jumps. Without
        a record the left limit at a grid point is the previous value (step
        paths) or the value itself (linear paths).
    interp
        Interpolation used off the grid.
    """

    __slots__ = ("_jumps",)

    kind = "cadlag"

    def __init__(
            self,
            grid: ArrayLike | list[float],
            values: ArrayLike | list[float],
            jumps: Mapping[int, float] | None = None,
            interp: Interpolation = "step",
    ) -> None:
        super().__init__(grid, values, interp)
        jumps = dict(jumps or {})
        n = len(self)
        for i in jumps:
            if not 0 < int(i) < n:
                msg = f"jump index {i} outside the grid interior (1..{n - 1})"
                raise ConfigurationError(msg, key="jumps")
        self._jumps = {int(i): float(v) for i, v in sorted(jumps.items())}

    @property
    def jumps(self) -> dict[int, float]:
        return dict(self._jumps)

    @property
    def value0(self) -> float:
        return float(self._values[0])

    def left_limit(self, t: ArrayLike) -> FloatArray:
        out = np.array(super().left_limit(t), dtype=np.float64, ndmin=1)
        if self._jumps:
            t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
            pos = np.searchsorted(self._grid, t_arr)
            for k, p in enumerate(pos):
                p = int(p)
                on_grid = (
                    p < len(self) and abs(self._grid[p] - t_arr[k]) <= self._eps
                )
                if on_grid and p in self._jumps:
                    out[k] = self._jumps[p]
        return out if np.ndim(t) else out[0]

    def left_values(self) -> FloatArray:
        """Left limits at every grid point (the initial value at 0)."""
        out = np.empty_like(self._values)
        out[0] = self._values[0]
        if self._interp == "linear":
            out[1:] = self._values[1:]
        else:
            out[1:] = self._values[:-1]
        for i, v in self._jumps.items():
            out[i] = v
        return out

    def to_dict(self) -> dict[str, Any]:
        out = super().to_dict()
        out["jumps"] = [[i, v] for i, v in self._jumps.items()]
        return out

    # ------------------------------------------------------------------ algebra

    @classmethod
    def constant(cls, grid: ArrayLike, value: float = 0.0) -> CadlagPath:
        g = np.asarray(grid, dtype=np.float64)
        return cls(g, np.full(g.shape, float(value)), interp="linear")

    @classmethod
    def from_function(
            cls,
            grid: ArrayLike,
            fn: Callable[[FloatArray], ArrayLike],
            interp: Interpolation = "step",
    ) -> CadlagPath:
        g = np.asarray(grid, dtype=np.float64)
        values = np.broadcast_to(np.asarray(fn(g), dtype=np.float64), g.shape)
        return cls(g, values, interp=interp)

    def with_values(
            self,
            values: ArrayLike,
            jumps: Mapping[int, float] | None = None,
    ) -> CadlagPath:
        return CadlagPath(self._grid, values, jumps, self._interp)

    def apply(self, fn: Callable[[FloatArray], ArrayLike]) -> CadlagPath:
        """Pointwise image ``fn(path)``; jump records are mapped as well."""
        values = np.asarray(fn(self._values), dtype=np.float64)
        jumps = {
            i: float(np.asarray(fn(np.array([v])))[0])
            for i, v in self._jumps.items()
        }
        return CadlagPath(self._grid, values, jumps, self._interp)

    def _combine(
            self,
            other: CadlagPath | float,
            op: Callable[[Any, Any], Any],
    ) -> CadlagPath:
        if isinstance(other, CadlagPath):
            same_grid(self, other)
            left_a, left_b = self.left_values(), other.left_values()
            values = op(self._values, other._values)
            idx = set(self._jumps) | set(other._jumps)
            jumps = {i: float(op(left_a[i], left_b[i])) for i in idx}
            interp: Interpolation = (
                "linear"
                if self._interp == other._interp == "linear"
                else "step"
            )
            return CadlagPath(self._grid, values, jumps, interp)
        values = op(self._values, float(other))
        jumps = {i: float(op(v, float(other))) for i, v in self._jumps.items()}
        return CadlagPath(self._grid, values, jumps, self._interp)

    def __add__(self, other: CadlagPath | float) -> CadlagPath:
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other: CadlagPath | float) -> CadlagPath:
        return self._combine(other, np.subtract)

    def __rsub__(self, other: float) -> CadlagPath:
        return self._combine(other, lambda a, b: np.subtract(b, a))

    def __mul__(self, other: CadlagPath | float) -> CadlagPath:
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self) -> CadlagPath:
        return self * -1.0


@dataclass(frozen=True)
class IntegralResult:
    """
    Running forward sum ``t -> int_0^t H dZ``.

    Attributes
    ----------
    path
        The running integral; starts at 0.
    scheme_step
        Largest grid cell of the sum.
    """

    path: CadlagPath
    scheme_step: float

    def to_dict(self) -> dict[str, Any]:
        return {"path": self.path.to_dict(), "scheme_step": self.scheme_step}


# ---------------------------------------------------------------------- grids


def same_grid(a: _GridPath, b: _GridPath) -> None:
    """Raise ``GridMismatchError`` unless both paths share their grid."""
    if len(a) != len(b) or not np.array_equal(a.grid, b.grid):
        msg = (
            f"paths live on different grids ({len(a)} vs {len(b)} points, "
            f"horizons {a.horizon:g} vs {b.horizon:g}); refine to the union "
            "grid first"
        )
        raise GridMismatchError(msg)


def union_grid(*grids: ArrayLike, rtol: float = 1e-12) -> FloatArray:
    """
    Sorted union of grids; points closer than rounding noise are merged.
    """
    if not grids:
        msg = "union_grid needs at least one grid"
        raise ConfigurationError(msg)
    merged = np.unique(np.concatenate([np.asarray(g, np.float64) for g in grids]))
    if merged.size < 2:
        return merged
    scale = max(1.0, float(merged[-1]))
    keep = np.concatenate([[True], np.diff(merged) > rtol * scale])
    return merged[keep]


def refine(path: CadlagPath, grid: ArrayLike) -> CadlagPath:
    """
    Sample ``path`` on a finer ``grid`` under its own interpolation.

    Jump records are carried to the new grid point at the same time.
    """
    g = np.asarray(grid, dtype=np.float64)
    if len(g) == len(path) and np.array_equal(g, path.grid):
        return path
    values = path(g)
    jumps: dict[int, float] = {}
    if path._jumps:
        for i, left in path._jumps.items():
            pos = int(np.searchsorted(g, path.grid[i] - path._eps))
            if pos < g.size and abs(g[pos] - path.grid[i]) <= path._eps:
                jumps[pos] = left
    return CadlagPath(g, values, jumps, path.interp)


def align(h: CadlagPath, z: CadlagPath) -> tuple[CadlagPath, CadlagPath]:
    """Refine two paths to their union grid over the common horizon."""
    if len(h) == len(z) and np.array_equal(h.grid, z.grid):
        return h, z
    top = min(h.horizon, z.horizon)
    g = union_grid(h.grid, z.grid)
    g = g[g <= top * (1.0 + 1e-12)]
    return refine(h, g), refine(z, g)
