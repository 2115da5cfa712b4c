"""Scan-order construction for rectangular grids.

Five curve families linearize a height x width grid into a visiting
sequence: raster (row-major), continuous (boustrophedon), local (tiled
raster), hilbert, and peano. Every order is a bijection between cells and
sequence positions; `ScanOrder` stores it in both directions and can be
serialized to a plain-text format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

FAMILIES = ("raster", "continuous", "local", "hilbert", "peano")

DEFAULT_WINDOW = 8


class GridShape(NamedTuple):
    """Grid dimensions: `height` rows by `width` columns."""

    height: int
    width: int

    @property
    def cells(self) -> int:
        return self.height * self.width


def as_shape(shape) -> GridShape:
    """Coerce an (height, width) pair into a validated GridShape."""
    h, w = shape
    if h != int(h) or w != int(w):
        raise ValueError(f"grid sides must be integers, got {h}x{w}")
    h, w = int(h), int(w)
    if h < 1 or w < 1:
        raise ValueError(f"grid sides must be >= 1, got {h}x{w}")
    return GridShape(h, w)


@dataclass(frozen=True, eq=False)
class ScanOrder:
    """A bijective visiting order over a grid.

    `cells[k]` is the flat index (row * width + col) of the cell visited at
    sequence position k. The inverse permutation is available as `ranks`.
    Instances are immutable; the backing arrays are marked read-only.
    """

    shape: GridShape
    family: str
    cells: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        h, w = self.shape
        cells = np.ascontiguousarray(self.cells, dtype=np.int64)
        if cells.shape != (h * w,):
            raise ValueError(f"expected {h * w} cells, got {cells.shape}")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    @cached_property
    def ranks(self) -> np.ndarray:
        """Sequence position of each flat cell index (inverse of `cells`)."""
        ranks = np.empty(self.shape.cells, dtype=np.int64)
        ranks[self.cells] = np.arange(self.shape.cells, dtype=np.int64)
        ranks.flags.writeable = False
        return ranks

    def forward(self, row: int, col: int) -> int:
        """Sequence position assigned to the cell at (row, col)."""
        h, w = self.shape
        if not (0 <= row < h and 0 <= col < w):
            raise IndexError(f"cell ({row}, {col}) outside {h}x{w} grid")
        return int(self.ranks[row * w + col])

    def inverse(self, index: int) -> tuple[int, int]:
        """Cell (row, col) visited at the given sequence position."""
        n = self.shape.cells
        if not 0 <= index < n:
            raise IndexError(f"index {index} outside [0, {n})")
        flat = int(self.cells[index])
        return divmod(flat, self.shape.width)

    def coords(self) -> np.ndarray:
        """(N, 2) array of (row, col) pairs in visiting order."""
        rows, cols = np.divmod(self.cells, self.shape.width)
        return np.column_stack((rows, cols))

    def reversed(self) -> "ScanOrder":
        """The same path walked back to front."""
        params = dict(self.params)
        params["reverse"] = not params.get("reverse", False)
        return ScanOrder(self.shape, self.family, self.cells[::-1], params)

    def label(self) -> str:
        """Short human-readable identity, e.g. ``hilbert-64x64``."""
        h, w = self.shape
        extra = "".join(
            f"-{k}{v:d}" if isinstance(v, bool) else f"-{k}{v}"
            for k, v in sorted(self.params.items())
        )
        return f"{self.family}-{h}x{w}{extra}"

    def to_text(self) -> str:
        """Serialize as ``family height width [key=value ...]`` plus one
        ``index row col`` line per cell, sorted by index."""
        h, w = self.shape
        head = f"{self.family} {h} {w}"
        if self.params:
            head += "".join(
                f" {k}={int(v) if isinstance(v, bool) else v}"
                for k, v in sorted(self.params.items())
            )
        rows, cols = np.divmod(self.cells, w)
        lines = [head]
        lines.extend(
            f"{k} {r} {c}" for k, (r, c) in enumerate(zip(rows.tolist(), cols.tolist()))
        )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ScanOrder":
        """Parse the format produced by `to_text`."""
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty scan-order text")
        head = lines[0].split()
        if len(head) < 3:
            raise ValueError(f"bad header line: {lines[0]!r}")
        family = head[0]
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        try:
            shape = as_shape((int(head[1]), int(head[2])))
        except ValueError as exc:
            raise ValueError(f"bad header dimensions: {lines[0]!r} ({exc})") from None
        params = {}
        for token in head[3:]:
            key, _, value = token.partition("=")
            if not _:
                raise ValueError(f"bad parameter token {token!r}")
            params[key] = int(value)
        if "reverse" in params:
            params["reverse"] = bool(params["reverse"])
        n = shape.cells
        if len(lines) - 1 != n:
            raise ValueError(f"expected {n} cell lines, got {len(lines) - 1}")
        cells = np.empty(n, dtype=np.int64)
        seen = np.zeros(n, dtype=bool)
        h, w = shape
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise ValueError(f"bad cell line: {ln!r}")
            k, r, c = (int(p) for p in parts)
            if not (0 <= k < n and 0 <= r < h and 0 <= c < w):
                raise ValueError(f"out-of-range cell line: {ln!r}")
            if seen[k]:
                raise ValueError(f"duplicate index {k}")
            seen[k] = True
            cells[k] = r * w + c
        if len(np.unique(cells)) != n:
            raise ValueError("cell lines do not form a bijection")
        return cls(shape, family, cells, params)


def raster_order(shape) -> ScanOrder:
    """Row-major order: index(r, c) = r * width + c."""
    shape = as_shape(shape)
    return ScanOrder(shape, "raster", np.arange(shape.cells, dtype=np.int64))


def continuous_order(shape) -> ScanOrder:
    """Boustrophedon order: even rows left-to-right, odd rows right-to-left.

    Consecutive cells are always Manhattan-distance 1 apart, on any shape.
    """
    shape = as_shape(shape)
    h, w = shape
    grid = np.arange(shape.cells, dtype=np.int64).reshape(h, w)
    grid[1::2] = grid[1::2, ::-1]
    return ScanOrder(shape, "continuous", grid.ravel())


def local_order(shape, window: int = DEFAULT_WINDOW) -> ScanOrder:
    """Window x window tiles visited in raster order; raster inside each tile.

    Partial tiles at the right/bottom edges are clipped. A window at least
    as large as both sides degenerates to the plain raster order.
    """
    shape = as_shape(shape)
    window = int(window)
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    h, w = shape
    rows, cols = np.divmod(np.arange(shape.cells, dtype=np.int64), w)
    # lexsort uses the last key as primary: tile row, tile col, then in-tile.
    cells = np.lexsort((cols % window, rows % window, cols // window, rows // window))
    return ScanOrder(shape, "local", cells.astype(np.int64), {"window": window})


def hilbert_order(shape) -> ScanOrder:
    """Hilbert order: recursive quadrant subdivision.

    Square power-of-two grids use the classic construction (unit Manhattan
    steps throughout, entering at (0, 0) and exiting at (0, width-1)). Other
    shapes use a generalized rectangle-splitting construction that stays
    bijective and keeps every step's Manhattan length at most 2 (exactly 1
    whenever all recursive splits are even).
    """
    shape = as_shape(shape)
    h, w = shape
    if h == w and (h & (h - 1)) == 0:
        rows, cols = _hilbert_square(h)
    else:
        rows, cols = _gilbert_rect(h, w)
    return ScanOrder(shape, "hilbert", rows * w + cols)


def peano_order(shape) -> ScanOrder:
    """Peano order: recursive 3x3 serpentine subdivision.

    Square power-of-three grids get the classic construction (unit steps,
    entering at (0, 0) and exiting at (height-1, width-1)). Any other shape
    is carved out of the smallest enclosing power-of-three square: generate
    the square's order, drop out-of-range cells, renumber compactly. The
    result is always bijective; the unit-step guarantee holds only on exact
    power-of-three squares.
    """
    shape = as_shape(shape)
    h, w = shape
    side = 1
    while side < max(h, w):
        side *= 3
    rows, cols = _peano_square(side)
    if side != h or side != w:
        keep = (rows < h) & (cols < w)
        rows, cols = rows[keep], cols[keep]
    return ScanOrder(shape, "peano", rows * w + cols)


_MAKERS = {
    "raster": raster_order,
    "continuous": continuous_order,
    "local": local_order,
    "hilbert": hilbert_order,
    "peano": peano_order,
}


def make_order(family: str, shape, window: int | None = None,
               reverse: bool = False) -> ScanOrder:
    """Construct an order by family name; `window` applies to local only."""
    if family not in _MAKERS:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    if family == "local":
        order = local_order(shape, DEFAULT_WINDOW if window is None else window)
    else:
        if window is not None:
            raise ValueError(f"family {family!r} takes no window parameter")
        order = _MAKERS[family](shape)
    return order.reversed() if reverse else order


def apply_order(order: ScanOrder, values) -> np.ndarray:
    """Read a grid of values out along the scan: output[k] = values[inverse(k)]."""
    values = np.asarray(values)
    if values.shape != tuple(order.shape):
        raise ValueError(f"field shape {values.shape} != order shape {tuple(order.shape)}")
    return values.reshape(-1)[order.cells]


def invert_order(order: ScanOrder, sequence) -> np.ndarray:
    """Scatter a scanned sequence back onto the grid; inverse of `apply_order`."""
    sequence = np.asarray(sequence)
    n = order.shape.cells
    if sequence.shape != (n,):
        raise ValueError(f"sequence length {sequence.shape} != cell count {n}")
    out = np.empty(n, dtype=sequence.dtype)
    out[order.cells] = sequence
    return out.reshape(tuple(order.shape))


@lru_cache(maxsize=4)
def _hilbert_square(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) in visiting order for the classic curve on an n x n grid,
    n a power of two. Vectorized bit-twiddling over all positions at once."""
    total = n * n
    t = np.arange(total, dtype=np.int64)
    x = np.zeros(total, dtype=np.int64)
    y = np.zeros(total, dtype=np.int64)
    s = 1
    while s < n:
        rx = 1 & (t >> 1)
        ry = 1 & (t ^ rx)
        # rotate/reflect the quadrant contents accumulated so far
        plain = ry == 0
        flip = plain & (rx == 1)
        x[flip] = s - 1 - x[flip]
        y[flip] = s - 1 - y[flip]
        tmp = x[plain]
        x[plain] = y[plain]
        y[plain] = tmp
        x += s * rx
        y += s * ry
        t >>= 2
        s <<= 1
    y.flags.writeable = False
    x.flags.writeable = False
    return y, x  # x runs along columns, y along rows


def _sgn(v: int) -> int:
    return -1 if v < 0 else (1 if v > 0 else 0)


def _gilbert_rect(h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) in visiting order for the generalized construction on an
    arbitrary h x w rectangle.

    Recursive halving along the longer axis with orientation bookkeeping,
    run iteratively with an explicit stack; straight single-file stretches
    are emitted as whole runs. Steps are unit whenever the halving is even
    and never exceed Manhattan length 2.
    """
    total = h * w
    rows = np.empty(total, dtype=np.int64)
    cols = np.empty(total, dtype=np.int64)
    pos = 0
    # x runs along columns, y along rows; the major axis gets the longer side.
    if w >= h:
        stack = [(0, 0, w, 0, 0, h)]
    else:
        stack = [(0, 0, 0, h, w, 0)]
    while stack:
        x, y, ax, ay, bx, by = stack.pop()
        width = abs(ax + ay)
        height = abs(bx + by)
        dax, day = _sgn(ax), _sgn(ay)
        dbx, dby = _sgn(bx), _sgn(by)
        if height == 1:
            steps = np.arange(width, dtype=np.int64)
            cols[pos:pos + width] = x + dax * steps
            rows[pos:pos + width] = y + day * steps
            pos += width
            continue
        if width == 1:
            steps = np.arange(height, dtype=np.int64)
            cols[pos:pos + height] = x + dbx * steps
            rows[pos:pos + height] = y + dby * steps
            pos += height
            continue
        ax2, ay2 = ax // 2, ay // 2
        bx2, by2 = bx // 2, by // 2
        if 2 * width > 3 * height:
            if (abs(ax2 + ay2) % 2) and (width > 2):
                ax2, ay2 = ax2 + dax, ay2 + day  # prefer even splits
            # halve along the major axis only
            stack.append((x + ax2, y + ay2, ax - ax2, ay - ay2, bx, by))
            stack.append((x, y, ax2, ay2, bx, by))
        else:
            if (abs(bx2 + by2) % 2) and (height > 2):
                bx2, by2 = bx2 + dbx, by2 + dby  # prefer even splits
            # one step sideways, one long stretch, one step back
            stack.append((x + (ax - dax) + (bx2 - dbx), y + (ay - day) + (by2 - dby),
                          -bx2, -by2, -(ax - ax2), -(ay - ay2)))
            stack.append((x + bx2, y + by2, ax, ay, bx - bx2, by - by2))
            stack.append((x, y, bx2, by2, ax2, ay2))
    return rows, cols


@lru_cache(maxsize=4)
def _peano_square(side: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) in visiting order for the classic curve on a side x side
    grid, side a power of three.

    Digit algorithm: positions are read off base-9 digits of the sequence
    index, most significant first. Each digit picks a 3x3 block along the
    serpentine (down the first block column, up the second, down the third);
    mirror states accumulate so each sub-block is the reflected copy the
    construction demands.
    """
    levels = 0
    n = 1
    while n < side:
        n *= 3
        levels += 1
    total = side * side
    t = np.arange(total, dtype=np.int64)
    rows = np.zeros(total, dtype=np.int64)
    cols = np.zeros(total, dtype=np.int64)
    flip_r = np.zeros(total, dtype=bool)
    flip_c = np.zeros(total, dtype=bool)
    for level in range(levels):
        shift = 9 ** (levels - 1 - level)
        s = (t // shift) % 9
        j = s // 3
        i = s % 3
        j_odd = (j & 1) == 1
        i = np.where(j_odd, 2 - i, i)
        rows = rows * 3 + np.where(flip_r, 2 - i, i)
        cols = cols * 3 + np.where(flip_c, 2 - j, j)
        flip_r ^= j_odd
        flip_c ^= (i & 1) == 1
    rows.flags.writeable = False
    cols.flags.writeable = False
    return rows, cols
