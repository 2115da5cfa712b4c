"""Order-construction tests.

The Hilbert and Peano constructions are checked against independent
recursive references (quadrant and nine-block recursions written directly
from the subdivision rules), and the rectangle generalization against a
straight transcription of the recursive splitting procedure.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractalscan.curves import (
    DEFAULT_WINDOW,
    FAMILIES,
    GridShape,
    ScanOrder,
    apply_order,
    as_shape,
    continuous_order,
    hilbert_order,
    invert_order,
    local_order,
    make_order,
    peano_order,
    raster_order,
)


# ----------------------------------------------------------------- oracles

def hilbert_rank_grid(n):
    """Rank of each cell under the quadrant recursion: the top-left quarter
    is the transposed (n/2)-curve, the left/bottom quarters follow
    unchanged, and the top-right quarter is the anti-transpose."""
    if n == 1:
        return np.zeros((1, 1), dtype=np.int64)
    m = n // 2
    s = hilbert_rank_grid(m)
    q = m * m
    top_left = s.T
    bottom_left = s + q
    bottom_right = s + 2 * q
    top_right = 3 * q + s[::-1, ::-1].T
    return np.block([[top_left, top_right], [bottom_left, bottom_right]])


# meta-order of the nine sub-blocks: down the first column, up the second,
# down the third
_PEANO_META = np.array([[0, 5, 6], [1, 4, 7], [2, 3, 8]])


def peano_rank_grid(side):
    """Rank of each cell under the nine-block recursion; a block's rows are
    mirrored when its block-column is odd, columns when its block-row is."""
    if side == 1:
        return np.zeros((1, 1), dtype=np.int64)
    m = side // 3
    s = peano_rank_grid(m)
    out = np.empty((side, side), dtype=np.int64)
    for br in range(3):
        for bc in range(3):
            block = s
            if bc % 2 == 1:
                block = block[::-1, :]
            if br % 2 == 1:
                block = block[:, ::-1]
            out[br * m:(br + 1) * m, bc * m:(bc + 1) * m] = \
                _PEANO_META[br, bc] * m * m + block
    return out


def gilbert_ref(width, height):
    """Recursive generalized-rectangle traversal, yielding (x, y).

    Transcribed directly from the recursive splitting rules: halve the major
    axis when the rectangle is long, otherwise peel three sub-blocks with
    rotated orientations; odd split sizes are nudged toward even.
    """
    if width >= height:
        yield from _gilbert2d(0, 0, width, 0, 0, height)
    else:
        yield from _gilbert2d(0, 0, 0, height, width, 0)


def _gilbert2d(x, y, ax, ay, bx, by):
    w = abs(ax + ay)
    h = abs(bx + by)
    dax, day = np.sign(ax), np.sign(ay)
    dbx, dby = np.sign(bx), np.sign(by)

    if h == 1:
        for _ in range(w):
            yield (x, y)
            x, y = x + dax, y + day
        return
    if w == 1:
        for _ in range(h):
            yield (x, y)
            x, y = x + dbx, y + dby
        return

    ax2, ay2 = ax // 2, ay // 2
    bx2, by2 = bx // 2, by // 2
    w2 = abs(ax2 + ay2)
    h2 = abs(bx2 + by2)

    if 2 * w > 3 * h:
        if w2 % 2 and w > 2:
            ax2, ay2 = ax2 + dax, ay2 + day
        yield from _gilbert2d(x, y, ax2, ay2, bx, by)
        yield from _gilbert2d(x + ax2, y + ay2, ax - ax2, ay - ay2, bx, by)
    else:
        if h2 % 2 and h > 2:
            bx2, by2 = bx2 + dbx, by2 + dby
        yield from _gilbert2d(x, y, bx2, by2, ax2, ay2)
        yield from _gilbert2d(x + bx2, y + by2, ax, ay, bx - bx2, by - by2)
        yield from _gilbert2d(x + (ax - dax) + (bx2 - dbx),
                              y + (ay - day) + (by2 - dby),
                              -bx2, -by2, -(ax - ax2), -(ay - ay2))


def rank_grid_of(order):
    return order.ranks.reshape(tuple(order.shape))


# ------------------------------------------------------- canonical layouts

def test_hilbert_2x2_canonical():
    order = hilbert_order((2, 2))
    assert order.coords().tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]


def test_hilbert_4x4_canonical():
    # transposed sub-curve in the top-left, anti-transposed top-right
    expected = [
        (0, 0), (0, 1), (1, 1), (1, 0),
        (2, 0), (3, 0), (3, 1), (2, 1),
        (2, 2), (3, 2), (3, 3), (2, 3),
        (1, 3), (1, 2), (0, 2), (0, 3),
    ]
    assert [tuple(rc) for rc in hilbert_order((4, 4)).coords()] == expected


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64, 128])
def test_hilbert_matches_quadrant_recursion(n):
    order = hilbert_order((n, n))
    assert np.array_equal(rank_grid_of(order), hilbert_rank_grid(n))


def test_hilbert_endpoints():
    for n in (2, 4, 16, 64):
        coords = hilbert_order((n, n)).coords()
        assert tuple(coords[0]) == (0, 0)
        assert tuple(coords[-1]) == (0, n - 1)


def test_peano_3x3_canonical():
    expected = [(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (0, 1),
                (0, 2), (1, 2), (2, 2)]
    assert [tuple(rc) for rc in peano_order((3, 3)).coords()] == expected


@pytest.mark.parametrize("side", [3, 9, 27, 81])
def test_peano_matches_block_recursion(side):
    order = peano_order((side, side))
    assert np.array_equal(rank_grid_of(order), peano_rank_grid(side))


def test_peano_endpoints():
    for side in (3, 9, 27):
        coords = peano_order((side, side)).coords()
        assert tuple(coords[0]) == (0, 0)
        assert tuple(coords[-1]) == (side - 1, side - 1)


def test_hilbert_self_similarity_first_quarter():
    # the first quarter of the visit fills exactly the top-left quadrant
    for n in (4, 8, 32):
        coords = hilbert_order((n, n)).coords()
        prefix = coords[: (n * n) // 4]
        assert prefix[:, 0].max() == n // 2 - 1
        assert prefix[:, 1].max() == n // 2 - 1


def test_peano_self_similarity_first_ninth():
    for side in (9, 27):
        coords = peano_order((side, side)).coords()
        prefix = coords[: (side * side) // 9]
        assert prefix[:, 0].max() == side // 3 - 1
        assert prefix[:, 1].max() == side // 3 - 1


# -------------------------------------------------- rectangle construction

@pytest.mark.parametrize("shape", [
    (2, 3), (3, 2), (5, 7), (6, 4), (13, 9), (16, 48), (48, 16),
    (1, 17), (17, 1), (31, 57), (40, 40),
])
def test_rect_hilbert_matches_recursive_reference(shape):
    h, w = shape
    got = [tuple(rc) for rc in hilbert_order(shape).coords()]
    want = [(y, x) for (x, y) in gilbert_ref(w, h)]
    assert got == want


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64])
def test_rect_construction_agrees_with_bit_interleave_on_dyadic(n):
    # two independent routes to the same square curve
    from fractalscan.curves import _gilbert_rect, _hilbert_square
    rows, cols = _hilbert_square(n)
    g_rows, g_cols = _gilbert_rect(n, n)
    assert np.array_equal(rows, g_rows)
    assert np.array_equal(cols, g_cols)


def test_rect_hilbert_step_bound():
    rng = np.random.default_rng(5)
    for _ in range(25):
        h = int(rng.integers(1, 50))
        w = int(rng.integers(1, 50))
        coords = hilbert_order((h, w)).coords()
        if len(coords) > 1:
            steps = np.abs(np.diff(coords, axis=0)).sum(axis=1)
            assert steps.max() <= 2


def test_rect_hilbert_unit_step_on_even_splits():
    for shape in [(2, 4), (4, 8), (8, 4), (4, 12), (12, 4), (16, 8)]:
        coords = hilbert_order(shape).coords()
        steps = np.abs(np.diff(coords, axis=0)).sum(axis=1)
        assert steps.max() == 1, shape


# ------------------------------------------------------- simple families

def test_raster_order_layout():
    order = raster_order((3, 2))
    assert order.coords().tolist() == [[0, 0], [0, 1], [1, 0], [1, 1], [2, 0], [2, 1]]
    assert order.forward(2, 1) == 5


def test_raster_discontinuity_counts():
    # exactly H-1 wrap steps of Manhattan length W, none larger
    for h, w in [(3, 5), (4, 2), (7, 7)]:
        coords = raster_order((h, w)).coords()
        steps = np.abs(np.diff(coords, axis=0)).sum(axis=1)
        assert steps.max() == (w if w >= 2 else 1)
        assert int((steps == w).sum()) == (h - 1 if w >= 2 else 0)


def test_continuous_order_serpentine():
    order = continuous_order((2, 3))
    assert order.coords().tolist() == [[0, 0], [0, 1], [0, 2], [1, 2], [1, 1], [1, 0]]
    assert order.forward(1, 0) == 5


def test_local_order_tiles():
    order = local_order((4, 4), window=2)
    assert [tuple(rc) for rc in order.coords()[:4]] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_local_order_window_covers_grid_degenerates_to_raster():
    assert np.array_equal(local_order((4, 4), window=4).cells,
                          raster_order((4, 4)).cells)


def test_local_order_clipped_tiles():
    assert local_order((3, 3), window=2).forward(2, 2) == 8


def test_make_order_dispatch_and_validation():
    assert make_order("hilbert", (4, 4)).family == "hilbert"
    assert make_order("local", (8, 8), window=2).params == {"window": 2}
    with pytest.raises(ValueError):
        make_order("zigzag", (4, 4))
    with pytest.raises(ValueError):
        make_order("hilbert", (4, 4), window=2)  # window is local-only
    with pytest.raises(ValueError):
        make_order("local", (4, 4), window=0)
    with pytest.raises(ValueError):
        make_order("raster", (0, 4))


def test_reversed_round_trip():
    order = make_order("peano", (9, 9))
    back = order.reversed()
    assert np.array_equal(back.cells, order.cells[::-1])
    assert back.params.get("reverse") is True
    assert np.array_equal(back.reversed().cells, order.cells)


# ------------------------------------------------------------- properties

@st.composite
def shapes_and_orders(draw):
    h = draw(st.integers(min_value=1, max_value=32))
    w = draw(st.integers(min_value=1, max_value=32))
    family = draw(st.sampled_from(FAMILIES))
    window = draw(st.integers(min_value=1, max_value=9)) if family == "local" else None
    return make_order(family, (h, w), window=window)


@given(shapes_and_orders())
@settings(max_examples=80, deadline=None)
def test_every_order_is_a_permutation(order):
    n = order.shape.cells
    assert order.cells.shape == (n,)
    assert np.array_equal(np.sort(order.cells), np.arange(n))
    # ranks is the inverse permutation
    assert np.array_equal(order.cells[order.ranks], np.arange(n))


@given(shapes_and_orders())
@settings(max_examples=40, deadline=None)
def test_forward_inverse_round_trip(order):
    h, w = order.shape
    for idx in (0, order.shape.cells - 1, order.shape.cells // 2):
        r, c = order.inverse(idx)
        assert 0 <= r < h and 0 <= c < w
        assert order.forward(r, c) == idx


@given(st.integers(min_value=1, max_value=40), st.integers(min_value=1, max_value=40))
@settings(max_examples=50, deadline=None)
def test_continuous_is_always_unit_step(h, w):
    coords = continuous_order((h, w)).coords()
    if len(coords) > 1:
        steps = np.abs(np.diff(coords, axis=0)).sum(axis=1)
        assert steps.max() == 1


@given(shapes_and_orders())
@settings(max_examples=40, deadline=None)
def test_apply_then_invert_is_identity(order):
    rng = np.random.default_rng(0)
    field = rng.standard_normal(tuple(order.shape))
    seq = apply_order(order, field)
    assert np.array_equal(invert_order(order, seq), field)
    assert sorted(seq.tolist()) == sorted(field.reshape(-1).tolist())


def test_apply_order_hilbert_2x2_example():
    field = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert apply_order(make_order("hilbert", (2, 2)), field).tolist() == [1, 3, 4, 2]
    assert invert_order(make_order("hilbert", (2, 2)), [1, 3, 4, 2]).tolist() == \
        [[1, 2], [3, 4]]


def test_apply_order_shape_mismatch():
    with pytest.raises(ValueError):
        apply_order(make_order("raster", (2, 2)), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        invert_order(make_order("raster", (2, 2)), [1.0, 2.0, 3.0])


def test_orders_are_deterministic_and_immutable():
    a = make_order("hilbert", (16, 16))
    b = make_order("hilbert", (16, 16))
    assert np.array_equal(a.cells, b.cells)
    with pytest.raises(ValueError):
        a.cells[0] = 5


# ------------------------------------------------------------ serialization

@given(shapes_and_orders())
@settings(max_examples=30, deadline=None)
def test_text_round_trip(order):
    back = ScanOrder.from_text(order.to_text())
    assert back.family == order.family
    assert back.shape == order.shape
    assert back.params == order.params
    assert np.array_equal(back.cells, order.cells)
    assert back.to_text() == order.to_text()


def test_from_text_rejects_malformed_input():
    good = make_order("raster", (2, 2)).to_text()
    bad_cases = [
        "",                                     # empty
        "raster 2\n0 0 0\n",                    # short header
        "mystery 2 2\n" + good.split("\n", 1)[1],   # unknown family
        good.replace("0 0 0", "0 0 9"),        # out-of-range column
        good.replace("3 1 1", "3 0 0"),        # duplicate cell
        good.rsplit("\n", 2)[0] + "\n",        # missing row
        good + "4 0 0\n",                       # extra row
        good.replace("1 0 1", "x 0 1"),        # junk token
    ]
    for text in bad_cases:
        with pytest.raises(ValueError):
            ScanOrder.from_text(text)


def test_label_and_params_in_text():
    order = make_order("local", (4, 6), window=3)
    assert order.label() == "local-4x6-window3"
    assert "window=3" in order.to_text().split("\n", 1)[0]
    rev = make_order("hilbert", (4, 4)).reversed()
    assert "reverse" in rev.label()


def test_as_shape_validation():
    assert as_shape((3, 4)) == GridShape(3, 4)
    assert as_shape(GridShape(2, 2)).cells == 4
    for bad in [(0, 3), (3, 0), (-1, 2), (2.5, 2), "4x4"]:
        with pytest.raises((ValueError, TypeError)):
            as_shape(bad)


def test_default_window_is_applied():
    order = make_order("local", (32, 32))
    assert order.params == {"window": DEFAULT_WINDOW}
