"""
Marching Squares Utility Module

Extracts iso-lines of a scalar field sampled on a rectilinear grid. Segments are
found cell by cell with the 16-case lookup table (saddles resolved by the cell
average) and then chained into polylines through the grid edges they share.
"""

from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np


class ContourError(Exception):
    """Custom exception for contour extraction errors."""
    pass


Point = Tuple[float, float]
EdgeId = Tuple[Tuple[int, int], Tuple[int, int]]

# Corners: 0 = (i, j), 1 = (i+1, j), 2 = (i+1, j+1), 3 = (i, j+1); corner 0 is the high bit.
# Each entry is (is_saddle, segments) with segments given as pairs of cell edges.
CASE_TABLE = [
    (False, []),
    (False, [((0, 3), (2, 3))]),
    (False, [((1, 2), (2, 3))]),
    (False, [((0, 3), (1, 2))]),
    (False, [((0, 1), (1, 2))]),
    (True, ([((0, 1), (1, 2)), ((0, 3), (2, 3))], [((0, 1), (0, 3)), ((1, 2), (2, 3))])),
    (False, [((0, 1), (2, 3))]),
    (False, [((0, 1), (0, 3))]),
    (False, [((0, 1), (0, 3))]),
    (False, [((0, 1), (2, 3))]),
    (True, ([((0, 1), (0, 3)), ((1, 2), (2, 3))], [((0, 1), (1, 2)), ((0, 3), (2, 3))])),
    (False, [((0, 1), (1, 2))]),
    (False, [((0, 3), (1, 2))]),
    (False, [((1, 2), (2, 3))]),
    (False, [((0, 3), (2, 3))]),
    (False, []),
]

_CORNER_OFFSETS = ((0, 0), (1, 0), (1, 1), (0, 1))


def case_index(samples: Sequence[float]) -> int:
    """Table index of a cell from its four level-shifted corner samples."""
    index = 0
    for value in samples:
        index = (index << 1) | int(value > 0)
    return index


def lerp_point(p0: np.ndarray, p1: np.ndarray, v0: float, v1: float) -> np.ndarray:
    """Point where the linear interpolant between two samples crosses zero."""
    t = min(max(v0 / (v0 - v1), 0.0), 1.0)
    return p0 * (1.0 - t) + t * p1


def extract_isolines(
    values: np.ndarray,
    xs: Sequence[float],
    ys: Sequence[float],
    level: float,
) -> List[List[Point]]:
    """
    Iso-lines of values[i, j] sampled at (xs[i], ys[j]).

    Args:
        values: 2-D array of shape (len(xs), len(ys)); NaN marks missing samples
        xs: First-axis coordinates
        ys: Second-axis coordinates
        level: Iso-value

    Returns:
        Polylines as lists of (x, y) points; closed loops repeat their first point

    Raises:
        ContourError: If the array shape does not match the coordinates
    """
    field = np.asarray(values, dtype=float) - level
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if field.ndim != 2 or field.shape != (xs.size, ys.size):
        raise ContourError(f"Grid of shape {field.shape} does not match axes ({xs.size}, {ys.size})")
    if xs.size < 2 or ys.size < 2:
        return []

    crossings: Dict[EdgeId, Point] = {}
    segments: List[Tuple[EdgeId, EdgeId]] = []

    def crossing(node_a: Tuple[int, int], node_b: Tuple[int, int]) -> EdgeId:
        edge = (node_a, node_b) if node_a <= node_b else (node_b, node_a)
        if edge not in crossings:
            (ia, ja), (ib, jb) = edge
            point = lerp_point(
                np.array((xs[ia], ys[ja])), np.array((xs[ib], ys[jb])),
                field[ia, ja], field[ib, jb],
            )
            crossings[edge] = (float(point[0]), float(point[1]))
        return edge

    for i, j in np.ndindex(xs.size - 1, ys.size - 1):
        nodes = [(i + di, j + dj) for di, dj in _CORNER_OFFSETS]
        samples = [field[node] for node in nodes]
        if not np.all(np.isfinite(samples)):
            continue

        is_saddle, cell_segments = CASE_TABLE[case_index(samples)]
        if is_saddle:
            cell_segments = cell_segments[int(np.mean(samples) > 0)]
        for (a0, a1), (b0, b1) in cell_segments:
            segments.append((crossing(nodes[a0], nodes[a1]), crossing(nodes[b0], nodes[b1])))

    return [[crossings[edge] for edge in chain] for chain in _chain_segments(segments)]


def _chain_segments(segments: List[Tuple[EdgeId, EdgeId]]) -> List[List[EdgeId]]:
    """Join segments sharing an edge crossing into ordered chains."""
    neighbours: Dict[EdgeId, List[int]] = defaultdict(list)
    for index, (start, end) in enumerate(segments):
        neighbours[start].append(index)
        neighbours[end].append(index)

    used = [False] * len(segments)

    def walk(edge: EdgeId) -> List[EdgeId]:
        chain = [edge]
        while True:
            following = [k for k in neighbours[edge] if not used[k]]
            if not following:
                return chain
            used[following[0]] = True
            start, end = segments[following[0]]
            edge = end if start == edge else start
            chain.append(edge)

    chains = []
    # open lines start at grid-boundary (or NaN-boundary) crossings
    for edge in sorted(neighbours, key=lambda e: (len(neighbours[e]) != 1, e)):
        if any(not used[k] for k in neighbours[edge]):
            chains.append(walk(edge))
    return chains
