"""Greedy zipper-style strip extraction over a quantized mesh.

A strip is an ordered run of vertex keys; each step across the frontier
edge (the last two keys) appends one new vertex for triangles (stride 1)
or a swapped pair for quads (stride 2).  Seeds are the lowest unvisited
faces under a coordinate order, islands are traversed bottom-to-top along
the configured vertical axis, and strips never leave their island.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .quantize import GridCoord, QuantizedMesh, Transform

_AXIS = {"x": 0, "y": 1, "z": 2}


def key_order(coord: GridCoord, up_axis: str = "y"):
    """Sort key for grid coordinates: vertical axis first, then the other two."""
    u = _AXIS[up_axis]
    return (coord[u], coord[(u + 1) % 3], coord[(u + 2) % 3])


def vertex_ranks(q: QuantizedMesh, up_axis: str = "y") -> list[int]:
    """Rank of each vertex key under :func:`key_order` (0 = lowest)."""
    order = sorted(range(len(q.vertex_keys)), key=lambda i: key_order(q.vertex_keys[i], up_axis))
    ranks = [0] * len(q.vertex_keys)
    for r, i in enumerate(order):
        ranks[i] = r
    return ranks


def _face_sort_keys(q: QuantizedMesh, ranks: list[int]):
    return [tuple(sorted(ranks[v] for v in face)) for face in q.faces]


def seed_order(q: QuantizedMesh, island: int | None = None, up_axis: str = "y") -> list[int]:
    """Face indices ordered by their sorted vertex-rank tuples (lowest first)."""
    ranks = vertex_ranks(q, up_axis)
    fkeys = _face_sort_keys(q, ranks)
    if island is None:
        ids = range(len(q.faces))
    else:
        if q.island_of_face is None:
            if island != 0:
                raise ValueError(f"island {island} does not exist")
            ids = range(len(q.faces))
        else:
            ids = [i for i, l in enumerate(q.island_of_face) if l == island]
            if not ids:
                raise ValueError(f"island {island} does not exist")
    return sorted(ids, key=lambda i: fkeys[i])


@dataclass
class Strip:
    keys: list[int]
    island: int
    stride: int


@dataclass
class StripSet:
    strips: list[Strip]
    vertex_keys: list[GridCoord]
    islands_in_order: list[int]
    stride: int
    transform: Transform

    def face_count(self) -> int:
        return sum(len(strip_faces(s)) for s in self.strips)


def _rotate_min_first(face: tuple[int, ...], ranks: list[int]) -> list[int]:
    k = min(range(len(face)), key=lambda i: ranks[face[i]])
    return [face[(k + i) % len(face)] for i in range(len(face))]


def _edge_key(a: int, b: int):
    return (a, b) if a < b else (b, a)


def _build_edge_map(q: QuantizedMesh):
    e2f: dict[tuple[int, int], list[int]] = defaultdict(list)
    for fi, face in enumerate(q.faces):
        n = len(face)
        for k in range(n):
            e2f[_edge_key(face[k], face[(k + 1) % n])].append(fi)
    return e2f


def _quad_new_pair(face: tuple[int, ...], e0: int, e1: int) -> tuple[int, int]:
    """The quad's two non-frontier vertices, ordered (next to e0, next to e1)."""
    i = face.index(e0)
    if face[(i + 1) % 4] == e1:
        return face[(i - 1) % 4], face[(i + 2) % 4]
    return face[(i + 1) % 4], face[(i - 2) % 4]


def extract_strips(q: QuantizedMesh, stride: int, up_axis: str = "y") -> StripSet:
    """Decompose the mesh into ordered strips covering every face once.

    Islands are visited in ascending order of their lowest face; within an
    island the next seed is the lowest unvisited face.  A triangle seed is
    the face rotated so its lowest vertex comes first, which both keeps the
    initial frontier on the two highest keys and makes the decoded seed a
    rotation (never a reflection) of the stored face.  A quad seed is
    additionally swapped in its last two entries so that pair-wise decoding
    reassembles the stored cyclic order.  Growth crosses the frontier edge
    to the unvisited face there (ties on non-manifold edges go to the
    lowest face) and stops at boundaries and visited faces.
    """
    if stride not in (1, 2):
        raise ValueError(f"stride must be 1 or 2, got {stride}")
    degree = 3 if stride == 1 else 4
    for face in q.faces:
        if len(face) != degree:
            raise ValueError(
                f"stride {stride} requires degree-{degree} faces, found degree {len(face)}"
            )

    ranks = vertex_ranks(q, up_axis)
    fkeys = _face_sort_keys(q, ranks)
    e2f = _build_edge_map(q)
    labels = q.island_of_face if q.island_of_face is not None else [0] * len(q.faces)

    faces_of_island: dict[int, list[int]] = defaultdict(list)
    for fi, l in enumerate(labels):
        faces_of_island[l].append(fi)
    islands_in_order = sorted(faces_of_island, key=lambda l: min(fkeys[f] for f in faces_of_island[l]))

    visited = [False] * len(q.faces)
    strips: list[Strip] = []

    def next_face(e0: int, e1: int, island: int):
        best = None
        for fi in e2f.get(_edge_key(e0, e1), ()):
            if visited[fi] or labels[fi] != island:
                continue
            if best is None or fkeys[fi] < fkeys[best]:
                best = fi
        return best

    for island in islands_in_order:
        queue = sorted(faces_of_island[island], key=lambda f: fkeys[f])
        for seed in queue:
            if visited[seed]:
                continue
            keys = _rotate_min_first(q.faces[seed], ranks)
            if stride == 2:
                keys[-1], keys[-2] = keys[-2], keys[-1]
            visited[seed] = True
            while True:
                e0, e1 = keys[-2], keys[-1]
                fi = next_face(e0, e1, island)
                if fi is None:
                    break
                face = q.faces[fi]
                if stride == 1:
                    keys.append(next(v for v in face if v != e0 and v != e1))
                else:
                    keys.extend(_quad_new_pair(face, e0, e1))
                visited[fi] = True
            strips.append(Strip(keys=keys, island=island, stride=stride))

    return StripSet(
        strips=strips,
        vertex_keys=q.vertex_keys,
        islands_in_order=islands_in_order,
        stride=stride,
        transform=q.transform,
    )


def strip_faces(s: Strip) -> list[tuple[int, ...]]:
    """Faces implied by a strip's key run.

    Stride 1 emits one triangle per step with every second one flipped to
    keep a consistent orientation.  Stride 2 emits one quad per appended
    pair, (v[2i], v[2i+1], v[2i+3], v[2i+2]), and decodes a trailing
    unpaired vertex as a triangle.
    """
    k = s.keys
    m = len(k)
    faces: list[tuple[int, ...]] = []
    if m < 3:
        return faces
    if s.stride == 1:
        for i in range(m - 2):
            if i % 2 == 0:
                faces.append((k[i], k[i + 1], k[i + 2]))
            else:
                faces.append((k[i], k[i + 2], k[i + 1]))
    else:
        j = 0
        while j + 3 < m:
            faces.append((k[j], k[j + 1], k[j + 3], k[j + 2]))
            j += 2
        if m % 2 == 1:
            faces.append((k[m - 3], k[m - 2], k[m - 1]))
    return faces
