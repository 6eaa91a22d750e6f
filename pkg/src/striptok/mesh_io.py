"""Wavefront OBJ loading/saving, UV-island extraction, and corpus filtering.

Only ``v``, ``vt`` and ``f`` records are interpreted; anything else is
skipped.  Faces must be all triangles or all quads; mixed files are
rejected.  Exported files group faces by island (``g island_<id>``) when a
partition is supplied.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass

FACE_COUNT_RANGE = (500, 16000)
ISLAND_COUNT_RANGE = (10, 300)
MAX_VERTEX_FACE_RATIO = 1.0


class ObjParseError(ValueError):
    """Malformed OBJ content; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Mesh:
    """Polygon mesh with optional per-face UV indices.

    ``faces`` are 0-based position-index tuples, all of degree 3 or all of
    degree 4.  ``face_uvs``, when present, parallels ``faces`` and indexes
    into ``uv_coords``.
    """

    positions: list[tuple[float, float, float]]
    faces: list[tuple[int, ...]]
    uv_coords: list[tuple[float, float]] | None = None
    face_uvs: list[tuple[int, ...]] | None = None

    @property
    def face_degree(self) -> int:
        return len(self.faces[0]) if self.faces else 0


@dataclass
class IslandPartition:
    """Dense face -> island labels; islands are connected face groups."""

    island_of_face: list[int]
    island_count: int


def load_obj(path) -> Mesh:
    """Parse an OBJ file into a Mesh (0-based indices, vn data ignored)."""
    positions: list[tuple[float, float, float]] = []
    uv_coords: list[tuple[float, float]] = []
    faces: list[tuple[int, ...]] = []
    face_uvs: list[tuple[int, ...]] = []
    degree: int | None = None

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise ObjParseError("vertex needs 3 coordinates", lineno)
                try:
                    p = (float(parts[1]), float(parts[2]), float(parts[3]))
                except ValueError:
                    raise ObjParseError("bad vertex coordinate", lineno) from None
                if not all(math.isfinite(c) for c in p):
                    raise ObjParseError("non-finite vertex coordinate", lineno)
                positions.append(p)
            elif tag == "vt":
                if len(parts) < 3:
                    raise ObjParseError("uv needs 2 coordinates", lineno)
                try:
                    uv_coords.append((float(parts[1]), float(parts[2])))
                except ValueError:
                    raise ObjParseError("bad uv coordinate", lineno) from None
            elif tag == "f":
                corners = parts[1:]
                if len(corners) not in (3, 4):
                    raise ObjParseError(
                        f"face of degree {len(corners)} (only 3 or 4 supported)", lineno
                    )
                if degree is None:
                    degree = len(corners)
                elif degree != len(corners):
                    raise ObjParseError("mixed triangle/quad faces", lineno)
                vidx = []
                tidx = []
                for corner in corners:
                    fields = corner.split("/")
                    try:
                        v = int(fields[0])
                    except ValueError:
                        raise ObjParseError(f"bad face corner {corner!r}", lineno) from None
                    if v <= 0:
                        raise ObjParseError("only positive 1-based indices supported", lineno)
                    vidx.append(v - 1)
                    if len(fields) > 1 and fields[1]:
                        try:
                            t = int(fields[1])
                        except ValueError:
                            raise ObjParseError(f"bad uv index in {corner!r}", lineno) from None
                        if t <= 0:
                            raise ObjParseError("only positive 1-based indices supported", lineno)
                        tidx.append(t - 1)
                if tidx and len(tidx) != len(vidx):
                    raise ObjParseError("face mixes corners with and without uv", lineno)
                if face_uvs and not tidx:
                    raise ObjParseError("face without uv after faces with uv", lineno)
                if tidx and faces and not face_uvs:
                    raise ObjParseError("face with uv after faces without uv", lineno)
                faces.append(tuple(vidx))
                if tidx:
                    face_uvs.append(tuple(tidx))
            # everything else (vn, g, s, o, usemtl, ...) is ignored

    npos = len(positions)
    for face in faces:
        for v in face:
            if v >= npos:
                raise ValueError(f"face index {v + 1} out of range ({npos} vertices)")
    if face_uvs:
        nuv = len(uv_coords)
        for fuv in face_uvs:
            for t in fuv:
                if t >= nuv:
                    raise ValueError(f"uv index {t + 1} out of range ({nuv} uvs)")

    return Mesh(
        positions=positions,
        faces=faces,
        uv_coords=uv_coords if uv_coords else None,
        face_uvs=face_uvs if face_uvs else None,
    )


def write_obj(mesh: Mesh, path, partition: IslandPartition | None = None) -> None:
    """Write a Mesh as OBJ text (9 significant digits, LF line endings).

    With a partition, faces are emitted grouped by ascending island id under
    ``g island_<id>`` records (stable within each island).
    """
    if not mesh.positions or not mesh.faces:
        raise ValueError("empty mesh")
    if partition is not None and len(partition.island_of_face) != len(mesh.faces):
        raise ValueError("partition does not match face count")

    def fmt(x: float) -> str:
        return format(x, ".9g")

    lines = []
    for p in mesh.positions:
        lines.append(f"v {fmt(p[0])} {fmt(p[1])} {fmt(p[2])}")
    if mesh.uv_coords is not None and mesh.face_uvs is not None:
        for t in mesh.uv_coords:
            lines.append(f"vt {fmt(t[0])} {fmt(t[1])}")

        def face_line(fi):
            face = mesh.faces[fi]
            fuv = mesh.face_uvs[fi]
            return "f " + " ".join(f"{v + 1}/{t + 1}" for v, t in zip(face, fuv))

    else:

        def face_line(fi):
            return "f " + " ".join(str(v + 1) for v in mesh.faces[fi])

    if partition is None:
        for fi in range(len(mesh.faces)):
            lines.append(face_line(fi))
    else:
        by_island: dict[int, list[int]] = defaultdict(list)
        for fi, isl in enumerate(partition.island_of_face):
            by_island[isl].append(fi)
        for isl in sorted(by_island):
            lines.append(f"g island_{isl}")
            for fi in by_island[isl]:
                lines.append(face_line(fi))

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _uv_edge_map(mesh: Mesh):
    """Map each (vertex, uv) endpoint pair of a face edge to the faces using it."""
    edges: dict[tuple, list[int]] = defaultdict(list)
    for fi, (face, fuv) in enumerate(zip(mesh.faces, mesh.face_uvs)):
        n = len(face)
        for k in range(n):
            a = (face[k], fuv[k])
            b = (face[(k + 1) % n], fuv[(k + 1) % n])
            key = (a, b) if a <= b else (b, a)
            edges[key].append(fi)
    return edges


def uv_islands(mesh: Mesh) -> IslandPartition:
    """Partition faces into UV islands.

    Two faces are joined iff they share a 3D edge and reference identical uv
    indices at both endpoints of that edge; islands are the connected
    components of that relation.
    """
    if mesh.face_uvs is None:
        raise ValueError("mesh has no uv indices; use single_island instead")

    adjacency: dict[int, list[int]] = defaultdict(list)
    for users in _uv_edge_map(mesh).values():
        if len(users) > 1:
            for i in users:
                for j in users:
                    if i != j:
                        adjacency[i].append(j)

    nfaces = len(mesh.faces)
    labels = [-1] * nfaces
    count = 0
    for start in range(nfaces):
        if labels[start] != -1:
            continue
        queue = deque([start])
        labels[start] = count
        while queue:
            f = queue.popleft()
            for g in adjacency[f]:
                if labels[g] == -1:
                    labels[g] = count
                    queue.append(g)
        count += 1
    return IslandPartition(island_of_face=labels, island_count=count)


def single_island(mesh: Mesh) -> IslandPartition:
    """Trivial partition placing every face in island 0."""
    return IslandPartition(island_of_face=[0] * len(mesh.faces), island_count=1)


def _merged_faces(mesh: Mesh):
    """Faces remapped through exact duplicate-position merging."""
    index_of: dict[tuple[float, float, float], int] = {}
    remap = []
    for p in mesh.positions:
        j = index_of.get(p)
        if j is None:
            j = len(index_of)
            index_of[p] = j
        remap.append(j)
    merged = [tuple(remap[v] for v in face) for face in mesh.faces]
    return merged, len(index_of)


def is_edge_manifold(mesh: Mesh) -> bool:
    """True iff every edge bounds at most two faces after duplicate merge."""
    merged, _ = _merged_faces(mesh)
    edge_faces: dict[tuple[int, int], int] = defaultdict(int)
    for face in merged:
        n = len(face)
        for k in range(n):
            a, b = face[k], face[(k + 1) % n]
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            edge_faces[key] += 1
            if edge_faces[key] > 2:
                return False
    return True


@dataclass
class FilterResult:
    accepted: bool
    reason: str | None = None


def corpus_filter(mesh: Mesh, partition: IslandPartition | None = None) -> FilterResult:
    """Apply the training-corpus admission rules.

    Checks, in order: edge-manifoldness after exact duplicate-vertex merge,
    face count in [500, 16000], merged vertex/face ratio <= 1.0, and island
    count in [10, 300] when a partition is supplied.  Rejection names the
    first failing rule; it is a value, not an error.
    """
    if not is_edge_manifold(mesh):
        return FilterResult(False, "manifold")

    _, vertex_count = _merged_faces(mesh)

    nfaces = len(mesh.faces)
    if not FACE_COUNT_RANGE[0] <= nfaces <= FACE_COUNT_RANGE[1]:
        return FilterResult(False, "face_count")

    if nfaces == 0 or vertex_count / nfaces > MAX_VERTEX_FACE_RATIO:
        return FilterResult(False, "vertex_face_ratio")

    if partition is not None:
        if not ISLAND_COUNT_RANGE[0] <= partition.island_count <= ISLAND_COUNT_RANGE[1]:
            return FilterResult(False, "island_count")

    return FilterResult(True)
