"""Exact comparison of a quantized mesh against its decoded reconstruction.

Faces are matched by their unordered grid-coordinate sets (unique after
quantization dedup), windings by cyclic-rotation equality, and partitions
as label-free groupings of face sets.
"""

from __future__ import annotations

from collections import Counter, defaultdict

from .quantize import QuantizedMesh


def _face_coord_sets(q: QuantizedMesh):
    return [frozenset(q.vertex_keys[v] for v in face) for face in q.faces]


def _face_coord_tuples(q: QuantizedMesh):
    return [tuple(q.vertex_keys[v] for v in face) for face in q.faces]


def _is_rotation(a: tuple, b: tuple) -> bool:
    if len(a) != len(b):
        return False
    n = len(a)
    return any(a == tuple(b[(k + i) % n] for i in range(n)) for k in range(n))


def _grouping(face_sets, labels):
    groups = defaultdict(set)
    for fs, l in zip(face_sets, labels):
        groups[l].add(fs)
    return {frozenset(g) for g in groups.values()}


def _island_key_sets(q: QuantizedMesh):
    labels = q.island_of_face if q.island_of_face is not None else [0] * len(q.faces)
    used = defaultdict(set)
    for face, l in zip(q.faces, labels):
        for v in face:
            used[l].add(q.vertex_keys[v])
    return used, labels


def compare_quantized(source: QuantizedMesh, decoded: QuantizedMesh) -> tuple[bool, str]:
    """Check face multiset, winding, island partition, and per-island key sets.

    Returns (ok, detail); detail names the first divergence.
    """
    src_sets = _face_coord_sets(source)
    dec_sets = _face_coord_sets(decoded)
    if Counter(src_sets) != Counter(dec_sets):
        missing = set(src_sets) - set(dec_sets)
        extra = set(dec_sets) - set(src_sets)
        return False, (
            f"face multiset mismatch: {len(missing)} missing, {len(extra)} extra "
            f"({len(src_sets)} vs {len(dec_sets)} faces)"
        )

    by_set = dict(zip(src_sets, _face_coord_tuples(source)))
    for fs, ft in zip(dec_sets, _face_coord_tuples(decoded)):
        if not _is_rotation(ft, by_set[fs]):
            return False, f"winding mismatch on face {sorted(fs)}"

    src_used, src_labels = _island_key_sets(source)
    dec_used, dec_labels = _island_key_sets(decoded)
    if _grouping(src_sets, src_labels) != _grouping(dec_sets, dec_labels):
        return False, "island partition mismatch"
    if Counter(map(frozenset, src_used.values())) != Counter(map(frozenset, dec_used.values())):
        return False, "per-island vertex key sets mismatch"

    return True, ""
