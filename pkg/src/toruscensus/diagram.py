"""Knot projections and diagrams on the torus as combinatorial maps.

Conventions (fixed once, everything else is pinned to them):

* A crossing ``c`` owns half-edges ``4c .. 4c+3``; slot ``s`` of crossing
  ``c`` is half-edge ``4c+s``.  Slots are listed counterclockwise.  Slots
  ``{0, 2}`` form one transverse strand pass, ``{1, 3}`` the other.
* Straight-ahead successor: arrive at slot ``s``, leave at slot ``s+2``,
  then cross the paired edge.
* Face successor: take the pairing, then rotate one slot counterclockwise.
  Faces lie to the right of their boundary traversals.
* Each edge is keyed by its smaller half-edge id; its winding vector is the
  homology contribution in Z^2 when traversed from the smaller-id end to the
  larger-id end.
* ``over`` bit ``c`` is 0 when the strand through slots ``{0, 2}`` of
  crossing ``c`` passes over, 1 when the strand through ``{1, 3}`` does.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .intlinalg import elementary_divisors

Vec = Tuple[int, int]

CELLULAR = "cellular"
ANNULAR = "annular"
LOCAL = "local"
INVALID = "invalid"


class DiagramError(ValueError):
    pass


class LinkShadowError(DiagramError):
    """The straight-ahead walk closes early: a link shadow, not a knot."""


class ValidationError(DiagramError):
    pass


class TkcParseError(DiagramError):
    pass


def crossing(h: int) -> int:
    return h >> 2


def slot(h: int) -> int:
    return h & 3


def rotate(h: int, k: int = 1) -> int:
    return (h & ~3) | ((h + k) & 3)


def opposite(h: int) -> int:
    return rotate(h, 2)


def vadd(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1])


def vneg(a: Vec) -> Vec:
    return (-a[0], -a[1])


@dataclass(frozen=True)
class CombinatorialMap:
    """Rotation-system encoding of a 4-valent graph: a fixed-point-free
    involution pairing the 4n half-edges into 2n edges."""

    pairing: Tuple[int, ...]

    def __post_init__(self):
        p = self.pairing
        if len(p) % 4 != 0:
            raise ValidationError("pairing length must be a multiple of 4")
        ids = set(range(len(p)))
        if set(p) != ids:
            raise ValidationError("pairing must be a permutation of half-edge ids")
        for h, t in enumerate(p):
            if t == h:
                raise ValidationError(f"pairing has a fixed point at half-edge {h}")
            if p[t] != h:
                raise ValidationError(f"pairing is not an involution at half-edge {h}")

    @property
    def n(self) -> int:
        return len(self.pairing) // 4

    def edges(self) -> List[int]:
        """Edge keys: the smaller half-edge id of every edge, sorted."""
        return sorted(h for h, t in enumerate(self.pairing) if h < t)

    def is_loop(self, edge: int) -> bool:
        return crossing(edge) == crossing(self.pairing[edge])


Winding = Dict[int, Vec]


@dataclass
class TorusProjection:
    """A knot shadow on the torus: map plus winding data, or a bare circle.

    For ``n == 0`` only ``circle_class`` is set; otherwise ``map`` and
    ``winding`` are set and ``winding`` has one entry per edge key.
    """

    map: Optional[CombinatorialMap] = None
    winding: Optional[Winding] = None
    circle_class: Optional[Vec] = None

    @classmethod
    def circle(cls, circle_class: Vec) -> "TorusProjection":
        return cls(map=None, winding=None, circle_class=tuple(circle_class))

    @classmethod
    def from_map(cls, mp: CombinatorialMap, winding: Winding) -> "TorusProjection":
        keys = set(mp.edges())
        if set(winding) != keys:
            raise ValidationError("winding must be keyed by exactly the edge keys")
        return cls(map=mp, winding={k: tuple(v) for k, v in sorted(winding.items())})

    @property
    def n(self) -> int:
        return 0 if self.map is None else self.map.n

    def traversal_winding(self, h: int) -> Vec:
        """Winding contribution of traversing the edge at h from the h end."""
        t = self.map.pairing[h]
        w = self.winding[min(h, t)]
        return w if h < t else vneg(w)

    def traversal_table(self) -> List[Vec]:
        """traversal_winding for every half-edge, as a flat list."""
        return [self.traversal_winding(h) for h in range(4 * self.n)]


@dataclass
class TorusDiagram:
    """A projection plus one over/under bit per crossing."""

    projection: TorusProjection
    over: Tuple[int, ...] = ()

    def __post_init__(self):
        self.over = tuple(self.over)
        if len(self.over) != self.projection.n:
            raise ValidationError("over must have one bit per crossing")
        if any(b not in (0, 1) for b in self.over):
            raise ValidationError("over bits must be 0 or 1")

    @property
    def n(self) -> int:
        return self.projection.n


# ---------------------------------------------------------------------------
# Strand and face traces
# ---------------------------------------------------------------------------


def trace_strand(mp: CombinatorialMap) -> List[int]:
    """The closed straight-ahead walk from half-edge 0, as an alternating
    sequence [out, in, out, in, ...] of half-edges.

    A knot shadow visits all 4n half-edges.  Raises LinkShadowError when the
    walk closes early (multi-component shadow).
    """
    walk: List[int] = []
    h = 0
    while True:
        walk.append(h)
        t = mp.pairing[h]
        walk.append(t)
        h = opposite(t)
        if h == 0:
            break
    if len(walk) != 4 * mp.n:
        raise LinkShadowError(
            f"straight-ahead walk closes after {len(walk) // 2} of {2 * mp.n} edges"
        )
    return walk


def trace_faces(mp: CombinatorialMap) -> List[Tuple[int, ...]]:
    """Face orbits of the successor "pairing, then rotate counterclockwise".

    Every half-edge appears in exactly one orbit; orbits are listed by their
    least half-edge and each starts at its least member.
    """
    seen = [False] * (4 * mp.n)
    faces: List[Tuple[int, ...]] = []
    for start in range(4 * mp.n):
        if seen[start]:
            continue
        orbit = []
        h = start
        while not seen[h]:
            seen[h] = True
            orbit.append(h)
            h = rotate(mp.pairing[h])
        faces.append(tuple(orbit))
    return faces


@dataclass
class Face:
    traversals: Tuple[int, ...]
    boundary_class: Vec

    @property
    def degree(self) -> int:
        return len(self.traversals)

    @property
    def is_disk(self) -> bool:
        return self.boundary_class == (0, 0)


@dataclass
class FaceStructure:
    """Face orbits with boundary classes and half-edge lookup tables."""

    faces: Tuple[Face, ...]
    face_of: Tuple[int, ...]
    position: Tuple[int, ...]

    def partial_sum(self, face_index: int, i: int, j: int) -> Vec:
        """Winding sum of the traversals strictly between positions i and j,
        walking forward in the face orbit (cyclically)."""
        face = self.faces[face_index]
        k = len(face.traversals)
        total = (0, 0)
        pos = (i + 1) % k
        while pos != j:
            total = vadd(total, self._trav[face.traversals[pos]])
            pos = (pos + 1) % k
        return total

    _trav: List[Vec] = field(default_factory=list, repr=False)


def face_structure(proj: TorusProjection) -> FaceStructure:
    mp = proj.map
    trav = proj.traversal_table()
    orbits = trace_faces(mp)
    face_of = [0] * (4 * mp.n)
    position = [0] * (4 * mp.n)
    faces = []
    for fi, orbit in enumerate(orbits):
        total = (0, 0)
        for pos, h in enumerate(orbit):
            face_of[h] = fi
            position[h] = pos
            total = vadd(total, trav[h])
        faces.append(Face(traversals=orbit, boundary_class=total))
    fs = FaceStructure(faces=tuple(faces), face_of=tuple(face_of), position=tuple(position))
    fs._trav = trav
    return fs


# ---------------------------------------------------------------------------
# Embedding classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    kind: str
    designated: Optional[Tuple[int, int]] = None  # face indices, annular only
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.kind != INVALID


def _is_primitive(v: Vec) -> bool:
    from math import gcd

    return gcd(v[0], v[1]) == 1


def _cycle_class_matrix(proj: TorusProjection) -> List[List[int]]:
    """Classes of the fundamental cycles of a spanning tree, as a matrix with
    one row per Z^2 coordinate."""
    mp = proj.map
    n = mp.n
    parent: Dict[int, Optional[int]] = {0: None}
    potential: Dict[int, Vec] = {0: (0, 0)}
    tree_edges = set()
    frontier = [0]
    while frontier:
        c = frontier.pop()
        for s in range(4):
            h = 4 * c + s
            t = mp.pairing[h]
            d = crossing(t)
            if d not in potential:
                potential[d] = vadd(potential[c], proj.traversal_winding(h))
                tree_edges.add(min(h, t))
                parent[d] = c
                frontier.append(d)
    if len(potential) != n:
        raise ValidationError("map is disconnected")
    cols = []
    for e in mp.edges():
        if e in tree_edges:
            continue
        t = mp.pairing[e]
        w = proj.winding[e]
        cls = vadd(vadd(potential[crossing(e)], w), vneg(potential[crossing(t)]))
        cols.append(cls)
    return [[c[0] for c in cols], [c[1] for c in cols]]


def classify_embedding(proj: TorusProjection) -> Embedding:
    """Decide how the shadow sits in the torus.

    cellular: F = n, all face boundary classes vanish, and graph cycle
    classes generate Z^2.  annular: F = n + 2 (spherical rotation data) with
    exactly two faces of boundary class +v and -v for a primitive v, the
    annulus attachment.  local: F = n + 2 with every class zero, a shadow
    contained in a disk (valid as a diagram, never prime).  Anything else
    is invalid with a reason.
    """
    if proj.map is None:
        v = proj.circle_class
        from math import gcd

        if v != (0, 0) and gcd(v[0], v[1]) != 1:
            return Embedding(INVALID, reason="circle class must be (0,0) or primitive")
        return Embedding(ANNULAR if v != (0, 0) else LOCAL)
    n = proj.n
    fs = face_structure(proj)
    nfaces = len(fs.faces)
    if nfaces == n:
        bad = [f for f in fs.faces if f.boundary_class != (0, 0)]
        if bad:
            return Embedding(INVALID, reason="cellular face with nonzero boundary class")
        divisors = elementary_divisors(_cycle_class_matrix(proj))
        if divisors != [1, 1]:
            return Embedding(
                INVALID,
                reason=f"cycle classes do not generate Z^2 (divisors {divisors})",
            )
        return Embedding(CELLULAR)
    if nfaces == n + 2:
        nonzero = [(i, f.boundary_class) for i, f in enumerate(fs.faces) if f.boundary_class != (0, 0)]
        if not nonzero:
            return Embedding(LOCAL)
        if len(nonzero) != 2:
            return Embedding(INVALID, reason="annular data needs exactly two nonzero faces")
        (i, vi), (j, vj) = nonzero
        if vadd(vi, vj) != (0, 0) or not _is_primitive(vi):
            return Embedding(INVALID, reason="annulus boundary classes must be +v, -v, v primitive")
        return Embedding(ANNULAR, designated=(i, j))
    return Embedding(INVALID, reason=f"face count {nfaces} incompatible with n={n}")


def validate_projection(proj: TorusProjection) -> Embedding:
    """Full validation: single strand plus a valid embedding.  Raises."""
    if proj.map is not None:
        trace_strand(proj.map)
        keys = set(proj.map.edges())
        if set(proj.winding or {}) != keys:
            raise ValidationError("winding keys do not match the edge set")
    emb = classify_embedding(proj)
    if not emb:
        raise ValidationError(f"invalid embedding: {emb.reason}")
    return emb


# ---------------------------------------------------------------------------
# Homology, writhe, alternation
# ---------------------------------------------------------------------------


def cycle_class(proj: TorusProjection, walk: Sequence[int]) -> Vec:
    """Signed winding sum along a closed alternating walk [out, in, ...]."""
    if not walk:
        return (0, 0)
    if len(walk) % 2 != 0:
        raise DiagramError("walk must alternate out/in half-edges")
    total = (0, 0)
    for k in range(0, len(walk), 2):
        out, inn = walk[k], walk[k + 1]
        if proj.map.pairing[out] != inn:
            raise DiagramError("walk steps must follow the pairing")
        nxt = walk[(k + 2) % len(walk)]
        if crossing(nxt) != crossing(inn):
            raise DiagramError("walk is not closed through crossings")
        total = vadd(total, proj.traversal_winding(out))
    return total


def knot_class(diagram: TorusDiagram) -> Vec:
    """Homology class of the full strand (reduce mod 2 for the H1(T;Z2) test)."""
    proj = diagram.projection
    if proj.map is None:
        return proj.circle_class
    return cycle_class(proj, trace_strand(proj.map))


def knot_class_mod2(diagram: TorusDiagram) -> Vec:
    u, v = knot_class(diagram)
    return (u & 1, v & 1)


def pass_sequence(diagram: TorusDiagram) -> List[Tuple[int, bool]]:
    """Crossing passes along the strand as (crossing, is_over) in walk order."""
    mp = diagram.projection.map
    walk = trace_strand(mp)
    passes = []
    for k in range(1, len(walk), 2):
        inn = walk[k]
        c = crossing(inn)
        is_over = diagram.over[c] == (slot(inn) & 1)
        passes.append((c, is_over))
    return passes


def writhe(diagram: TorusDiagram) -> int:
    """Sum of crossing signs.  A crossing is +1 when rotating the outgoing
    over-strand direction one slot counterclockwise aligns it with the
    outgoing under-strand direction.

    The strand orientation is the straight-ahead traversal; each crossing is
    met twice with outgoing slots differing by an odd rotation, so exactly
    one of over_out+1 = under_out or under_out+1 = over_out holds.
    """
    mp = diagram.projection.map
    if mp is None:
        return 0
    walk = trace_strand(mp)
    out_slot: Dict[Tuple[int, int], int] = {}  # (crossing, pass parity) -> outgoing slot
    for k in range(1, len(walk), 2):
        inn = walk[k]
        out_slot[(crossing(inn), slot(inn) & 1)] = (slot(inn) + 2) & 3
    total = 0
    for c in range(mp.n):
        over_out = out_slot[(c, diagram.over[c])]
        under_out = out_slot[(c, 1 - diagram.over[c])]
        total += 1 if (over_out + 1) & 3 == under_out else -1
    return total


def is_alternating(diagram: TorusDiagram) -> bool:
    """True when over- and under-passes strictly alternate along the strand."""
    passes = pass_sequence(diagram)
    k = len(passes)
    return all(passes[i][1] != passes[(i + 1) % k][1] for i in range(k))


# ---------------------------------------------------------------------------
# Symmetry operations
# ---------------------------------------------------------------------------


def mirror(diagram: TorusDiagram) -> TorusDiagram:
    """Simultaneous crossing change: flip every over bit."""
    return TorusDiagram(diagram.projection, tuple(1 - b for b in diagram.over))


def _transform_projection(
    proj: TorusProjection, mapping: Sequence[int], reflected: bool
) -> TorusProjection:
    """Relabel half-edges by `mapping` (old -> new); a reflected mapping also
    negates the second winding coordinate to reorient the embedding."""
    mp = proj.map
    new_pairing = [0] * len(mapping)
    for h, t in enumerate(mp.pairing):
        new_pairing[mapping[h]] = mapping[t]
    new_winding: Winding = {}
    for e, w in proj.winding.items():
        t = mp.pairing[e]
        a, b = mapping[e], mapping[t]
        vec = w if a < b else vneg(w)
        if reflected:
            vec = (vec[0], -vec[1])
        new_winding[min(a, b)] = vec
    return TorusProjection.from_map(CombinatorialMap(tuple(new_pairing)), new_winding)


def transform_diagram(
    diagram: TorusDiagram,
    mapping: Sequence[int],
    reflected: bool = False,
    mirrored: bool = False,
) -> TorusDiagram:
    """Apply a half-edge relabeling (an isomorphism of the map) to a diagram."""
    proj = _transform_projection(diagram.projection, mapping, reflected)
    n = diagram.n
    new_over = [0] * n
    for c in range(n):
        rep = 4 * c + diagram.over[c]  # a slot on the over pass
        img = mapping[rep]
        bit = slot(img) & 1
        new_over[crossing(img)] = bit ^ (1 if mirrored else 0)
    return TorusDiagram(proj, tuple(new_over))


def relabel_mapping(n: int, perm: Sequence[int], rots: Sequence[int]) -> List[int]:
    """Half-edge mapping from a crossing permutation and per-crossing slot
    rotations: old 4c+s -> 4*perm[c] + (s + rots[c]) mod 4."""
    mapping = [0] * (4 * n)
    for c in range(n):
        for s in range(4):
            mapping[4 * c + s] = 4 * perm[c] + ((s + rots[c]) & 3)
    return mapping


def reflect(diagram: TorusDiagram) -> TorusDiagram:
    """Orientation-reversing relabeling: reverse every crossing's slot order
    and negate one winding coordinate."""
    proj = diagram.projection
    if proj.map is None:
        u, v = proj.circle_class
        return TorusDiagram(TorusProjection.circle((u, -v)), ())
    n = diagram.n
    mapping = [4 * crossing(h) + ((-slot(h)) & 3) for h in range(4 * n)]
    return transform_diagram(diagram, mapping, reflected=True)


def apply_gauge(proj: TorusProjection, potentials: Dict[int, Vec]) -> TorusProjection:
    """Shift windings by a coboundary: each edge gains p(head) - p(tail)."""
    mp = proj.map
    new_w: Winding = {}
    for e, w in proj.winding.items():
        t = mp.pairing[e]
        head = potentials.get(crossing(t), (0, 0))
        tail = potentials.get(crossing(e), (0, 0))
        new_w[e] = vadd(w, vadd(head, vneg(tail)))
    return TorusProjection.from_map(mp, new_w)


def apply_basis_change(proj: TorusProjection, m: Sequence[Sequence[int]]) -> TorusProjection:
    """Apply a unimodular 2x2 matrix to every winding vector."""
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det not in (1, -1):
        raise ValueError("matrix must be unimodular")

    def ap(v: Vec) -> Vec:
        return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])

    if proj.map is None:
        return TorusProjection.circle(ap(proj.circle_class))
    return TorusProjection.from_map(proj.map, {e: ap(w) for e, w in proj.winding.items()})


# ---------------------------------------------------------------------------
# Canonical keys
# ---------------------------------------------------------------------------


def _visit_order_mapping(mp: CombinatorialMap, root: int, ccw: bool) -> List[int]:
    """Deterministic half-edge relabeling rooted at `root`.

    Crossings are numbered by first visit along the straight-ahead walk from
    `root`; the first-visited half-edge of a crossing becomes its slot 0 and
    the remaining slots follow counterclockwise (or clockwise when not ccw).
    """
    n = mp.n
    order: Dict[int, int] = {}
    anchor: Dict[int, int] = {}
    h = root
    while True:
        for touch in (h, mp.pairing[h]):
            c = crossing(touch)
            if c not in order:
                order[c] = len(order)
                anchor[c] = slot(touch)
        h = opposite(mp.pairing[h])
        if h == root:
            break
    mapping = [0] * (4 * n)
    for c in range(n):
        base = 4 * order[c]
        a = anchor[c]
        for s in range(4):
            rel = (s - a) & 3 if ccw else (a - s) & 3
            mapping[4 * c + s] = base + rel
    return mapping


def _designated_face_sets(proj: TorusProjection) -> Optional[Tuple[frozenset, frozenset]]:
    emb = classify_embedding(proj)
    if emb.kind != ANNULAR or emb.designated is None:
        return None
    fs = face_structure(proj)
    i, j = emb.designated
    return frozenset(fs.faces[i].traversals), frozenset(fs.faces[j].traversals)


def _candidate_tuple(
    pairing: Tuple[int, ...],
    mapping: Sequence[int],
    over: Optional[Sequence[int]],
    mirrored: bool,
    designated: Optional[Tuple[frozenset, frozenset]],
) -> Tuple:
    n = len(pairing) // 4
    new_pairing = [0] * len(mapping)
    for h, t in enumerate(pairing):
        new_pairing[mapping[h]] = mapping[t]
    parts: List[Tuple] = [tuple(new_pairing)]
    if over is not None:
        new_over = [0] * n
        for c in range(n):
            img = mapping[4 * c + over[c]]
            new_over[crossing(img)] = (slot(img) & 1) ^ (1 if mirrored else 0)
        parts.append(tuple(new_over))
    if designated is not None:
        ids = tuple(sorted(min(mapping[h] for h in f) for f in designated))
        parts.append(ids)
    return tuple(parts)


def _canonical_search(
    proj: TorusProjection,
    over: Optional[Sequence[int]],
    use_reflect: bool,
    use_mirror: bool,
) -> Tuple[Tuple, List[int], bool, bool]:
    """Minimize the serialized labeling over roots x orientations x mirror."""
    mp = proj.map
    designated = _designated_face_sets(proj)
    best = None
    best_data = None
    for ccw in ((True, False) if use_reflect else (True,)):
        for root in range(4 * mp.n):
            mapping = _visit_order_mapping(mp, root, ccw)
            for mirrored in ((False, True) if (use_mirror and over is not None) else (False,)):
                cand = _candidate_tuple(mp.pairing, mapping, over, mirrored, designated)
                if best is None or cand < best:
                    best = cand
                    best_data = (mapping, not ccw, mirrored)
    mapping, reflected, mirrored = best_data
    return best, mapping, reflected, mirrored


def _render_key(kind: str, tup: Tuple, n: int, has_over: bool) -> str:
    pairing = tup[0]
    pairs = ",".join(
        f"{h}-{pairing[h]}" for h in range(len(pairing)) if h < pairing[h]
    )
    parts = [kind, f"n={n}", f"pair={pairs}"]
    idx = 1
    if has_over:
        parts.append("over=" + "".join(str(b) for b in tup[idx]))
        idx += 1
    if kind == ANNULAR:
        parts.append("ann=" + "-".join(str(x) for x in tup[idx]))
    return ";".join(parts)


def canonical_key(
    diagram: TorusDiagram,
    reflect_flag: bool = True,
    mirror_flag: bool = True,
) -> str:
    """Minimal text key over crossing relabelings and rotation shifts, plus
    optionally the reflection and mirror images.

    Windings are excluded for cellular shadows (the rotation system pins the
    embedding); annular keys carry the identities of the two nonzero faces.
    """
    proj = diagram.projection
    if proj.map is None:
        kind = "trivial" if proj.circle_class == (0, 0) else "essential"
        return f"n=0;class={kind}"
    emb = classify_embedding(proj)
    tup, *_ = _canonical_search(proj, diagram.over, reflect_flag, mirror_flag)
    return _render_key(emb.kind, tup, proj.n, has_over=True)


def canonical_projection_key(proj: TorusProjection, reflect_flag: bool = True) -> str:
    if proj.map is None:
        kind = "trivial" if proj.circle_class == (0, 0) else "essential"
        return f"n=0;class={kind}"
    emb = classify_embedding(proj)
    tup, *_ = _canonical_search(proj, None, reflect_flag, False)
    return _render_key(emb.kind, tup, proj.n, has_over=False)


def canonical_form(diagram: TorusDiagram) -> TorusDiagram:
    """A representative diagram realizing the fully-quotiented canonical key."""
    proj = diagram.projection
    if proj.map is None:
        u, v = proj.circle_class
        if (u, v) == (0, 0):
            return TorusDiagram(TorusProjection.circle((0, 0)), ())
        return TorusDiagram(TorusProjection.circle((0, 1)), ())
    _tup, mapping, reflected, mirrored = _canonical_search(proj, diagram.over, True, True)
    return transform_diagram(diagram, mapping, reflected=reflected, mirrored=mirrored)


def canonical_projection_form(proj: TorusProjection) -> TorusProjection:
    """A representative projection realizing the relabel+reflect-minimal key."""
    if proj.map is None:
        if proj.circle_class == (0, 0):
            return TorusProjection.circle((0, 0))
        return TorusProjection.circle((0, 1))
    _tup, mapping, reflected, _m = _canonical_search(proj, None, True, False)
    return _transform_projection(proj, mapping, reflected)


# ---------------------------------------------------------------------------
# TKC text codec
# ---------------------------------------------------------------------------

_TKC_CIRCLE_RE = re.compile(r"^tkc:v1;n=0;circle=\((-?\d+),(-?\d+)\)$")
_TKC_RE = re.compile(
    r"^tkc:v1;n=(\d+);pair=([0-9,\-]+);wind=([0-9():,\- ]*)(?:;over=([01]+))?$"
)


def encode_tkc(obj: TorusDiagram | TorusProjection) -> str:
    """One-line ASCII form; diagrams carry the over field, projections don't."""
    diagram = obj if isinstance(obj, TorusDiagram) else None
    proj = diagram.projection if diagram is not None else obj
    if proj.map is None:
        u, v = proj.circle_class
        return f"tkc:v1;n=0;circle=({u},{v})"
    pairs = ",".join(f"{h}-{t}" for h, t in enumerate(proj.map.pairing) if h < t)
    wind = ",".join(f"{e}:({w[0]},{w[1]})" for e, w in sorted(proj.winding.items()))
    text = f"tkc:v1;n={proj.n};pair={pairs};wind={wind}"
    if diagram is not None:
        text += ";over=" + "".join(str(b) for b in diagram.over)
    return text


def _decode_tkc(text: str) -> Tuple[TorusProjection, Optional[Tuple[int, ...]]]:
    text = text.strip()
    m = _TKC_CIRCLE_RE.match(text)
    if m:
        proj = TorusProjection.circle((int(m.group(1)), int(m.group(2))))
        validate_projection(proj)
        return proj, None
    m = _TKC_RE.match(text)
    if m is None:
        raise TkcParseError(f"not a TKC line: {text!r}")
    n = int(m.group(1))
    pairing = [-1] * (4 * n)
    for item in m.group(2).split(","):
        try:
            a_s, b_s = item.split("-")
            a, b = int(a_s), int(b_s)
        except ValueError as exc:
            raise TkcParseError(f"bad pair item {item!r}") from exc
        if not (0 <= a < 4 * n and 0 <= b < 4 * n) or a >= b:
            raise TkcParseError(f"pair item {item!r} out of range or unordered")
        if pairing[a] != -1 or pairing[b] != -1:
            raise TkcParseError(f"half-edge repeated in pair item {item!r}")
        pairing[a], pairing[b] = b, a
    if -1 in pairing:
        missing = pairing.index(-1)
        raise TkcParseError(f"half-edge {missing} is unpaired")
    mp = CombinatorialMap(tuple(pairing))
    winding = _parse_wind_field(m.group(3))
    proj = TorusProjection.from_map(mp, winding)
    validate_projection(proj)
    over = None
    if m.group(4) is not None:
        bits = tuple(int(ch) for ch in m.group(4))
        if len(bits) != n:
            raise TkcParseError("over bitstring length must equal n")
        over = bits
    return proj, over


def _parse_wind_field(text: str) -> Winding:
    winding: Winding = {}
    if not text:
        return winding
    items = re.findall(r"(\d+):\((-?\d+),(-?\d+)\)", text)
    rebuilt = ",".join(f"{k}:({u},{v})" for k, u, v in items)
    if rebuilt != text:
        raise TkcParseError(f"bad wind field {text!r}")
    for k, u, v in items:
        key = int(k)
        if key in winding:
            raise TkcParseError(f"duplicate wind key {key}")
        winding[key] = (int(u), int(v))
    return winding


def decode_diagram(text: str) -> TorusDiagram:
    proj, over = _decode_tkc(text)
    if proj.map is not None and over is None:
        raise TkcParseError("diagram TKC requires an over field")
    return TorusDiagram(proj, over or ())


def decode_projection(text: str) -> TorusProjection:
    proj, over = _decode_tkc(text)
    if over is not None:
        raise TkcParseError("projection TKC must not carry an over field")
    return proj
