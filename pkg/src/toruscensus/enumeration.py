"""Exhaustive enumeration: abstract 4-regular multigraphs, torus shadows,
primeness filtering, fingerprints and deduplication.

Shadows are generated by enumerating edge pairings (fixed-point-free
involutions on half-edges) with symmetry pruning, keeping single-strand
maps, and solving for winding data.  A rotation system with F = n faces is
cellular on the torus; one with F = n + 2 faces is spherical and is turned
into an annular shadow by designating every unordered pair of distinct
faces as the annulus attachment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from . import intlinalg
from .diagram import (
    ANNULAR,
    CELLULAR,
    CombinatorialMap,
    Embedding,
    FaceStructure,
    LinkShadowError,
    TorusProjection,
    Vec,
    Winding,
    canonical_projection_form,
    canonical_projection_key,
    classify_embedding,
    crossing,
    face_structure,
    opposite,
    trace_faces,
    trace_strand,
    vadd,
    vneg,
)


# ---------------------------------------------------------------------------
# Abstract 4-regular multigraphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbstractGraph:
    """A connected 4-regular multigraph; loops stored as (v, v) pairs."""

    vertices: int
    edges: Tuple[Tuple[int, int], ...]

    def loop_count(self) -> int:
        return sum(1 for a, b in self.edges if a == b)

    def signature(self) -> Tuple:
        loops = [0] * self.vertices
        mults: Dict[Tuple[int, int], int] = {}
        for a, b in self.edges:
            if a == b:
                loops[a] += 1
            else:
                mults[(a, b)] = mults.get((a, b), 0) + 1
        return (
            self.vertices,
            tuple(sorted(loops)),
            tuple(sorted(mults.values())),
        )

    def canonical_edges(self) -> Tuple[Tuple[int, int], ...]:
        best = None
        for perm in itertools.permutations(range(self.vertices)):
            relabeled = tuple(
                sorted(tuple(sorted((perm[a], perm[b]))) for a, b in self.edges)
            )
            if best is None or relabeled < best:
                best = relabeled
        return best or ()

    def key(self) -> str:
        return f"v={self.vertices};" + ",".join(
            f"{a}-{b}" for a, b in self.canonical_edges()
        )


# Letters follow the structure of the fifteen graphs: a is the vertexless
# circle; b, c, e, h are the loop-ended chains of doubled edges; d the
# quadrupled edge; f the loop hanging off a tripled edge; g the doubled
# triangle; l the doubled triangle with a loop inserted; m the doubled
# 4-cycle; n two tripled edges joined by single edges; o two doubled edges
# joined by four single edges.  The remaining three loop-carrying 4-vertex
# graphs get i, j, k (none of them supports a prime shadow).
_LETTER_BY_SIGNATURE = {
    (0, (), ()): "a",
    (1, (2,), ()): "b",
    (2, (1, 1), (2,)): "c",
    (2, (0, 0), (4,)): "d",
    (3, (0, 1, 1), (2, 2)): "e",
    (3, (0, 0, 1), (1, 1, 3)): "f",
    (3, (0, 0, 0), (2, 2, 2)): "g",
    (4, (0, 0, 1, 1), (2, 2, 2)): "h",
    (4, (0, 0, 0, 1), (1, 1, 1, 2, 2)): "l",
    (4, (0, 0, 0, 0), (2, 2, 2, 2)): "m",
    (4, (0, 0, 0, 0), (1, 1, 3, 3)): "n",
    (4, (0, 0, 0, 0), (1, 1, 1, 1, 2, 2)): "o",
}
_LEFTOVER_LETTERS = ("i", "j", "k")


def graph_letter(g: AbstractGraph) -> str:
    sig = g.signature()
    if sig in _LETTER_BY_SIGNATURE:
        return _LETTER_BY_SIGNATURE[sig]
    leftovers = sorted(
        s for s in _all_signatures(4) if s not in _LETTER_BY_SIGNATURE
    )
    return _LEFTOVER_LETTERS[leftovers.index(sig)]


@lru_cache(maxsize=None)
def _all_signatures(max_vertices: int) -> Tuple[Tuple, ...]:
    return tuple(g.signature() for g in enum_graphs(max_vertices))


def lemma1_check(g: AbstractGraph) -> bool:
    """Every 4-regular graph on <= 4 vertices has a loop or a multiple edge.

    The vertexless circle counts as a loop by convention.
    """
    if g.vertices == 0:
        return True
    mults: Dict[Tuple[int, int], int] = {}
    for a, b in g.edges:
        if a == b:
            return True
        mults[(a, b)] = mults.get((a, b), 0) + 1
    return any(m >= 2 for m in mults.values())


def _connected(vertices: int, edges: Sequence[Tuple[int, int]]) -> bool:
    if vertices == 0:
        return True
    adj: Dict[int, Set[int]] = {v: set() for v in range(vertices)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == vertices


@lru_cache(maxsize=None)
def enum_graphs(max_vertices: int) -> Tuple[AbstractGraph, ...]:
    """All isomorphism classes of connected 4-regular multigraphs with at
    most max_vertices vertices and at most 2 loops, plus the vertexless
    circle."""
    if not 0 <= max_vertices <= 4:
        raise ValueError("max_vertices must be between 0 and 4")
    found: Dict[Tuple, AbstractGraph] = {}
    circle = AbstractGraph(0, ())
    found[(0, circle.canonical_edges())] = circle
    for v in range(1, max_vertices + 1):
        for g in _graphs_on(v):
            if g.loop_count() > 2:
                continue
            if not _connected(v, g.edges):
                continue
            key = (v, g.canonical_edges())
            if key not in found:
                found[key] = AbstractGraph(v, key[1])
    return tuple(sorted(found.values(), key=lambda g: (g.vertices, g.edges)))


def _graphs_on(v: int) -> Iterator[AbstractGraph]:
    """All 4-regular multigraphs on exactly v labeled vertices."""
    slots = [(i, j) for i in range(v) for j in range(i, v)]

    def rec(idx: int, degrees: List[int], chosen: List[Tuple[int, int]]):
        if idx == len(slots):
            if all(d == 4 for d in degrees):
                yield AbstractGraph(v, tuple(chosen))
            return
        i, j = slots[idx]
        inc = 2 if i == j else 1
        room = min((4 - degrees[i]) // inc, (4 - degrees[j]) // inc) if i != j else (4 - degrees[i]) // inc
        for count in range(room + 1):
            degrees[i] += inc * count
            if i != j:
                degrees[j] += count
            yield from rec(idx + 1, degrees, chosen + [(i, j)] * count)
            degrees[i] -= inc * count
            if i != j:
                degrees[j] -= count

    yield from rec(0, [0] * v, [])


def underlying_graph(mp: CombinatorialMap) -> AbstractGraph:
    edges = tuple(
        sorted(
            tuple(sorted((crossing(h), crossing(t))))
            for h, t in enumerate(mp.pairing)
            if h < t
        )
    )
    g = AbstractGraph(mp.n, edges)
    return AbstractGraph(mp.n, g.canonical_edges())


# ---------------------------------------------------------------------------
# Pairing enumeration
# ---------------------------------------------------------------------------


def enum_pairings(n: int) -> Iterator[Tuple[int, ...]]:
    """Fixed-point-free involutions on 4n half-edges, pruned.

    Pruning drops (a) pairings joining opposite slots of one crossing (they
    always split off a crossing-free component), (b) branches that would
    leave the map disconnected, and (c) most crossing-relabeling duplicates:
    a fresh crossing may only be entered through its slot 0.  Every
    isomorphism class of connected maps keeps at least one representative.
    """
    total = 4 * n
    pairing = [-1] * total
    activated = [False] * n
    if n:
        activated[0] = True

    def backtrack(h: int) -> Iterator[Tuple[int, ...]]:
        while h < total and pairing[h] != -1:
            h += 1
        if h == total:
            yield tuple(pairing)
            return
        if not activated[crossing(h)]:
            return  # finished component with crossings left over: disconnected
        candidates = []
        for j in range(h + 1, total):
            if pairing[j] != -1:
                continue
            c = crossing(j)
            if activated[c]:
                if j == opposite(h):
                    continue
                candidates.append(j)
            else:
                candidates.append(j)  # slot 0 of the first fresh crossing
                break
        for j in candidates:
            fresh = not activated[crossing(j)]
            pairing[h], pairing[j] = j, h
            activated[crossing(j)] = True
            yield from backtrack(h + 1)
            pairing[h], pairing[j] = -1, -1
            if fresh:
                activated[crossing(j)] = False

    if n == 0:
        return
    yield from backtrack(0)


# ---------------------------------------------------------------------------
# Winding solving
# ---------------------------------------------------------------------------


class Unsolvable(ValueError):
    pass


def _face_matrix(mp: CombinatorialMap, orbits: Sequence[Tuple[int, ...]]):
    edges = mp.edges()
    eidx = {e: i for i, e in enumerate(edges)}
    rows = []
    for orbit in orbits:
        row = [0] * len(edges)
        for h in orbit:
            t = mp.pairing[h]
            row[eidx[min(h, t)]] += 1 if h < t else -1
        rows.append(row)
    return edges, eidx, rows


def winding_solve_cellular(mp: CombinatorialMap) -> Winding:
    """Windings for a torus-cellular rotation system (F = n): solve the
    face-boundary system over Z and pick two cocycles generating the
    quotient by coboundaries, normalized to Z^2 via Smith normal form."""
    orbits = trace_faces(mp)
    n = mp.n
    if len(orbits) != n:
        raise Unsolvable(f"face count {len(orbits)} != n")
    edges, eidx, m = _face_matrix(mp, orbits)
    kernel = intlinalg.kernel_basis(m)
    cob = []
    for c in range(n):
        row = [0] * len(edges)
        for e in edges:
            t = mp.pairing[e]
            row[eidx[e]] += (1 if crossing(t) == c else 0) - (1 if crossing(e) == c else 0)
        cob.append(row)
    coords = [intlinalg.solve_in_lattice(kernel, b) for b in cob]
    s, _u, _v, _uinv, vinv = intlinalg.smith_normal_form(coords)
    diag = [d for d in intlinalg.diagonal(s) if d != 0]
    free = len(kernel) - len(diag)
    if any(d != 1 for d in diag) or free != 2:
        raise Unsolvable(f"cocycle quotient is not Z^2 (divisors {diag}, free {free})")
    gen_rows = vinv[len(diag):]
    z = [
        [sum(row[k] * kernel[k][i] for k in range(len(kernel))) for i in range(len(edges))]
        for row in gen_rows
    ]
    return {edges[i]: (z[0][i], z[1][i]) for i in range(len(edges))}


def winding_solve_annular(mp: CombinatorialMap, face_pair: Tuple[int, int]) -> Winding:
    """Windings for a spherical rotation system with two designated faces:
    the designated boundary classes become +(0,1) and -(0,1), found by
    pushing one unit of flux along a dual path between the two faces."""
    orbits = trace_faces(mp)
    n = mp.n
    if len(orbits) != n + 2:
        raise Unsolvable(f"face count {len(orbits)} != n + 2")
    fi, fj = face_pair
    if fi == fj:
        raise Unsolvable("annulus attachment needs two distinct faces")
    edges, eidx, m = _face_matrix(mp, orbits)
    adj: Dict[int, List[Tuple[int, int]]] = {k: [] for k in range(len(orbits))}
    face_of = {}
    for k, orbit in enumerate(orbits):
        for h in orbit:
            face_of[h] = k
    for e in edges:
        a, b = face_of[e], face_of[mp.pairing[e]]
        if a != b:
            adj[a].append((b, e))
            adj[b].append((a, e))
    prev: Dict[int, Tuple[int, int]] = {fi: (-1, -1)}
    queue = [fi]
    while queue and fj not in prev:
        cur = queue.pop(0)
        for nxt, e in adj[cur]:
            if nxt not in prev:
                prev[nxt] = (cur, e)
                queue.append(nxt)
    if fj not in prev:
        raise Unsolvable("designated faces are not dual-connected")
    y = [0] * len(edges)
    node = fj
    while node != fi:
        parent, e = prev[node]
        y[eidx[e]] += m[parent][eidx[e]]
        node = parent
    return {edges[i]: (0, y[i]) for i in range(len(edges))}


# ---------------------------------------------------------------------------
# Shadow enumeration
# ---------------------------------------------------------------------------


def enum_shadows(n: int) -> List[TorusProjection]:
    """All knot shadows with exactly n crossings embeddable in T, prior to
    primeness filtering and deduplication.  n = 0 gives the essential circle."""
    if not 0 <= n <= 4:
        raise ValueError("n must be between 0 and 4")
    if n == 0:
        return [TorusProjection.circle((0, 1))]
    shadows: List[TorusProjection] = []
    for pairing in enum_pairings(n):
        mp = CombinatorialMap(pairing)
        try:
            trace_strand(mp)
        except LinkShadowError:
            continue
        nfaces = len(trace_faces(mp))
        if nfaces == n:
            proj = TorusProjection.from_map(mp, winding_solve_cellular(mp))
            assert classify_embedding(proj).kind == CELLULAR
            shadows.append(proj)
        elif nfaces == n + 2:
            for fi in range(nfaces):
                for fj in range(fi + 1, nfaces):
                    w = winding_solve_annular(mp, (fi, fj))
                    proj = TorusProjection.from_map(mp, w)
                    assert classify_embedding(proj).kind == ANNULAR
                    shadows.append(proj)
        # any other face count needs genus >= 2, not embeddable in T
    return shadows


# ---------------------------------------------------------------------------
# Primeness
# ---------------------------------------------------------------------------


def _strand_split_counts(mp: CombinatorialMap, e1: int, e2: int) -> Tuple[int, int]:
    """Cut the strand inside edges e1 and e2; return, per resulting arc, the
    number of crossings with both passes inside that arc."""
    walk = trace_strand(mp)
    m = 2 * mp.n
    edge_pos = {}
    pass_cross = []
    for i in range(m):
        out = walk[2 * i]
        edge_pos[min(out, mp.pairing[out])] = i
        pass_cross.append(crossing(walk[2 * i + 1]))
    a, b = edge_pos[e1], edge_pos[e2]
    if a > b:
        a, b = b, a
    arc1 = pass_cross[a:b]
    arc2 = pass_cross[b:] + pass_cross[:a]
    count1 = sum(1 for c in set(arc1) if arc1.count(c) == 2)
    count2 = sum(1 for c in set(arc2) if arc2.count(c) == 2)
    return count1, count2


def _cyclically_interleaved(k: int, pair1: Tuple[int, int], pair2: Tuple[int, int]) -> bool:
    """Whether the two position pairs interleave in a cyclic order of size k."""
    i, j = pair1

    def between(x):  # strictly inside the arc i -> j (forward)
        return (x - i) % k < (j - i) % k and x != i

    a, b = pair2
    return between(a) != between(b)


def is_composite(proj: TorusProjection) -> bool:
    """Composite test: a null-homologous simple closed curve crossing the
    shadow in exactly two edges, with at least one crossing strictly on each
    side.

    The curve is encoded by a pair of edge-side occurrences sharing a face f
    (one arc) whose partner occurrences share a face f'; its class is the sum
    of the two partial face-boundary walks between the doors.  Arcs through a
    designated (annulus) face have two boundary-parallel classes, realized by
    walking the boundary either way.
    """
    mp = proj.map
    n = proj.n
    if n < 2:
        return False
    fs = face_structure(proj)
    trav = proj.traversal_table()
    for p in range(4 * n):
        for q in range(p + 1, 4 * n):
            pp, qq = mp.pairing[p], mp.pairing[q]
            if min(p, pp) == min(q, qq):
                continue  # same edge: one side is always a bare arc
            f = fs.face_of[p]
            if fs.face_of[q] != f:
                continue
            f2 = fs.face_of[pp]
            if fs.face_of[qq] != f2:
                continue
            i, j = fs.position[p], fs.position[q]
            i2, j2 = fs.position[pp], fs.position[qq]
            if f == f2 and _cyclically_interleaved(
                len(fs.faces[f].traversals), (i, j), (i2, j2)
            ):
                continue
            s_ij = fs.partial_sum(f, i, j)
            s_ji = fs.partial_sum(f, j, i)
            s2_ji = fs.partial_sum(f2, j2, i2)
            s2_ij = fs.partial_sum(f2, i2, j2)
            wp, wq = trav[p], trav[q]
            classes = {
                vadd(s_ij, s2_ji),
                vadd(vadd(s_ij, vneg(s2_ij)), vadd(wp, wq)),
                vadd(vneg(s_ji), vadd(s2_ji, vneg(vadd(wp, wq)))),
                vadd(vneg(s_ji), vneg(s2_ij)),
            }
            if (0, 0) not in classes:
                continue
            c1, c2 = _strand_split_counts(mp, min(p, pp), min(q, qq))
            if c1 >= 1 and c2 >= 1:
                return True
    return False


def is_prime(proj: TorusProjection) -> bool:
    """Neither local nor composite; in particular no trivial loops."""
    if proj.map is None:
        return proj.circle_class != (0, 0)
    if classify_embedding(proj).kind == "local":
        return False
    for e, w in proj.winding.items():
        if proj.map.is_loop(e) and w == (0, 0):
            return False
    return not is_composite(proj)


# ---------------------------------------------------------------------------
# Fingerprints and deduplication
# ---------------------------------------------------------------------------

Fingerprint = Tuple[Tuple[int, str], ...]


def fingerprint(proj: TorusProjection) -> Fingerprint:
    """Multiset of per-face corner counts annotated disk/annular; the two
    designated boundary cycles of an annular shadow count as one annular
    face with their corners summed."""
    if proj.map is None:
        return ((0, "annular"),)
    emb = classify_embedding(proj)
    fs = face_structure(proj)
    out: List[Tuple[int, str]] = []
    if emb.kind == ANNULAR:
        i, j = emb.designated
        out.append((fs.faces[i].degree + fs.faces[j].degree, "annular"))
        for k, face in enumerate(fs.faces):
            if k not in (i, j):
                out.append((face.degree, "disk"))
    else:
        out = [(face.degree, "disk") for face in fs.faces]
    return tuple(sorted(out))


@dataclass
class ProjectionRecord:
    name: str
    projection: TorusProjection
    key: str
    crossings: int
    embedding: str
    graph_letter: str
    graph_key: str
    fingerprint: Fingerprint
    prime: bool


def dedupe_projections(
    shadows: Sequence[TorusProjection], prime_flags: Optional[Sequence[bool]] = None
) -> List[ProjectionRecord]:
    """Quotient shadows by the relabel+reflect canonical key and name the
    classes n_k in canonical-key order within each crossing number."""
    chosen: Dict[str, Tuple[TorusProjection, bool]] = {}
    for idx, proj in enumerate(shadows):
        key = canonical_projection_key(proj)
        if key not in chosen:
            prime = prime_flags[idx] if prime_flags is not None else is_prime(proj)
            chosen[key] = (canonical_projection_form(proj), prime)
    records: List[ProjectionRecord] = []
    by_n: Dict[int, List[str]] = {}
    for key, (proj, _) in chosen.items():
        by_n.setdefault(proj.n, []).append(key)
    for n in sorted(by_n):
        for i, key in enumerate(sorted(by_n[n]), start=1):
            proj, prime = chosen[key]
            emb = classify_embedding(proj)
            if proj.map is None:
                letter, gkey = "a", AbstractGraph(0, ()).key()
            else:
                g = underlying_graph(proj.map)
                letter, gkey = graph_letter(g), g.key()
            records.append(
                ProjectionRecord(
                    name=f"{n}_{i}",
                    projection=proj,
                    key=key,
                    crossings=n,
                    embedding=emb.kind,
                    graph_letter=letter,
                    graph_key=gkey,
                    fingerprint=fingerprint(proj),
                    prime=prime,
                )
            )
    return records


@lru_cache(maxsize=None)
def prime_projection_records(max_crossings: int) -> Tuple[ProjectionRecord, ...]:
    """The deduplicated prime shadows with at most max_crossings crossings."""
    shadows: List[TorusProjection] = []
    for n in range(max_crossings + 1):
        shadows.extend(s for s in enum_shadows(n) if is_prime(s))
    return tuple(dedupe_projections(shadows, prime_flags=[True] * len(shadows)))


@lru_cache(maxsize=None)
def all_projection_records(max_crossings: int) -> Tuple[ProjectionRecord, ...]:
    """All deduplicated shadows (prime and not) with at most max_crossings."""
    shadows: List[TorusProjection] = []
    for n in range(max_crossings + 1):
        shadows.extend(enum_shadows(n))
    return tuple(dedupe_projections(shadows))
