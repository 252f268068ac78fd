"""Reidemeister rewriting on torus diagrams.

Move kinds: R1_DOWN removes a kink bounding a monogon disk face; R2_DOWN
removes a bigon whose two crossings have one strand over at both; R3 slides
the strand that passes over (or under) both others across the opposite
crossing of a triangle disk face; R2_UP pushes one face-coresident edge
occurrence across another, creating a bigon.

Windings are redistributed locally so every face class is preserved; each
application re-validates the result.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .diagram import (
    CombinatorialMap,
    FaceStructure,
    TorusDiagram,
    TorusProjection,
    ValidationError,
    Vec,
    canonical_key,
    canonical_form,
    classify_embedding,
    crossing,
    face_structure,
    knot_class,
    opposite,
    rotate,
    slot,
    trace_strand,
    validate_projection,
    vadd,
    vneg,
)


class MoveKind(Enum):
    R1_DOWN = "r1down"
    R2_DOWN = "r2down"
    R3 = "r3"
    R2_UP = "r2up"
    R1_UP = "r1up"  # kink insertion; only generated inside the search


@dataclass(frozen=True)
class MoveSite:
    kind: MoveKind
    # R1_DOWN: (monogon traversal half-edge,)
    # R2_DOWN: (bigon first traversal half-edge,)
    # R3: (first side traversal h1, 1 if the moving strand is over else 0)
    # R2_UP: (occurrence h_i, occurrence h_j, 1 if e_i pushed over else 0,
    #         branch 0/1 for the class split through a designated face)
    # R1_UP: (edge half-edge h, chirality 0/1, over bit of the new crossing)
    data: Tuple[int, ...]


class InapplicableMoveError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Site detection
# ---------------------------------------------------------------------------


def _strand_over_at(diagram: TorusDiagram, c: int, pass_parity: int) -> bool:
    return diagram.over[c] == pass_parity


def find_moves(
    diagram: TorusDiagram,
    kinds: Iterable[MoveKind] = (MoveKind.R1_DOWN, MoveKind.R2_DOWN, MoveKind.R3),
) -> List[MoveSite]:
    kinds = set(kinds)
    proj = diagram.projection
    sites: List[MoveSite] = []
    if proj.map is None:
        return sites
    fs = face_structure(proj)
    for face in fs.faces:
        deg = face.degree
        trav = face.traversals
        if deg == 1 and MoveKind.R1_DOWN in kinds and face.is_disk:
            sites.append(MoveSite(MoveKind.R1_DOWN, (trav[0],)))
        elif deg == 2 and MoveKind.R2_DOWN in kinds and face.is_disk:
            g0, g1 = trav
            u = crossing(g0)
            v = crossing(proj.map.pairing[g0])
            if u == v:
                continue
            # strand through edge(g0): over at u iff over at v
            over_u = _strand_over_at(diagram, u, slot(g0) & 1)
            over_v = _strand_over_at(diagram, v, slot(proj.map.pairing[g0]) & 1)
            if over_u == over_v:
                sites.append(MoveSite(MoveKind.R2_DOWN, (g0,)))
        elif deg == 3 and MoveKind.R3 in kinds and face.is_disk:
            a, b, c = (crossing(h) for h in trav)
            if len({a, b, c}) != 3:
                continue
            for k in range(3):
                h1 = trav[k]
                h2 = trav[(k + 1) % 3]
                h3 = trav[(k + 2) % 3]
                # the moving strand runs along edge(h2), crossing the others
                # at A = crossing(h2) and B = crossing(h3)
                p1 = slot(proj.map.pairing[h1])
                p2 = slot(proj.map.pairing[h2])
                over_a = _strand_over_at(diagram, crossing(h2), (p1 + 1) & 1)
                over_b = _strand_over_at(diagram, crossing(h3), p2 & 1)
                if over_a and over_b:
                    sites.append(MoveSite(MoveKind.R3, (h1, 1)))
                elif not over_a and not over_b:
                    sites.append(MoveSite(MoveKind.R3, (h1, 0)))
    if MoveKind.R2_UP in kinds:
        sites.extend(find_r2up_sites(diagram, fs))
    return sites


def find_r2up_sites(diagram: TorusDiagram, fs: Optional[FaceStructure] = None) -> List[MoveSite]:
    """Pairs of face-coresident edge occurrences; enumerated on demand."""
    proj = diagram.projection
    if proj.map is None:
        return []
    if fs is None:
        fs = face_structure(proj)
    sites: List[MoveSite] = []
    for face in fs.faces:
        branches = (0,) if face.is_disk else (0, 1)
        members = set(face.traversals)
        for hi in face.traversals:
            for hj in face.traversals:
                if hi == hj:
                    continue
                if hj == proj.map.pairing[hi]:
                    # both sides of one edge on this face: a finger of the
                    # edge can cross its own other side (disk faces only)
                    if face.is_disk and proj.map.pairing[hi] in members:
                        for over in (0, 1):
                            sites.append(MoveSite(MoveKind.R2_UP, (hi, hj, over, 0)))
                    continue
                for over in (0, 1):
                    for branch in branches:
                        sites.append(MoveSite(MoveKind.R2_UP, (hi, hj, over, branch)))
    return sites


# ---------------------------------------------------------------------------
# Crossing removal (shared by R1_DOWN and R2_DOWN)
# ---------------------------------------------------------------------------


def _remove_crossings(diagram: TorusDiagram, dead: Set[int]) -> TorusDiagram:
    """Delete crossings, joining the strands straight through them."""
    proj = diagram.projection
    mp = proj.map
    n = mp.n
    survivors = [c for c in range(n) if c not in dead]
    if not survivors:
        return TorusDiagram(TorusProjection.circle(knot_class(diagram)), ())
    new_index = {c: i for i, c in enumerate(survivors)}

    def new_id(h: int) -> int:
        return 4 * new_index[crossing(h)] + slot(h)

    trav = proj.traversal_table()
    new_pairing = [-1] * (4 * len(survivors))
    winding: Dict[int, Vec] = {}
    for c in survivors:
        for s in range(4):
            h = 4 * c + s
            if new_pairing[new_id(h)] != -1:
                continue
            acc = (0, 0)
            cur = h
            for _ in range(4 * n + 1):
                acc = vadd(acc, trav[cur])
                t = mp.pairing[cur]
                if crossing(t) not in dead:
                    partner = t
                    break
                cur = opposite(t)
            else:
                raise InapplicableMoveError("removal would strand a closed loop")
            a, b = new_id(h), new_id(partner)
            new_pairing[a], new_pairing[b] = b, a
            winding[min(a, b)] = acc if a < b else vneg(acc)
    new_over = tuple(diagram.over[c] for c in survivors)
    out = TorusDiagram(
        TorusProjection.from_map(CombinatorialMap(tuple(new_pairing)), winding), new_over
    )
    validate_projection(out.projection)
    return out


# ---------------------------------------------------------------------------
# R3 surgery
# ---------------------------------------------------------------------------


def _apply_r3(diagram: TorusDiagram, h1: int, s_over: int) -> TorusDiagram:
    """Slide the strand along side edge(h2) across the opposite crossing.

    Sides: e1 = edge(h1) from C to A, e2 = edge(h2) from A to B (the moving
    strand), e3 = edge(h3) from B to C.  After the slide the moving strand
    crosses the continuations of the other two strands on the far side of C;
    crossings A and B are reused for the new intersection points.
    """
    proj = diagram.projection
    mp = proj.map
    pairing = list(mp.pairing)
    h2 = rotate(pairing[h1])
    h3 = rotate(pairing[h2])
    if rotate(pairing[h3]) != h1:
        raise InapplicableMoveError("not a triangle face")
    A, B, C = crossing(h2), crossing(h3), crossing(h1)
    if len({A, B, C}) != 3:
        raise InapplicableMoveError("triangle must touch three distinct crossings")
    p1, p2, p3 = slot(pairing[h1]), slot(pairing[h2]), slot(pairing[h3])

    def hA(k: int) -> int:
        return 4 * A + ((p1 + k) & 3)

    def hB(k: int) -> int:
        return 4 * B + ((p2 + k) & 3)

    def hC(k: int) -> int:
        return 4 * C + ((p3 + k) & 3)

    trav = proj.traversal_table()
    hC_e3 = pairing[h3]
    far = {
        "beta": pairing[hA(3)],
        "alpha": pairing[hA(2)],
        "gamma": pairing[hB(2)],
        "delta": pairing[hB(3)],
        "eps": pairing[hC(2)],
        "zeta": pairing[hC(3)],
    }
    # The moved strand meets the other two strands in the opposite order
    # after the slide, so its outer tails swap carriers: the beta tail now
    # enters at the new strand3 crossing (reusing label B) and the gamma
    # tail at the new strand1 crossing (label A).  Each displaced local
    # attachment carries a winding correction transporting it to its new
    # position next to C.
    tr: Dict[int, Tuple[int, Vec]] = {
        hA(3): (hB(1), vneg(trav[h1])),       # old beta attachment
        hB(2): (hA(0), vneg(trav[hC_e3])),    # old gamma attachment
        hC(2): (hB(2), (0, 0)),               # old eps attachment
        hC(3): (hA(3), (0, 0)),               # old zeta attachment
        hA(2): (hC(1), vneg(trav[h1])),       # old alpha attachment
        hB(3): (hC(0), vneg(trav[hC_e3])),    # old delta attachment
    }

    def translate(h: int) -> Tuple[int, Vec]:
        return tr.get(h, (h, (0, 0)))

    # (new half-edge, far target in old ids, winding path in old traversals)
    specs = [
        (hA(0), far["gamma"], (hC_e3, hB(2))),
        (hA(3), far["zeta"], (hC(3),)),
        (hB(1), far["beta"], (h1, hA(3))),
        (hB(2), far["eps"], (hC(2),)),
        (hC(0), far["delta"], (hC_e3, hB(3))),
        (hC(1), far["alpha"], (h1, hA(2))),
    ]
    fixed_pairs = [
        (hA(1), hC(3)),  # short A*-C piece of zeta
        (hB(0), hC(2)),  # short B*-C piece of eps
        (hA(2), hB(3)),  # middle edge of the moved strand
    ]

    local = {4 * X + s for X in (A, B, C) for s in range(4)}
    new_pairs: Dict[int, int] = {}
    new_winding_directed: Dict[Tuple[int, int], Vec] = {}

    def set_pair(x: int, y: int, w: Vec) -> None:
        for a, b in ((x, y), (y, x)):
            if a in new_pairs and new_pairs[a] != b:
                raise InapplicableMoveError("inconsistent rewiring")
        new_pairs[x] = y
        new_pairs[y] = x
        key = (x, y)
        if (y, x) in new_winding_directed:
            if new_winding_directed[(y, x)] != vneg(w):
                raise InapplicableMoveError("inconsistent winding rewiring")
        else:
            new_winding_directed[key] = w

    for x, y in fixed_pairs:
        set_pair(x, y, (0, 0))
    for x, target, path in specs:
        w = (0, 0)
        for step in path:
            w = vadd(w, trav[step])
        y, corr = translate(target)
        set_pair(x, y, vadd(w, corr))

    new_pairing = list(pairing)
    for h in local:
        new_pairing[h] = -1
    for x, y in new_pairs.items():
        new_pairing[x] = y
    if -1 in new_pairing:
        raise InapplicableMoveError("rewiring left an unpaired half-edge")

    winding: Dict[int, Vec] = {}
    for e, w in proj.winding.items():
        t = mp.pairing[e]
        if e in local or t in local:
            continue
        winding[e] = w
    for (x, y), w in new_winding_directed.items():
        winding[min(x, y)] = w if x < y else vneg(w)

    over = list(diagram.over)
    over[A] = (p1 & 1) if s_over else 1 - (p1 & 1)
    over[B] = ((p2 + 1) & 1) if s_over else 1 - ((p2 + 1) & 1)
    out = TorusDiagram(
        TorusProjection.from_map(CombinatorialMap(tuple(new_pairing)), winding),
        tuple(over),
    )
    validate_projection(out.projection)
    return out


# ---------------------------------------------------------------------------
# R2 up
# ---------------------------------------------------------------------------


def _apply_r2up(diagram: TorusDiagram, hi: int, hj: int, over: int, branch: int) -> TorusDiagram:
    proj = diagram.projection
    mp = proj.map
    n = mp.n
    fs = face_structure(proj)
    f = fs.face_of[hi]
    if fs.face_of[hj] != f:
        raise InapplicableMoveError("occurrences must share a face")
    if hj == hi or hj == mp.pairing[hi]:
        raise InapplicableMoveError("occurrences must be on distinct edges")
    face = fs.faces[f]
    if branch and face.is_disk:
        raise InapplicableMoveError("class split branch needs a designated face")
    Hi, Hj = mp.pairing[hi], mp.pairing[hj]
    trav = proj.traversal_table()
    part_b = fs.partial_sum(f, fs.position[hj], fs.position[hi])
    target = face.boundary_class if branch else (0, 0)
    a_piece = vadd(target, vneg(part_b))  # directed from the hi end
    b_piece = vadd(trav[hi], vneg(a_piece))  # directed from the L end

    L, R = n, n + 1

    def l(s: int) -> int:
        return 4 * L + s

    def r(s: int) -> int:
        return 4 * R + s

    new_pairing = list(mp.pairing) + [-1] * 8
    winding = dict(proj.winding)
    for e in (min(hi, Hi), min(hj, Hj)):
        del winding[e]

    def set_pair(x: int, y: int, w_directed: Vec) -> None:
        new_pairing[x] = y
        new_pairing[y] = x
        winding[min(x, y)] = w_directed if x < y else vneg(w_directed)

    set_pair(l(0), r(2), (0, 0))          # bigon side on e_j
    set_pair(l(1), r(1), (0, 0))          # finger top of e_i
    set_pair(l(2), hj, vneg(trav[hj]))    # c piece, directed L -> c end
    set_pair(l(3), Hi, b_piece)           # b piece, directed L -> b end
    set_pair(r(0), Hj, (0, 0))            # d piece
    set_pair(r(3), hi, vneg(a_piece))     # a piece, directed R -> a end
    bit = 1 if over else 0
    out = TorusDiagram(
        TorusProjection.from_map(CombinatorialMap(tuple(new_pairing)), winding),
        tuple(diagram.over) + (bit, bit),
    )
    validate_projection(out.projection)
    return out


def find_r1up_sites(diagram: TorusDiagram) -> List[MoveSite]:
    """Kink insertions: either chirality and either over bit, on any edge end."""
    proj = diagram.projection
    if proj.map is None:
        return []
    sites = []
    for h in range(4 * proj.map.n):
        for chirality in (0, 1):
            for over in (0, 1):
                sites.append(MoveSite(MoveKind.R1_UP, (h, chirality, over)))
    return sites


def _apply_r1up(diagram: TorusDiagram, h: int, chirality: int, over: int) -> TorusDiagram:
    """Insert a trivial kink on the edge at h, next to its h end."""
    proj = diagram.projection
    mp = proj.map
    n = mp.n
    H = mp.pairing[h]
    K = n

    def k(s: int) -> int:
        return 4 * K + s

    new_pairing = list(mp.pairing) + [-1] * 4
    winding = dict(proj.winding)
    w = winding.pop(min(h, H))
    w_from_h = w if h < H else (-w[0], -w[1])

    def set_pair(x: int, y: int, w_directed):
        new_pairing[x] = y
        new_pairing[y] = x
        winding[min(x, y)] = w_directed if x < y else (-w_directed[0], -w_directed[1])

    if chirality == 0:
        # piece1 h->K0 carries the whole winding; loop K2-K3; piece2 K1->H
        set_pair(h, k(0), w_from_h)
        set_pair(k(1), H, (0, 0))
        set_pair(k(2), k(3), (0, 0))
    else:
        set_pair(h, k(0), w_from_h)
        set_pair(k(3), H, (0, 0))
        set_pair(k(1), k(2), (0, 0))
    out = TorusDiagram(
        TorusProjection.from_map(CombinatorialMap(tuple(new_pairing)), winding),
        tuple(diagram.over) + (over,),
    )
    validate_projection(out.projection)
    return out


# ---------------------------------------------------------------------------
# Application dispatch
# ---------------------------------------------------------------------------


def apply_move(diagram: TorusDiagram, site: MoveSite) -> TorusDiagram:
    if site.kind is MoveKind.R1_DOWN:
        (g,) = site.data
        mp = diagram.projection.map
        if rotate(mp.pairing[g]) != g:
            raise InapplicableMoveError("not a monogon")
        return _remove_crossings(diagram, {crossing(g)})
    if site.kind is MoveKind.R2_DOWN:
        (g0,) = site.data
        mp = diagram.projection.map
        g1 = rotate(mp.pairing[g0])
        if rotate(mp.pairing[g1]) != g0:
            raise InapplicableMoveError("not a bigon")
        u, v = crossing(g0), crossing(mp.pairing[g0])
        if u == v:
            raise InapplicableMoveError("bigon touches a single crossing")
        return _remove_crossings(diagram, {u, v})
    if site.kind is MoveKind.R3:
        h1, s_over = site.data
        return _apply_r3(diagram, h1, s_over)
    if site.kind is MoveKind.R2_UP:
        hi, hj, over, branch = site.data
        return _apply_r2up(diagram, hi, hj, over, branch)
    if site.kind is MoveKind.R1_UP:
        h, chirality, over = site.data
        return _apply_r1up(diagram, h, chirality, over)
    raise InapplicableMoveError(f"unknown move kind {site.kind}")


def simplify(diagram: TorusDiagram) -> Tuple[TorusDiagram, int]:
    """Greedily apply R1_DOWN/R2_DOWN to a fixpoint."""
    steps = 0
    while True:
        sites = find_moves(diagram, (MoveKind.R1_DOWN, MoveKind.R2_DOWN))
        if not sites:
            return diagram, steps
        diagram = apply_move(diagram, sites[0])
        steps += 1


# ---------------------------------------------------------------------------
# Equivalence search
# ---------------------------------------------------------------------------


@dataclass
class SearchResult:
    status: str  # "equivalent" | "not_found" | "cap_exceeded"
    steps: int
    visited: int
    depth: Optional[int] = None

    EQUIVALENT = "equivalent"
    NOT_FOUND = "not_found"
    CAP_EXCEEDED = "cap_exceeded"


def _successors(diagram: TorusDiagram, max_crossings: int) -> List[TorusDiagram]:
    out = []
    kinds = [MoveKind.R1_DOWN, MoveKind.R2_DOWN, MoveKind.R3]
    if diagram.n + 2 <= max_crossings:
        kinds.append(MoveKind.R2_UP)
    sites = find_moves(diagram, kinds)
    if diagram.n + 1 <= max_crossings:
        sites.extend(find_r1up_sites(diagram))
    for site in sites:
        try:
            out.append(apply_move(diagram, site))
        except InapplicableMoveError:
            continue
    return out


def equivalence_search(
    d1: TorusDiagram,
    d2: TorusDiagram,
    max_crossings: int,
    max_steps: int = 20000,
) -> SearchResult:
    """Breadth-first search over canonical keys from d1 using all move kinds,
    crossing count capped.  "equivalent" is a proof; "not_found" is not."""
    target = canonical_key(d2)
    start_key = canonical_key(d1)
    if start_key == target:
        return SearchResult(SearchResult.EQUIVALENT, 0, 1, 0)
    visited = {start_key}
    frontier = deque([(d1, 0)])
    steps = 0
    while frontier:
        if steps >= max_steps:
            return SearchResult(SearchResult.CAP_EXCEEDED, steps, len(visited))
        node, depth = frontier.popleft()
        steps += 1
        for child in _successors(node, max_crossings):
            key = canonical_key(child)
            if key == target:
                return SearchResult(SearchResult.EQUIVALENT, steps, len(visited) + 1, depth + 1)
            if key not in visited:
                visited.add(key)
                frontier.append((child, depth + 1))
    return SearchResult(SearchResult.NOT_FOUND, steps, len(visited))


def merge_equivalent(
    diagrams: Sequence[TorusDiagram],
    max_crossings: int,
    max_steps: int = 20000,
) -> Tuple[List[List[int]], bool]:
    """Partition diagrams into connected components of the move graph.

    Runs one shared breadth-first exploration from every diagram; components
    merge when their explored key sets touch.  Returns (groups, capped);
    capped reports that some exploration hit the step budget, in which case
    distinct groups are inconclusive.
    """
    parent = list(range(len(diagrams)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        parent[find(i)] = find(j)

    owner: Dict[str, int] = {}
    capped = False

    def connected() -> bool:
        return len({find(i) for i in range(len(diagrams))}) == 1

    for i, d in enumerate(diagrams):
        key = canonical_key(d)
        if key in owner:
            union(i, owner[key])
        else:
            owner[key] = i
    for i, d in enumerate(diagrams):
        if connected():
            break
        frontier = deque([d])
        steps = 0
        while frontier:
            if steps >= max_steps:
                capped = True
                break
            node = frontier.popleft()
            steps += 1
            for child in _successors(node, max_crossings):
                key = canonical_key(child)
                if key in owner:
                    if find(owner[key]) != find(i):
                        union(i, owner[key])
                        if connected():
                            frontier.clear()
                            break
                    continue
                owner[key] = find(i)
                frontier.append(child)
    groups: Dict[int, List[int]] = {}
    for i in range(len(diagrams)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values()), capped
