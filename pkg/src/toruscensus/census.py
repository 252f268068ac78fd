"""Census pipeline: prime shadows -> irreducible diagrams -> invariants ->
equivalence merging -> verified table, statistics and exports."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .diagram import (
    TorusDiagram,
    Vec,
    canonical_form,
    canonical_key,
    canonical_projection_key,
    encode_tkc,
    decode_diagram,
    knot_class,
    knot_class_mod2,
    is_alternating,
    writhe,
)
from .enumeration import (
    Fingerprint,
    ProjectionRecord,
    fingerprint,
    prime_projection_records,
)
from .invariant import canonical_invariant, kauffman_x, table_form
from .moves import MoveKind, find_moves, merge_equivalent
from .poly import XPolynomial

VERSION = "0.1.0"

CONVENTIONS = {
    "slot_order": "counterclockwise; slots {0,2} and {1,3} are the strand passes",
    "face_rule": "pairing then rotate one slot counterclockwise",
    "smoothing_rule": "marker A opens the corners counterclockwise from the over strand",
}


class CensusError(RuntimeError):
    pass


class UnresolvedPairError(CensusError):
    """An equal-invariant group could not be merged nor separated."""

    def __init__(self, report: List[str]):
        super().__init__("unresolved equal-invariant groups:\n" + "\n".join(report))
        self.report = report


@dataclass
class CensusRecord:
    name: str
    diagram: TorusDiagram
    tkc: str
    invariant: XPolynomial
    table_polynomial: XPolynomial
    writhe: int
    class_z: Vec
    class_mod2: Vec
    alternating: bool
    crossings: int
    projection_name: str
    projection_key: str
    fingerprint: Fingerprint


@dataclass
class CensusTable:
    max_crossings: int
    records: List[CensusRecord]
    projections: List[ProjectionRecord]
    minimal_projection_names: List[str]
    merge_events: List[str]
    provenance: Dict[str, str] = field(default_factory=dict)

    def record_by_name(self, name: str) -> CensusRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)


def _irreducible_diagrams(proj_record: ProjectionRecord) -> List[TorusDiagram]:
    """Over-bit assignments on a projection, up to the global flip, with
    removable bigons discarded and projection symmetries quotiented."""
    proj = proj_record.projection
    n = proj_record.crossings
    if n == 0:
        return [TorusDiagram(proj, ())]
    chosen: Dict[str, TorusDiagram] = {}
    for bits in range(1 << (n - 1)):
        d = TorusDiagram(proj, tuple((bits >> i) & 1 for i in range(n)))
        if any(s.kind is MoveKind.R2_DOWN for s in find_moves(d, (MoveKind.R1_DOWN, MoveKind.R2_DOWN))):
            continue
        key = canonical_key(d)
        if key not in chosen:
            chosen[key] = canonical_form(d)
    return [chosen[k] for k in sorted(chosen)]


def build_census(max_crossings: int, max_steps: int = 60000) -> CensusTable:
    """Construct the verified census of prime knots with <= max_crossings.

    Candidate diagrams sharing an invariant are merged through the move
    graph; a group that does not collapse to a single knot raises
    UnresolvedPairError.  Projections that end up carrying no knot are
    prime but not minimal and are reported separately.
    """
    if not 0 <= max_crossings <= 4:
        raise ValueError("max_crossings must be between 0 and 4")
    projections = list(prime_projection_records(max_crossings))
    candidates: List[Tuple[TorusDiagram, ProjectionRecord]] = []
    for pr in projections:
        for d in _irreducible_diagrams(pr):
            candidates.append((d, pr))

    groups: Dict[Tuple, List[int]] = {}
    invariants: List[XPolynomial] = []
    for i, (d, _pr) in enumerate(candidates):
        inv = canonical_invariant(d)
        invariants.append(inv)
        groups.setdefault(inv.sort_key(), []).append(i)

    merge_events: List[str] = []
    unresolved: List[str] = []
    chosen_indices: List[int] = []
    for key in sorted(groups):
        idxs = groups[key]
        if len(idxs) == 1:
            chosen_indices.append(idxs[0])
            continue
        diagrams = [candidates[i][0] for i in idxs]
        top = max(d.n for d in diagrams)
        # cheap pass first: moves that never grow the diagram
        comps, _ = merge_equivalent(diagrams, max_crossings=top, max_steps=max_steps)
        if len(comps) > 1:
            comps, capped = merge_equivalent(diagrams, max_crossings=top + 2, max_steps=max_steps)
            if len(comps) > 1:
                status = "cap exceeded" if capped else "not connected"
                unresolved.append(
                    f"invariant {invariants[idxs[0]].encode()}: {len(idxs)} diagrams, "
                    f"{len(comps)} groups ({status}): "
                    + "; ".join(encode_tkc(candidates[i][0]) for i in idxs)
                )
                continue
        members = sorted(idxs, key=lambda i: (candidates[i][0].n, canonical_key(candidates[i][0])))
        rep = members[0]
        chosen_indices.append(rep)
        if len(idxs) > 1:
            merge_events.append(
                f"{len(idxs)} diagrams of invariant {invariants[idxs[0]].encode()} merged; "
                f"kept {encode_tkc(candidates[rep][0])}"
            )
    if unresolved:
        raise UnresolvedPairError(unresolved)

    by_n: Dict[int, List[int]] = {}
    for i in chosen_indices:
        by_n.setdefault(candidates[i][0].n, []).append(i)
    records: List[CensusRecord] = []
    for n in sorted(by_n):
        ordered = sorted(by_n[n], key=lambda i: canonical_key(candidates[i][0]))
        for k, i in enumerate(ordered, start=1):
            d, pr = candidates[i]
            records.append(
                CensusRecord(
                    name=f"{n}_{k}",
                    diagram=d,
                    tkc=encode_tkc(d),
                    invariant=invariants[i],
                    table_polynomial=table_form(d),
                    writhe=writhe(d) if n else 0,
                    class_z=knot_class(d),
                    class_mod2=knot_class_mod2(d),
                    alternating=is_alternating(d) if n else True,
                    crossings=n,
                    projection_name=pr.name,
                    projection_key=pr.key,
                    fingerprint=pr.fingerprint,
                )
            )
    seen = set()
    for r in records:
        key = r.invariant.sort_key()
        if key in seen:
            raise CensusError(f"duplicate invariant in final census: {r.invariant.encode()}")
        seen.add(key)
    minimal = sorted(
        {r.projection_name for r in records},
        key=lambda s: (int(s.split("_")[0]), int(s.split("_")[1])),
    )
    return CensusTable(
        max_crossings=max_crossings,
        records=records,
        projections=projections,
        minimal_projection_names=minimal,
        merge_events=merge_events,
        provenance={"tool": "toruscensus", "version": VERSION, "conventions": "see top-level field"},
    )


# ---------------------------------------------------------------------------
# Verification against the published polynomial table
# ---------------------------------------------------------------------------


@dataclass
class MatchReport:
    matches: List[Tuple[str, str, str]]  # (expected label, record name, how)
    unmatched_expected: List[str]
    unmatched_records: List[str]

    @property
    def perfect(self) -> bool:
        return not self.unmatched_expected and not self.unmatched_records


def parse_expected(text: str) -> List[Tuple[str, XPolynomial]]:
    """One `label: polynomial-text` per line; blank lines and # comments ok."""
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        label, _, poly = line.partition(":")
        out.append((label.strip(), XPolynomial.decode(poly)))
    return out


def load_expected_resource() -> List[Tuple[str, XPolynomial]]:
    from importlib import resources

    text = resources.files("toruscensus").joinpath("data/expected_polynomials.txt").read_text()
    return parse_expected(text)


def verify_expected(table: CensusTable, expected: Sequence[Tuple[str, XPolynomial]]) -> MatchReport:
    """Perfect matching between expected polynomials and census records.

    Each expected polynomial must equal some record's table-form polynomial
    either exactly or after the a -> 1/a mirror (the record's diagram and
    the published diagram may be mirror images of each other).
    """
    matches: List[Tuple[str, str, str]] = []
    used_records = set()
    unmatched_expected = []
    lookup: Dict[Tuple, List[Tuple[str, str]]] = {}
    for r in table.records:
        lookup.setdefault(r.table_polynomial.sort_key(), []).append((r.name, "exact"))
        lookup.setdefault(r.table_polynomial.mirror_a().sort_key(), []).append((r.name, "mirror"))
    for label, poly in expected:
        options = [
            (name, how)
            for name, how in lookup.get(poly.sort_key(), [])
            if name not in used_records
        ]
        if not options:
            unmatched_expected.append(label)
            continue
        name, how = options[0]
        used_records.add(name)
        matches.append((label, name, how))
    unmatched_records = [r.name for r in table.records if r.name not in used_records]
    return MatchReport(matches, unmatched_expected, unmatched_records)


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


@dataclass
class CensusStats:
    knots: int
    projections: int
    minimal_projections: int
    homologically_trivial: int
    alternating: int
    max_knots_per_projection: int
    mean_knots_per_projection: float
    parity_consistent: bool


def stats(table: CensusTable) -> CensusStats:
    trivial = sum(1 for r in table.records if r.class_mod2 == (0, 0))
    alt = sum(1 for r in table.records if r.crossings > 0 and r.alternating)
    per: Dict[str, int] = {}
    for r in table.records:
        per[r.projection_name] = per.get(r.projection_name, 0) + 1
    minimal = len(table.minimal_projection_names)
    parity_ok = True
    for r in table.records:
        degrees = r.invariant.x_degrees()
        parities = {d & 1 for d in degrees}
        if len(parities) != 1:
            parity_ok = False
            break
        expected_parity = 0 if r.class_mod2 == (0, 0) else 1
        if parities != {expected_parity}:
            parity_ok = False
            break
    return CensusStats(
        knots=len(table.records),
        projections=len(table.projections),
        minimal_projections=minimal,
        homologically_trivial=trivial,
        alternating=alt,
        max_knots_per_projection=max(per.values()) if per else 0,
        mean_knots_per_projection=len(table.records) / minimal if minimal else 0.0,
        parity_consistent=parity_ok,
    )


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def table_to_dict(table: CensusTable) -> Dict:
    return {
        "version": VERSION,
        "conventions": dict(CONVENTIONS),
        "max_crossings": table.max_crossings,
        "records": [
            {
                "name": r.name,
                "tkc": r.tkc,
                "polynomial": r.invariant.encode(),
                "table_polynomial": r.table_polynomial.encode(),
                "writhe": r.writhe,
                "class_z": list(r.class_z),
                "class_mod2": list(r.class_mod2),
                "alternating": r.alternating,
                "crossings": r.crossings,
                "projection": r.projection_name,
                "projection_key": r.projection_key,
                "fingerprint": [[deg, kind] for deg, kind in r.fingerprint],
            }
            for r in table.records
        ],
        "projections": [
            {
                "name": p.name,
                "tkc": encode_tkc(p.projection),
                "crossings": p.crossings,
                "embedding": p.embedding,
                "graph_letter": p.graph_letter,
                "fingerprint": [[deg, kind] for deg, kind in p.fingerprint],
                "minimal": p.name in table.minimal_projection_names,
            }
            for p in table.projections
        ],
        "merge_events": list(table.merge_events),
        "provenance": dict(table.provenance),
    }


def emit_json(table: CensusTable) -> str:
    return json.dumps(table_to_dict(table), indent=2, sort_keys=True) + "\n"


def records_from_dict(payload: Dict) -> List[CensusRecord]:
    out = []
    for item in payload["records"]:
        d = decode_diagram(item["tkc"])
        out.append(
            CensusRecord(
                name=item["name"],
                diagram=d,
                tkc=item["tkc"],
                invariant=XPolynomial.decode(item["polynomial"]),
                table_polynomial=XPolynomial.decode(item["table_polynomial"]),
                writhe=item["writhe"],
                class_z=tuple(item["class_z"]),
                class_mod2=tuple(item["class_mod2"]),
                alternating=item["alternating"],
                crossings=item["crossings"],
                projection_name=item["projection"],
                projection_key=item["projection_key"],
                fingerprint=tuple((deg, kind) for deg, kind in item["fingerprint"]),
            )
        )
    return out


def emit_csv(table: CensusTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["name", "crossings", "polynomial", "writhe", "class_z", "class_mod2", "alternating", "projection", "tkc"]
    )
    for r in table.records:
        writer.writerow(
            [
                r.name,
                r.crossings,
                r.invariant.encode(),
                r.writhe,
                f"({r.class_z[0]},{r.class_z[1]})",
                f"({r.class_mod2[0]},{r.class_mod2[1]})",
                int(r.alternating),
                r.projection_name,
                r.tkc,
            ]
        )
    return buf.getvalue()


def emit_latex(table: CensusTable) -> str:
    lines = [
        r"\begin{tabular}{llll}",
        r"name & crossings & projection & polynomial \\",
        r"\hline",
    ]
    for r in table.records:
        poly = r.invariant.encode().replace("^", r"\^{}").replace("*", r"\cdot ")
        lines.append(f"{r.name} & {r.crossings} & {r.projection_name} & ${poly}$ \\\\")
    lines.append(r"\end{tabular}")
    return "\n".join(lines) + "\n"
