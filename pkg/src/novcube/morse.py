"""A finite cell model with values: weighted complexes and their limits.

Cells carry a parity, a rational value, and optionally a projection to a
base point set through which all weight functions must factor.  The
boundary operator is an integer matrix, squaring to zero, whose arrows do
not decrease the value function; weighting its entries by T to the value
difference produces complexes over the nonnegative part of the Novikov
ring, and monotone families of weight functions produce rays whose
completed telescopes are computed here in closed form and cross-checked
against finite stages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .chain import (Barcode, ChainComplex, Generator, Label,
                    MatrixEntries, QComplex)
from .cubes import (CubeDiagram, face_codes, initial_vertex,
                    terminal_vertex, total_complex, vertex_codes)
from .novikov import NovikovScalar, rat
from .rays import (DescentReport, Ray, TailSpec, completed_homology,
                   descent_complex)


class Inadmissible(ValueError):
    pass


class NotMonotone(ValueError):
    pass


class NotNegative(ValueError):
    pass


class InadmissibleSubset(ValueError):
    pass


Hamiltonian = Dict[Label, Fraction]


class MorseModel:
    """Cells, integer boundary, values, and an optional base projection."""

    def __init__(self, cells: Iterable[Generator],
                 boundary: Dict[Tuple[Label, Label], int],
                 values: Dict[Label, Fraction],
                 base_map: Optional[Dict[Label, Label]] = None):
        self.cells = tuple(cells)
        self._parity = {g.label: g.parity for g in self.cells}
        self.boundary = {k: int(v) for k, v in boundary.items() if v}
        self.values = {l: rat(values[l]) for l in self._parity}
        self.base_map = dict(base_map) if base_map is not None else None
        for (t, s) in self.boundary:
            if (self._parity[t] - self._parity[s]) % 2 != 1:
                raise ValueError("boundary entry (%r, %r) has even parity"
                                 % (t, s))
        square: Dict[Tuple[Label, Label], int] = {}
        for (m, s), a in self.boundary.items():
            for (t, m2), b in self.boundary.items():
                if m2 == m:
                    square[(t, s)] = square.get((t, s), 0) + a * b
        if any(square.values()):
            raise ValueError("boundary does not square to zero")
        if self.base_map is not None and \
                set(self.base_map) != set(self._parity):
            raise ValueError("base map must cover every cell")

    @property
    def labels(self) -> Tuple[Label, ...]:
        return tuple(g.label for g in self.cells)

    def parity(self, label: Label) -> int:
        return self._parity[label]

    def base_points(self) -> Set[Label]:
        if self.base_map is None:
            return set(self.labels)
        return set(self.base_map.values())

    def cells_over(self, base_labels: Set[Label]) -> Set[Label]:
        if self.base_map is None:
            return {l for l in self.labels if l in base_labels}
        return {l for l in self.labels if self.base_map[l] in base_labels}

    def q_complex(self) -> QComplex:
        return QComplex(self.cells, {k: Fraction(v)
                                     for k, v in self.boundary.items()})

    def betti(self) -> Tuple[int, int]:
        return self.q_complex().homology_ranks()


def admissibility_violations(model: MorseModel, h: Hamiltonian):
    """Entries where the weight function decreases along an arrow, plus a
    base-factoring violation when one is declared."""
    bad = []
    for (q, p), c in model.boundary.items():
        if h[q] - h[p] < 0:
            bad.append((q, p, h[q] - h[p]))
    if model.base_map is not None:
        by_base: Dict[Label, Fraction] = {}
        for l in model.labels:
            b = model.base_map[l]
            if b in by_base and by_base[b] != h[l]:
                bad.append((l, "base", b))
            by_base.setdefault(b, h[l])
    return bad


def cf(model: MorseModel, h: Hamiltonian) -> ChainComplex:
    """The weighted complex: entry (q, p) is boundary * T^(h(q) - h(p))."""
    h = {l: rat(h[l]) for l in model.labels}
    bad = admissibility_violations(model, h)
    if bad:
        raise Inadmissible("weight function decreases along %r" % (bad,))
    diff: MatrixEntries = {}
    for (q, p), c in model.boundary.items():
        diff[(q, p)] = NovikovScalar.monomial(c, h[q] - h[p])
    return ChainComplex(model.cells, diff)


def continuation(model: MorseModel, h: Hamiltonian, h2: Hamiltonian
                 ) -> MatrixEntries:
    """Diagonal map p -> T^(h2(p) - h(p)) p between weighted complexes.

    The exponent bookkeeping (h2(q)-h(q)) + (h(q)-h(p)) =
    (h2(p)-h(p)) + (h2(q)-h2(p)) makes it a chain map identically.
    """
    out: MatrixEntries = {}
    for l in model.labels:
        step = rat(h2[l]) - rat(h[l])
        if step < 0:
            raise NotMonotone("weight decreases at %r" % (l,))
        out[(l, l)] = NovikovScalar.monomial(1, step)
    return out


def continuation_cube(model: MorseModel, h, h2) -> CubeDiagram:
    return CubeDiagram(1, {"0": cf(model, h), "1": cf(model, h2)},
                       {"-": continuation(model, h, h2)})


def hamiltonian_cube(model: MorseModel,
                     assign: Dict[str, Hamiltonian]) -> CubeDiagram:
    """Strict cube of weighted complexes over a vertex-indexed family.

    Edges are the diagonal continuations; since diagonal maps compose
    strictly, every higher filler is zero and the cube is valid whenever
    the family is monotone along the vertex order.
    """
    n = len(next(iter(assign)))
    vertices = {w: cf(model, assign[w]) for w in vertex_codes(n)}
    faces: Dict[str, MatrixEntries] = {}
    for code in face_codes(n):
        if code.count("-") == 1:
            faces[code] = continuation(model, assign[initial_vertex(code)],
                                       assign[terminal_vertex(code)])
        elif code.count("-") > 1:
            faces[code] = {}
    return CubeDiagram(n, vertices, faces)


# ---------------------------------------------------------------------------
# closed forms for the completed invariants


def open_bar_barcode(betti: Tuple[int, int], r0) -> Barcode:
    bars = (0,) * betti[0] + (1,) * betti[1]
    return Barcode((), (), rat(r0), open_bars=bars)


def scaling_hamiltonian(model: MorseModel, n: int) -> Hamiltonian:
    return {l: model.values[l] / n for l in model.labels}


def scaling_ray(model: MorseModel, r0) -> Ray:
    def stage(k):
        return continuation_cube(model, scaling_hamiltonian(model, k),
                                 scaling_hamiltonian(model, k + 1))

    closed = lambda prec: open_bar_barcode(model.betti(), prec)
    return Ray(1, [], TailSpec.model(stage, closed_form=closed,
                                     meta=("scaling",)), check=False)


@dataclass(frozen=True)
class GlobalSectionsReport:
    barcode: Barcode
    betti: Tuple[int, int]
    stage_weights_checked: int
    finite_stage_free_ranks: Tuple[Tuple[int, int], ...]


def global_sections(model: MorseModel, r0, depth: int
                    ) -> GlobalSectionsReport:
    """Completed limit of the scaling family 1/n * values, at precision r0.

    Requires strictly negative values.  The surviving module per cell is
    spanned by T^e with 0 < e < r0 (the union of the stage images), so the
    answer is the boundary's rational homology in open bars.  Checked
    against the stage-n continuation weight -H(p)/(n(n+1)) and against the
    free ranks of the finite-stage barcodes.
    """
    if any(v >= 0 for v in model.values.values()):
        raise NotNegative("global sections need strictly negative values")
    r0 = rat(r0)
    betti = model.betti()
    weights_checked = 0
    free_ranks: List[Tuple[int, int]] = []
    for n in range(1, depth + 1):
        h_n = scaling_hamiltonian(model, n)
        h_n1 = scaling_hamiltonian(model, n + 1)
        con = continuation(model, h_n, h_n1)
        for l in model.labels:
            expo = con[(l, l)].val()
            assert expo == -model.values[l] / (n * (n + 1))
            weights_checked += 1
        code = cf(model, h_n).barcode(max(r0, 3))
        free_ranks.append(code.free_ranks())
        assert code.free_ranks() == betti
    ray = scaling_ray(model, r0)
    barcode = completed_homology(ray, r0)
    return GlobalSectionsReport(barcode, betti, weights_checked,
                                tuple(free_ranks))


def empty_set(model: MorseModel, base_h: Optional[Hamiltonian], r0,
              prefix: Optional[List[CubeDiagram]] = None) -> Barcode:
    """Completed limit of the shift family h + s: vanishes identically.

    The stage complexes are all equal and the stage map is the diagonal
    multiplication by T, so the image of N composed maps sits above T^N
    and the completed direct limit is zero at every precision.
    """
    h = base_h if base_h is not None else dict(model.values)
    c = cf(model, h)
    t_map = {(l, l): NovikovScalar.monomial(1, 1) for l in model.labels}
    stationary = TailSpec.stationary(
        CubeDiagram(1, {"0": c, "1": c}, {"-": t_map}))
    ray = Ray(1, list(prefix or []), stationary)
    return completed_homology(ray, rat(r0))


# ---------------------------------------------------------------------------
# regions and cofinal families


def resolve_region(model: MorseModel, region: Iterable[Label]) -> Set[Label]:
    """Cell set of a region given by base labels (or cell labels)."""
    region = set(region)
    if model.base_map is None:
        unknown = region - set(model.labels)
        if unknown:
            raise KeyError("unknown cells %r" % (unknown,))
        return region
    unknown = region - model.base_points()
    if unknown:
        raise KeyError("unknown base points %r" % (unknown,))
    return model.cells_over(region)


def subset_violations(model: MorseModel, cells: Set[Label]):
    """Arrows entering the region from outside break admissibility."""
    return [(q, p) for (q, p) in model.boundary
            if q in cells and p not in cells]


def cofinal_family(model: MorseModel, region: Iterable[Label], stages: int
                   ) -> List[Hamiltonian]:
    """Weight functions -1/i on the region and +i outside, i = 1..stages."""
    cells = resolve_region(model, region)
    bad = subset_violations(model, cells)
    if bad:
        raise InadmissibleSubset(
            "arrows %r enter the region from outside" % (bad,))
    out = []
    for i in range(1, stages + 1):
        out.append({l: Fraction(-1, i) if l in cells else Fraction(i)
                    for l in model.labels})
    return out


def region_hamiltonian(model: MorseModel, cells: Set[Label], i: int
                       ) -> Hamiltonian:
    return {l: Fraction(-1, i) if l in cells else Fraction(i)
            for l in model.labels}


def projected_betti(model: MorseModel, cells: Set[Label]) -> Tuple[int, int]:
    """Rational homology of the boundary restricted to a closed region."""
    gens = [g for g in model.cells if g.label in cells]
    diff = {k: Fraction(v) for k, v in model.boundary.items()
            if k[0] in cells and k[1] in cells}
    return QComplex(gens, diff).homology_ranks()


def subset_ray(model: MorseModel, region: Iterable[Label], r0) -> Ray:
    cells = resolve_region(model, region)
    bad = subset_violations(model, cells)
    if bad:
        raise InadmissibleSubset(
            "arrows %r enter the region from outside" % (bad,))

    def stage(k):
        return continuation_cube(model, region_hamiltonian(model, cells, k),
                                 region_hamiltonian(model, cells, k + 1))

    closed = lambda prec: open_bar_barcode(projected_betti(model, cells),
                                           prec)
    return Ray(1, [], TailSpec.model(stage, closed_form=closed,
                                     meta=("region", tuple(sorted(map(str,
                                                                      cells))))),
               check=False)


@dataclass(frozen=True)
class RelativeReport:
    barcode: Barcode
    betti: Tuple[int, int]
    cells: Tuple[Label, ...]
    stages_checked: int


def relative_sh(model: MorseModel, region: Iterable[Label], r0, depth: int
                ) -> RelativeReport:
    """Completed limit of the region's cofinal family, at precision r0.

    Cells of the region survive with spans open at zero; cells outside
    die modulo T^r0 (their stage weights exceed any bound).  What remains
    is the boundary restricted to the region, so the answer is the
    region subcomplex's rational homology in open bars.  Finite stages
    are verified for admissibility and monotonicity up to ``depth``.
    """
    r0 = rat(r0)
    region = list(region)
    cells = resolve_region(model, region)
    ray = subset_ray(model, cells if model.base_map is None else region, r0)
    checked = 0
    fam = cofinal_family(model, region, depth + 1)
    for i in range(depth):
        c = cf(model, fam[i])
        assert c.verify(3).ok
        for l in model.labels:
            assert fam[i][l] <= fam[i + 1][l]
        checked += 1
    barcode = completed_homology(ray, r0)
    return RelativeReport(barcode, projected_betti(model, cells),
                          tuple(sorted(map(str, cells))), checked)


# ---------------------------------------------------------------------------
# the min/max square


@dataclass(frozen=True)
class MinmaxReport:
    square: CubeDiagram
    pieces: Dict[Label, str]          # cell -> "four" or "two+two"
    pieces_match: bool
    strict_commutation: bool
    acyclic: bool


def minmax_square(model: MorseModel, h_x: Hamiltonian, h_y: Hamiltonian
                  ) -> MinmaxReport:
    """The square min -> (X, Y) -> max with zero filler.

    Both edge composites weight by max - min, so the square commutes
    strictly.  At T = 0 the iterated cone decomposes per cell: where the
    two weights differ the four copies split into two length-one pieces,
    where they agree they form the four-generator piece
    dx1 = y1 + y2, dy1 = x2, dy2 = -x2, dx2 = 0 (after rescaling); either
    way every cell's block is acyclic and so is the whole complex.
    """
    h_x = {l: rat(h_x[l]) for l in model.labels}
    h_y = {l: rat(h_y[l]) for l in model.labels}
    h_min = {l: min(h_x[l], h_y[l]) for l in model.labels}
    h_max = {l: max(h_x[l], h_y[l]) for l in model.labels}
    for h in (h_x, h_y, h_min, h_max):
        bad = admissibility_violations(model, h)
        if bad:
            raise Inadmissible("violations %r" % (bad,))
    square = hamiltonian_cube(model, {"00": h_min, "10": h_x,
                                      "01": h_y, "11": h_max})
    lhs = {l: h_max[l] - h_x[l] + (h_x[l] - h_min[l]) for l in model.labels}
    rhs = {l: h_max[l] - h_y[l] + (h_y[l] - h_min[l]) for l in model.labels}
    strict = lhs == rhs

    tot = total_complex(square).reduce_t0()
    pieces: Dict[Label, str] = {}
    ok = True
    for l in model.labels:
        block = {(t[0], s[0]): v for (t, s), v in tot.differential.items()
                 if t[1] == l and s[1] == l}
        if h_x[l] == h_y[l]:
            pieces[l] = "four"
            ok = ok and _match_rescaled(
                block, {("10", "00"): 1, ("01", "00"): 1,
                        ("11", "10"): 1, ("11", "01"): -1})
        else:
            pieces[l] = "two+two"
            if h_x[l] < h_y[l]:
                expected = {("10", "00"): 1, ("11", "01"): 1}
            else:
                expected = {("01", "00"): 1, ("11", "10"): 1}
            ok = ok and _match_rescaled(block, expected)
    acyclic = tot.is_acyclic()
    return MinmaxReport(square, pieces, ok, strict, acyclic)


def _match_rescaled(block, target) -> bool:
    """Whether a diagonal rescaling carries ``block`` onto ``target``.

    Both are maps on the four corner copies of one cell; the piece normal
    forms are reached by scaling generators by units.
    """
    if set(block) != set(target):
        return False
    # scale factors lambda per corner: entry (t, s) maps to
    # lambda_t * entry / lambda_s = target
    corners = {"00", "10", "01", "11"}
    lam: Dict[str, Fraction] = {"00": Fraction(1)}
    # propagate along entries until all constrained corners are fixed
    for _ in range(4):
        for (t, s), v in block.items():
            want = Fraction(target[(t, s)])
            if s in lam and t not in lam:
                lam[t] = want * lam[s] / v
            elif t in lam and s not in lam:
                lam[s] = v * lam[t] / want
    for (t, s), v in block.items():
        if t in lam and s in lam:
            if lam[t] * v / lam[s] != target[(t, s)]:
                return False
    return True


# ---------------------------------------------------------------------------
# multi-region descent


def region_family(regions: Sequence[Set[Label]]) -> Dict[str, Set[Label]]:
    """Subset-cube assignment: vertex code -> region (intersection of the
    chosen regions; the empty choice is the union)."""
    n = len(regions)
    out: Dict[str, Set[Label]] = {}
    for w in vertex_codes(n):
        chosen = [regions[i] for i in range(n) if w[i] == "1"]
        if chosen:
            cells = set(chosen[0])
            for r in chosen[1:]:
                cells &= r
        else:
            cells = set()
            for r in regions:
                cells |= r
        out[w] = cells
    return out


def descent_ray(model: MorseModel, regions: Sequence[Iterable[Label]]) -> Ray:
    """The subset-cube ray of the min/max-assembled cofinal families."""
    resolved = [resolve_region(model, r) for r in regions]
    fam = region_family(resolved)
    for w, cells in fam.items():
        bad = subset_violations(model, cells)
        if bad:
            raise InadmissibleSubset(
                "region at %r admits arrows %r from outside" % (w, bad))
    n = len(regions)

    def stage(k):
        assign = {}
        for wa in vertex_codes(n + 1):
            w, a = wa[:-1], wa[-1]
            assign[wa] = region_hamiltonian(model, fam[w],
                                            k + (1 if a == "1" else 0))
        return hamiltonian_cube(model, assign)

    return Ray(n + 1, [], TailSpec.model(stage), check=False)


@dataclass(frozen=True)
class InvolutiveReport:
    verdict: DescentReport
    pairwise: Tuple[Tuple[Tuple[int, int], bool], ...]

    @property
    def acyclic(self) -> bool:
        return self.verdict.acyclic and all(ok for _, ok in self.pairwise)


def involutive_descent_instance(model: MorseModel,
                                regions: Sequence[Iterable[Label]],
                                r0, work=3, depth: int = 2
                                ) -> InvolutiveReport:
    """Descent verdict for regions pulled back through the base projection.

    All weight functions factor through the base; unions and
    intersections are taken in the base.  For three regions the pairwise
    verdicts are computed as well, mirroring the two-subset induction.
    """
    if model.base_map is None:
        raise InadmissibleSubset("model carries no base projection")
    regions = [set(r) for r in regions]
    ray = descent_ray(model, regions)
    verdict = descent_complex(ray, work, depth)
    pairwise: List[Tuple[Tuple[int, int], bool]] = []
    if len(regions) >= 3:
        for i in range(len(regions)):
            for j in range(i + 1, len(regions)):
                sub = descent_ray(model, [regions[i], regions[j]])
                rep = descent_complex(sub, work, depth)
                pairwise.append(((i, j), rep.acyclic))
    return InvolutiveReport(verdict, tuple(pairwise))


# ---------------------------------------------------------------------------
# serialization and bundled models


def model_to_json(model: MorseModel) -> dict:
    cells = []
    for g in model.cells:
        rec = {"label": str(g.label), "parity": g.parity,
               "value": str(model.values[g.label])}
        if model.base_map is not None:
            rec["base"] = str(model.base_map[g.label])
        cells.append(rec)
    return {"cells": cells,
            "boundary": [{"target": str(t), "source": str(s), "coeff": c}
                         for (t, s), c in sorted(model.boundary.items())]}


def model_from_json(data: dict) -> MorseModel:
    cells = [Generator(c["label"], int(c["parity"])) for c in data["cells"]]
    values = {c["label"]: rat(c["value"]) for c in data["cells"]}
    base = None
    if any("base" in c for c in data["cells"]):
        base = {c["label"]: c.get("base", c["label"])
                for c in data["cells"]}
    boundary = {(b["target"], b["source"]): int(b["coeff"])
                for b in data.get("boundary", ())}
    return MorseModel(cells, boundary, values, base)


def bundled_model(name: str) -> MorseModel:
    from importlib import resources
    text = resources.files("novcube.models").joinpath(
        name + ".json").read_text()
    return model_from_json(json.loads(text))
