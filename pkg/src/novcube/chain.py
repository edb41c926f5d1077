"""Z/2-graded free chain complexes over the Novikov ring.

A complex stores an ordered tuple of generators (opaque hashable label plus
parity) and a sparse differential keyed by ``(target_label, source_label)``.
Entries live in the nonnegative part of the ring.  Homology is computed two
ways: over the residue field by setting T = 0, and over the valuation ring
as a barcode (free summands plus torsion summands of the form
``ring / T^length``), the latter modulo a declared working precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Tuple

from .linalg import QuotientSpace, nullspace, sparse_rank
from .novikov import (INFINITY, NovikovScalar, PrecisionExhausted, rat,
                      format_scalar, parse_scalar, scalar_from_json)

Label = Hashable
MatrixEntries = Dict[Tuple[Label, Label], NovikovScalar]


class NotChainMap(ValueError):
    """The given matrix does not commute with the differentials."""


@dataclass(frozen=True)
class Generator:
    label: Label
    parity: int

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")


# ---------------------------------------------------------------------------
# sparse matrices keyed by generator labels


def mat_clean(m: MatrixEntries) -> MatrixEntries:
    return {k: v for k, v in m.items() if v.terms}


def mat_add(*ms: MatrixEntries) -> MatrixEntries:
    out: MatrixEntries = {}
    for m in ms:
        for k, v in m.items():
            out[k] = out[k] + v if k in out else v
    return out


def mat_neg(m: MatrixEntries) -> MatrixEntries:
    return {k: -v for k, v in m.items()}


def mat_scale(m: MatrixEntries, c) -> MatrixEntries:
    return {k: v.scale(c) for k, v in m.items()}


def mat_compose(second: MatrixEntries, first: MatrixEntries) -> MatrixEntries:
    """Matrix of (second after first)."""
    by_source: Dict[Label, List[Tuple[Label, NovikovScalar]]] = {}
    for (t, s), v in second.items():
        by_source.setdefault(s, []).append((t, v))
    out: MatrixEntries = {}
    for (mid, s), v1 in first.items():
        for t, v2 in by_source.get(mid, ()):  # second's source is first's target
            k = (t, s)
            prod = v2 * v1
            out[k] = out[k] + prod if k in out else prod
    return out


def mat_equal(a: MatrixEntries, b: MatrixEntries) -> bool:
    return mat_clean(a) == mat_clean(b)


def mat_identity(labels: Iterable[Label]) -> MatrixEntries:
    one = NovikovScalar.one()
    return {(l, l): one for l in labels}


def residual_violations(m: MatrixEntries, work) -> List[Tuple[Label, Label, str]]:
    """Entries of ``m`` that are not 0 modulo T^work.

    Entries whose stored precision is too coarse to decide are reported as
    undetermined.
    """
    work = rat(work)
    bad = []
    for (t, s), v in m.items():
        if v.terms and v.terms[0][0] < work:
            bad.append((t, s, format_scalar(v)))
        elif not v.terms and v.mod is not None and v.mod < work:
            bad.append((t, s, "undetermined below T^%s" % v.mod))
    return bad


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Report:
    ok: bool
    violations: Tuple[Tuple[str, str], ...]  # (kind, detail)

    def __bool__(self):
        return self.ok


class ChainComplex:
    """Finitely generated free Z/2-graded complex over the Novikov ring."""

    def __init__(self, generators: Iterable[Generator],
                 differential: MatrixEntries):
        self.generators: Tuple[Generator, ...] = tuple(generators)
        labels = [g.label for g in self.generators]
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be unique")
        self._parity = {g.label: g.parity for g in self.generators}
        # keep entries that vanish only at their precision: they record
        # that the true value is merely bounded below
        diff = {k: v for k, v in differential.items()
                if v.terms or v.mod is not None}
        for (t, s) in diff:
            if t not in self._parity or s not in self._parity:
                raise ValueError("differential entry (%r, %r) uses unknown "
                                 "generator" % (t, s))
        self.differential: MatrixEntries = diff

    # -- queries ---------------------------------------------------------

    @property
    def labels(self) -> Tuple[Label, ...]:
        return tuple(g.label for g in self.generators)

    def parity(self, label: Label) -> int:
        return self._parity[label]

    def rank_by_parity(self) -> Tuple[int, int]:
        even = sum(1 for g in self.generators if g.parity == 0)
        return even, len(self.generators) - even

    def __eq__(self, other):
        """Semantic equality: same generator set (with parities) and the
        same label-keyed differential; generator order is presentation."""
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return (set(self.generators) == set(other.generators)
                and self.differential == other.differential)

    def __repr__(self):
        return "ChainComplex(%d generators, %d entries)" % (
            len(self.generators), len(self.differential))

    # -- verification ------------------------------------------------------

    def verify(self, work) -> Report:
        """Check parity, nonnegative valuations and d*d = 0 mod T^work."""
        bad: List[Tuple[str, str]] = []
        for (t, s), v in self.differential.items():
            if (self._parity[t] - self._parity[s]) % 2 != 1:
                bad.append(("parity", "entry (%r, %r) is even" % (t, s)))
            if v.val() < 0:
                bad.append(("NegativeValuation",
                            "entry (%r, %r) has val %s" % (t, s, v.val())))
        square = mat_compose(self.differential, self.differential)
        for t, s, detail in residual_violations(square, work):
            bad.append(("d_squared", "(%r, %r): %s" % (t, s, detail)))
        return Report(not bad, tuple(bad))

    # -- elementary operations ----------------------------------------------

    def shift(self) -> "ChainComplex":
        """Flip all parities and negate the differential."""
        gens = [Generator(g.label, 1 - g.parity) for g in self.generators]
        return ChainComplex(gens, mat_neg(self.differential))

    def relabel(self, fn: Callable[[Label], Label]) -> "ChainComplex":
        gens = [Generator(fn(g.label), g.parity) for g in self.generators]
        diff = {(fn(t), fn(s)): v for (t, s), v in self.differential.items()}
        return ChainComplex(gens, diff)

    def truncate(self, r) -> "ChainComplex":
        diff = {k: v.truncate(r) for k, v in self.differential.items()}
        return ChainComplex(self.generators, diff)

    def reduce_t0(self) -> "QComplex":
        """Set T = 0 entrywise; needs all entries of valuation >= 0."""
        diff = {}
        for k, v in self.differential.items():
            c = v.reduce_t0()
            if c != 0:
                diff[k] = c
        return QComplex(self.generators, diff)

    # -- homology over the valuation ring -------------------------------------

    def barcode(self, work) -> "Barcode":
        return _barcode(self, rat(work))

    def is_acyclic(self, work) -> Tuple[bool, dict]:
        """Acyclicity of a finitely generated free complex.

        Decided over the residue field: for such complexes, vanishing
        homology at T = 0 is equivalent to vanishing homology over the
        ring.  The certificate records the rank bookkeeping.
        """
        report = self.verify(work)
        if not report:
            raise ValueError("not a chain complex at this precision: %s"
                             % (report.violations,))
        q = self.reduce_t0()
        be, bo = q.homology_ranks()
        cert = {"betti_even": be, "betti_odd": bo,
                "generators": len(self.generators), "work": str(rat(work))}
        return (be, bo) == (0, 0), cert


def direct_sum(parts: Iterable[ChainComplex]) -> ChainComplex:
    gens: List[Generator] = []
    diff: MatrixEntries = {}
    for c in parts:
        gens.extend(c.generators)
        diff.update(c.differential)
    return ChainComplex(gens, diff)


def is_chain_map(entries: MatrixEntries, source: ChainComplex,
                 target: ChainComplex, work=None) -> bool:
    """f d = d' f, exactly or modulo T^work."""
    lhs = mat_compose(entries, source.differential)
    rhs = mat_compose(target.differential, entries)
    diff = mat_add(lhs, mat_neg(rhs))
    if work is None:
        return not mat_clean(diff)
    return not residual_violations(diff, work)


def cone_of_map(source: ChainComplex, target: ChainComplex,
                entries: MatrixEntries, check: bool = True,
                work=None) -> ChainComplex:
    """Mapping cone of an even chain map.

    Underlying module ``source[1] (+) target`` with block differential
    ``[[-d, 0], [f, d']]``.  Source generators are relabelled ("0", l) and
    target generators ("1", l), matching the cone of a 1-cube.
    """
    if check:
        for (t, s) in entries:
            if (target.parity(t) - source.parity(s)) % 2 != 0:
                raise NotChainMap("map has an odd entry (%r, %r)" % (t, s))
        if not is_chain_map(entries, source, target, work):
            raise NotChainMap("matrix does not commute with differentials")
    shifted = source.shift().relabel(lambda l: ("0", l))
    tgt = target.relabel(lambda l: ("1", l))
    diff = dict(shifted.differential)
    diff.update(tgt.differential)
    for (t, s), v in entries.items():
        diff[(("1", t), ("0", s))] = v
    return ChainComplex(shifted.generators + tgt.generators, diff)


# ---------------------------------------------------------------------------
# residue-field complexes


class QComplex:
    """Chain complex over the rationals (the residue field at T = 0)."""

    def __init__(self, generators: Iterable[Generator],
                 differential: Dict[Tuple[Label, Label], Fraction]):
        self.generators = tuple(generators)
        self._parity = {g.label: g.parity for g in self.generators}
        self.differential = {k: Fraction(v) for k, v in differential.items()
                             if v != 0}

    def parity(self, label: Label) -> int:
        return self._parity[label]

    def verify(self) -> Report:
        bad = []
        sq: Dict[Tuple[Label, Label], Fraction] = {}
        by_source: Dict[Label, List[Tuple[Label, Fraction]]] = {}
        for (t, s), v in self.differential.items():
            by_source.setdefault(s, []).append((t, v))
        for (mid, s), v1 in self.differential.items():
            for t, v2 in by_source.get(mid, ()):
                sq[(t, s)] = sq.get((t, s), Fraction(0)) + v2 * v1
        for k, v in sq.items():
            if v != 0:
                bad.append(("d_squared", repr(k)))
        return Report(not bad, tuple(bad))

    def homology_ranks(self) -> Tuple[int, int]:
        """Betti numbers (even, odd) by exact elimination."""
        even = [g.label for g in self.generators if g.parity == 0]
        odd = [g.label for g in self.generators if g.parity == 1]
        d_from_even = {(t, s): v for (t, s), v in self.differential.items()
                       if self._parity[s] == 0}
        d_from_odd = {(t, s): v for (t, s), v in self.differential.items()
                      if self._parity[s] == 1}
        r_e = sparse_rank(d_from_even)
        r_o = sparse_rank(d_from_odd)
        return len(even) - r_e - r_o, len(odd) - r_o - r_e

    def is_acyclic(self) -> bool:
        return self.homology_ranks() == (0, 0)

    def homology_space(self, parity: int) -> Tuple[List[Label], QuotientSpace]:
        """Cycle/boundary quotient for one parity, with coordinates.

        Returns the ordered generator labels of that parity and a
        :class:`QuotientSpace` whose vectors are indexed by them.
        """
        mine = [g.label for g in self.generators if g.parity == parity]
        other = [g.label for g in self.generators if g.parity != parity]
        idx = {l: i for i, l in enumerate(mine)}
        oidx = {l: i for i, l in enumerate(other)}
        d_out = [[Fraction(0)] * len(mine) for _ in other]
        for (t, s), v in self.differential.items():
            if self._parity[s] == parity:
                d_out[oidx[t]][idx[s]] = v
        cycles = nullspace(d_out) if other else [
            [Fraction(1) if i == j else Fraction(0) for i in range(len(mine))]
            for j in range(len(mine))]
        boundaries = []
        for s in other:
            col = [Fraction(0)] * len(mine)
            nonzero = False
            for t in mine:
                v = self.differential.get((t, s))
                if v:
                    col[idx[t]] = v
                    nonzero = True
            if nonzero:
                boundaries.append(col)
        return mine, QuotientSpace(len(mine), cycles, boundaries)


def q_mat_compose(second, first):
    by_source: Dict[Label, List[Tuple[Label, Fraction]]] = {}
    for (t, s), v in second.items():
        by_source.setdefault(s, []).append((t, v))
    out: Dict[Tuple[Label, Label], Fraction] = {}
    for (mid, s), v1 in first.items():
        for t, v2 in by_source.get(mid, ()):
            out[(t, s)] = out.get((t, s), Fraction(0)) + v2 * v1
    return {k: v for k, v in out.items() if v != 0}


def reduce_map_t0(entries: MatrixEntries) -> Dict[Tuple[Label, Label], Fraction]:
    out = {}
    for k, v in entries.items():
        c = v.reduce_t0()
        if c != 0:
            out[k] = c
    return out


# ---------------------------------------------------------------------------
# barcodes


@dataclass(frozen=True)
class Barcode:
    """Homology of a f.g. complex over the valuation ring, at a precision.

    ``free_bars`` lists parities of free summands, ``torsion_bars`` pairs
    (parity, length) for summands ``ring / T^length``, and ``open_bars``
    lists parities of summands spanned by all T^e with 0 < e < precision
    (these arise from completed direct limits and never from a single
    finite complex).  ``free_at_precision`` flags that torsion of length
    >= the stated precision cannot be told apart from a free bar.
    """

    free_bars: Tuple[int, ...]
    torsion_bars: Tuple[Tuple[int, Fraction], ...]
    precision: Optional[Fraction]
    open_bars: Tuple[int, ...] = ()
    free_at_precision: bool = False

    def free_ranks(self) -> Tuple[int, int]:
        return (self.free_bars.count(0), self.free_bars.count(1))

    def open_ranks(self) -> Tuple[int, int]:
        return (self.open_bars.count(0), self.open_bars.count(1))

    @property
    def is_zero(self) -> bool:
        return not (self.free_bars or self.torsion_bars or self.open_bars)

    @property
    def all_torsion(self) -> bool:
        """True when tensoring with the fraction field kills everything."""
        return not (self.free_bars or self.open_bars)

    def to_json(self):
        return {
            "free": [{"parity": p} for p in self.free_bars],
            "torsion": [{"parity": p, "length": str(l)}
                        for p, l in self.torsion_bars],
            "open": [{"parity": p} for p in self.open_bars],
            "precision": None if self.precision is None else str(self.precision),
            "free_at_precision": self.free_at_precision,
        }

    def to_text(self) -> str:
        lines = ["kind     parity  length"]
        for p in self.free_bars:
            lines.append("free     %-7d -" % p)
        for p in self.open_bars:
            lines.append("open     %-7d (0, precision)" % p)
        for p, l in self.torsion_bars:
            lines.append("torsion  %-7d %s" % (p, l))
        if len(lines) == 1:
            lines.append("(empty)")
        return "\n".join(lines)


def _barcode(c: ChainComplex, work: Fraction) -> Barcode:
    """Valuation-pivot reduction over the quotient ring at T^work.

    Repeatedly split off a minimum-valuation pivot; in a valuation ring it
    divides every other entry, so its row and column clear by elementary
    operations with nonnegative valuation.  Each pivot of valuation v > 0
    contributes a torsion bar of length v at the parity of its target;
    unit pivots contribute nothing; what remains is free at precision.
    """
    report = c.verify(work)
    if not report:
        raise ValueError("barcode needs a verified complex: %s"
                         % (report.violations,))
    # rows[t][s] with a column index; entries that are zero at the working
    # precision are kept so pivot ambiguity can be detected
    rows: Dict[Label, Dict[Label, NovikovScalar]] = {}
    cols: Dict[Label, set] = {}

    def put(t, s, v):
        if v.terms or v.mod is not None:
            rows.setdefault(t, {})[s] = v
            cols.setdefault(s, set()).add(t)
        else:
            if s in rows.get(t, {}):
                del rows[t][s]
                cols[s].discard(t)

    for (t, s), v in c.differential.items():
        put(t, s, v.truncate(work))

    alive = set(c.labels)
    torsion: List[Tuple[int, Fraction, str]] = []
    valid_mod = work
    imprecise = False

    while True:
        pivot = None
        pivot_val = INFINITY
        unknown_floor = INFINITY
        for t, row in rows.items():
            for s, v in row.items():
                if v.terms:
                    vv = v.terms[0][0]
                    if vv < pivot_val or (vv == pivot_val and
                                          repr((t, s)) < repr(pivot)):
                        pivot, pivot_val = (t, s), vv
                elif v.mod is not None:
                    unknown_floor = min(unknown_floor, v.mod)
        if pivot is None:
            if unknown_floor is not INFINITY:
                imprecise = True
                valid_mod = min(valid_mod, unknown_floor)
            break
        if unknown_floor < pivot_val:
            raise PrecisionExhausted(
                "pivot of valuation %s is ambiguous: entries unknown below "
                "T^%s" % (pivot_val, unknown_floor))
        q, p = pivot
        pval = rows[q][p]
        pinv = pval.invert(work)
        # clear row q by column operations col_pp -= factor*col_p, each with
        # its dual row operation row_p += factor*row_pp
        for pp, v in [(s, v) for s, v in rows[q].items() if s != p]:
            factor = v * pinv
            for t in list(cols.get(p, ())):
                w = rows[t][p]
                cur = rows.get(t, {}).get(pp, NovikovScalar.zero())
                put(t, pp, cur - factor * w)
            for s, w in list(rows.get(pp, {}).items()):
                cur = rows.get(p, {}).get(s, NovikovScalar.zero())
                put(p, s, cur + factor * w)
        # clear column p by row operations row_qq -= factor*row_q (row q now
        # holds only the pivot), each with its dual col_q += factor*col_qq
        for qq in [t for t in cols.get(p, set()) if t != q]:
            v = rows[qq][p]
            factor = v * pinv
            put(qq, p, v - factor * pval)
            for t in list(cols.get(qq, ())):
                w = rows[t][qq]
                cur = rows.get(t, {}).get(q, NovikovScalar.zero())
                put(t, q, cur + factor * w)
        # split off generators p and q; d*d = 0 makes their remaining row
        # and column vanish at (slightly reduced) precision
        rows[q].pop(p)
        cols[p].discard(q)
        leftovers = []
        for t in list(cols.get(p, ())) + list(cols.get(q, ())):
            for s in (p, q):
                if s in rows.get(t, {}):
                    leftovers.append(rows[t].pop(s))
                    cols[s].discard(t)
        for t in (p, q):
            for s, v in list(rows.pop(t, {}).items()):
                cols[s].discard(t)
                leftovers.append(v)
        for v in leftovers:
            if v.terms:
                if v.terms[0][0] < work - pivot_val:
                    raise ValueError(
                        "input is not a chain complex: residual %s"
                        % format_scalar(v))
                imprecise = True
                valid_mod = min(valid_mod, v.terms[0][0])
            elif v.mod is not None:
                imprecise = True
                valid_mod = min(valid_mod, v.mod)
        alive.discard(p)
        alive.discard(q)
        if pivot_val > 0:
            torsion.append((c.parity(q), pivot_val, repr(q)))
    free = sorted(c.parity(l) for l in alive)
    torsion_sorted = tuple((p, l) for p, l, _ in
                           sorted(torsion, key=lambda t: (t[0], t[1], t[2])))
    return Barcode(tuple(free), torsion_sorted, valid_mod,
                   free_at_precision=imprecise and bool(free))


# ---------------------------------------------------------------------------
# JSON input/output


def complex_to_json(c: ChainComplex) -> dict:
    return {
        "generators": [{"label": str(g.label), "parity": g.parity}
                       for g in c.generators],
        "differential": [{"target": str(t), "source": str(s),
                          "scalar": format_scalar(v)}
                         for (t, s), v in sorted(c.differential.items(),
                                                 key=lambda kv: repr(kv[0]))],
    }


def complex_from_json(data: dict) -> ChainComplex:
    gens = [Generator(g["label"], int(g["parity"]))
            for g in data["generators"]]
    diff: MatrixEntries = {}
    for e in data.get("differential", ()):
        scalar = e["scalar"]
        v = parse_scalar(scalar) if isinstance(scalar, str) \
            else scalar_from_json(scalar)
        diff[(e["target"], e["source"])] = v
    return ChainComplex(gens, diff)


def matrix_to_json(m: MatrixEntries) -> list:
    return [{"target": str(t), "source": str(s), "scalar": format_scalar(v)}
            for (t, s), v in sorted(m.items(), key=lambda kv: repr(kv[0]))]


def matrix_from_json(data) -> MatrixEntries:
    out: MatrixEntries = {}
    for e in data:
        scalar = e["scalar"]
        v = parse_scalar(scalar) if isinstance(scalar, str) \
            else scalar_from_json(scalar)
        out[(e["target"], e["source"])] = v
    return out
