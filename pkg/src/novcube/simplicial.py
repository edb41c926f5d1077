"""Assembling cube face maps from simplex families, with a symbolic check.

A k-dimensional face of the cube is covered by k! simplices, one per
permutation of its varying coordinates, each read as a monotone vertex
path.  The face map is the signature-weighted sum of the simplex maps.
The symbolic certificate expands both the cube coherence equation and the
simplex coherence relations over a free noncommutative ring on formal
simplex symbols, and exhibits the former as a signed integer combination
of the latter: the deleted-vertex terms of the relations cancel exactly in
pairs that differ by one transposition of path steps, and the remaining
quadratic terms match the cube equation word for word.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Tuple

from .chain import MatrixEntries, mat_add, mat_clean, mat_neg
from .cubes import face_codes, face_equation_terms, initial_vertex

Path = Tuple[str, ...]          # monotone sequence of vertex codes
Word = Tuple[Path, ...]         # formal product, applied left to right

MAX_SYMBOLIC_DIM = 3


class UnsupportedDimension(ValueError):
    pass


def permutation_sign(perm) -> int:
    inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm))
              if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def face_simplices(code: str) -> List[Tuple[Path, int]]:
    """The maximal simplices covering a face: (vertex path, signature)."""
    dashes = [i for i, ch in enumerate(code) if ch == "-"]
    start = initial_vertex(code)
    out = []
    for perm in permutations(dashes):
        path = [start]
        cur = list(start)
        for pos in perm:
            cur[pos] = "1"
            path.append("".join(cur))
        out.append((tuple(path), permutation_sign(perm)))
    return out


def assemble_faces(n: int, simplex_maps: Dict[Path, MatrixEntries]
                   ) -> Dict[str, MatrixEntries]:
    """Numeric assembly: f_F = sum over simplices of sign * map."""
    faces: Dict[str, MatrixEntries] = {}
    for code in face_codes(n):
        parts = []
        for path, sign in face_simplices(code):
            m = simplex_maps.get(path)
            if m is None:
                raise KeyError("no simplex map for path %r" % (path,))
            parts.append(m if sign > 0 else mat_neg(m))
        faces[code] = mat_clean(mat_add(*parts)) if parts else {}
    return faces


# ---------------------------------------------------------------------------
# the symbolic certificate


def _add_word(acc: Dict[Word, int], word: Word, coeff: int):
    acc[word] = acc.get(word, 0) + coeff
    if acc[word] == 0:
        del acc[word]


def cube_equation_expansion(code: str) -> Dict[Word, int]:
    """The face's coherence equation, expanded over simplex symbols."""
    acc: Dict[Word, int] = {}
    for sign, fpp, fp in face_equation_terms(code):
        for path1, s1 in face_simplices(fp):
            for path2, s2 in face_simplices(fpp):
                _add_word(acc, (path1, path2), sign * s1 * s2)
    return acc


def simplex_relation(path: Path):
    """Coherence relation of one simplex, as (quadratic, deletions).

    quadratic: words (front, back) from splitting the path, with sign
    (-1)^j at split position j; deletions: for each inner vertex, the
    (k-1)-simplex skipping it, with sign (-1)^(j+1), carried as
    (symbol, split_index, sign) for the pairing certificate.
    """
    k = len(path) - 1
    quadratic: Dict[Word, int] = {}
    deletions: List[Tuple[Path, int, int]] = []
    for j in range(k + 1):
        front = path[:j + 1]
        back = path[j:]
        _add_word(quadratic, (front, back), -1 if j % 2 else 1)
    for j in range(1, k):
        dropped = path[:j] + path[j + 1:]
        deletions.append((dropped, j, -1 if (j + 1) % 2 else 1))
    return quadratic, deletions


@dataclass(frozen=True)
class FaceCertificate:
    code: str
    ok: bool
    quadratic_terms: int
    cancelled_pairs: int
    detail: str = ""


@dataclass(frozen=True)
class AssemblyCertificate:
    n: int
    faces: Tuple[FaceCertificate, ...]

    @property
    def ok(self) -> bool:
        return all(f.ok for f in self.faces)


def _step_directions(path: Path) -> Tuple[int, ...]:
    steps = []
    for a, b in zip(path, path[1:]):
        steps.append(next(i for i, (x, y) in enumerate(zip(a, b)) if x != y))
    return tuple(steps)


def _swap_steps(path: Path, j: int) -> Path:
    """Swap steps j and j+1 (1-based inner vertex j gets re-routed)."""
    steps = list(_step_directions(path))
    steps[j - 1], steps[j] = steps[j], steps[j - 1]
    out = [path[0]]
    cur = list(path[0])
    for pos in steps:
        cur[pos] = "1"
        out.append("".join(cur))
    return tuple(out)


def certify_face(code: str) -> FaceCertificate:
    """Certify one face's cube equation against the simplex relations."""
    lhs = cube_equation_expansion(code)
    rhs_quadratic: Dict[Word, int] = {}
    deletion_terms: Dict[Tuple[Path, int], int] = {}
    for path, sigma in face_simplices(code):
        quadratic, deletions = simplex_relation(path)
        for word, c in quadratic.items():
            _add_word(rhs_quadratic, word, sigma * c)
        for dropped, j, c in deletions:
            key = (path, j)
            deletion_terms[key] = sigma * c
    # deleted-vertex terms must cancel against the transposed path
    pairs = 0
    seen = set()
    for (path, j), c in deletion_terms.items():
        if (path, j) in seen:
            continue
        partner = (_swap_steps(path, j), j)
        if partner not in deletion_terms:
            return FaceCertificate(code, False, len(lhs), pairs,
                                   "unpaired deletion at %r" % (path,))
        if deletion_terms[partner] != -c:
            return FaceCertificate(code, False, len(lhs), pairs,
                                   "pair at %r does not cancel" % (path,))
        dropped_a = path[:j] + path[j + 1:]
        p2 = partner[0]
        dropped_b = p2[:j] + p2[j + 1:]
        if dropped_a != dropped_b:
            return FaceCertificate(code, False, len(lhs), pairs,
                                   "pair drops different simplices")
        seen.add((path, j))
        seen.add(partner)
        pairs += 1
    if rhs_quadratic != lhs:
        extra = {k: v for k, v in rhs_quadratic.items() if lhs.get(k) != v}
        return FaceCertificate(code, False, len(lhs), pairs,
                               "quadratic mismatch: %d words differ"
                               % len(extra))
    return FaceCertificate(code, True, len(lhs), pairs)


def certify_assembly(n: int) -> AssemblyCertificate:
    """Certify, for every face of the n-cube, that the assembled cube
    equation is a signed combination of the simplicial relations."""
    if n > MAX_SYMBOLIC_DIM:
        raise UnsupportedDimension(
            "symbolic certification implemented for dimension <= %d"
            % MAX_SYMBOLIC_DIM)
    return AssemblyCertificate(
        n, tuple(certify_face(code) for code in face_codes(n)))
