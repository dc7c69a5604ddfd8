"""Classification of pointed spin-modular data by abelian spin
Chern-Simons triples, and lattice realisations of both.

The forward direction quotients the fermion-transparent subgroup by the
fermion and shifts the form by a representative of the odd coset; the
signature-mod-8 datum is read off the Gauss sum.  Lattices with a
characteristic vector realise every triple: the discriminant construction
gives the triple directly, and the index-2 even sublattice construction
recovers a pointed spin-modular datum mapping back to it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import snf
from .groups import (
    FiniteAbelianGroup,
    GroupElement,
    GroupHom,
    QuadraticForm,
    QuotientPresentation,
    automorphisms,
    gauss_sum,
    qclass_equivalent,
    subgroup_elements,
    subquotient,
)
from .scalars import Cyclotomic, QmodZ, root_of_unity
from .spin import PointedSpinModular, grading_degree

__all__ = [
    "AscsTriple",
    "LatticeData",
    "PointedClassification",
    "classify_pointed",
    "kernel_automorphism",
    "two_to_one_check",
    "ascs_from_lattice",
    "psm_from_even_sublattice",
    "triples_equivalent",
]


@dataclass
class AscsTriple:
    """Abelian spin Chern-Simons datum: a finite group with a class of
    nondegenerate quadratic forms (stored via one representative) and a
    signature mod 8 tied to the form by the Gauss-Milgram constraint."""

    group: FiniteAbelianGroup
    q_rep: QuadraticForm
    sigma: int

    def __post_init__(self):
        self.sigma %= 8
        if not self.q_rep.is_nondegenerate():
            raise ValueError("representative form must be nondegenerate")
        if gauss_sum(self.q_rep, +1) != root_of_unity(Fraction(self.sigma, 8)):
            raise ValueError(
                "Gauss-Milgram constraint fails: the Gauss sum does not "
                f"equal the eighth root of unity for sigma = {self.sigma}"
            )

    def is_spin(self) -> bool:
        """True when no shifted representative of the class normalises to
        q(0) = 0; such triples describe genuinely spin theories."""
        zero = self.group.zero()
        return all(
            self.q_rep(zero - delta) != QmodZ(0) for delta in self.group.elements()
        )


@dataclass(frozen=True)
class LatticeData:
    """Nondegenerate integral lattice with a characteristic vector.

    ``gram`` is the basis Gram matrix; ``w2`` is given in dual-basis
    coordinates, so the characteristic condition reads w2_j = (e_j, e_j)
    mod 2 per basis vector.
    """

    gram: tuple[tuple[int, ...], ...]
    w2: tuple[int, ...]

    def __post_init__(self):
        n = len(self.gram)
        if any(len(row) != n for row in self.gram):
            raise ValueError("gram matrix must be square")
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        if len(self.w2) != n:
            raise ValueError("w2 length must match the rank")
        if snf.determinant([list(r) for r in self.gram]) == 0:
            raise ValueError("gram matrix must be nondegenerate")
        for j in range(n):
            if (self.w2[j] - self.gram[j][j]) % 2 != 0:
                raise ValueError(
                    f"w2 is not characteristic at basis vector {j}: "
                    f"{self.w2[j]} != {self.gram[j][j]} mod 2"
                )

    @classmethod
    def from_lists(cls, gram: Sequence[Sequence[int]], w2: Sequence[int]) -> "LatticeData":
        return cls(
            tuple(tuple(int(x) for x in row) for row in gram),
            tuple(int(x) for x in w2),
        )

    @property
    def rank(self) -> int:
        return len(self.gram)


@dataclass
class PointedClassification:
    """Everything the forward classification produces: the triple, the
    chosen odd-coset representative, the quotient presentation of the
    transparent subgroup by the fermion, and the image of twice the
    representative (the characteristic class used downstream)."""

    triple: AscsTriple
    shift_rep: GroupElement
    presentation: QuotientPresentation
    w2_image: GroupElement
    transparent_subgroup: list[GroupElement]


def _transparent_subgroup(psm: PointedSpinModular) -> list[GroupElement]:
    q = psm.metric
    return subgroup_elements(
        psm.group, lambda g: q.bilinear(g, psm.fermion) == QmodZ(0)
    )


def classify_pointed(
    psm: PointedSpinModular, shift_rep: Optional[GroupElement] = None
) -> PointedClassification:
    """Map a pointed spin-modular datum to its spin Chern-Simons triple.

    The default odd-coset representative is the lexicographically smallest
    element outside the transparent subgroup; any other choice produces an
    equivalent class.  Fails when the Gauss sum is not an eighth root of
    unity, which would mean the input was degenerate or inhomogeneous.
    """
    group = psm.group
    q = psm.metric
    transparent = _transparent_subgroup(psm)
    transparent_set = {g.residues for g in transparent}
    odd_coset = [g for g in group.elements() if g.residues not in transparent_set]
    if not odd_coset:
        raise ValueError("fermion pairs trivially with everything; degenerate input")
    if shift_rep is None:
        shift_rep = min(odd_coset, key=lambda g: g.residues)
    elif shift_rep.residues in transparent_set:
        raise ValueError("shift representative must lie outside the transparent subgroup")

    pres = subquotient(group, transparent, [psm.fermion])
    quotient_group = pres.quotient

    # q_a(x) = q(x - a), well defined on cosets of the fermion.
    table = {}
    for d in quotient_group.elements():
        x = pres.section(d)
        table[d] = q(x - shift_rep)
    q_rep = QuadraticForm(quotient_group, table)

    tau = gauss_sum(q, +1)
    sigma = next(
        (k for k in range(8) if tau == root_of_unity(Fraction(k, 8))), None
    )
    if sigma is None:
        raise ValueError(
            "Gauss sum is not an eighth root of unity; "
            "input form must have been degenerate or inhomogeneous"
        )
    triple = AscsTriple(group=quotient_group, q_rep=q_rep, sigma=sigma)
    doubled = 2 * shift_rep
    assert doubled.residues in transparent_set, (
        "twice the odd representative escaped the transparent subgroup"
    )
    return PointedClassification(
        triple=triple,
        shift_rep=shift_rep,
        presentation=pres,
        w2_image=pres.projection(doubled),
        transparent_subgroup=transparent,
    )


def kernel_automorphism(psm: PointedSpinModular) -> GroupHom:
    """The unique nontrivial automorphism mapped to the identity by the
    classification: x -> x + (2 b(x, f)) f, with the bilinear value in
    {0, 1/2} read as an integer multiplier."""
    group = psm.group
    q = psm.metric
    f = psm.fermion
    images = []
    for e in [
        group.element(tuple(int(i == j) for j in range(len(group.orders))))
        for i in range(len(group.orders))
    ]:
        multiplier = 0 if q.bilinear(e, f) == QmodZ(0) else 1
        images.append(e + multiplier * f)
    phi = GroupHom(group, group, images)
    identity = GroupHom(
        group,
        group,
        [
            group.element(tuple(int(i == j) for j in range(len(group.orders))))
            for i in range(len(group.orders))
        ],
    )
    assert phi != identity, "kernel automorphism collapsed to the identity"
    assert phi.compose(phi) == identity, "kernel automorphism must square to id"
    assert phi(f) == f, "kernel automorphism must fix the fermion"
    assert all(q(phi(x)) == q(x) for x in group.elements()), (
        "kernel automorphism must preserve the form"
    )
    for x in group.elements():
        multiplier = 0 if q.bilinear(x, f) == QmodZ(0) else 1
        assert phi(x) == x + multiplier * f
    return phi


@dataclass(frozen=True)
class TwoToOneReport:
    passed: bool
    upstairs_count: int
    downstairs_count: int


def two_to_one_check(psm: PointedSpinModular) -> TwoToOneReport:
    """Count form-and-fermion-preserving automorphisms upstairs against
    class-preserving automorphisms of the quotient triple; the ratio must
    be exactly 2."""
    upstairs = automorphisms(psm.group, preserve=psm.metric, fix=psm.fermion)
    classification = classify_pointed(psm)
    triple = classification.triple
    downstairs = 0
    for phi in automorphisms(triple.group):
        composed = QuadraticForm(
            triple.group,
            {x: triple.q_rep(phi(x)) for x in triple.group.elements()},
            validate=False,
        )
        if qclass_equivalent(composed, triple.q_rep) is not None:
            downstairs += 1
    return TwoToOneReport(
        passed=len(upstairs) == 2 * downstairs,
        upstairs_count=len(upstairs),
        downstairs_count=downstairs,
    )


# -- lattice constructions -------------------------------------------------


def _gram_pairing(gram, x, y) -> Fraction:
    n = len(gram)
    return sum(
        Fraction(x[i]) * gram[i][j] * Fraction(y[j])
        for i in range(n)
        for j in range(n)
    )


def _dual_coords(lat: LatticeData) -> list[list[Fraction]]:
    """Columns of gram^-1: the dual basis in lattice coordinates."""
    return snf.rational_inverse([list(r) for r in lat.gram])


@dataclass
class DiscriminantPresentation:
    """Quotient of two full-rank lattices sup/sub in lattice coordinates:
    group structure, a section picking vector representatives, and the
    projection of arbitrary sup-lattice vectors."""

    group: FiniteAbelianGroup
    reps: dict[GroupElement, tuple[Fraction, ...]]
    sup_basis: list[list[Fraction]]
    u_matrix: list[list[int]]
    diag: list[int]
    kept: list[int]

    def project_vector(self, vec: Sequence[Fraction]) -> GroupElement:
        coords = snf.matvec(snf.rational_inverse(self.sup_basis), list(vec))
        ints = []
        for c in coords:
            frac = Fraction(c)
            if frac.denominator != 1:
                raise ValueError("vector does not lie in the covering lattice")
            ints.append(frac.numerator)
        mapped = snf.matvec(self.u_matrix, ints)
        return self.group.element(tuple(mapped[i] for i in self.kept))


def _lattice_quotient(
    sup_basis: list[list[Fraction]], sub_basis: list[list[Fraction]]
) -> DiscriminantPresentation:
    """Finite quotient sup/sub of two column-basis lattices."""
    n = len(sup_basis)
    sup_inv = snf.rational_inverse(sup_basis)
    change = snf.matmul(sup_inv, sub_basis)
    int_change = []
    for row in change:
        int_row = []
        for x in row:
            frac = Fraction(x)
            if frac.denominator != 1:
                raise ValueError("second lattice is not contained in the first")
            int_row.append(frac.numerator)
        int_change.append(int_row)
    u, d, _ = snf.smith_normal_form(int_change)
    diag = snf.diagonal(d)
    kept = [i for i, x in enumerate(diag) if x >= 2]
    group = FiniteAbelianGroup(tuple(diag[i] for i in kept))
    u_inv = snf.rational_inverse(u)
    reps: dict[GroupElement, tuple[Fraction, ...]] = {}
    for elem in group.elements():
        lift = [0] * n
        for idx, i in enumerate(kept):
            lift[i] = elem.residues[idx]
        coords = snf.matvec(u_inv, lift)
        vec = snf.matvec(sup_basis, coords)
        reps[elem] = tuple(Fraction(x) for x in vec)
    return DiscriminantPresentation(
        group=group,
        reps=reps,
        sup_basis=sup_basis,
        u_matrix=u,
        diag=list(diag),
        kept=kept,
    )


def ascs_from_lattice(lat: LatticeData) -> AscsTriple:
    """Discriminant triple of a lattice with characteristic vector:
    group = dual mod primal, q([x]) = (x, x - W2)/2 + (W2, W2)/8 mod 1,
    sigma = signature mod 8, validated against Gauss-Milgram."""
    n = lat.rank
    gram = [list(r) for r in lat.gram]
    dual = _dual_coords(lat)
    primal = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pres = _lattice_quotient(dual, primal)
    w2_vec = snf.matvec(dual, list(lat.w2))
    w2_norm = _gram_pairing(gram, w2_vec, w2_vec)
    table = {}
    for elem, vec in pres.reps.items():
        val = (
            Fraction(1, 2) * _gram_pairing(gram, vec, [a - b for a, b in zip(vec, w2_vec)])
            + Fraction(1, 8) * w2_norm
        )
        table[elem] = QmodZ(val)
    q_rep = QuadraticForm(pres.group, table)
    from .surgery import LinkingMatrix, inertia

    sig = inertia(LinkingMatrix.from_rows(lat.gram)).signature
    try:
        return AscsTriple(group=pres.group, q_rep=q_rep, sigma=sig % 8)
    except ValueError as exc:
        raise ValueError(
            "Gauss-Milgram validation failed for the discriminant form; "
            "w2 is not characteristic for this lattice"
        ) from exc


def psm_from_even_sublattice(lat: LatticeData) -> PointedSpinModular:
    """Pointed spin-modular datum of the index-2 even sublattice.

    The even sublattice is the kernel of pairing with W2 mod 2; its dual
    extends the original dual by W2/2.  The quotient carries q(x) =
    (x, x)/2 and the fermion is the class of any odd primal vector.
    Lattices whose W2 class vanishes have no odd vectors and are rejected.
    """
    n = lat.rank
    gram = [list(r) for r in lat.gram]
    odd_indices = [j for j in range(n) if lat.w2[j] % 2 != 0]
    if not odd_indices:
        raise ValueError(
            "characteristic class is trivial mod 2; the datum is oriented, "
            "not spin, and has no even sublattice of index 2"
        )
    j0 = odd_indices[0]
    # Column basis of the even sublattice inside Z^n.
    cols = []
    for j in range(n):
        if j == j0:
            col = [0] * n
            col[j0] = 2
        elif j in odd_indices:
            col = [0] * n
            col[j] = 1
            col[j0] = 1
        else:
            col = [0] * n
            col[j] = 1
        cols.append(col)
    even_basis = [[Fraction(cols[j][i]) for j in range(n)] for i in range(n)]

    dual = _dual_coords(lat)
    w2_vec = snf.matvec(dual, list(lat.w2))
    half_w2 = [Fraction(x, 2) for x in w2_vec]
    gens = [[dual[i][j] for j in range(n)] + [half_w2[i]] for i in range(n)]
    even_dual_basis = snf.column_lattice_basis(gens)

    pres = _lattice_quotient(even_dual_basis, even_basis)
    table = {}
    for elem, vec in pres.reps.items():
        table[elem] = QmodZ(Fraction(1, 2) * _gram_pairing(gram, vec, vec))
    q_hat = QuadraticForm(pres.group, table)
    fermion_vec = [Fraction(int(i == j0)) for i in range(n)]
    fermion = pres.project_vector(fermion_vec)
    return PointedSpinModular(q_hat, fermion)


def triples_equivalent(a: AscsTriple, b: AscsTriple) -> bool:
    """Equality in the groupoid: same sigma and some group isomorphism
    matching the form classes."""
    if a.sigma != b.sigma:
        return False
    if a.group.canonical_orders != b.group.canonical_orders:
        return False
    from .groups import isomorphisms

    for phi in isomorphisms(a.group, b.group):
        composed = QuadraticForm(
            a.group,
            {x: b.q_rep(phi(x)) for x in a.group.elements()},
            validate=False,
        )
        if qclass_equivalent(composed, a.q_rep) is not None:
            return True
    return False
