"""Finite abelian groups, quadratic forms, Gauss sums and quotients.

Groups are products of cyclic groups; elements are residue tuples with
componentwise arithmetic.  Quadratic forms are stored as dense value
tables, which keeps well-definedness questions out of the arithmetic and
is cheap at desk scale.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Optional, Sequence

from . import snf
from .scalars import Cyclotomic, QmodZ, root_of_unity, sqrt_nat

__all__ = [
    "FiniteAbelianGroup",
    "GroupElement",
    "GroupHom",
    "QuadraticForm",
    "QuotientPresentation",
    "EnumerationCapError",
    "NotWellDefinedError",
    "gauss_sum",
    "quotient",
    "subquotient",
    "subgroup_elements",
    "automorphisms",
    "isomorphisms",
    "qclass_equivalent",
]

AUTOMORPHISM_CAP = 64


class EnumerationCapError(RuntimeError):
    """A brute-force enumeration would exceed its configured cap."""


class NotWellDefinedError(ValueError):
    """A construction is not well defined on residue tuples."""


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups of the given orders (each >= 1)."""

    orders: tuple[int, ...]

    def __post_init__(self):
        if any(n < 1 for n in self.orders):
            raise ValueError("cyclic orders must be >= 1")

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders) if self.orders else 1

    @property
    def canonical_orders(self) -> tuple[int, ...]:
        """Invariant factors d_1 | d_2 | ..., each >= 2."""
        k = len(self.orders)
        if k == 0:
            return ()
        diag = [[self.orders[i] if i == j else 0 for j in range(k)] for i in range(k)]
        _, d, _ = snf.smith_normal_form(diag)
        return tuple(x for x in snf.diagonal(d) if x >= 2)

    def element(self, residues: Sequence[int]) -> "GroupElement":
        if len(residues) != len(self.orders):
            raise ValueError(
                f"expected {len(self.orders)} residues, got {len(residues)}"
            )
        return GroupElement(
            self, tuple(r % n for r, n in zip(residues, self.orders))
        )

    def zero(self) -> "GroupElement":
        return self.element((0,) * len(self.orders))

    def elements(self) -> Iterator["GroupElement"]:
        for tup in itertools.product(*(range(n) for n in self.orders)):
            yield GroupElement(self, tup)

    def generators(self) -> list["GroupElement"]:
        gens = []
        for i, n in enumerate(self.orders):
            if n > 1:
                gens.append(self.element(tuple(int(i == j) for j in range(len(self.orders)))))
        return gens

    def __repr__(self) -> str:
        if not self.orders:
            return "Z(1)"
        return " x ".join(f"Z{n}" for n in self.orders)


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    residues: tuple[int, ...]

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return self.group.element(
            tuple(a + b for a, b in zip(self.residues, other.residues))
        )

    def __neg__(self) -> "GroupElement":
        return self.group.element(tuple(-a for a in self.residues))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __mul__(self, n: int) -> "GroupElement":
        if not isinstance(n, int):
            return NotImplemented
        return self.group.element(tuple(n * a for a in self.residues))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.residues)

    def _check(self, other: "GroupElement") -> None:
        if self.group.orders != other.group.orders:
            raise ValueError("elements of different groups")

    def __repr__(self) -> str:
        return f"({', '.join(map(str, self.residues))})"


class GroupHom:
    """Homomorphism between finite abelian groups, given by the images of
    the standard generators."""

    def __init__(
        self,
        domain: FiniteAbelianGroup,
        codomain: FiniteAbelianGroup,
        images: Sequence[GroupElement],
    ) -> None:
        if len(images) != len(domain.orders):
            raise ValueError("one image per cyclic factor required")
        for n, img in zip(domain.orders, images):
            if not (n * img).is_zero():
                raise NotWellDefinedError(
                    f"image of a generator of order {n} is not killed by {n}"
                )
        self.domain = domain
        self.codomain = codomain
        self.images = tuple(images)

    def __call__(self, x: GroupElement) -> GroupElement:
        acc = self.codomain.zero()
        for r, img in zip(x.residues, self.images):
            acc = acc + r * img
        return acc

    def is_bijective(self) -> bool:
        if self.domain.size != self.codomain.size:
            return False
        seen = {self(x).residues for x in self.domain.elements()}
        return len(seen) == self.domain.size

    def compose(self, other: "GroupHom") -> "GroupHom":
        return GroupHom(
            other.domain, self.codomain, [self(img) for img in other.images]
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupHom):
            return NotImplemented
        return (
            self.domain.orders == other.domain.orders
            and self.codomain.orders == other.codomain.orders
            and self.images == other.images
        )

    def __hash__(self) -> int:
        return hash((self.domain.orders, self.codomain.orders, self.images))

    def __repr__(self) -> str:
        return f"GroupHom({self.images})"


class QuadraticForm:
    """Q/Z-valued quadratic form on a finite abelian group, stored as a
    total value table.

    The associated bilinear form is b(x, y) = q(x+y) - q(x) - q(y) + q(0),
    which also handles non-normalised tables with q(0) != 0; bilinearity
    is validated on construction.
    """

    def __init__(
        self,
        group: FiniteAbelianGroup,
        table: Mapping[GroupElement, QmodZ],
        validate: bool = True,
    ) -> None:
        self.group = group
        self.table = dict(table)
        if len(self.table) != group.size:
            raise ValueError("value table must cover the whole group")
        if validate:
            self._validate_bilinear()

    @classmethod
    def from_gram(
        cls, group: FiniteAbelianGroup, gram: Sequence[Sequence[Fraction]]
    ) -> "QuadraticForm":
        """q(x) = sum_ij M_ij x_i x_j mod 1 on residue tuples.

        Fails with the offending generator named when the polynomial is not
        invariant under shifting a residue by its cyclic order.
        """
        k = len(group.orders)
        m = [[Fraction(x) for x in row] for row in gram]
        if len(m) != k or any(len(row) != k for row in m):
            raise ValueError("gram matrix size must match the number of factors")
        for i in range(k):
            for j in range(k):
                if m[i][j] != m[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        for i in range(k):
            n = group.orders[i]
            # q(x + n e_i) - q(x) = M_ii (2 n x_i + n^2) + 2 n sum_{j!=i} M_ij x_j
            if (m[i][i] * n * n) % 1 != 0 or (2 * n * m[i][i]) % 1 != 0 or any(
                (2 * n * m[i][j]) % 1 != 0 for j in range(k) if j != i
            ):
                raise NotWellDefinedError(
                    f"form is not well defined on residues of generator {i}"
                )
        table = {}
        for g in group.elements():
            val = Fraction(0)
            for i in range(k):
                for j in range(k):
                    val += m[i][j] * g.residues[i] * g.residues[j]
            table[g] = QmodZ(val)
        return cls(group, table)

    def __call__(self, g: GroupElement) -> QmodZ:
        return self.table[g]

    def bilinear(self, x: GroupElement, y: GroupElement) -> QmodZ:
        return self(x + y) - self(x) - self(y) + self(self.group.zero())

    def _validate_bilinear(self) -> None:
        # Additivity against generator increments in the first slot implies
        # full bilinearity by induction; symmetry is automatic from the
        # definition of b.
        for e in self.group.generators():
            for x in self.group.elements():
                for y in self.group.elements():
                    if self.bilinear(x + e, y) != self.bilinear(x, y) + self.bilinear(e, y):
                        raise ValueError(
                            "value table does not define a quadratic form "
                            f"(bilinearity fails at ({x}, {e}, {y}))"
                        )

    def is_homogeneous(self) -> bool:
        """q(n x) = n^2 q(x) for every x and every n below the exponent."""
        for x in self.group.elements():
            qx = self(x)
            for n in range(self.group.exponent):
                if self(n * x) != (n * n) * qx:
                    return False
        return True

    def radical(self) -> list[GroupElement]:
        rad = []
        for x in self.group.elements():
            if all(self.bilinear(x, y) == QmodZ(0) for y in self.group.elements()):
                rad.append(x)
        return rad

    def is_nondegenerate(self) -> bool:
        return len(self.radical()) == 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuadraticForm):
            return NotImplemented
        return self.group.orders == other.group.orders and self.table == other.table

    def __repr__(self) -> str:
        return f"QuadraticForm on {self.group}"


def gauss_sum(q: QuadraticForm, sign: int = +1) -> Cyclotomic:
    """tau^{sign}(G, q) = |G|^{-1/2} sum_g exp(sign * 2 pi i q(g))."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    counts: dict[Fraction, int] = {}
    for g in q.group.elements():
        r = (sign * q(g).value) % 1
        counts[r] = counts.get(r, 0) + 1
    order = math.lcm(*(r.denominator for r in counts), 1)
    terms = {
        (r.numerator * (order // r.denominator)) % order: c
        for r, c in counts.items()
    }
    total = Cyclotomic.from_exponents(order, terms)
    return total / sqrt_nat(q.group.size)


@dataclass
class QuotientPresentation:
    """A quotient group together with its projection and a deterministic
    section picking the lexicographically smallest coset representative."""

    quotient: FiniteAbelianGroup
    projection: Callable[[GroupElement], GroupElement]
    section: Callable[[GroupElement], GroupElement]
    domain_elements: tuple[GroupElement, ...]


def _presentation_from_relations(
    gens: Sequence[GroupElement], relation_columns: list[list[int]]
) -> tuple[FiniteAbelianGroup, dict[GroupElement, GroupElement]]:
    """Quotient of the free group on ``gens`` by the given relation columns,
    returned with the induced map gen -> quotient element."""
    m = len(gens)
    if m == 0:
        return FiniteAbelianGroup(()), {}
    if relation_columns:
        rel = [[col[i] for col in relation_columns] for i in range(m)]
    else:
        rel = [[0] for _ in range(m)]
    u, d, _ = snf.smith_normal_form(rel)
    diag = snf.diagonal(d)
    diag = diag + [0] * (m - len(diag))
    if any(x == 0 for x in diag):
        raise ValueError("relations do not present a finite group")
    keep = [i for i, x in enumerate(diag) if x >= 2]
    q_group = FiniteAbelianGroup(tuple(diag[i] for i in keep))
    images = {}
    for j, g in enumerate(gens):
        col = [u[i][j] for i in range(m)]
        images[g] = q_group.element(tuple(col[i] for i in keep))
    return q_group, images


def quotient(
    group: FiniteAbelianGroup, subgroup_generators: Sequence[GroupElement]
) -> QuotientPresentation:
    """Quotient of the whole group by the subgroup the generators span,
    via Smith normal form of the stacked relation matrix."""
    k = len(group.orders)
    columns = [
        [group.orders[i] if i == j else 0 for i in range(k)] for j in range(k)
    ]
    for g in subgroup_generators:
        g._check(group.zero())
        columns.append(list(g.residues))
    std_gens = [
        group.element(tuple(int(i == j) for j in range(k))) for i in range(k)
    ]
    q_group, gen_images = _presentation_from_relations(std_gens, columns)

    def projection(x: GroupElement) -> GroupElement:
        acc = q_group.zero()
        for r, e in zip(x.residues, std_gens):
            acc = acc + r * gen_images[e]
        return acc

    section_map: dict[GroupElement, GroupElement] = {}
    for x in group.elements():
        key = projection(x)
        if key not in section_map or x.residues < section_map[key].residues:
            section_map[key] = x
    if len(section_map) != q_group.size:
        raise AssertionError("projection is not surjective")

    return QuotientPresentation(
        quotient=q_group,
        projection=projection,
        section=lambda y: section_map[y],
        domain_elements=tuple(group.elements()),
    )


def subquotient(
    group: FiniteAbelianGroup,
    subgroup: Sequence[GroupElement],
    kernel_generators: Sequence[GroupElement],
) -> QuotientPresentation:
    """Quotient of a subgroup H of ``group`` (given by its full element
    list) by the subgroup generated by ``kernel_generators``.

    The relation lattice of H on the element list is recovered as an
    integer kernel, so no presentation of H is needed up front.
    """
    elems = sorted(subgroup, key=lambda g: g.residues)
    index = {g: i for i, g in enumerate(elems)}
    m = len(elems)
    k = len(group.orders)
    # Columns of the combined map Z^m + Z^t + Z^k -> Z^k; relations of the
    # quotient are the z-parts of its kernel.
    cols: list[list[int]] = [list(g.residues) for g in elems]
    cols += [list(g.residues) for g in kernel_generators]
    cols += [[group.orders[i] if i == j else 0 for i in range(k)] for j in range(k)]
    mat = [[cols[j][i] for j in range(len(cols))] for i in range(k)]
    kernel = snf.integer_kernel_basis(mat)
    relations = [col[:m] for col in kernel]
    q_group, images = _presentation_from_relations(elems, relations)

    proj_map = {g: images[g] for g in elems}
    section_map: dict[GroupElement, GroupElement] = {}
    for g in elems:
        key = proj_map[g]
        if key not in section_map or g.residues < section_map[key].residues:
            section_map[key] = g
    if len(section_map) != q_group.size:
        raise AssertionError("projection is not surjective on the subgroup")

    return QuotientPresentation(
        quotient=q_group,
        projection=lambda x: proj_map[x],
        section=lambda y: section_map[y],
        domain_elements=tuple(elems),
    )


def subgroup_elements(
    group: FiniteAbelianGroup,
    predicate: Callable[[GroupElement], bool],
) -> list[GroupElement]:
    """All elements satisfying the predicate, in lexicographic order.

    Closure under addition is the caller's responsibility; it is verified
    here only when assertions are enabled.
    """
    members = [g for g in group.elements() if predicate(g)]
    if __debug__:
        member_set = {g.residues for g in members}
        for a in members:
            for b in members:
                assert (a + b).residues in member_set, (
                    "predicate does not define a subgroup"
                )
    return members


def _homomorphism_candidates(
    domain: FiniteAbelianGroup, codomain: FiniteAbelianGroup
) -> Iterator[GroupHom]:
    factor_orders = domain.orders
    candidate_lists = []
    for n in factor_orders:
        candidate_lists.append(
            [h for h in codomain.elements() if (n * h).is_zero()]
        )
    for images in itertools.product(*candidate_lists):
        yield GroupHom(domain, codomain, images)


def isomorphisms(
    domain: FiniteAbelianGroup,
    codomain: FiniteAbelianGroup,
    preserve: Optional[tuple[QuadraticForm, QuadraticForm]] = None,
    fix: Optional[tuple[GroupElement, GroupElement]] = None,
    cap: int = AUTOMORPHISM_CAP,
) -> list[GroupHom]:
    """Brute-force enumeration of group isomorphisms, optionally filtered
    by exact form preservation q2(phi(x)) = q1(x) and by phi(f1) = f2."""
    if domain.size > cap or codomain.size > cap:
        raise EnumerationCapError(
            f"isomorphism enumeration beyond cap {cap} (|G| = {domain.size})"
        )
    if domain.size != codomain.size:
        return []
    found = []
    for hom in _homomorphism_candidates(domain, codomain):
        if fix is not None and hom(fix[0]) != fix[1]:
            continue
        if preserve is not None:
            q1, q2 = preserve
            if any(q2(hom(x)) != q1(x) for x in domain.elements()):
                continue
        if not hom.is_bijective():
            continue
        found.append(hom)
    return found


def automorphisms(
    group: FiniteAbelianGroup,
    preserve: Optional[QuadraticForm] = None,
    fix: Optional[GroupElement] = None,
    cap: int = AUTOMORPHISM_CAP,
) -> list[GroupHom]:
    """Automorphisms of the group, optionally preserving a form exactly
    and fixing a chosen element."""
    return isomorphisms(
        group,
        group,
        preserve=None if preserve is None else (preserve, preserve),
        fix=None if fix is None else (fix, fix),
        cap=cap,
    )


def qclass_equivalent(
    q1: QuadraticForm, q2: QuadraticForm
) -> Optional[GroupElement]:
    """A witness Delta with q1(g) = q2(g - Delta) for all g, if one exists."""
    if q1.group.orders != q2.group.orders:
        raise ValueError("forms live on different groups")
    for delta in q1.group.elements():
        if all(q1(g) == q2(g - delta) for g in q1.group.elements()):
            return delta
    return None
