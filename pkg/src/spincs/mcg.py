"""Torus mapping class group action on spin state spaces.

The four spin structures on the torus are indexed by sectors
(alpha, beta) in {0,1}^2.  A sector's state space has a basis e_g^+/-
indexed by fermion-cosets of the even subgroup (beta = 0) or of its odd
complement (beta = 1), with the sign alpha telling whether the defect
puncture carries the unit or the fermion.  The modular T and S moves act
by explicit phase and Fourier matrices that permute the sectors; they
restrict the oriented torus operators and intertwine with the
wavefunction-basis matrices of the classified Chern-Simons datum.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .classify import AscsTriple, PointedClassification, classify_pointed
from .groups import GroupElement, QuadraticForm
from .scalars import Cyclotomic, QmodZ, root_of_unity, sqrt_nat
from .spin import PointedSpinModular, grading_degree, kirby_color

__all__ = [
    "SpinTorusBasis",
    "SectorMap",
    "torus_basis",
    "spin_t",
    "spin_s",
    "oriented_torus_t",
    "oriented_torus_s",
    "oriented_restriction_check",
    "wavefunction_matrices",
    "intertwiner_check",
    "IntertwinerReport",
    "matrix_mult",
    "matrix_determinant",
]

Sector = tuple[int, int]


@dataclass(frozen=True)
class SpinTorusBasis:
    """Ordered basis of one sector: fermion-coset representatives, each the
    lexicographically smallest (or largest, for cross-checks) element."""

    sector: Sector
    labels: tuple[GroupElement, ...]


@dataclass(frozen=True)
class SectorMap:
    source_sector: Sector
    target_sector: Sector
    matrix: tuple[tuple[Cyclotomic, ...], ...]
    # matrix[i][j] is the coefficient of target basis vector i in the image
    # of source basis vector j.


def _check_sector(sector: Sector) -> None:
    if tuple(sector) not in {(0, 0), (0, 1), (1, 0), (1, 1)}:
        raise ValueError("sector must be a pair of bits (alpha, beta)")


def torus_basis(
    psm: PointedSpinModular, sector: Sector, largest_reps: bool = False
) -> SpinTorusBasis:
    _check_sector(sector)
    _, beta = sector
    members = kirby_color(psm, beta)
    pick = max if largest_reps else min
    reps = {
        pick(g, g + psm.fermion, key=lambda x: x.residues).residues: None
        for g in members
    }
    labels = tuple(
        sorted((psm.group.element(r) for r in reps), key=lambda g: g.residues)
    )
    if 4 * len(labels) != psm.group.size:
        raise AssertionError("sector basis must have size |G|/4")
    return SpinTorusBasis(sector=tuple(sector), labels=labels)


def _t_target(sector: Sector) -> Sector:
    alpha, beta = sector
    return ((alpha + 1) % 2, 0) if beta == 0 else (alpha, 1)


def spin_t(
    psm: PointedSpinModular, sector: Sector, largest_reps: bool = False
) -> SectorMap:
    """Diagonal twist phases exp(-2 pi i q(g)); the even sectors swap their
    sign alpha, the odd sectors stay put."""
    _check_sector(sector)
    basis = torus_basis(psm, sector, largest_reps)
    q = psm.metric
    phases = []
    flip = -1 if sector[1] == 0 else 1
    for g in basis.labels:
        phase = root_of_unity(-q(g).value)
        # Consistency under g -> g+f: in the even sectors the phase flips by
        # -1, compensating the sign of the swapped target vector; in the odd
        # sectors the phase is rep-independent and the source/target signs
        # cancel each other.
        assert root_of_unity(-q(g + psm.fermion).value) == flip * phase
        phases.append(phase)
    zero = Cyclotomic.from_rational(0)
    n = len(phases)
    matrix = tuple(
        tuple(phases[j] if i == j else zero for j in range(n)) for i in range(n)
    )
    return SectorMap(
        source_sector=tuple(sector),
        target_sector=_t_target(sector),
        matrix=matrix,
    )


def _s_target(sector: Sector) -> Sector:
    return {
        (0, 0): (0, 0),
        (1, 0): (0, 1),
        (0, 1): (1, 0),
        (1, 1): (1, 1),
    }[tuple(sector)]


def spin_s(
    psm: PointedSpinModular, sector: Sector, largest_reps: bool = False
) -> SectorMap:
    """Fourier kernel 2/sqrt|G| exp(2 pi i b(g, g')) between the graded
    coset bases, with the target parity flipped exactly for the
    sign-swapping sectors."""
    _check_sector(sector)
    source = torus_basis(psm, sector, largest_reps)
    target_sector = _s_target(sector)
    target = torus_basis(psm, target_sector, largest_reps)
    q = psm.metric
    f = psm.fermion
    prefactor = 2 / sqrt_nat(psm.group.size)
    rows = []
    for g_target in target.labels:
        row = []
        for g_source in source.labels:
            phase = root_of_unity(q.bilinear(g_source, g_target).value)
            # Independence of the target representative: shifting g' by f
            # multiplies the phase by exp(2 pi i b(g, f)), matching the sign
            # of e_{g'+f} in the target sector.
            target_sign = -1 if target_sector[0] == 1 else 1
            assert root_of_unity(
                q.bilinear(g_source, g_target + f).value
            ) == target_sign * phase
            row.append(prefactor * phase)
        rows.append(tuple(row))
    # Independence of the source representative: shifting the source by f
    # rescales its column by the sign of e_{g+f} in the source sector.
    source_sign = -1 if sector[0] == 1 else 1
    for j, g_source in enumerate(source.labels):
        for i, g_target in enumerate(target.labels):
            shifted = root_of_unity(q.bilinear(g_source + f, g_target).value)
            assert prefactor * shifted == source_sign * rows[i][j]
    return SectorMap(
        source_sector=tuple(sector), target_sector=target_sector, matrix=tuple(rows)
    )


# -- oriented torus operators and the restriction property ------------------


def _ordered_group(psm: PointedSpinModular) -> list[GroupElement]:
    return sorted(psm.group.elements(), key=lambda g: g.residues)


def oriented_torus_t(psm: PointedSpinModular) -> list[list[Cyclotomic]]:
    elems = _ordered_group(psm)
    zero = Cyclotomic.from_rational(0)
    return [
        [
            root_of_unity(-psm.metric(g).value) if i == j else zero
            for j, g in enumerate(elems)
        ]
        for i, _ in enumerate(elems)
    ]


def oriented_torus_s(psm: PointedSpinModular) -> list[list[Cyclotomic]]:
    elems = _ordered_group(psm)
    scale = 1 / sqrt_nat(psm.group.size)
    return [
        [scale * root_of_unity(psm.metric.bilinear(col, row).value) for col in elems]
        for row in elems
    ]


def _embed(psm: PointedSpinModular, g: GroupElement, alpha: int) -> dict:
    """Coordinates of e_g^+- in the coev basis indexed by group elements."""
    sign = 1 if alpha == 0 else -1
    vec: dict[tuple, int] = {}
    vec[g.residues] = vec.get(g.residues, 0) + 1
    shifted = (g + psm.fermion).residues
    vec[shifted] = vec.get(shifted, 0) + sign
    return {k: v for k, v in vec.items() if v}


def _apply_matrix(
    matrix: list[list[Cyclotomic]],
    elems: list[GroupElement],
    vec: dict,
) -> dict:
    index = {g.residues: i for i, g in enumerate(elems)}
    out: dict[tuple, Cyclotomic] = {}
    for key, coeff in vec.items():
        j = index[key]
        for i, g in enumerate(elems):
            entry = matrix[i][j]
            if entry.is_zero():
                continue
            add = entry * coeff
            if g.residues in out:
                out[g.residues] = out[g.residues] + add
            else:
                out[g.residues] = add
    return {k: v for k, v in out.items() if not v.is_zero()}


def _combine_images(
    psm: PointedSpinModular,
    sector_map: SectorMap,
    target_labels: Sequence[GroupElement],
    column: int,
) -> dict:
    alpha_target = sector_map.target_sector[0]
    out: dict[tuple, Cyclotomic] = {}
    for i, g in enumerate(target_labels):
        coeff = sector_map.matrix[i][column]
        if coeff.is_zero():
            continue
        for key, sign in _embed(psm, g, alpha_target).items():
            add = coeff * sign
            if key in out:
                out[key] = out[key] + add
            else:
                out[key] = add
    return {k: v for k, v in out.items() if not v.is_zero()}


def _dicts_equal(a: dict, b: dict) -> bool:
    if set(a) != set(b):
        merged = set(a) | set(b)
        for key in merged:
            va = a.get(key, Cyclotomic.from_rational(0))
            vb = b.get(key, Cyclotomic.from_rational(0))
            if not isinstance(va, Cyclotomic):
                va = Cyclotomic.from_rational(va)
            if not isinstance(vb, Cyclotomic):
                vb = Cyclotomic.from_rational(vb)
            if va != vb:
                return False
        return True
    for key in a:
        va, vb = a[key], b[key]
        if not isinstance(va, Cyclotomic):
            va = Cyclotomic.from_rational(va)
        if not isinstance(vb, Cyclotomic):
            vb = Cyclotomic.from_rational(vb)
        if va != vb:
            return False
    return True


def oriented_restriction_check(
    psm: PointedSpinModular, largest_reps: bool = False
) -> bool:
    """The oriented torus operators, restricted to the embedded spin
    sectors e_g^+- = coev_g +- coev_{g+f}, act exactly as the spin sector
    maps; the embedded sector bases are independent and fill the oriented
    state space."""
    elems = _ordered_group(psm)
    t_matrix = oriented_torus_t(psm)
    s_matrix = oriented_torus_s(psm)
    all_columns: list[dict] = []
    for sector in ((0, 0), (1, 0), (0, 1), (1, 1)):
        basis = torus_basis(psm, sector, largest_reps)
        t_map = spin_t(psm, sector, largest_reps)
        s_map = spin_s(psm, sector, largest_reps)
        t_target_labels = torus_basis(psm, t_map.target_sector, largest_reps).labels
        s_target_labels = torus_basis(psm, s_map.target_sector, largest_reps).labels
        for j, g in enumerate(basis.labels):
            embedded = _embed(psm, g, sector[0])
            all_columns.append(embedded)
            oriented_t_image = _apply_matrix(t_matrix, elems, embedded)
            spin_t_image = _combine_images(psm, t_map, t_target_labels, j)
            if not _dicts_equal(oriented_t_image, spin_t_image):
                return False
            oriented_s_image = _apply_matrix(s_matrix, elems, embedded)
            spin_s_image = _combine_images(psm, s_map, s_target_labels, j)
            if not _dicts_equal(oriented_s_image, spin_s_image):
                return False
    # Rank bookkeeping: the embedded sector bases stack to a basis of the
    # whole coev space (integer entries, so rank over Q suffices).
    if len(all_columns) != len(elems):
        return False
    mat = [
        [Fraction(col.get(g.residues, 0)) for col in all_columns] for g in elems
    ]
    from .snf import determinant

    return determinant(mat) != 0


# -- wavefunction-basis matrices and the intertwiner -------------------------


def _bilinear_form(q_rep: QuadraticForm, x: GroupElement, y: GroupElement) -> QmodZ:
    return q_rep.bilinear(x, y)


def wavefunction_matrices(
    triple: AscsTriple,
    w2_image: GroupElement,
    kind: str,
    source_sector: Sector,
) -> SectorMap:
    """The six displayed wavefunction-basis matrix families, indexed by the
    discriminant group in lexicographic order, with the deprojectification
    phase omitted.

    Sectors use this module's (alpha, beta) convention; the T families fix
    the discriminant label and the S families are Fourier kernels, twisted
    by the characteristic class on the sign-swapping sectors.
    """
    _check_sector(source_sector)
    if kind not in ("t", "s"):
        raise ValueError("kind must be 't' or 's'")
    labels = sorted(triple.group.elements(), key=lambda g: g.residues)
    q = triple.q_rep
    zero_elem = triple.group.zero()
    zero = Cyclotomic.from_rational(0)
    n = len(labels)
    if kind == "t":
        target = _t_target(source_sector)
        phases = []
        for gamma in labels:
            if source_sector == (0, 0):
                val = -(q(gamma) - q(zero_elem)).value
            elif source_sector == (1, 0):
                val = -(q(-gamma) - q(zero_elem)).value
            else:
                val = -q(-gamma).value
            phases.append(root_of_unity(val))
        matrix = tuple(
            tuple(phases[j] if i == j else zero for j in range(n)) for i in range(n)
        )
        return SectorMap(tuple(source_sector), target, matrix)
    target = _s_target(source_sector)
    scale = 1 / sqrt_nat(triple.group.size)
    rows = []
    for gamma_target in labels:
        row = []
        for gamma_source in labels:
            if source_sector in ((0, 0), (0, 1)):
                phase = root_of_unity(
                    _bilinear_form(q, gamma_source, gamma_target).value
                )
            elif source_sector == (1, 0):
                phase = root_of_unity(
                    _bilinear_form(q, gamma_source, gamma_target + w2_image).value
                )
            else:
                phase = root_of_unity(
                    (
                        _bilinear_form(q, gamma_source, gamma_target + w2_image)
                        + 2 * q(zero_elem)
                    ).value
                )
            row.append(scale * phase)
        rows.append(tuple(row))
    return SectorMap(tuple(source_sector), target, tuple(rows))


@dataclass
class IntertwinerReport:
    passed: bool
    global_t_phase: Optional[Cyclotomic]
    phase_order: Optional[int]
    shift_rep: GroupElement
    detail: str = ""


def _compatible_shift_rep(psm: PointedSpinModular) -> GroupElement:
    """Prefer an odd-coset representative a with 2a in {0, f}: for such a
    the displayed basis map intertwines on the nose.  The classified class
    does not depend on this choice."""
    q = psm.metric
    f = psm.fermion
    odd = [g for g in psm.group.elements() if grading_degree(psm, g) == 1]
    good = [g for g in odd if (2 * g).is_zero() or 2 * g == f]
    pool = good if good else odd
    return min(pool, key=lambda g: g.residues)


def intertwiner_check(psm: PointedSpinModular) -> IntertwinerReport:
    """Conjugate the spin sector maps through the displayed basis map into
    the wavefunction bases: S must agree exactly, T up to one global phase
    shared by every sector and entry."""
    a = _compatible_shift_rep(psm)
    classification = classify_pointed(psm, shift_rep=a)
    triple = classification.triple
    w2_image = classification.w2_image
    pres = classification.presentation
    q = psm.metric

    disc_labels = sorted(triple.group.elements(), key=lambda g: g.residues)
    disc_index = {g.residues: i for i, g in enumerate(disc_labels)}

    def gamma_of(g: GroupElement, beta: int) -> int:
        lifted = g if beta == 0 else g - a
        return disc_index[pres.projection(lifted).residues]

    def phase_of(g: GroupElement, alpha: int) -> Cyclotomic:
        if alpha == 0:
            return Cyclotomic.from_rational(1)
        return root_of_unity(-q.bilinear(a, g).value)

    sectors = ((0, 0), (1, 0), (0, 1), (1, 1))
    bases = {s: torus_basis(psm, s) for s in sectors}

    t_ratios: list[Cyclotomic] = []
    for sector in sectors:
        for kind in ("t", "s"):
            ours = spin_t(psm, sector) if kind == "t" else spin_s(psm, sector)
            theirs = wavefunction_matrices(triple, w2_image, kind, sector)
            if ours.target_sector != theirs.target_sector:
                return IntertwinerReport(
                    False, None, None, a, "sector bookkeeping mismatch"
                )
            source_labels = bases[sector].labels
            target_labels = bases[ours.target_sector].labels
            n = len(source_labels)
            for j, g_src in enumerate(source_labels):
                col_src = gamma_of(g_src, sector[1])
                phi_src = phase_of(g_src, sector[0])
                for i, g_tgt in enumerate(target_labels):
                    row_tgt = gamma_of(g_tgt, ours.target_sector[1])
                    phi_tgt = phase_of(g_tgt, ours.target_sector[0])
                    conjugated = ours.matrix[i][j] * phi_tgt / phi_src
                    reference = theirs.matrix[row_tgt][col_src]
                    if kind == "s":
                        if conjugated != reference:
                            return IntertwinerReport(
                                False,
                                None,
                                None,
                                a,
                                f"S mismatch in sector {sector} at ({i},{j})",
                            )
                    else:
                        if conjugated.is_zero() != reference.is_zero():
                            return IntertwinerReport(
                                False, None, None, a,
                                f"T support mismatch in sector {sector}",
                            )
                        if not conjugated.is_zero():
                            t_ratios.append(conjugated / reference)
    first = t_ratios[0]
    if any(r != first for r in t_ratios[1:]):
        return IntertwinerReport(
            False, None, None, a, "T discrepancy is not a single global phase"
        )
    order = _multiplicative_order(first, 48)
    return IntertwinerReport(True, first, order, a)


def _multiplicative_order(value: Cyclotomic, max_order: int) -> Optional[int]:
    acc = Cyclotomic.from_rational(1)
    for k in range(1, max_order + 1):
        acc = acc * value
        if acc == 1:
            return k
    return None


# -- small exact matrix helpers ----------------------------------------------


def matrix_mult(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    zero = Cyclotomic.from_rational(0)
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = zero
            for k in range(inner):
                if not a[i][k].is_zero() and not b[k][j].is_zero():
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def matrix_determinant(rows) -> Cyclotomic:
    n = len(rows)
    work = [list(r) for r in rows]
    det = Cyclotomic.from_rational(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if not work[r][col].is_zero()), None)
        if pivot is None:
            return Cyclotomic.from_rational(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            det = -det
        det = det * work[col][col]
        inv = work[col][col].inverse()
        for r in range(col + 1, n):
            if not work[r][col].is_zero():
                factor = work[r][col] * inv
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return det
