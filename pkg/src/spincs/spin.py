"""Pointed spin-modular data and spin state-space dimensions.

A pointed spin-modular datum is a nondegenerate homogeneous quadratic form
together with a distinguished fermion: an element f with 2f = 0 and
q(f) = 1/2.  Braiding with the fermion grades the simple objects into an
even and an odd half, and the graded halves of the Kirby colour drive both
the state-space dimension formula and the surgery invariants.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .groups import FiniteAbelianGroup, GroupElement, QuadraticForm
from .scalars import Cyclotomic, QmodZ, sqrt_nat

__all__ = [
    "PointedSpinModular",
    "SimpleObject",
    "SpinModularSummary",
    "SurfaceSpinStructure",
    "grading_degree",
    "kirby_color",
    "pointed_summary",
    "ising_summary",
    "arf",
    "spin_state_dims",
    "three_torus_closed_form",
]

HALF = QmodZ(Fraction(1, 2))


class PointedSpinModular:
    """A nondegenerate homogeneous quadratic form with a fermion.

    All quantum dimensions are +1 in this pointed setting; categories with
    dimension -1 objects carry extra data and are out of scope here.
    """

    def __init__(self, metric: QuadraticForm, fermion: GroupElement) -> None:
        group = metric.group
        fermion._check(group.zero())
        if fermion.is_zero():
            raise ValueError("fermion must be nonzero")
        if not (2 * fermion).is_zero():
            raise ValueError("fermion must have order 2")
        if metric(fermion) != HALF:
            raise ValueError(
                f"fermion must have twist -1, got q(f) = {metric(fermion)}"
            )
        if not metric.is_homogeneous():
            raise ValueError("form must be homogeneous")
        if not metric.is_nondegenerate():
            raise ValueError("form must be nondegenerate")
        self.metric = metric
        self.fermion = fermion

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.metric.group

    def __repr__(self) -> str:
        return f"PointedSpinModular({self.group}, f={self.fermion})"


def grading_degree(psm: PointedSpinModular, g: GroupElement) -> int:
    """0 when g is transparent to the fermion, 1 otherwise."""
    return 0 if psm.metric.bilinear(g, psm.fermion) == QmodZ(0) else 1


def kirby_color(psm: PointedSpinModular, parity: int) -> list[GroupElement]:
    """The graded half of the Kirby colour; all weights are 1 here."""
    if parity not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    return [g for g in psm.group.elements() if grading_degree(psm, g) == parity]


@dataclass(frozen=True)
class SimpleObject:
    label: str
    dim: Cyclotomic
    degree: int
    fixed_by_f: bool


@dataclass
class SpinModularSummary:
    """Just enough about a spin modular category to evaluate the dimension
    formula: simple objects with dimension, grading degree and whether
    tensoring with the fermion fixes them, plus the fermion's dimension."""

    simples: list[SimpleObject]
    fermion_dim: int
    total_dim_sq: Cyclotomic = field(init=False)

    def __post_init__(self):
        if self.fermion_dim not in (+1, -1):
            raise ValueError("fermion_dim must be +1 or -1")
        units = [
            s
            for s in self.simples
            if s.label == "1"
        ]
        if len(units) != 1:
            raise ValueError("exactly one simple must be labelled '1'")
        unit = units[0]
        if unit.dim != 1 or unit.degree != 0 or unit.fixed_by_f:
            raise ValueError("the tensor unit must have dim 1, degree 0 and not be fixed")
        for s in self.simples:
            if s.degree not in (0, 1):
                raise ValueError(f"simple {s.label} has degree outside {{0,1}}")
            if s.fixed_by_f and s.degree != 1:
                raise ValueError(
                    f"fixed point {s.label} must sit in the odd component"
                )
        total = Cyclotomic.from_rational(0)
        for s in self.simples:
            total = total + s.dim * s.dim
        self.total_dim_sq = total


def pointed_summary(psm: PointedSpinModular) -> SpinModularSummary:
    """One invertible simple per group element; the fermion acts freely."""
    simples = []
    for g in psm.group.elements():
        label = "1" if g.is_zero() else str(g.residues)
        simples.append(
            SimpleObject(
                label=label,
                dim=Cyclotomic.from_rational(1),
                degree=grading_degree(psm, g),
                fixed_by_f=False,
            )
        )
    return SpinModularSummary(simples=simples, fermion_dim=+1)


def ising_summary() -> SpinModularSummary:
    """The Ising category: even part {1, f}, odd part one fixed point of
    dimension sqrt(2)."""
    return SpinModularSummary(
        simples=[
            SimpleObject("1", Cyclotomic.from_rational(1), 0, False),
            SimpleObject("f", Cyclotomic.from_rational(1), 0, False),
            SimpleObject("s", sqrt_nat(2), 1, True),
        ],
        fermion_dim=+1,
    )


@dataclass(frozen=True)
class SurfaceSpinStructure:
    """A spin structure on a closed genus-g surface, recorded as framing
    bits along a symplectic basis."""

    genus: int
    tuple: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be >= 0")
        if len(self.tuple) != self.genus:
            raise ValueError("need one (a_i, b_i) pair per handle")
        for a, b in self.tuple:
            if a not in (0, 1) or b not in (0, 1):
                raise ValueError("framing bits must be 0 or 1")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "SurfaceSpinStructure":
        if len(bits) % 2:
            raise ValueError("need an even number of bits")
        pairs = tuple(
            (int(bits[2 * i]), int(bits[2 * i + 1])) for i in range(len(bits) // 2)
        )
        return cls(genus=len(pairs), tuple=pairs)


def arf(sigma: SurfaceSpinStructure) -> int:
    return sum(a * b for a, b in sigma.tuple) % 2


def spin_state_dims(
    summary: SpinModularSummary, genus: int, sigma: SurfaceSpinStructure
) -> tuple[Cyclotomic, Cyclotomic]:
    """Dimensions (even part, odd part) of the genus-g spin state space.

    Each summand contributes D^(2g-2) eps^(deg) dim^(2-2g) weighted by
    4^-g for free orbits and (-1)^Arf 2^-g for fermion fixed points; the
    overall eps^((1-dim f)/2) converts categorical dimension to a count of
    basis vectors.  Both results must come out as nonnegative integers.
    """
    if sigma.genus != genus:
        raise ValueError("spin structure genus does not match")
    total_d = summary.total_dim_sq  # D^2, exact
    d_power = total_d ** (genus - 1)  # D^(2g-2)
    sign = (-1) ** arf(sigma)
    dims = []
    for eps in (+1, -1):
        acc = Cyclotomic.from_rational(0)
        for s in summary.simples:
            weight = (
                Fraction(sign, 2**genus)
                if s.fixed_by_f
                else Fraction(1, 4**genus)
            )
            term = (s.dim ** (2 - 2 * genus)) * weight
            if eps == -1 and s.degree == 1:
                term = -term
            acc = acc + term
        value = d_power * acc
        if eps == -1 and summary.fermion_dim == -1:
            value = -value
        rat = value.as_rational()
        if rat is None or rat.denominator != 1 or rat < 0:
            raise ValueError(
                f"state-space dimension {value!r} is not a nonnegative integer; "
                "summary data is inconsistent"
            )
        dims.append(value)
    return dims[0], dims[1]


def three_torus_closed_form(
    summary: SpinModularSummary, s: tuple[int, int, int]
) -> Cyclotomic:
    """Closed-form three-torus evaluation: each free simple contributes
    1/4, each fixed point (1/2)(-1)^(s1 s2 s3), all doubled.

    Kept verbatim as stated; the surgery route on the zero-framed
    three-component presentation is the normalisation-consistent one and
    differs from this closed form by a factor of 2 for pointed inputs.
    """
    s1, s2, s3 = (int(x) % 2 for x in s)
    acc = Cyclotomic.from_rational(0)
    for simple in summary.simples:
        if simple.fixed_by_f:
            acc = acc + Fraction((-1) ** (s1 * s2 * s3), 2)
        else:
            acc = acc + Fraction(1, 4)
    return 2 * acc
