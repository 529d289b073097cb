"""Kernel solver for indexed families of homomorphisms under linear constraints.

Both the operational and the co-operational group computations have the
same shape: the unknown is a family (c_key) with c_key in Hom(src, tgt),
and each constraint is a signed sum of terms post o c_key o pre that must
vanish.  This module assembles the constraint map between the direct sums
of the Hom groups and returns its kernel with an element <-> family codec.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactalg import (
    FgAbGroup,
    GroupElement,
    GroupHom,
    MembershipError,
    Subgroup,
    direct_sum,
    hom_group,
    hom_preimage,
    induced_hom,
    kernel,
)


@dataclass(frozen=True)
class SummandSpec:
    key: object
    src: FgAbGroup
    tgt: FgAbGroup


@dataclass(frozen=True)
class TermSpec:
    sign: int
    summand_key: object
    pre: GroupHom | None = None
    post: GroupHom | None = None


@dataclass(frozen=True)
class ConstraintSpec:
    key: object
    src: FgAbGroup
    tgt: FgAbGroup
    terms: tuple


class FamilySolution:
    """Kernel of the assembled constraint map, with decode/encode."""

    def __init__(self, summands, constraints):
        self.summands = [s for s in summands if not hom_group(s.src, s.tgt).group.is_trivial]
        self.hom_groups = [hom_group(s.src, s.tgt) for s in self.summands]
        self._pos = {s.key: idx for idx, s in enumerate(self.summands)}
        self.unknowns = direct_sum([hg.group for hg in self.hom_groups])

        kept = []
        for c in constraints:
            if hom_group(c.src, c.tgt).group.is_trivial:
                continue
            terms = tuple(t for t in c.terms if t.summand_key in self._pos)
            kept.append(ConstraintSpec(c.key, c.src, c.tgt, terms))
        self.constraints = kept
        self.targets = [hom_group(c.src, c.tgt) for c in self.constraints]
        self.constraint_sum = direct_sum([hg.group for hg in self.targets])

        total = GroupHom.zero(self.unknowns.group, self.constraint_sum.group)
        for ci, c in enumerate(self.constraints):
            for t in c.terms:
                si = self._pos[t.summand_key]
                ind = induced_hom(self.hom_groups[si], self.targets[ci], t.pre, t.post)
                block = self.constraint_sum.injections[ci] @ ind @ self.unknowns.projections[si]
                total = total + (block if t.sign > 0 else -block)
        self.constraint_hom = total
        self.kernel: Subgroup = kernel(total)

    @property
    def group(self) -> FgAbGroup:
        return self.kernel.group

    def summand_spec(self, key) -> SummandSpec | None:
        idx = self._pos.get(key)
        return None if idx is None else self.summands[idx]

    def decode_unknowns(self, u: GroupElement) -> dict:
        """Family components from an element of the unknown direct sum."""
        out = {}
        for idx, s in enumerate(self.summands):
            coords = self.unknowns.projections[idx](u)
            out[s.key] = self.hom_groups[idx].decode(coords)
        return out

    def decode(self, x: GroupElement) -> dict:
        if x.group != self.group:
            raise MembershipError("element is not in the solution group")
        return self.decode_unknowns(self.kernel.inclusion(x))

    def encode_unknowns(self, components) -> GroupElement:
        u = self.unknowns.group.zero_element()
        for idx, s in enumerate(self.summands):
            comp = components.get(s.key)
            if comp is None:
                continue
            u = u + self.unknowns.injections[idx](self.hom_groups[idx].encode(comp))
        return u

    def encode(self, components) -> GroupElement:
        """Element of the kernel matching the family, or MembershipError."""
        u = self.encode_unknowns(components)
        x = hom_preimage(self.kernel.inclusion, u)
        if x is None:
            raise MembershipError("family does not satisfy the compatibility constraints")
        return x

    def constraint_rhs(self, rhs) -> GroupElement:
        """Element of the constraint sum built from homs indexed by constraint key."""
        w = self.constraint_sum.group.zero_element()
        for ci, c in enumerate(self.constraints):
            h = rhs.get(c.key)
            if h is None:
                continue
            w = w + self.constraint_sum.injections[ci](self.targets[ci].encode(h))
        return w

    def solve_affine(self, rhs):
        """One u in the unknown sum with constraint_hom(u) == rhs, or None."""
        return hom_preimage(self.constraint_hom, self.constraint_rhs(rhs))


def solve_family(summands, constraints) -> FamilySolution:
    return FamilySolution(summands, constraints)
