"""Finite categories with confined maps and a total chosen-pullback table,
plus grade-windowed functors and natural transformations on them.

A Site is schema-checked at construction (names resolve, tables are total
and well-typed); the mathematical invariants -- associativity, closure of
the confined class, universal properties of the chosen squares -- are
checked by validate_site, which reports witnesses instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactalg import FgAbGroup, GroupHom, ZERO_GROUP
from .report import ReportBuilder, ValidationReport


class SiteStructureError(ValueError):
    """Malformed site data: unresolved names, partial or ill-typed tables."""


class CospanMismatchError(ValueError):
    """A pullback was requested for two morphisms with different targets."""


class MissingFinalObjectError(ValueError):
    """An operation needs the final object but the site declares none."""


class NonConfinedError(ValueError):
    """A pushforward was requested along a morphism outside the confined class."""


class PastingError(RuntimeError):
    """No unique comparison mediator exists; the site violates a universal property."""


class MissingMapError(KeyError):
    """A functor has no map stored where one is required."""


@dataclass(frozen=True)
class Mor:
    name: str
    src: str
    tgt: str


@dataclass(frozen=True)
class PullbackSquare:
    """Chosen square over the cospan (f: X->Y, g: Y'->Y).

    apex is X', top is g': X'->X and left is f': X'->Y'.
    """

    f: str
    g: str
    apex: str
    top: str
    left: str


@dataclass(frozen=True)
class PasteComparison:
    """Canonical isomorphism between a pasted pullback and the direct one.

    to_direct : pasted apex -> direct apex, to_pasted its two-sided inverse.
    On poset sites both are identities.
    """

    direct: PullbackSquare
    first: PullbackSquare
    second: PullbackSquare
    to_direct: str
    to_pasted: str

    def is_identity(self, site: "Site") -> bool:
        return site.is_identity(self.to_direct) and site.is_identity(self.to_pasted)


class Site:
    def __init__(
        self,
        objects,
        morphisms,
        identities,
        composition,
        confined,
        pullbacks,
        final_object=None,
    ):
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise SiteStructureError("duplicate object names")
        mors = []
        for m in morphisms:
            if isinstance(m, Mor):
                mors.append(m)
            else:
                name, src, tgt = m
                mors.append(Mor(name, src, tgt))
        self.morphisms = tuple(mors)
        names = [m.name for m in self.morphisms]
        if len(set(names)) != len(names):
            raise SiteStructureError("duplicate morphism names")
        self._mor = {m.name: m for m in self.morphisms}
        self._index = {m.name: i for i, m in enumerate(self.morphisms)}
        objset = set(self.objects)
        for m in self.morphisms:
            if m.src not in objset or m.tgt not in objset:
                raise SiteStructureError(f"morphism {m.name} references unknown object")

        self._identity = dict(identities)
        for x in self.objects:
            i = self._identity.get(x)
            if i is None or i not in self._mor:
                raise SiteStructureError(f"missing identity for object {x}")
            im = self._mor[i]
            if im.src != x or im.tgt != x:
                raise SiteStructureError(f"identity of {x} is not an endomorphism of {x}")

        self._comp = {}
        for (g, f), h in dict(composition).items():
            for n in (g, f, h):
                if n not in self._mor:
                    raise SiteStructureError(f"composition table references unknown morphism {n}")
            if self._mor[f].tgt != self._mor[g].src:
                raise SiteStructureError(f"({g}, {f}) is not a composable pair")
            hm = self._mor[h]
            if hm.src != self._mor[f].src or hm.tgt != self._mor[g].tgt:
                raise SiteStructureError(f"composite of ({g}, {f}) has wrong endpoints")
            self._comp[(g, f)] = h
        for f in self.morphisms:
            for g in self.morphisms:
                if f.tgt == g.src and (g.name, f.name) not in self._comp:
                    raise SiteStructureError(
                        f"composition table is missing ({g.name}, {f.name})"
                    )

        self.confined = frozenset(confined)
        for c in self.confined:
            if c not in self._mor:
                raise SiteStructureError(f"confined class references unknown morphism {c}")

        self._pullbacks = {}
        for (f, g), square in dict(pullbacks).items():
            if isinstance(square, PullbackSquare):
                apex, top, left = square.apex, square.top, square.left
            else:
                apex, top, left = square
            if f not in self._mor or g not in self._mor:
                raise SiteStructureError("pullback table references unknown morphism")
            if self._mor[f].tgt != self._mor[g].tgt:
                raise SiteStructureError(f"({f}, {g}) is not a cospan")
            if apex not in objset:
                raise SiteStructureError(f"pullback apex {apex} is not an object")
            if top not in self._mor or left not in self._mor:
                raise SiteStructureError("pullback legs reference unknown morphisms")
            tm, lm = self._mor[top], self._mor[left]
            if tm.src != apex or tm.tgt != self._mor[f].src:
                raise SiteStructureError(f"top leg of ({f}, {g}) is ill-typed")
            if lm.src != apex or lm.tgt != self._mor[g].src:
                raise SiteStructureError(f"left leg of ({f}, {g}) is ill-typed")
            self._pullbacks[(f, g)] = PullbackSquare(f, g, apex, top, left)
        for f in self.morphisms:
            for g in self.morphisms:
                if f.tgt == g.tgt and (f.name, g.name) not in self._pullbacks:
                    raise SiteStructureError(
                        f"pullback table is missing the cospan ({f.name}, {g.name})"
                    )

        self.final_object = final_object
        if final_object is not None and final_object not in objset:
            raise SiteStructureError(f"final object {final_object} is not an object")

        self._into = {
            x: tuple(m.name for m in self.morphisms if m.tgt == x) for x in self.objects
        }
        self._outof = {
            x: tuple(m.name for m in self.morphisms if m.src == x) for x in self.objects
        }
        self._hom = {}
        for m in self.morphisms:
            self._hom.setdefault((m.src, m.tgt), []).append(m.name)
        self._hom = {k: tuple(v) for k, v in self._hom.items()}

    # -- basic queries ------------------------------------------------------

    def src(self, name: str) -> str:
        return self._mor[name].src

    def tgt(self, name: str) -> str:
        return self._mor[name].tgt

    def has_morphism(self, name: str) -> bool:
        return name in self._mor

    def index(self, name: str) -> int:
        return self._index[name]

    def identity(self, obj: str) -> str:
        return self._identity[obj]

    def is_identity(self, name: str) -> bool:
        return self._identity[self._mor[name].src] == name and self.src(name) == self.tgt(name)

    def compose(self, g: str, f: str) -> str:
        """g after f."""
        if self._mor[f].tgt != self._mor[g].src:
            raise SiteStructureError(f"({g}, {f}) is not composable")
        return self._comp[(g, f)]

    def is_confined(self, name: str) -> bool:
        return name in self.confined

    def morphisms_into(self, obj: str) -> tuple:
        return self._into[obj]

    def morphisms_out_of(self, obj: str) -> tuple:
        return self._outof[obj]

    def hom(self, src: str, tgt: str) -> tuple:
        return self._hom.get((src, tgt), ())

    def composable_pairs(self):
        for f in self.morphisms:
            for gname in self._outof[f.tgt]:
                yield (f.name, gname)

    def composable_triples(self):
        for f, g in self.composable_pairs():
            for hname in self._outof[self.tgt(g)]:
                yield (f, g, hname)

    def chosen_pullback(self, f: str, g: str) -> PullbackSquare:
        if self._mor[f].tgt != self._mor[g].tgt:
            raise CospanMismatchError(f"{f} and {g} do not share a target")
        return self._pullbacks[(f, g)]

    def to_point(self, obj: str) -> str:
        if self.final_object is None:
            raise MissingFinalObjectError("site declares no final object")
        arrows = self.hom(obj, self.final_object)
        if len(arrows) != 1:
            raise SiteStructureError(
                f"object {obj} has {len(arrows)} arrows to the final object"
            )
        return arrows[0]

    def inverse_of(self, f: str) -> str:
        """The unique two-sided inverse of an isomorphism."""
        found = [
            u
            for u in self.hom(self.tgt(f), self.src(f))
            if self.is_identity(self.compose(f, u)) and self.is_identity(self.compose(u, f))
        ]
        if len(found) != 1:
            raise PastingError(f"{f} has {len(found)} two-sided inverses, expected 1")
        return found[0]

    # -- pasting comparisons -------------------------------------------------

    def _mediator(self, apex_from: str, conditions) -> str:
        """The unique u: apex_from -> apex_to with all (leg, required) matching."""
        apex_to = conditions[0][2]
        found = [
            u
            for u in self.hom(apex_from, apex_to)
            if all(self.compose(leg, u) == req for leg, req, _ in conditions)
        ]
        if len(found) != 1:
            raise PastingError(
                f"expected exactly one mediator {apex_from} -> {apex_to}, found {len(found)}"
            )
        return found[0]

    def cospan_paste(self, f: str, g: str, h: str) -> PasteComparison:
        """Compare pulling back f along g then h with pulling back along g o h.

        f: X->Y, g: Y'->Y, h: Y''->Y'.  first = chosen(f, g), second is the
        chosen square of (first.left, h); direct = chosen(f, g o h).
        """
        first = self.chosen_pullback(f, g)
        second = self.chosen_pullback(first.left, h)
        direct = self.chosen_pullback(f, self.compose(g, h))
        pasted_top = self.compose(first.top, second.top)
        to_direct = self._mediator(
            second.apex,
            [(direct.top, pasted_top, direct.apex), (direct.left, second.left, direct.apex)],
        )
        to_pasted = self._mediator(
            direct.apex,
            [(pasted_top, direct.top, second.apex), (second.left, direct.left, second.apex)],
        )
        if not self.is_identity(self.compose(to_direct, to_pasted)) or not self.is_identity(
            self.compose(to_pasted, to_direct)
        ):
            raise PastingError("comparison mediators are not mutually inverse")
        return PasteComparison(direct, first, second, to_direct, to_pasted)

    def tower_paste(self, f: str, g: str, h: str) -> PasteComparison:
        """Compare pulling back g o f along h with stacking the two pullbacks.

        f: X->Y, g: Y->Z, h: Z'->Z.  first = chosen(g, h) with apex Y',
        second = chosen(f, first.top); direct = chosen(g o f, h).
        """
        first = self.chosen_pullback(g, h)
        second = self.chosen_pullback(f, first.top)
        direct = self.chosen_pullback(self.compose(g, f), h)
        pasted_left = self.compose(first.left, second.left)
        to_direct = self._mediator(
            second.apex,
            [(direct.top, second.top, direct.apex), (direct.left, pasted_left, direct.apex)],
        )
        to_pasted = self._mediator(
            direct.apex,
            [(second.top, direct.top, second.apex), (pasted_left, direct.left, second.apex)],
        )
        if not self.is_identity(self.compose(to_direct, to_pasted)) or not self.is_identity(
            self.compose(to_pasted, to_direct)
        ):
            raise PastingError("comparison mediators are not mutually inverse")
        return PasteComparison(direct, first, second, to_direct, to_pasted)


def paste_comparison(site: Site, f: str, g: str, h: str) -> PasteComparison:
    """Canonical comparison between the pullback of a composite cospan and
    the pullback-of-pullback; identity on poset sites."""
    return site.cospan_paste(f, g, h)


def validate_site(site: Site) -> ValidationReport:
    rb = ReportBuilder()

    for x in site.objects:
        idx = site.identity(x)
        for f in site.morphisms_out_of(x):
            if site.compose(f, idx) != f:
                rb.add("identity-neutral", "f o id != f", obj=x, morphism=f)
        for f in site.morphisms_into(x):
            if site.compose(idx, f) != f:
                rb.add("identity-neutral", "id o f != f", obj=x, morphism=f)

    for f, g, h in site.composable_triples():
        left = site.compose(h, site.compose(g, f))
        right = site.compose(site.compose(h, g), f)
        if left != right:
            rb.add("associativity", "composition is not associative", f=f, g=g, h=h)

    for x in site.objects:
        if not site.is_confined(site.identity(x)):
            rb.add("confined-identities", "identity is not confined", obj=x)
    for f, g in site.composable_pairs():
        if site.is_confined(f) and site.is_confined(g):
            if not site.is_confined(site.compose(g, f)):
                rb.add(
                    "confined-composition",
                    "confined class is not closed under composition",
                    f=f,
                    g=g,
                    composite=site.compose(g, f),
                )

    for (f, g), sq in sorted(site._pullbacks.items()):
        if site.compose(f, sq.top) != site.compose(g, sq.left):
            rb.add("square-commutes", "chosen square does not commute", f=f, g=g)
            continue
        if site.is_confined(f) and not site.is_confined(sq.left):
            rb.add(
                "confined-base-change",
                "base change of a confined morphism is not confined",
                f=f,
                g=g,
                pulled=sq.left,
            )
        if site.is_identity(g):
            expected = (site.src(f), site.identity(site.src(f)), f)
            if (sq.apex, sq.top, sq.left) != expected:
                rb.add(
                    "degenerate-square",
                    "chosen pullback along an identity is not the degenerate square",
                    f=f,
                    g=g,
                )
        if site.is_identity(f):
            expected = (site.src(g), g, site.identity(site.src(g)))
            if (sq.apex, sq.top, sq.left) != expected:
                rb.add(
                    "degenerate-square",
                    "chosen pullback of an identity is not the degenerate square",
                    f=f,
                    g=g,
                )
        for w in site.objects:
            for p in site.hom(w, site.src(f)):
                for q in site.hom(w, site.src(g)):
                    if site.compose(f, p) != site.compose(g, q):
                        continue
                    mediators = [
                        u
                        for u in site.hom(w, sq.apex)
                        if site.compose(sq.top, u) == p and site.compose(sq.left, u) == q
                    ]
                    if len(mediators) != 1:
                        rb.add(
                            "universal-property",
                            f"cone has {len(mediators)} mediators, expected 1",
                            f=f,
                            g=g,
                            cone_obj=w,
                            p=p,
                            q=q,
                        )

    if site.final_object is not None:
        for x in site.objects:
            arrows = site.hom(x, site.final_object)
            if len(arrows) != 1:
                rb.add(
                    "final-object",
                    f"object has {len(arrows)} arrows to the final object, expected 1",
                    obj=x,
                )

    return rb.done()


# ---------------------------------------------------------------------------
# graded functors and natural transformations


class GradedFunctor:
    """Grade-windowed functor into f.g. abelian groups.

    variance "contra": every morphism h: X''->X' gets h^*: F^m(X') -> F^m(X'').
    variance "cov": every *confined* f: X->Y gets f_*: F_m(X) -> F_m(Y).
    Groups outside the window are zero; maps involving a zero group default
    to the zero hom and identity morphisms default to the identity hom.
    """

    def __init__(self, site: Site, variance: str, window, groups, maps):
        if variance not in ("contra", "cov"):
            raise ValueError("variance must be 'contra' or 'cov'")
        lo, hi = window
        if lo > hi:
            raise ValueError("empty grade window")
        self.site = site
        self.variance = variance
        self.window = (lo, hi)
        self._groups = {}
        for (obj, m), grp in dict(groups).items():
            if obj not in site.objects:
                raise SiteStructureError(f"functor group at unknown object {obj}")
            if not (lo <= m <= hi):
                raise SiteStructureError(f"functor group at grade {m} outside window")
            self._groups[(obj, m)] = grp
        self._maps = {}
        for (mor, m), hom_ in dict(maps).items():
            if not site.has_morphism(mor):
                raise SiteStructureError(f"functor map along unknown morphism {mor}")
            if not (lo <= m <= hi):
                raise SiteStructureError(f"functor map at grade {m} outside window")
            self._maps[(mor, m)] = hom_

    def grades(self):
        return range(self.window[0], self.window[1] + 1)

    def group(self, obj: str, m: int) -> FgAbGroup:
        if not (self.window[0] <= m <= self.window[1]):
            return ZERO_GROUP
        return self._groups.get((obj, m), ZERO_GROUP)

    def _endpoints(self, mor: str, m: int):
        if self.variance == "contra":
            return self.group(self.site.tgt(mor), m), self.group(self.site.src(mor), m)
        return self.group(self.site.src(mor), m), self.group(self.site.tgt(mor), m)

    def map(self, mor: str, m: int) -> GroupHom:
        if self.variance == "cov" and not self.site.is_confined(mor):
            raise NonConfinedError(
                f"covariant functor has no pushforward along non-confined {mor}"
            )
        src, tgt = self._endpoints(mor, m)
        stored = self._maps.get((mor, m))
        if stored is not None:
            return stored
        if self.site.is_identity(mor):
            return GroupHom.identity(src)
        if src.is_trivial or tgt.is_trivial:
            return GroupHom.zero(src, tgt)
        raise MissingMapError(f"no map stored for ({mor}, grade {m})")

    def validate(self) -> ValidationReport:
        rb = ReportBuilder()
        relevant = [
            m.name
            for m in self.site.morphisms
            if self.variance == "contra" or self.site.is_confined(m.name)
        ]
        for mor in relevant:
            for m in self.grades():
                src, tgt = self._endpoints(mor, m)
                try:
                    h = self.map(mor, m)
                except MissingMapError:
                    rb.add("missing-map", "no map stored", morphism=mor, grade=m)
                    continue
                if h.src != src or h.tgt != tgt:
                    rb.add("map-typing", "map endpoints do not match groups", morphism=mor, grade=m)
                    continue
                if self.site.is_identity(mor) and not h.equals(GroupHom.identity(src)):
                    rb.add("identity-map", "identity morphism maps to non-identity", morphism=mor, grade=m)
        for f, g in self.site.composable_pairs():
            if self.variance == "cov" and not (
                self.site.is_confined(f) and self.site.is_confined(g) and self.site.is_confined(self.site.compose(g, f))
            ):
                continue
            gf = self.site.compose(g, f)
            for m in self.grades():
                try:
                    if self.variance == "contra":
                        lhs = self.map(gf, m)
                        rhs = self.map(f, m) @ self.map(g, m)
                    else:
                        lhs = self.map(gf, m)
                        rhs = self.map(g, m) @ self.map(f, m)
                except MissingMapError:
                    continue  # already reported
                if not lhs.equals(rhs):
                    rb.add("functoriality", "composite map disagrees", f=f, g=g, grade=m)
        return rb.done()


class NaturalTransf:
    """Degree-preserving natural transformation between same-variance functors."""

    def __init__(self, src: GradedFunctor, tgt: GradedFunctor, components):
        if src.site is not tgt.site:
            raise SiteStructureError("functors live on different sites")
        if src.variance != tgt.variance:
            raise SiteStructureError("functors have different variance")
        if src.window != tgt.window:
            raise SiteStructureError("functors have different grade windows")
        self.src = src
        self.tgt = tgt
        self.site = src.site
        self._components = dict(components)

    def component(self, obj: str, m: int) -> GroupHom:
        stored = self._components.get((obj, m))
        if stored is not None:
            return stored
        a, b = self.src.group(obj, m), self.tgt.group(obj, m)
        if a.is_trivial or b.is_trivial:
            return GroupHom.zero(a, b)
        raise MissingMapError(f"no component stored for ({obj}, grade {m})")

    def validate(self) -> ValidationReport:
        rb = ReportBuilder()
        for obj in self.site.objects:
            for m in self.src.grades():
                try:
                    c = self.component(obj, m)
                except MissingMapError:
                    rb.add("missing-component", "no component stored", obj=obj, grade=m)
                    continue
                if c.src != self.src.group(obj, m) or c.tgt != self.tgt.group(obj, m):
                    rb.add("component-typing", "component endpoints mismatch", obj=obj, grade=m)
        relevant = [
            m.name
            for m in self.site.morphisms
            if self.src.variance == "contra" or self.site.is_confined(m.name)
        ]
        for mor in relevant:
            for m in self.src.grades():
                try:
                    if self.src.variance == "contra":
                        lhs = self.component(self.site.src(mor), m) @ self.src.map(mor, m)
                        rhs = self.tgt.map(mor, m) @ self.component(self.site.tgt(mor), m)
                    else:
                        lhs = self.component(self.site.tgt(mor), m) @ self.src.map(mor, m)
                        rhs = self.tgt.map(mor, m) @ self.component(self.site.src(mor), m)
                except MissingMapError:
                    continue
                if not lhs.equals(rhs):
                    rb.add("naturality", "naturality square does not commute", morphism=mor, grade=m)
        return rb.done()


def validate_functor(f: GradedFunctor) -> ValidationReport:
    return f.validate()


def validate_natural(t: NaturalTransf) -> ValidationReport:
    return t.validate()
