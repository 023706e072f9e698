"""Graded modules and presented graded-commutative rings.

Every ring here is a free module over its coefficient ring with a
distinguished homogeneous basis, an implicit unit in degree 0, and
multiplication stored as structure constants.  The constructors build the
cohomology rings of spheres, products, connected sums and wedges of such
manifolds; the comparison layer reduces rings to basis-free pairing
invariants so that two independently produced presentations can be matched
honestly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product

from .coefficients import (
    CoefficientRing,
    ExactMatrix,
    RingMismatchError,
    field_reduce,
    integer_elementary_divisors,
)

__all__ = [
    "GradedModule",
    "BasisElement",
    "PresentedGradedRing",
    "Sphere",
    "Product",
    "ConnSum",
    "dimension",
    "validate_expr",
    "sphere_ring",
    "tensor_ring",
    "connsum_ring",
    "cps_cohomology",
    "gcps_cohomology",
    "dual_basis_functional",
    "DualFunctional",
    "PairingInvariants",
    "pairing_invariants",
    "compare_invariants",
    "Verdict",
    "rename_basis",
    "rescale_basis_element",
]


# ---------------------------------------------------------------------------
# Graded modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedModule:
    """Finitely generated graded module: free ranks plus torsion divisors."""

    ring: CoefficientRing
    free_ranks: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.free_ranks)
        tors = tuple(tuple(t) for t in self.torsion)
        if len(tors) < len(ranks):
            tors = tors + ((),) * (len(ranks) - len(tors))
        if len(tors) > len(ranks):
            raise ValueError("torsion listed beyond max degree")
        if any(r < 0 for r in ranks):
            raise ValueError("negative rank")
        for t in tors:
            if any(d < 2 for d in t):
                raise ValueError("torsion divisors must exceed 1")
            if t and self.ring.is_field:
                raise ValueError("torsion over a field")
        object.__setattr__(self, "free_ranks", ranks)
        object.__setattr__(self, "torsion", tors)

    @property
    def max_degree(self) -> int:
        return len(self.free_ranks) - 1

    def rank(self, k: int) -> int:
        return self.free_ranks[k] if 0 <= k <= self.max_degree else 0

    def torsion_at(self, k: int) -> tuple[int, ...]:
        return self.torsion[k] if 0 <= k <= self.max_degree else ()

    @property
    def total_rank(self) -> int:
        return sum(self.free_ranks)

    @property
    def is_free(self) -> bool:
        return all(not t for t in self.torsion)

    def padded(self, max_degree: int) -> "GradedModule":
        if max_degree < self.max_degree:
            raise ValueError("cannot shrink a module by padding")
        extra = max_degree - self.max_degree
        return GradedModule(
            self.ring, self.free_ranks + (0,) * extra, self.torsion + ((),) * extra
        )

    def direct_sum(self, other: "GradedModule") -> "GradedModule":
        if self.ring != other.ring:
            raise RingMismatchError("direct sum over mixed rings")
        top = max(self.max_degree, other.max_degree)
        a, b = self.padded(top), other.padded(top)
        return GradedModule(
            self.ring,
            tuple(x + y for x, y in zip(a.free_ranks, b.free_ranks)),
            tuple(x + y for x, y in zip(a.torsion, b.torsion)),
        )


# ---------------------------------------------------------------------------
# Ring presentation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisElement:
    """A homogeneous basis class of a presented ring.

    ``provenance`` is a tagged tuple: ("base",), ("inclusion",),
    ("bubbled", record_index, sphere_index) or ("top", record_index).
    """

    id: str
    degree: int
    provenance: tuple = ("base",)
    sphere_representable: bool = False


class PresentedGradedRing:
    """Graded-commutative ring with unit, free basis and structure constants.

    ``products`` maps ordered id pairs to coordinate vectors (id -> scalar);
    absent pairs multiply to zero.  Construction validates graded
    commutativity, degree additivity and associativity exhaustively — basis
    sizes in this package stay small, so the O(basis³) check is cheap
    insurance against sign mistakes.
    """

    def __init__(self, ring, top_degree, basis, products, *, check=True):
        self.ring = ring
        self.top_degree = int(top_degree)
        self.basis = tuple(basis)
        self.by_id = {}
        for e in self.basis:
            if e.degree < 1:
                raise ValueError(f"basis element {e.id} has degree < 1")
            if e.id in self.by_id:
                raise ValueError(f"duplicate basis id {e.id}")
            self.by_id[e.id] = e
        table = {}
        for (ia, ib), vec in products.items():
            clean = {}
            for ic, c in vec.items():
                c = ring.convert(c)
                if c != ring.zero():
                    clean[ic] = c
            if clean:
                table[(ia, ib)] = clean
        self.products = table
        if check:
            self._check()

    # -- queries ----------------------------------------------------------

    def degree_basis(self, k: int) -> list[BasisElement]:
        return [e for e in self.basis if e.degree == k]

    def free_ranks(self) -> tuple[int, ...]:
        ranks = [0] * (self.top_degree + 1)
        ranks[0] = 1
        for e in self.basis:
            if e.degree > self.top_degree:
                raise ValueError("basis above top degree")
            ranks[e.degree] += 1
        return tuple(ranks)

    def module(self) -> GradedModule:
        return GradedModule(self.ring, self.free_ranks())

    def product(self, ida: str, idb: str) -> dict:
        return dict(self.products.get((ida, idb), {}))

    def multiply(self, va: dict, vb: dict) -> dict:
        """Multiply two coordinate vectors (over positive-degree basis)."""
        out: dict = {}
        zero = self.ring.zero()
        for ia, ca in va.items():
            if ca == zero:
                continue
            for ib, cb in vb.items():
                if cb == zero:
                    continue
                for ic, cc in self.products.get((ia, ib), {}).items():
                    out[ic] = out.get(ic, zero) + ca * cb * cc
        return {k: self.ring.convert(v) for k, v in out.items() if v != zero}

    # -- validation --------------------------------------------------------

    def _check(self):
        for (ia, ib), vec in self.products.items():
            a, b = self.by_id.get(ia), self.by_id.get(ib)
            if a is None or b is None:
                raise ValueError(f"product table references unknown id in ({ia},{ib})")
            total = a.degree + b.degree
            if total > self.top_degree:
                raise ValueError(f"nonzero product {ia}·{ib} above top degree")
            for ic in vec:
                c = self.by_id.get(ic)
                if c is None:
                    raise ValueError(f"product {ia}·{ib} hits unknown id {ic}")
                if c.degree != total:
                    raise ValueError(f"product {ia}·{ib} violates degree additivity")
        for a in self.basis:
            for b in self.basis:
                ab = self.products.get((a.id, b.id), {})
                ba = self.products.get((b.id, a.id), {})
                sign = -1 if (a.degree % 2 and b.degree % 2) else 1
                flipped = {k: self.ring.convert(sign * v) for k, v in ba.items()}
                if ab != flipped:
                    raise ValueError(
                        f"graded commutativity fails on ({a.id},{b.id})"
                    )
        for a in self.basis:
            va = {a.id: self.ring.one()}
            for b in self.basis:
                vb = {b.id: self.ring.one()}
                ab = self.multiply(va, vb)
                for c in self.basis:
                    vc = {c.id: self.ring.one()}
                    left = self.multiply(ab, vc)
                    right = self.multiply(va, self.multiply(vb, vc))
                    if left != right:
                        raise ValueError(
                            f"associativity fails on ({a.id},{b.id},{c.id})"
                        )

    def __repr__(self):
        return (
            f"PresentedGradedRing({self.ring.label}, top={self.top_degree}, "
            f"basis={len(self.basis)})"
        )


def rename_basis(A: PresentedGradedRing, mapping: dict[str, str]) -> PresentedGradedRing:
    """Rename basis ids; ids absent from the mapping are kept."""

    def m(i):
        return mapping.get(i, i)

    basis = [
        BasisElement(m(e.id), e.degree, e.provenance, e.sphere_representable)
        for e in A.basis
    ]
    products = {
        (m(ia), m(ib)): {m(ic): c for ic, c in vec.items()}
        for (ia, ib), vec in A.products.items()
    }
    return PresentedGradedRing(A.ring, A.top_degree, basis, products, check=False)


def rescale_basis_element(A: PresentedGradedRing, ident: str, unit) -> PresentedGradedRing:
    """Replace basis element e by unit·e (unit invertible; ±1 over Z)."""
    ring = A.ring
    unit = ring.convert(unit)
    if ring.kind == "Z":
        if unit not in (1, -1):
            raise ValueError("units of Z are ±1")
        inv = unit
    else:
        inv = ring.invert(unit)
    products = {}
    for (ia, ib), vec in A.products.items():
        scale = ring.one()
        if ia == ident:
            scale *= unit
        if ib == ident:
            scale *= unit
        products[(ia, ib)] = {
            ic: c * scale * (inv if ic == ident else ring.one())
            for ic, c in vec.items()
        }
    return PresentedGradedRing(A.ring, A.top_degree, A.basis, products, check=False)


# ---------------------------------------------------------------------------
# Manifold expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sphere:
    k: int


@dataclass(frozen=True)
class Product:
    left: "ManifoldExpr"
    right: "ManifoldExpr"


@dataclass(frozen=True)
class ConnSum:
    left: "ManifoldExpr"
    right: "ManifoldExpr"


ManifoldExpr = Sphere | Product | ConnSum


def dimension(e: ManifoldExpr) -> int:
    if isinstance(e, Sphere):
        return e.k
    if isinstance(e, Product):
        return dimension(e.left) + dimension(e.right)
    if isinstance(e, ConnSum):
        return dimension(e.left)
    raise TypeError(f"not a manifold expression: {e!r}")


def validate_expr(e: ManifoldExpr) -> None:
    if isinstance(e, Sphere):
        if e.k < 1:
            raise ValueError(f"sphere dimension must be >= 1, got {e.k}")
        return
    if isinstance(e, Product):
        validate_expr(e.left)
        validate_expr(e.right)
        return
    if isinstance(e, ConnSum):
        validate_expr(e.left)
        validate_expr(e.right)
        if dimension(e.left) != dimension(e.right):
            raise ValueError(
                "connected-sum factors must share a dimension "
                f"({dimension(e.left)} vs {dimension(e.right)})"
            )
        return
    raise TypeError(f"not a manifold expression: {e!r}")


# ---------------------------------------------------------------------------
# Ring constructors
# ---------------------------------------------------------------------------


def _fresh_ids(n: int) -> list[str]:
    return [f"e{i + 1}" for i in range(n)]


def sphere_ring(k: int, R: CoefficientRing) -> PresentedGradedRing:
    """Cohomology ring of the k-sphere: one generator squaring to zero."""
    if k < 1:
        raise ValueError("sphere_ring needs k >= 1; the 0-sphere ring is not free rank-1 in top degree")
    gen = BasisElement("e1", k, ("base",), True)
    return PresentedGradedRing(R, k, (gen,), {})


def tensor_ring(A: PresentedGradedRing, B: PresentedGradedRing) -> PresentedGradedRing:
    """Graded tensor product with the Koszul sign (-1)^{deg b1 · deg a2}.

    Basis order: A's classes paired with the unit, then the unit paired
    with B's classes, then the mixed pairs; this keeps sphere-leaf classes
    in left-to-right leaf order for the layers above.
    """
    if A.ring != B.ring:
        raise RingMismatchError("tensor factors over different rings")
    ring = A.ring
    pairs: list[tuple] = [(a, None) for a in A.basis]
    pairs += [(None, b) for b in B.basis]
    pairs += [(a, b) for a in A.basis for b in B.basis]
    ids = _fresh_ids(len(pairs))
    index = {}
    basis = []
    for ident, (a, b) in zip(ids, pairs):
        degree = (a.degree if a else 0) + (b.degree if b else 0)
        representable = (b is None and a.sphere_representable) or (
            a is None and b.sphere_representable
        )
        basis.append(BasisElement(ident, degree, ("base",), representable))
        index[(a.id if a else None, b.id if b else None)] = ident

    def half_product(src: PresentedGradedRing, x, y) -> dict:
        """Component product in one factor; key None stands for the unit."""
        if x is None and y is None:
            return {None: ring.one()}
        if x is None:
            return {y.id: ring.one()}
        if y is None:
            return {x.id: ring.one()}
        return src.products.get((x.id, y.id), {})

    products = {}
    for (a1, b1), (a2, b2) in iter_product(pairs, pairs):
        sign = -1 if ((b1.degree if b1 else 0) % 2 and (a2.degree if a2 else 0) % 2) else 1
        out = {}
        for ka, ca in half_product(A, a1, a2).items():
            for kb, cb in half_product(B, b1, b2).items():
                coeff = ring.convert(sign) * ca * cb
                key = index[(ka, kb)]
                out[key] = out.get(key, ring.zero()) + coeff
        out = {k: v for k, v in out.items() if v != ring.zero()}
        if out:
            ia = index[(a1.id if a1 else None, b1.id if b1 else None)]
            ib = index[(a2.id if a2 else None, b2.id if b2 else None)]
            products[(ia, ib)] = out
    return PresentedGradedRing(ring, A.top_degree + B.top_degree, basis, products)


def connsum_ring(A1: PresentedGradedRing, A2: PresentedGradedRing) -> PresentedGradedRing:
    """Connected-sum ring: middle degrees add, top degrees are identified.

    The top-degree quotient follows the literal rule that the pair
    (a1, a2) of top generators becomes zero, so A2's top generator maps to
    MINUS the surviving class.  The conventional oriented identification
    differs by one basis sign, which no pairing invariant can see.
    """
    if A1.ring != A2.ring:
        raise RingMismatchError("connected-sum factors over different rings")
    ring = A1.ring
    d = A1.top_degree
    if d != A2.top_degree or d < 1:
        raise ValueError(
            f"connected sum needs equal positive top degrees, got {A1.top_degree} and {A2.top_degree}"
        )
    tops1 = A1.degree_basis(d)
    tops2 = A2.degree_basis(d)
    if len(tops1) != 1 or len(tops2) != 1:
        raise ValueError("connected sum needs rank-1 free top pieces")
    top1, top2 = tops1[0].id, tops2[0].id

    sides = (("l", A1, top1, 1), ("r", A2, top2, -1))
    middle = [
        (side, e) for side, src, _, _ in sides for e in src.basis if e.degree < d
    ]
    ids = _fresh_ids(len(middle) + 1)
    top_id = ids[-1]
    index = {}
    basis = []
    for ident, (side, e) in zip(ids, middle):
        basis.append(BasisElement(ident, e.degree, ("base",), e.sphere_representable))
        index[(side, e.id)] = ident
    basis.append(BasisElement(top_id, d, ("base",), False))

    products = {}
    for side, src, top_old, orient in sides:
        for (ia, ib), vec in src.products.items():
            ea, eb = src.by_id[ia], src.by_id[ib]
            if ea.degree >= d or eb.degree >= d:
                continue
            out = {}
            for ic, c in vec.items():
                if ic == top_old:
                    out[top_id] = out.get(top_id, ring.zero()) + ring.convert(orient) * c
                else:
                    out[index[(side, ic)]] = c
            out = {k: v for k, v in out.items() if v != ring.zero()}
            if out:
                products[(index[(side, ia)], index[(side, ib)])] = out
    return PresentedGradedRing(ring, d, basis, products)


def cps_cohomology(e: ManifoldExpr, R: CoefficientRing) -> PresentedGradedRing:
    """Cohomology ring of a sphere/product/connected-sum expression."""
    validate_expr(e)
    return _cps(e, R)


def _cps(e: ManifoldExpr, R: CoefficientRing) -> PresentedGradedRing:
    if isinstance(e, Sphere):
        return sphere_ring(e.k, R)
    if isinstance(e, Product):
        return tensor_ring(_cps(e.left, R), _cps(e.right, R))
    return connsum_ring(_cps(e.left, R), _cps(e.right, R))


def gcps_cohomology(summands, R: CoefficientRing) -> PresentedGradedRing:
    """Cohomology ring of a wedge of expression manifolds.

    Positive degrees are the direct sum of the summands' positive parts;
    products across different wedge summands vanish.  The empty wedge is
    the one-point space: the unit-only ring.
    """
    rings = [cps_cohomology(e, R) for e in summands]
    top = max((r.top_degree for r in rings), default=0)
    total = sum(len(r.basis) for r in rings)
    ids = iter(_fresh_ids(total))
    basis = []
    index = {}
    for i, src in enumerate(rings):
        for e in src.basis:
            ident = next(ids)
            basis.append(BasisElement(ident, e.degree, ("base",), e.sphere_representable))
            index[(i, e.id)] = ident
    products = {}
    for i, src in enumerate(rings):
        for (ia, ib), vec in src.products.items():
            products[(index[(i, ia)], index[(i, ib)])] = {
                index[(i, ic)]: c for ic, c in vec.items()
            }
    return PresentedGradedRing(R, top, basis, products)


# ---------------------------------------------------------------------------
# Duals, invariants, comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualFunctional:
    """Coordinate functional of a distinguished free basis element."""

    basis_id: str
    degree: int

    def apply(self, coords: dict):
        return coords.get(self.basis_id, 0)


def dual_basis_functional(M: GradedModule, a: BasisElement) -> DualFunctional:
    """The functional a* with a*(a) = 1 and a* = 0 on the other basis classes."""
    if M.torsion_at(a.degree):
        raise ValueError(
            f"degree {a.degree} carries torsion; no distinguished complement for {a.id}"
        )
    if M.rank(a.degree) < 1:
        raise ValueError(f"degree {a.degree} has no free part")
    return DualFunctional(a.id, a.degree)


@dataclass(frozen=True)
class PairingInvariants:
    """Basis-free invariants of the multiplication H^p x H^q -> H^{p+q}.

    ``map_*`` describes the flattened multiplication map (columns = basis
    pairs); ``form_*`` describes its adjoint H^p -> Hom(H^q, H^{p+q}).
    Both are invariant under basis changes in all three degrees; carrying
    both lets comparisons catch strictly more than either alone.
    """

    p: int
    q: int
    ring_label: str
    map_rank: int
    form_rank: int
    map_divisors: tuple[int, ...] | None = None
    form_divisors: tuple[int, ...] | None = None


def _invariants_of_matrix(ring: CoefficientRing, rows: list[list], cols: int):
    if not rows or cols == 0:
        return 0, (() if ring.kind == "Z" else None)
    if ring.kind == "Z":
        divisors = integer_elementary_divisors(rows, cols)
        return len(divisors), divisors
    red = field_reduce(ExactMatrix(ring, rows, cols))
    return red.rank, None


def pairing_invariants(A: PresentedGradedRing, p: int, q: int) -> PairingInvariants:
    if p < 1 or q < 1 or p + q > A.top_degree:
        raise ValueError(f"degree pair ({p},{q}) out of range for top {A.top_degree}")
    P = A.degree_basis(p)
    Q = A.degree_basis(q)
    T = A.degree_basis(p + q)
    tindex = {e.id: i for i, e in enumerate(T)}
    zero = A.ring.zero()

    map_rows = [[zero] * (len(P) * len(Q)) for _ in T]
    form_rows = [[zero] * len(P) for _ in range(len(Q) * len(T))]
    for i, a in enumerate(P):
        for j, b in enumerate(Q):
            for ic, c in A.products.get((a.id, b.id), {}).items():
                t = tindex[ic]
                map_rows[t][i * len(Q) + j] = c
                form_rows[j * len(T) + t][i] = c

    map_rank, map_div = _invariants_of_matrix(A.ring, map_rows, len(P) * len(Q))
    form_rank, form_div = _invariants_of_matrix(A.ring, form_rows, len(P))
    return PairingInvariants(
        p, q, A.ring.label, map_rank, form_rank, map_div, form_div
    )


@dataclass(frozen=True)
class Verdict:
    """Comparison outcome: ``distinguished`` is sound (rings differ);
    ``consistent`` is deliberately not a proof of isomorphism."""

    kind: str  # "consistent" | "distinguished"
    witness: str | None = None

    @property
    def is_consistent(self) -> bool:
        return self.kind == "consistent"


def compare_invariants(A: PresentedGradedRing, B: PresentedGradedRing) -> Verdict:
    if A.ring != B.ring:
        raise RingMismatchError("comparing rings over different coefficients")
    if A.top_degree != B.top_degree:
        return Verdict(
            "distinguished",
            f"top degree {A.top_degree} vs {B.top_degree}",
        )
    ra, rb = A.free_ranks(), B.free_ranks()
    if ra != rb:
        k = next(i for i, (x, y) in enumerate(zip(ra, rb)) if x != y)
        return Verdict("distinguished", f"degree {k} rank {ra[k]} vs {rb[k]}")
    for p in range(1, A.top_degree):
        for q in range(1, A.top_degree - p + 1):
            ia, ib = pairing_invariants(A, p, q), pairing_invariants(B, p, q)
            if ia != ib:
                return Verdict(
                    "distinguished",
                    f"pairing ({p},{q}): {_show_pairing(ia)} vs {_show_pairing(ib)}",
                )
    return Verdict("consistent")


def _show_pairing(inv: PairingInvariants) -> str:
    if inv.map_divisors is not None:
        return f"divisors {list(inv.map_divisors)}/form {list(inv.form_divisors)}"
    return f"rank {inv.map_rank}/form rank {inv.form_rank}"
