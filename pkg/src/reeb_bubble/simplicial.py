"""Explicit simplicial complexes, chain complexes, homology and cup products.

Everything here is exact: boundary matrices over the integers, homology by
elementary divisors, cohomology rings by the Alexander-Whitney front/back
rule on ordered simplices.  Complexes are immutable; vertex labels are
arbitrary hashable values carrying an explicit total order, so derived
complexes (products, cylinders, gluings) can use structured labels without
relying on Python's comparison operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .coefficients import (
    CoefficientRing,
    ExactMatrix,
    field_reduce,
    integer_elementary_divisors,
    integer_kernel_basis,
    smith_normal_form,
    solve_in_span,
    sparse_column_reduction,
)
from .graded import BasisElement, GradedModule, PresentedGradedRing

__all__ = [
    "SimplicialComplex",
    "SimplicialMap",
    "ChainComplexZ",
    "chain_complex_of",
    "homology_of_chain_complex",
    "homology_of_complex",
    "euler_characteristic",
    "sphere_complex",
    "full_simplex",
    "polygon_complex",
    "product_complex",
    "wedge_complexes",
    "wedge_complex",
    "connected_sum_with_maps",
    "connected_sum_complex",
    "cone_complex",
    "suspension_complex",
    "suspend_map",
    "mapping_cylinder",
    "glue_along",
    "top_cycle",
    "measured_degree",
    "degree_map",
    "WedgeMap",
    "sphere_to_wedge_map",
    "induced_homology_rank",
    "cup_ring_of_complex",
]


# ---------------------------------------------------------------------------
# complexes and maps
# ---------------------------------------------------------------------------


class SimplicialComplex:
    """Downward-closed family of simplices over a totally ordered vertex set.

    Simplices are stored as tuples sorted by vertex rank, never by the
    labels' own comparison.
    """

    __slots__ = ("vertices", "rank", "simplices", "_by_dim", "_index", "_chain")

    def __init__(self, vertices, simplices, *, check=True):
        self.vertices = tuple(vertices)
        self.rank = {v: i for i, v in enumerate(self.vertices)}
        if len(self.rank) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        self.simplices = frozenset(tuple(s) for s in simplices)
        self._by_dim = None
        self._index = None
        self._chain = None
        if check:
            self._validate()

    def _validate(self):
        for s in self.simplices:
            if not s:
                raise ValueError("empty simplex")
            ranks = [self.rank.get(v) for v in s]
            if None in ranks:
                raise ValueError(f"simplex {s} uses unknown vertex")
            if any(a >= b for a, b in zip(ranks, ranks[1:])):
                raise ValueError(f"simplex {s} not sorted by vertex order")
            for face in combinations(s, len(s) - 1):
                if face and face not in self.simplices:
                    raise ValueError(f"missing face {face} of {s}")
        for v in self.vertices:
            if (v,) not in self.simplices:
                raise ValueError(f"vertex {v} missing as a 0-simplex")

    @classmethod
    def from_facets(cls, vertices, facets):
        """Build the downward closure of the given facets."""
        vertices = tuple(vertices)
        rank = {v: i for i, v in enumerate(vertices)}
        simplices = set((v,) for v in vertices)
        for f in facets:
            f = tuple(sorted(f, key=rank.__getitem__))
            for size in range(1, len(f) + 1):
                simplices.update(combinations(f, size))
        return cls(vertices, simplices, check=False)

    # -- queries -----------------------------------------------------------

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def simplices_of_dim(self, k: int) -> list[tuple]:
        if self._by_dim is None:
            by_dim = {}
            for s in self.simplices:
                by_dim.setdefault(len(s) - 1, []).append(s)
            for group in by_dim.values():
                group.sort(key=lambda s: tuple(self.rank[v] for v in s))
            self._by_dim = by_dim
        return self._by_dim.get(k, [])

    def index_of(self, k: int):
        if self._index is None:
            self._index = {}
        if k not in self._index:
            self._index[k] = {s: i for i, s in enumerate(self.simplices_of_dim(k))}
        return self._index[k]

    def sort_simplex(self, vs) -> tuple:
        return tuple(sorted(vs, key=self.rank.__getitem__))

    def has(self, vs) -> bool:
        return self.sort_simplex(vs) in self.simplices

    def relabeled(self, mapping) -> "SimplicialComplex":
        if len(set(mapping[v] for v in self.vertices)) != len(self.vertices):
            raise ValueError("relabeling must be injective")
        vertices = tuple(mapping[v] for v in self.vertices)
        simplices = {tuple(mapping[v] for v in s) for s in self.simplices}
        return SimplicialComplex(vertices, simplices, check=False)

    def restrict_full(self, vertex_subset) -> "SimplicialComplex":
        keep = set(vertex_subset)
        vertices = tuple(v for v in self.vertices if v in keep)
        simplices = {s for s in self.simplices if all(v in keep for v in s)}
        return SimplicialComplex(vertices, simplices, check=False)

    def counts(self) -> tuple[int, ...]:
        return tuple(len(self.simplices_of_dim(k)) for k in range(self.dim + 1))

    def dump(self) -> str:
        lines = []
        for k in range(self.dim + 1):
            for s in self.simplices_of_dim(k):
                lines.append(" ".join(str(v) for v in s))
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"SimplicialComplex(dim={self.dim}, counts={self.counts()})"


@dataclass(frozen=True)
class SimplicialMap:
    domain: SimplicialComplex
    codomain: SimplicialComplex
    vertex_map: dict

    def __post_init__(self):
        for v in self.domain.vertices:
            if v not in self.vertex_map:
                raise ValueError(f"vertex {v} has no image")
        for s in self.domain.simplices:
            image = set(self.vertex_map[v] for v in s)
            if not self.codomain.has(image):
                raise ValueError(f"image of {s} spans no simplex")

    def image_simplex(self, s) -> tuple:
        return self.codomain.sort_simplex(set(self.vertex_map[v] for v in s))

    def chain_image(self, chain: dict) -> dict:
        """Push a chain forward; degenerate simplices die, reorderings sign."""
        out = {}
        rank = self.codomain.rank
        for s, c in chain.items():
            image = [self.vertex_map[v] for v in s]
            if len(set(image)) != len(image):
                continue
            ranks = [rank[w] for w in image]
            inversions = sum(
                1
                for i in range(len(ranks))
                for j in range(i + 1, len(ranks))
                if ranks[i] > ranks[j]
            )
            t = tuple(sorted(image, key=rank.__getitem__))
            sign = -1 if inversions % 2 else 1
            out[t] = out.get(t, 0) + sign * c
        return {k: v for k, v in out.items() if v}


def compose_maps(g: SimplicialMap, f: SimplicialMap) -> SimplicialMap:
    if f.codomain is not g.domain and f.codomain.simplices != g.domain.simplices:
        raise ValueError("maps do not compose")
    return SimplicialMap(
        f.domain, g.codomain, {v: g.vertex_map[f.vertex_map[v]] for v in f.domain.vertices}
    )


# ---------------------------------------------------------------------------
# chain complexes
# ---------------------------------------------------------------------------


class ChainComplexZ:
    """Integer chain complex: ordered bases and boundary matrices.

    ``boundaries[k]`` maps degree-k chains into degree k-1: rows are indexed
    by bases[k-1], columns by bases[k].  Composition of consecutive
    boundaries is checked to vanish exactly.
    """

    __slots__ = ("bases", "boundaries", "_divisors", "_splittings")

    def __init__(self, bases, boundaries, *, check=True):
        self.bases = [list(b) for b in bases]
        self.boundaries = [[list(row) for row in m] for m in boundaries]
        self._divisors = {}
        self._splittings = {}
        if len(self.boundaries) != len(self.bases):
            raise ValueError("need one boundary matrix per degree")
        for k, m in enumerate(self.boundaries):
            want_rows = len(self.bases[k - 1]) if k > 0 else 0
            if len(m) != want_rows:
                raise ValueError(f"boundary {k} has {len(m)} rows, want {want_rows}")
            for row in m:
                if len(row) != len(self.bases[k]):
                    raise ValueError(f"boundary {k} has a row of wrong length")
        if check:
            self._check_dd()

    def _check_dd(self):
        for k in range(1, len(self.boundaries) - 1):
            a, b = self.boundaries[k], self.boundaries[k + 1]
            if not a or not b or not b[0]:
                continue
            cols_b = len(b[0])
            for j in range(cols_b):
                col = [b[i][j] for i in range(len(b))]
                for r in range(len(a)):
                    total = sum(a[r][i] * col[i] for i in range(len(col)) if col[i])
                    if total != 0:
                        raise ValueError(f"boundary squared nonzero at degree {k + 1}")

    @property
    def max_degree(self) -> int:
        return len(self.bases) - 1

    def dim_at(self, k: int) -> int:
        return len(self.bases[k]) if 0 <= k <= self.max_degree else 0

    def boundary_divisors(self, k: int) -> tuple[int, ...]:
        """Elementary divisors of the k-th boundary matrix, cached."""
        if k not in self._divisors:
            if k <= 0 or k > self.max_degree or not self.dim_at(k) or not self.dim_at(k - 1):
                self._divisors[k] = ()
            else:
                self._divisors[k] = integer_elementary_divisors(
                    self.boundaries[k], self.dim_at(k)
                )
        return self._divisors[k]


def chain_complex_of(K: SimplicialComplex) -> ChainComplexZ:
    if K._chain is not None:
        return K._chain
    top = K.dim
    bases = [K.simplices_of_dim(k) for k in range(top + 1)]
    boundaries = [[]]
    for k in range(1, top + 1):
        index = K.index_of(k - 1)
        rows = [[0] * len(bases[k]) for _ in bases[k - 1]]
        for j, s in enumerate(bases[k]):
            for i in range(len(s)):
                face = s[:i] + s[i + 1 :]
                rows[index[face]][j] += -1 if i % 2 else 1
        boundaries.append(rows)
    cx = ChainComplexZ(bases, boundaries, check=False)
    K._chain = cx
    return cx


def _rank_over(ring: CoefficientRing, divisors: tuple[int, ...]) -> int:
    if ring.kind == "Zp":
        return sum(1 for d in divisors if d % ring.p)
    return len(divisors)


def homology_of_chain_complex(cx: ChainComplexZ, R: CoefficientRing) -> GradedModule:
    top = cx.max_degree
    ranks = []
    torsion = []
    for k in range(top + 1):
        rk = _rank_over(R, cx.boundary_divisors(k))
        rk1 = _rank_over(R, cx.boundary_divisors(k + 1)) if k < top else 0
        ranks.append(cx.dim_at(k) - rk - rk1)
        if R.kind == "Z" and k < top:
            torsion.append(tuple(d for d in cx.boundary_divisors(k + 1) if d > 1))
        else:
            torsion.append(())
    return GradedModule(R, tuple(ranks), tuple(torsion))


def homology_of_complex(K: SimplicialComplex, R: CoefficientRing) -> GradedModule:
    return homology_of_chain_complex(chain_complex_of(K), R)


def euler_characteristic(K: SimplicialComplex) -> int:
    return sum((-1) ** k * c for k, c in enumerate(K.counts()))


# ---------------------------------------------------------------------------
# basic constructors
# ---------------------------------------------------------------------------


def full_simplex(k: int) -> SimplicialComplex:
    if k < 0:
        raise ValueError("dimension must be >= 0")
    vs = tuple(range(k + 1))
    return SimplicialComplex.from_facets(vs, [vs])


def sphere_complex(k: int) -> SimplicialComplex:
    """Boundary of the (k+1)-simplex: the minimal k-sphere."""
    if k < 0:
        raise ValueError("dimension must be >= 0")
    vs = tuple(range(k + 2))
    return SimplicialComplex.from_facets(vs, combinations(vs, k + 1))


def polygon_complex(m: int) -> SimplicialComplex:
    """Cycle with m vertices; a subdivided circle."""
    if m < 3:
        raise ValueError("polygon needs at least 3 vertices")
    vs = tuple(range(m))
    return SimplicialComplex.from_facets(vs, [(i, (i + 1) % m) for i in range(m)])


def product_complex(K: SimplicialComplex, L: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of |K| x |L|.

    Vertices are (k-vertex, l-vertex) pairs ordered lexicographically by
    rank; facets are the monotone staircase chains through products of
    maximal simplices.
    """
    vertices = tuple((u, v) for u in K.vertices for v in L.vertices)
    k_max = _maximal_simplices(K)
    l_max = _maximal_simplices(L)
    facets = []
    for s in k_max:
        for t in l_max:
            p, q = len(s) - 1, len(t) - 1
            for positions in combinations(range(p + q), p):
                i = j = 0
                chain = [(s[0], t[0])]
                for step in range(p + q):
                    if step in positions:
                        i += 1
                    else:
                        j += 1
                    chain.append((s[i], t[j]))
                facets.append(tuple(chain))
    return SimplicialComplex.from_facets(vertices, facets)


def _maximal_simplices(K: SimplicialComplex) -> list[tuple]:
    out = []
    for s in sorted(K.simplices, key=len, reverse=True):
        if not any(set(s) < set(t) for t in out):
            out.append(s)
    return out


def wedge_complexes(complexes, basepoints=None):
    """Wedge at one chosen vertex per summand.

    Returns (wedge, inclusion vertex maps).  The shared vertex is labeled
    ("w",) and comes first in the order; empty input gives a single point.
    """
    complexes = list(complexes)
    if basepoints is None:
        basepoints = [K.vertices[0] for K in complexes]
    w = ("w",)
    vertices = [w]
    maps = []
    for i, (K, bp) in enumerate(zip(complexes, basepoints)):
        if bp not in K.rank:
            raise ValueError(f"basepoint {bp} not a vertex of summand {i}")
        vmap = {v: (w if v == bp else ("s", i, v)) for v in K.vertices}
        maps.append(vmap)
        vertices.extend(vmap[v] for v in K.vertices if v != bp)
    rank = {v: i for i, v in enumerate(vertices)}
    simplices = {(w,)}
    for K, vmap in zip(complexes, maps):
        for s in K.simplices:
            simplices.add(tuple(sorted((vmap[v] for v in s), key=rank.__getitem__)))
    W = SimplicialComplex(tuple(vertices), simplices, check=False)
    return W, maps


def wedge_complex(complexes) -> SimplicialComplex:
    return wedge_complexes(complexes)[0]


def cone_complex(K: SimplicialComplex, apex=("cone",)):
    """Cone with the apex last in the vertex order."""
    if apex in K.rank:
        raise ValueError("apex label already used")
    vertices = K.vertices + (apex,)
    simplices = set(K.simplices) | {(apex,)}
    for s in K.simplices:
        simplices.add(s + (apex,))
    return SimplicialComplex(vertices, simplices, check=False)


def suspension_complex(K: SimplicialComplex, poles=(("pole", 0), ("pole", 1))):
    a, b = poles
    if a in K.rank or b in K.rank or a == b:
        raise ValueError("pole labels must be fresh and distinct")
    vertices = K.vertices + (a, b)
    simplices = set(K.simplices) | {(a,), (b,)}
    for s in K.simplices:
        simplices.add(s + (a,))
        simplices.add(s + (b,))
    return SimplicialComplex(vertices, simplices, check=False)


def suspend_map(f: SimplicialMap, tag) -> SimplicialMap:
    """Suspend a map, poles to poles; ``tag`` keeps pole labels distinct."""
    pa, pb = ("pole", tag, 0), ("pole", tag, 1)
    dom = suspension_complex(f.domain, (pa, pb))
    cod = suspension_complex(f.codomain, (pa, pb))
    vmap = dict(f.vertex_map)
    vmap[pa] = pa
    vmap[pb] = pb
    return SimplicialMap(dom, cod, vmap)


def suspend_chain(chain: dict, poles=(("pole", 0), ("pole", 1))) -> dict:
    """Fundamental cycle of the suspension from a cycle: z*a - z*b."""
    a, b = poles
    out = {}
    for s, c in chain.items():
        out[s + (a,)] = c
        out[s + (b,)] = -c
    return out


# ---------------------------------------------------------------------------
# surgery constructors
# ---------------------------------------------------------------------------


def connected_sum_with_maps(
    K: SimplicialComplex,
    L: SimplicialComplex,
    dim: int,
    avoid_K=(),
    avoid_L=(),
    join_K=None,
    join_L=None,
):
    """Connected sum: drop one facet from each, identify the boundary spheres.

    Facets are chosen away from the ``avoid`` vertex sets so distinguished
    subcomplexes (sections, basepoints) survive.  Returns the sum plus the
    two vertex inclusion maps.  Any order-respecting identification of the
    boundary spheres is accepted: for the closed manifolds this package
    builds, both gluing orientations give the same homology and pairing
    invariants.

    When ``join_K`` and ``join_L`` are given, the removed facets are chosen
    through those vertices and the identification matches them, so the two
    named vertices become one vertex of the sum (labelled ``join_K``).
    """
    avoid_K, avoid_L = set(avoid_K), set(avoid_L)
    if (join_K is None) != (join_L is None):
        raise ValueError("join vertices must be supplied for both sides or neither")
    sigma = _pick_facet(K, dim, avoid_K, must=join_K)
    tau = _pick_facet(L, dim, avoid_L, must=join_L)
    if join_K is None:
        ident = dict(zip(tau, sigma))
    else:
        rest_t = [v for v in tau if v != join_L]
        rest_s = [v for v in sigma if v != join_K]
        ident = {join_L: join_K}
        ident.update(zip(rest_t, rest_s))
    kverts = set(K.vertices)
    map_L = {}
    for v in L.vertices:
        if v in ident:
            map_L[v] = ident[v]
        else:
            lab = ("s", v)
            while lab in kverts:
                lab = ("s", lab)
            kverts.add(lab)
            map_L[v] = lab
    map_K = {v: v for v in K.vertices}
    vertices = list(K.vertices) + [map_L[v] for v in L.vertices if v not in ident]
    rank = {v: i for i, v in enumerate(vertices)}
    simplices = set(K.simplices) - {sigma}
    for s in L.simplices:
        if s == tau:
            continue
        simplices.add(tuple(sorted((map_L[v] for v in s), key=rank.__getitem__)))
    G = SimplicialComplex(tuple(vertices), simplices, check=False)
    want = euler_characteristic(K) + euler_characteristic(L) - (1 + (-1) ** dim)
    got = euler_characteristic(G)
    if got != want:
        raise RuntimeError(f"connected sum Euler characteristic {got}, expected {want}")
    return G, map_K, map_L


def _pick_facet(K: SimplicialComplex, dim: int, avoid: set, must=None) -> tuple:
    for s in K.simplices_of_dim(dim):
        if must is not None and must not in s:
            continue
        if not avoid.intersection(s):
            return s
    where = " through the join vertex" if must is not None else ""
    raise ValueError(f"no dimension-{dim} facet{where} clear of the avoid set")


def connected_sum_complex(K, L, dim) -> SimplicialComplex:
    return connected_sum_with_maps(K, L, dim)[0]


def mapping_cylinder(f: SimplicialMap):
    """Ordered mapping cylinder of a simplicial map.

    Domain vertices precede codomain vertices; for each domain simplex
    v0..vk the prisms are the sets {v0..vi} u f({vi..vk}).  The result
    contains disjoint full copies of domain and codomain and deformation
    retracts to the codomain; the retraction is verified by comparing
    integral homology on every call.
    """
    K, L = f.domain, f.codomain
    dlab = {v: ("d", v) for v in K.vertices}
    clab = {w: ("c", w) for w in L.vertices}
    vertices = tuple(dlab[v] for v in K.vertices) + tuple(clab[w] for w in L.vertices)
    facets = [tuple(clab[w] for w in s) for s in L.simplices]
    crank = L.rank
    for s in K.simplices:
        k = len(s) - 1
        for i in range(k + 1):
            front = tuple(dlab[v] for v in s[: i + 1])
            back_labels = sorted(
                {f.vertex_map[v] for v in s[i:]}, key=crank.__getitem__
            )
            facets.append(front + tuple(clab[w] for w in back_labels))
    C = SimplicialComplex.from_facets(vertices, facets)
    hc = homology_of_complex(C, CoefficientRing.integers())
    hl = homology_of_complex(L, CoefficientRing.integers())
    pad = max(hc.max_degree, hl.max_degree)
    if hc.padded(pad) != hl.padded(pad):
        raise RuntimeError("mapping cylinder failed to retract to the codomain")
    return C, dlab, clab


def glue_along(
    K: SimplicialComplex,
    A: SimplicialComplex,
    L: SimplicialComplex,
    B: SimplicialComplex,
    iso: dict,
):
    """Union of K and L identifying subcomplexes A and B via ``iso``.

    The identification must carry A's simplices exactly onto B's.  If the
    two sides share any simplex beyond the identified subcomplex the union
    would not be the intended pushout, so that situation raises (subdivide
    first).  Returns (glued, K vertex map, L vertex map).
    """
    _require_subcomplex(A, K, "A")
    _require_subcomplex(B, L, "B")
    if set(iso.keys()) != set(A.vertices) or set(iso.values()) != set(B.vertices):
        raise ValueError("iso must be a vertex bijection from A onto B")
    if len(set(iso.values())) != len(iso):
        raise ValueError("iso must be injective")
    a_images = {tuple(sorted((iso[v] for v in s), key=B.rank.__getitem__)) for s in A.simplices}
    if a_images != B.simplices:
        raise ValueError("iso does not carry A's simplices onto B's")
    inv = {b: a for a, b in iso.items()}
    map_L = {w: (inv[w] if w in inv else ("g", w)) for w in L.vertices}
    map_K = {v: v for v in K.vertices}
    b_simplices = B.simplices
    for s in L.simplices:
        if s in b_simplices:
            continue
        if all(w in inv for w in s):
            image = K.sort_simplex(inv[w] for w in s)
            if image in K.simplices:
                raise ValueError(
                    f"simplex {s} outside B collides with {image} in K; subdivide before gluing"
                )
    vertices = list(K.vertices) + [map_L[w] for w in L.vertices if w not in inv]
    rank = {v: i for i, v in enumerate(vertices)}
    simplices = set(K.simplices)
    for s in L.simplices:
        simplices.add(tuple(sorted((map_L[w] for w in s), key=rank.__getitem__)))
    G = SimplicialComplex(tuple(vertices), simplices, check=False)
    return G, map_K, map_L


def _require_subcomplex(A: SimplicialComplex, K: SimplicialComplex, name: str):
    if not set(A.vertices) <= set(K.vertices):
        raise ValueError(f"{name} has vertices outside its ambient complex")
    if not A.simplices <= K.simplices:
        raise ValueError(f"{name} is not a subcomplex of its ambient complex")


# ---------------------------------------------------------------------------
# degree maps
# ---------------------------------------------------------------------------


def top_cycle(K: SimplicialComplex) -> dict:
    """The fundamental cycle of a complex with top homology of rank one.

    Sign convention: the first top simplex (in basis order) with nonzero
    coefficient gets a positive one.
    """
    cx = chain_complex_of(K)
    k = cx.max_degree
    kernel = integer_kernel_basis(cx.boundaries[k], cx.dim_at(k))
    if len(kernel) != 1:
        raise ValueError(f"top homology rank {len(kernel)}, expected 1")
    vec = kernel[0]
    lead = next(c for c in vec if c)
    if lead < 0:
        vec = [-c for c in vec]
    basis = cx.bases[k]
    return {basis[i]: c for i, c in enumerate(vec) if c}


def measured_degree(f: SimplicialMap) -> int:
    """Chain-level multiplier of f on top cycles, both canonically signed."""
    z_dom = top_cycle(f.domain)
    z_cod = top_cycle(f.codomain)
    image = f.chain_image(z_dom)
    items = list(z_cod.items())
    s0, c0 = items[0]
    mu_num = image.get(s0, 0)
    if mu_num % c0:
        raise RuntimeError("image is not a multiple of the codomain cycle")
    mu = mu_num // c0
    if image != ({} if mu == 0 else {s: mu * c for s, c in z_cod.items()}):
        raise RuntimeError("image chain is not proportional to the codomain cycle")
    return mu


def _winding_pattern(d: int, j: int) -> int:
    if d > 0:
        return j % 3
    if d < 0:
        return (-j) % 3
    return 0


def _reflection(K: SimplicialComplex, m: int) -> SimplicialMap:
    return SimplicialMap(K, K, {i: (-i) % m for i in range(m)})


def degree_map(l: int, d: int, anchor_preimages: int = 1) -> SimplicialMap:
    """A simplicial self-map model of the degree-d map on the l-sphere.

    Domain: an (l-1)-fold suspension of a polygon winding around the
    triangle.  Codomain: the minimal sphere.  The chain-level multiplier,
    measured against the canonical fundamental cycles, is verified to
    equal d on every call.

    ``anchor_preimages`` asks for at least that many polygon vertices over
    codomain vertex 0.  The plain winding already provides |d| of them, so
    one extra back-and-forth sheet is added exactly when |d| = 1 and two
    anchors are requested.  Suspension poles are not counted: they rank
    after the polygon vertices and cannot lead a facet.
    """
    if l < 1:
        raise ValueError("degree maps need l >= 1")
    if anchor_preimages > 2:
        raise ValueError("at most two anchor preimages are supported")
    if anchor_preimages == 2 and abs(d) == 1:
        s = 1 if d > 0 else -1
        dirs = [s, s, -s]
        m = 3 * len(dirs)
        vmap = {}
        for sheet, direction in enumerate(dirs):
            for t in range(3):
                vmap[3 * sheet + t] = t if direction > 0 else (-t) % 3
    else:
        m = 3 * max(abs(d), 1)
        vmap = {i: _winding_pattern(d, i) for i in range(m)}
    poly = polygon_complex(m)
    cod = sphere_complex(1)
    f = SimplicialMap(poly, cod, vmap)
    for step in range(l - 1):
        # send one new pole over the fresh apex, the other into the old
        # sphere: the classical cone/base decomposition of the suspension
        old_cod = f.codomain
        apex = step + 3
        new_cod = sphere_complex(step + 2)
        pa, pb = ("pole", step, 0), ("pole", step, 1)
        dom = suspension_complex(f.domain, (pa, pb))
        vmap = {v: f.vertex_map[v] for v in f.domain.vertices}
        vmap[pa] = apex
        vmap[pb] = 0
        f = SimplicialMap(dom, new_cod, vmap)
        del old_cod
    mu = measured_degree(f)
    if mu == -d and d != 0:
        f = compose_maps(f, _prefold_reflection(f.domain, m, l))
        mu = measured_degree(f)
    if mu != d:
        raise RuntimeError(f"degree map for (l={l}, d={d}) measured {mu}")
    return f


def _prefold_reflection(dom: SimplicialComplex, m: int, l: int) -> SimplicialMap:
    """Orientation-reversing automorphism: reflect the underlying polygon."""
    vmap = {}
    for v in dom.vertices:
        vmap[v] = (-v) % m if isinstance(v, int) else v
    return SimplicialMap(dom, dom, vmap)


@dataclass(frozen=True)
class WedgeMap:
    """A sphere mapped onto a bouquet with prescribed multiplicities.

    ``achieved`` always equals the requested degree vector: the class
    identity f(fundamental) = sum d_i * (i-th sphere cycle) is re-derived
    from the chains on construction and the build fails if it does not
    hold.
    """

    domain: SimplicialComplex
    codomain: SimplicialComplex
    map: SimplicialMap
    domain_cycle: dict
    sphere_cycles: tuple
    achieved: tuple


def sphere_to_wedge_map(l: int, degrees) -> WedgeMap:
    """Map an l-sphere to a bouquet of l-spheres with given degrees.

    For one target sphere the codomain is the minimal sphere; for several
    circles it is a genuine wedge of triangles; for several higher spheres
    it is an iterated suspension of that wedge (the same homotopy type,
    with per-summand fundamental cycles carried along).
    """
    degrees = tuple(int(d) for d in degrees)
    if l < 1 or not degrees:
        raise ValueError("need l >= 1 and at least one target")
    if len(degrees) == 1:
        f = degree_map(l, degrees[0])
        data = WedgeMap(
            f.domain,
            f.codomain,
            f,
            top_cycle(f.domain),
            (top_cycle(f.codomain),),
            degrees,
        )
        return _verified(data)

    lengths = [3 * max(abs(d), 1) for d in degrees]
    total = sum(lengths)
    poly = polygon_complex(total)
    spheres = [sphere_complex(1) for _ in degrees]
    W, incs = wedge_complexes(spheres)
    vmap = {}
    offset = 0
    for i, (d, length) in enumerate(zip(degrees, lengths)):
        for j in range(length):
            vmap[offset + j] = incs[i][_winding_pattern(d, j)]
        offset += length
    f = SimplicialMap(poly, W, vmap)
    domain_cycle = top_cycle(poly)
    sphere_cycles = []
    for i, S in enumerate(spheres):
        z = top_cycle(S)
        pushed = {}
        for s, c in z.items():
            t = W.sort_simplex(incs[i][v] for v in s)
            pushed[t] = c
        sphere_cycles.append(pushed)

    for step in range(l - 1):
        f = suspend_map(f, ("wedge", step))
        poles = (("pole", ("wedge", step), 0), ("pole", ("wedge", step), 1))
        domain_cycle = suspend_chain(domain_cycle, poles)
        sphere_cycles = [suspend_chain(z, poles) for z in sphere_cycles]
    data = WedgeMap(
        f.domain, f.codomain, f, domain_cycle, tuple(sphere_cycles), degrees
    )
    return _verified(data)


def _verified(data: WedgeMap) -> WedgeMap:
    image = data.map.chain_image(data.domain_cycle)
    k = len(next(iter(data.sphere_cycles[0]))) - 1
    basis = data.codomain.simplices_of_dim(k)
    index = {s: i for i, s in enumerate(basis)}

    def vectorize(chain):
        vec = [0] * len(basis)
        for s, c in chain.items():
            vec[index[s]] = c
        return vec

    columns = [vectorize(z) for z in data.sphere_cycles]
    target = vectorize(image)
    coords = solve_in_span(columns, target)
    if coords is not None and tuple(coords) == data.achieved:
        return data
    if coords is not None and tuple(-c for c in coords) == data.achieved:
        flipped = {s: -c for s, c in data.domain_cycle.items()}
        return WedgeMap(
            data.domain,
            data.codomain,
            data.map,
            flipped,
            data.sphere_cycles,
            data.achieved,
        )
    raise RuntimeError(
        f"wedge map verification failed: wanted {data.achieved}, got {coords}"
    )


# ---------------------------------------------------------------------------
# induced maps on homology
# ---------------------------------------------------------------------------


def induced_homology_rank(f: SimplicialMap, k: int, R: CoefficientRing) -> int:
    """Rank of the induced map H_k(domain) -> H_k(codomain) over a field."""
    if not R.is_field:
        raise ValueError("rank bookkeeping runs over a field")
    dom_cx = chain_complex_of(f.domain)
    cod_cx = chain_complex_of(f.codomain)
    if k > dom_cx.max_degree or dom_cx.dim_at(k) == 0:
        return 0
    cycles = _field_kernel(R, dom_cx.boundaries[k], dom_cx.dim_at(k))
    if not cycles:
        return 0
    basis_dom = dom_cx.bases[k]
    index_cod = (
        {s: i for i, s in enumerate(cod_cx.bases[k])} if k <= cod_cx.max_degree else {}
    )
    cod_dim = cod_cx.dim_at(k) if k <= cod_cx.max_degree else 0
    mapped = []
    for vec in cycles:
        chain = {basis_dom[i]: c for i, c in enumerate(vec) if c}
        image = f.chain_image({s: int(c) if R.kind != "Q" else c for s, c in chain.items()})
        out = [R.zero()] * cod_dim
        for s, c in image.items():
            out[index_cod[s]] = R.convert(c)
        mapped.append(out)
    boundaries = []
    if k + 1 <= cod_cx.max_degree and cod_cx.dim_at(k + 1):
        m = cod_cx.boundaries[k + 1]
        for j in range(cod_cx.dim_at(k + 1)):
            boundaries.append([R.convert(m[i][j]) for i in range(cod_dim)])
    base_rank = _field_rank(R, boundaries, cod_dim)
    total_rank = _field_rank(R, boundaries + mapped, cod_dim)
    return total_rank - base_rank


def _field_rank(R: CoefficientRing, rows, cols: int) -> int:
    rows = [r for r in rows if any(c != R.zero() for c in r)]
    if not rows or cols == 0:
        return 0
    return field_reduce(ExactMatrix(R, [[R.convert(c) for c in r] for r in rows], cols)).rank


def _field_kernel(R: CoefficientRing, rows, cols: int):
    if cols == 0:
        return []
    if not rows:
        basis = []
        for i in range(cols):
            v = [R.zero()] * cols
            v[i] = R.one()
            basis.append(v)
        return basis
    mat = ExactMatrix(R, [[R.convert(c) for c in r] for r in rows], cols)
    return [list(v) for v in field_reduce(mat).kernel]


# ---------------------------------------------------------------------------
# cup products
# ---------------------------------------------------------------------------


class _DegreeSolver:
    """Basis and coordinates for one cohomology degree.

    Works in a cycle splitting of the chain group: a unimodular column
    transform of the boundary matrix whose kernel block is the cycle
    lattice.  In those coordinates coboundaries vanish, evaluation of a
    cochain against a cycle is a plain dot product, and cohomology classes
    are the left-kernel of the next boundary expressed in the splitting.
    Coordinates of an integral cocycle along the representatives are then
    rational evaluations that are guaranteed to be integers.
    """

    def __init__(self, reps, kernel_cols, wcols):
        self.reps = reps
        self._kernel_cols = kernel_cols
        self._wcols = wcols

    @property
    def rank(self):
        return len(self.reps)

    def coordinates(self, vec):
        y = {}
        for i, col in enumerate(self._kernel_cols):
            s = 0
            for t, v in col.items():
                s += v * vec[t]
            if s:
                y[i] = s
        coords = []
        for w in self._wcols:
            total = Fraction(0)
            for i, s in y.items():
                f = w.get(i)
                if f is not None:
                    total += s * f
            if total.denominator != 1:
                raise RuntimeError("cocycle coordinate failed to be integral")
            coords.append(int(total))
        return coords


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _sparse_dot(a: dict, b: dict) -> int:
    if len(b) < len(a):
        a, b = b, a
    return sum(v * b.get(j, 0) for j, v in a.items())


def _cycle_splitting(cx: ChainComplexZ, k: int):
    red = cx._splittings.get(k)
    if red is None:
        red = sparse_column_reduction(cx.boundaries[k] if k > 0 else [], cx.dim_at(k))
        cx._splittings[k] = red
    return red


def _integral_solver(cx: ChainComplexZ, k: int, expected_rank: int) -> _DegreeSolver:
    nk = cx.dim_at(k)
    red = _cycle_splitting(cx, k)
    z = len(red.kernel_cols)
    # dual rows of the splitting, indexed by chain coordinate
    by_cell: dict[int, dict[int, int]] = {}
    for i, row in enumerate(red.kernel_dual_rows):
        for t, v in row.items():
            by_cell.setdefault(t, {})[i] = v
    # columns of the next boundary, rewritten in splitting coordinates;
    # cocycles are exactly the vectors annihilating all of them
    mt_rows: list[dict[int, int]] = []
    if k + 1 <= cx.max_degree and cx.dim_at(k + 1):
        nxt = cx.boundaries[k + 1]
        dcols: list[dict[int, int]] = [dict() for _ in range(cx.dim_at(k + 1))]
        for t, row in enumerate(nxt):
            for c, v in enumerate(row):
                if v:
                    dcols[c][t] = v
        for dc in dcols:
            acc: dict[int, int] = {}
            for t, v in dc.items():
                for i, w in by_cell.get(t, {}).items():
                    acc[i] = acc.get(i, 0) + v * w
            mt_rows.append({i: x for i, x in acc.items() if x})
    kappa = sparse_column_reduction(mt_rows, z).kernel_cols
    if len(kappa) != expected_rank:
        raise RuntimeError(
            f"degree {k}: found {len(kappa)} cohomology classes, rank {expected_rank} expected"
        )
    reps = []
    for ka in kappa:
        vec = [0] * nk
        for i, coef in ka.items():
            for t, val in red.kernel_dual_rows[i].items():
                vec[t] += coef * val
        reps.append(vec)
    # rational duals: right inverse of the representative matrix in the
    # splitting, via the (positive definite) Gram matrix
    b = len(kappa)
    QQ = CoefficientRing.rationals()
    grows = [[Fraction(_sparse_dot(ka, kb)) for kb in kappa] for ka in kappa]
    wcols = []
    for c in range(b):
        unit = [Fraction(1 if a == c else 0) for a in range(b)]
        sol = _solve_square(QQ, grows, unit)
        w: dict[int, Fraction] = {}
        for a, f in enumerate(sol):
            if f:
                for i, x in kappa[a].items():
                    w[i] = w.get(i, Fraction(0)) + f * x
        wcols.append({i: f for i, f in w.items() if f})
    solver = _DegreeSolver(reps, red.kernel_cols, wcols)
    for a, rep in enumerate(reps):
        coords = solver.coordinates(rep)
        if any(c != (1 if i == a else 0) for i, c in enumerate(coords)):
            raise RuntimeError(f"degree {k}: dual basis check failed")
    return solver


class _FieldSolver:
    def __init__(self, ring, reps, duals, gram_t):
        self.ring = ring
        self.reps = reps
        self.duals = duals
        self.gram_t = gram_t  # rows: duals, cols: reps

    @property
    def rank(self):
        return len(self.reps)

    def coordinates(self, vec):
        evals = [_dot_ring(self.ring, vec, d) for d in self.duals]
        return _solve_square(self.ring, self.gram_t, evals)


def _dot_ring(ring, a, b):
    total = ring.zero()
    for x, y in zip(a, b):
        total = total + x * y
    return ring.convert(total)


def _solve_square(ring, rows, vec):
    n = len(rows)
    aug = [list(rows[i]) + [vec[i]] for i in range(n)]
    red = field_reduce(ExactMatrix(ring, aug, n + 1))
    if red.rank != n:
        raise RuntimeError("singular coordinate system")
    sol = [ring.zero()] * n
    rref = red.rref.to_rows()
    for i, p in enumerate(red.pivots):
        sol[p] = rref[i][n]
    return sol


def _field_solver(cx: ChainComplexZ, k: int, R: CoefficientRing, expected_rank: int):
    nk = cx.dim_at(k)
    if k + 1 <= cx.max_degree and cx.dim_at(k + 1):
        delta_rows = [
            [cx.boundaries[k + 1][i][j] for i in range(nk)] for j in range(cx.dim_at(k + 1))
        ]
    else:
        delta_rows = []
    cocycles = _field_kernel(R, delta_rows, nk)
    cycles = _field_kernel(R, cx.boundaries[k] if k > 0 else [], nk)
    if not cocycles or not cycles:
        if expected_rank:
            raise RuntimeError(f"degree {k}: empty pairing but rank {expected_rank}")
        return _FieldSolver(R, [], [], [])
    P = [[_dot_ring(R, phi, z) for z in cycles] for phi in cocycles]
    red = field_reduce(ExactMatrix(R, P, len(cycles)))
    if red.rank != expected_rank:
        raise RuntimeError(
            f"degree {k}: pairing rank {red.rank}, homology rank {expected_rank}"
        )
    col_pivots = red.pivots
    red_t = field_reduce(
        ExactMatrix(R, [list(col) for col in zip(*P)], len(cocycles))
    )
    row_pivots = red_t.pivots
    reps = [cocycles[i] for i in row_pivots]
    duals = [cycles[j] for j in col_pivots]
    gram_t = [[P[i][j] for i in row_pivots] for j in col_pivots]
    return _FieldSolver(R, reps, duals, gram_t)


def cup_ring_of_complex(
    K: SimplicialComplex, R: CoefficientRing, top_degree: int | None = None
) -> PresentedGradedRing:
    """Cohomology ring with Alexander-Whitney products in a chosen basis.

    Over the integers the complex must have torsion-free cohomology through
    the requested top degree.  Over a field, a torsion-free complex reuses
    the integral computation (coefficient reduction is a ring isomorphism
    there); otherwise kernels are recomputed over the field directly.
    """
    cx = chain_complex_of(K)
    dim = cx.max_degree
    top = dim if top_degree is None else top_degree
    if top < 0:
        raise ValueError("top degree must be >= 0")
    homz = homology_of_chain_complex(cx, CoefficientRing.integers())
    if homz.rank(0) != 1:
        raise ValueError("cup rings require a connected complex")

    def torsion_free_through(j: int) -> bool:
        return all(not homz.torsion_at(i) for i in range(min(j, dim) + 1))

    if R.kind == "Z":
        # H^k torsion is the torsion of H_{k-1}
        for k in range(1, min(top, dim) + 1):
            if homz.torsion_at(k - 1):
                raise ValueError(
                    f"integral cohomology in degree {k} has torsion; use field coefficients"
                )
        hom = homz
        solver_for = lambda k, rank: _integral_solver(cx, k, rank)
        convert = lambda x: x
    elif R.kind == "Q" or torsion_free_through(min(top, dim)):
        # the integral free part carries the whole ring after tensoring
        hom = homz
        solver_for = lambda k, rank: _integral_solver(cx, k, rank)
        convert = R.convert
    else:
        hom = homology_of_chain_complex(cx, R)
        solver_for = lambda k, rank: _field_solver(cx, k, R, rank)
        convert = R.convert

    solvers = {}
    basis = []
    ids = {}
    for k in range(1, min(top, dim) + 1):
        rank = hom.rank(k)
        if rank == 0:
            continue
        solvers[k] = solver_for(k, rank)
        for i in range(rank):
            ident = f"c{k}.{i + 1}"
            ids[(k, i)] = ident
            basis.append(BasisElement(ident, k, ("base",), False))

    products = {}
    zero = R.zero()
    for a in basis:
        p = a.degree
        sa = solvers[p]
        for b in basis:
            q = b.degree
            total = p + q
            if total > top or total > dim or total not in solvers:
                continue
            rep_a = sa.reps[int(a.id.split(".")[1]) - 1]
            rep_b = solvers[q].reps[int(b.id.split(".")[1]) - 1]
            target_basis = cx.bases[total]
            idx_p = K.index_of(p)
            idx_q = K.index_of(q)
            w = []
            for s in target_basis:
                front = s[: p + 1]
                back = s[p:]
                w.append(rep_a[idx_p[front]] * rep_b[idx_q[back]])
            coords = solvers[total].coordinates(w)
            entry = {}
            for i, c in enumerate(coords):
                c = convert(c)
                if c != zero:
                    entry[ids[(total, i)]] = c
            if entry:
                products[(a.id, b.id)] = entry
    return PresentedGradedRing(R, top, basis, products)
