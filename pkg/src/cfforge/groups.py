"""Exact arithmetic for the concrete countable groups the construction runs over.

Everything here is integer-exact: group elements are plain hashable values
(ints, int tuples, bit portraits), subgroups of finite index are predicate
objects with a canonical coset invariant, and coset enumeration is a
deterministic BFS.  No floats anywhere.
"""

from __future__ import annotations

import itertools


class CapExceeded(RuntimeError):
    """An enumeration hit its resource cap before finishing."""


def _signed(v):
    # orders 0, 1, -1, 2, -2, ... (nonnegative wins ties in magnitude)
    return (abs(v), 0 if v >= 0 else 1)


# ---------------------------------------------------------------------------
# group contexts
# ---------------------------------------------------------------------------

class GroupCtx:
    """Multiplication table access for one concrete group.

    Subclasses provide mul/inv/identity/generators plus a deterministic
    sort key used everywhere a "least representative" is chosen.
    """

    kind = "?"

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def check(self, a):
        raise NotImplementedError

    def key(self, a):
        raise NotImplementedError

    def conj(self, t, a):
        # t a t^-1
        return self.mul(self.mul(t, a), self.inv(t))

    def prod(self, elems):
        out = self.identity
        for e in elems:
            out = self.mul(out, e)
        return out

    def ball(self, radius, gens=None, cap=200000):
        """Closed ball of the given word-length radius (generators and inverses)."""
        if gens is None:
            gens = self.generators
        steps = list(gens) + [self.inv(g) for g in gens]
        seen = {self.identity}
        frontier = [self.identity]
        for _ in range(radius):
            nxt = []
            for a in frontier:
                for s in steps:
                    b = self.mul(s, a)
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
                        if len(seen) > cap:
                            raise CapExceeded("ball cap %d" % cap)
            frontier = nxt
        return frozenset(seen)

    def describe(self):
        return {"group": self.kind}


class IntLine(GroupCtx):
    kind = "int_line"
    identity = 0
    generators = (1,)

    def mul(self, a, b):
        return a + b

    def inv(self, a):
        return -a

    def check(self, a):
        assert isinstance(a, int), a
        return a

    def key(self, a):
        return _signed(a)


class IntLattice(GroupCtx):
    kind = "int_lattice"

    def __init__(self, d):
        assert d >= 1
        self.d = d
        self.identity = (0,) * d
        self.generators = tuple(
            tuple(1 if j == i else 0 for j in range(d)) for i in range(d)
        )

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def check(self, a):
        assert isinstance(a, tuple) and len(a) == self.d, a
        assert all(isinstance(x, int) for x in a), a
        return a

    def key(self, a):
        return (sum(abs(x) for x in a), tuple(_signed(x) for x in a))

    def describe(self):
        return {"group": self.kind, "d": self.d}


class Heisenberg(GroupCtx):
    """Integer upper-triangular 3x3 unipotent group as triples (x, y, z).

    (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y')
    """

    kind = "heisenberg"
    identity = (0, 0, 0)
    generators = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

    def mul(self, a, b):
        return (a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1])

    def inv(self, a):
        return (-a[0], -a[1], -a[2] + a[0] * a[1])

    def check(self, a):
        assert isinstance(a, tuple) and len(a) == 3, a
        assert all(isinstance(x, int) for x in a), a
        return a

    def key(self, a):
        return (sum(abs(x) for x in a), tuple(_signed(x) for x in a))


class FiniteTable(GroupCtx):
    """Finite group given by its multiplication table; elements are indices.

    Index 0 must be the identity.
    """

    kind = "finite_table"

    def __init__(self, table, generators=None, names=None):
        table = tuple(tuple(row) for row in table)
        n = len(table)
        assert all(len(row) == n for row in table)
        assert table[0] == tuple(range(n)), "index 0 must be the identity"
        assert all(row[0] == i for i, row in enumerate(table))
        self.table = table
        self.order = n
        self.names = tuple(names) if names is not None else None
        self.identity = 0
        if generators is None:
            generators = tuple(range(1, n))
        self.generators = tuple(generators)
        self._inv = [None] * n
        for a in range(n):
            for b in range(n):
                if table[a][b] == 0:
                    self._inv[a] = b
        assert all(v is not None for v in self._inv), "not a group table"

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inv[a]

    def check(self, a):
        assert isinstance(a, int) and 0 <= a < self.order, a
        return a

    def key(self, a):
        return (a,)

    def elements(self):
        return range(self.order)

    def describe(self):
        return {"group": self.kind, "order": self.order}


class TreeDepth(GroupCtx):
    """Bit-flip maps of the depth-d binary tree, acting on words in {0,1}^d.

    An element is a portrait: one swap bit per internal node, heap order
    (root at 0, children of i at 2i+1 and 2i+2, left = letter 0).  The map
    sends a word (x_1..x_d) to (x_1 ^ s(), x_2 ^ s(x_1), x_3 ^ s(x_1 x_2), ...):
    the node reached by the input prefix decides whether the next letter flips.
    """

    kind = "tree_depth"

    def __init__(self, depth):
        assert 1 <= depth <= 5, depth
        self.depth = depth
        self.size = 2 ** depth - 1
        self.identity = (0,) * self.size
        gens = []
        for i in range(self.size):
            g = [0] * self.size
            g[i] = 1
            gens.append(tuple(g))
        self.generators = tuple(gens)

    def node(self, prefix):
        i = 0
        for bit in prefix:
            i = 2 * i + 1 + bit
        return i

    def apply(self, g, word):
        out = []
        i = 0
        for bit in word:
            out.append(bit ^ g[i])
            i = 2 * i + 1 + bit
        return tuple(out)

    def mul(self, a, b):
        # composite map: apply b, then a
        out = [0] * self.size
        for k in range(self.depth):
            for w in itertools.product((0, 1), repeat=k):
                out[self.node(w)] = b[self.node(w)] ^ a[self.node(self.apply(b, w))]
        return tuple(out)

    def inv(self, a):
        # solve level by level: v[w] = a[v-image of w]
        out = [0] * self.size
        for k in range(self.depth):
            for w in itertools.product((0, 1), repeat=k):
                img = self.apply(tuple(out), w)
                out[self.node(w)] = a[self.node(img)]
        v = tuple(out)
        assert self.mul(a, v) == self.identity
        return v

    def check(self, a):
        assert isinstance(a, tuple) and len(a) == self.size, a
        assert all(bit in (0, 1) for bit in a), a
        return a

    def key(self, a):
        return (sum(a), a)

    def elements(self):
        for bits in itertools.product((0, 1), repeat=self.size):
            yield bits

    def describe(self):
        return {"group": self.kind, "depth": self.depth}


# ---------------------------------------------------------------------------
# finite subsets of a group (explicit or structured)
# ---------------------------------------------------------------------------

class ExplicitSet:
    """Plain finite subset."""

    def __init__(self, ctx, elems):
        self.ctx = ctx
        self.elems = frozenset(ctx.check(e) for e in elems)

    def __len__(self):
        return len(self.elems)

    def __contains__(self, g):
        return g in self.elems

    def __iter__(self):
        return iter(sorted(self.elems, key=self.ctx.key))

    def __eq__(self, other):
        return isinstance(other, ExplicitSet) and self.elems == other.elems

    def __hash__(self):
        return hash(self.elems)

    small = True


class IntervalSet:
    """{0, 1, ..., h-1} inside the integers; size is exact for huge h."""

    def __init__(self, h):
        assert isinstance(h, int) and h >= 1
        self.h = h

    def __len__(self):
        return self.h

    def __contains__(self, g):
        return isinstance(g, int) and 0 <= g < self.h

    def __iter__(self):
        return iter(range(self.h))

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.h == other.h

    def __hash__(self):
        return hash(("interval", self.h))

    @property
    def small(self):
        return self.h <= 1 << 21


class BoxSet:
    """{(x,y,z): 0<=x<a, 0<=y<b, 0<=z<h} inside the unipotent group."""

    def __init__(self, a, b, h):
        assert min(a, b, h) >= 1
        self.dims = (a, b, h)

    def __len__(self):
        a, b, h = self.dims
        return a * b * h

    def __contains__(self, g):
        a, b, h = self.dims
        return 0 <= g[0] < a and 0 <= g[1] < b and 0 <= g[2] < h

    def __iter__(self):
        a, b, h = self.dims
        return (
            (x, y, z)
            for x in range(a)
            for y in range(b)
            for z in range(h)
        )

    def __eq__(self, other):
        return isinstance(other, BoxSet) and self.dims == other.dims

    def __hash__(self):
        return hash(("box", self.dims))

    @property
    def small(self):
        return len(self) <= 1 << 21


def as_set(ctx, obj):
    if isinstance(obj, (ExplicitSet, IntervalSet, BoxSet)):
        return obj
    return ExplicitSet(ctx, obj)


def interval_shift_overlap(h, g):
    """|F cap (g+F)| for F = {0..h-1} in the integers."""
    return max(0, h - abs(g))


def box_shift_overlap(dims, g):
    """|F cap gF| for a box F in the unipotent group, exact count.

    Left translation shears the z coordinate (g^-1 f has z-entry
    z - gz - gx*(y - gy)), so the overlap is a per-y sum of interval overlaps.
    """
    a, b, h = dims
    gx, gy, gz = g
    nx = max(0, a - abs(gx))
    if nx == 0:
        return 0
    total = 0
    for y in range(max(0, gy), min(b, b + gy)):
        off = gz + gx * (y - gy)
        total += max(0, h - abs(off))
    return nx * total


def box_right_shift_overlap(dims, d):
    """|F cap Fd| for a box F; right translation shears z along x instead."""
    a, b, h = dims
    dx, dy, dz = d
    ny = max(0, b - abs(dy))
    if ny == 0:
        return 0
    total = 0
    for x in range(max(0, dx), min(a, a + dx)):
        off = dz + dy * (x - dx)
        total += max(0, h - abs(off))
    return ny * total


def box_corners(dims):
    a, b, h = dims
    return [
        (x, y, z)
        for x in (0, a - 1)
        for y in (0, b - 1)
        for z in (0, h - 1)
    ]


def product_set(ctx, A, B):
    """All products ab, plus whether every product arose exactly once."""
    seen = {}
    unique = True
    for a in A:
        for b in B:
            p = ctx.mul(a, b)
            if p in seen:
                unique = False
            seen[p] = (a, b)
    return frozenset(seen), unique


def translate(ctx, A, g, side="left"):
    if side == "left":
        return frozenset(ctx.mul(g, a) for a in A)
    return frozenset(ctx.mul(a, g) for a in A)


# ---------------------------------------------------------------------------
# finite-index subgroups as predicates with canonical coset invariants
# ---------------------------------------------------------------------------

class Subgroup:
    family = "?"

    def __init__(self, ctx):
        self.ctx = ctx

    def member(self, g):
        raise NotImplementedError

    def coset_key(self, g):
        """Canonical invariant of the left coset g*H (equal keys iff equal cosets)."""
        raise NotImplementedError

    def gens(self):
        """A finite generating set, when the family knows one."""
        raise NotImplementedError("no generators known for %s" % self.family)

    def index(self):
        """Declared index in the ambient group, or None if unknown."""
        return None

    def normality(self):
        """True / False when certified, None when this family cannot tell."""
        return None

    def describe(self):
        return {"family": self.family}


class Ambient(Subgroup):
    """The whole group as an index-1 subgroup (chain level 0)."""

    family = "ambient"

    def member(self, g):
        return True

    def coset_key(self, g):
        return 0

    def gens(self):
        return self.ctx.generators

    def index(self):
        return 1

    def normality(self):
        return True


class ZModulus(Subgroup):
    family = "z_modulus"

    def __init__(self, ctx, m):
        assert isinstance(ctx, IntLine)
        assert isinstance(m, int) and m >= 1
        super().__init__(ctx)
        self.m = m

    def member(self, g):
        return g % self.m == 0

    def coset_key(self, g):
        return g % self.m

    def gens(self):
        return (self.m,)

    def index(self):
        return self.m

    def normality(self):
        return True

    def describe(self):
        return {"family": self.family, "m": self.m}


def _hnf_columns(cols):
    """Column-style Hermite form (lower triangular, positive diagonal)."""
    d = len(cols[0])
    work = [list(c) for c in cols]
    for i in range(d):
        # clear row i across columns i.. using gcd steps
        while True:
            nz = [j for j in range(i, len(work)) if work[j][i] != 0]
            assert nz, "columns do not span a finite-index sublattice"
            j0 = min(nz, key=lambda j: abs(work[j][i]))
            if j0 != i:
                work[i], work[j0] = work[j0], work[i]
            done = True
            for j in range(i + 1, len(work)):
                if work[j][i] != 0:
                    q = work[j][i] // work[i][i]
                    work[j] = [x - q * y for x, y in zip(work[j], work[i])]
                    if work[j][i] != 0:
                        done = False
            if done:
                break
        if work[i][i] < 0:
            work[i] = [-x for x in work[i]]
        # reduce earlier columns against the pivot for a unique form
        for j in range(i):
            q = work[j][i] // work[i][i]
            if q:
                work[j] = [x - q * y for x, y in zip(work[j], work[i])]
    return [tuple(c) for c in work[:d]]


class LatticeCols(Subgroup):
    """Sublattice of Z^d spanned by the given integer columns (full rank)."""

    family = "lattice_cols"

    def __init__(self, ctx, cols):
        assert isinstance(ctx, IntLattice)
        cols = tuple(tuple(c) for c in cols)
        assert all(len(c) == ctx.d for c in cols)
        super().__init__(ctx)
        self.cols = cols
        self.hnf = _hnf_columns(cols)
        self._det = 1
        for i in range(ctx.d):
            self._det *= self.hnf[i][i]

    def _reduce(self, v):
        r = list(v)
        for i in range(self.ctx.d):
            q = r[i] // self.hnf[i][i]
            if q:
                r = [x - q * y for x, y in zip(r, self.hnf[i])]
        return tuple(r)

    def member(self, g):
        return self._reduce(g) == self.ctx.identity

    def coset_key(self, g):
        return self._reduce(g)

    def gens(self):
        return self.cols

    def index(self):
        return self._det

    def normality(self):
        return True

    def describe(self):
        return {"family": self.family, "cols": [list(c) for c in self.cols]}


class HeisenbergCongruence(Subgroup):
    """{(ia, jb, kc)} in the unipotent group; needs c | a*b to be closed."""

    family = "heisenberg_congruence"

    def __init__(self, ctx, a, b, c):
        assert isinstance(ctx, Heisenberg)
        assert min(a, b, c) >= 1
        assert (a * b) % c == 0, "not closed under products: need c | a*b"
        super().__init__(ctx)
        self.a, self.b, self.c = a, b, c

    def member(self, g):
        return g[0] % self.a == 0 and g[1] % self.b == 0 and g[2] % self.c == 0

    def coset_key(self, g):
        x, y, z = g
        x0 = x % self.a
        y0 = y % self.b
        # right-multiplying by (0, jb, 0) adds x*jb to z; use the reduced x
        z0 = (z + x0 * (y0 - y)) % self.c
        return (x0, y0, z0)

    def gens(self):
        return ((self.a, 0, 0), (0, self.b, 0), (0, 0, self.c))

    def index(self):
        return self.a * self.b * self.c

    def normality(self):
        # conjugation adds x*(jb) - y*(ia) to the z entry
        return self.a % self.c == 0 and self.b % self.c == 0

    def describe(self):
        return {"family": self.family, "a": self.a, "b": self.b, "c": self.c}


class FiniteSubset(Subgroup):
    family = "finite_subset"

    def __init__(self, ctx, elems, check_closed=True):
        super().__init__(ctx)
        self.elems = frozenset(ctx.check(e) for e in elems)
        assert ctx.identity in self.elems
        if check_closed:
            for a in self.elems:
                assert ctx.inv(a) in self.elems
                for b in self.elems:
                    assert ctx.mul(a, b) in self.elems
        self.order = len(self.elems)

    def member(self, g):
        return g in self.elems

    def coset_key(self, g):
        coset = [self.ctx.mul(g, h) for h in self.elems]
        return min(coset, key=self.ctx.key)

    def gens(self):
        return tuple(sorted(self.elems, key=self.ctx.key))

    def index(self):
        if isinstance(self.ctx, FiniteTable):
            assert self.ctx.order % self.order == 0
            return self.ctx.order // self.order
        if isinstance(self.ctx, TreeDepth):
            total = 2 ** self.ctx.size
            assert total % self.order == 0
            return total // self.order
        return None

    def normality(self):
        if isinstance(self.ctx, (FiniteTable, TreeDepth)):
            for g in self.ctx.generators:
                for h in self.elems:
                    if self.ctx.conj(g, h) not in self.elems:
                        return False
            return True
        return None

    def describe(self):
        return {"family": self.family, "order": self.order}


class ConjugatedBy(Subgroup):
    """t H t^-1 for a base subgroup H."""

    family = "conjugated_by"

    def __init__(self, base, t):
        super().__init__(base.ctx)
        self.base = base
        self.t = base.ctx.check(t)
        self._tinv = base.ctx.inv(t)

    def _pull(self, g):
        return self.ctx.mul(self.ctx.mul(self._tinv, g), self.t)

    def member(self, g):
        return self.base.member(self._pull(g))

    def coset_key(self, g):
        return self.base.coset_key(self._pull(g))

    def gens(self):
        return tuple(self.ctx.conj(self.t, h) for h in self.base.gens())

    def index(self):
        return self.base.index()

    def describe(self):
        return {"family": self.family, "base": self.base.describe(), "t": self.t}


class NormalCoreOf(Subgroup):
    """Intersection of all conjugates of the base subgroup."""

    family = "normal_core_of"

    def __init__(self, base, transversal, declared_index=None):
        super().__init__(base.ctx)
        self.base = base
        self.transversal = tuple(transversal)
        self._declared = declared_index

    def member(self, g):
        ctx = self.ctx
        for x in self.transversal:
            if not self.base.member(ctx.mul(ctx.mul(ctx.inv(x), g), x)):
                return False
        return True

    def coset_key(self, g):
        ctx = self.ctx
        return tuple(
            self.base.coset_key(ctx.mul(ctx.mul(ctx.inv(x), g), x))
            for x in self.transversal
        )

    def index(self):
        return self._declared

    def normality(self):
        return True

    def describe(self):
        return {"family": self.family, "base": self.base.describe()}


# ---------------------------------------------------------------------------
# coset enumeration
# ---------------------------------------------------------------------------

class CosetSpace:
    """Left cosets gH of a finite-index subgroup, with canonical representatives.

    Representatives are found by BFS from the identity over the ambient
    generators and their inverses; within each BFS layer new cosets are
    claimed in sort-key order, so the transversal is deterministic and
    "least first".
    """

    def __init__(self, ctx, sub, reps, lookup):
        self.ctx = ctx
        self.sub = sub
        self.reps = tuple(reps)
        self._lookup = lookup

    def __len__(self):
        return len(self.reps)

    def locate(self, g):
        return self._lookup[self.sub.coset_key(g)]

    def rep(self, g):
        return self.reps[self.locate(g)]

    def generator_permutations(self):
        """How each ambient generator permutes the cosets (left translation)."""
        out = []
        for s in self.ctx.generators:
            out.append(tuple(self.locate(self.ctx.mul(s, r)) for r in self.reps))
        return tuple(out)


def coset_table(ctx, sub, cap=300000, gens=None):
    if gens is None:
        gens = ctx.generators
    steps = list(gens) + [ctx.inv(g) for g in gens]
    reps = [ctx.identity]
    lookup = {sub.coset_key(ctx.identity): 0}
    frontier = [ctx.identity]
    declared = sub.index()
    while frontier:
        layer = []
        for r in frontier:
            for s in steps:
                c = ctx.mul(s, r)
                k = sub.coset_key(c)
                if k not in lookup:
                    layer.append((ctx.key(c), c, k))
        layer.sort(key=lambda t: t[0])
        frontier = []
        for _, c, k in layer:
            if k in lookup:
                continue
            lookup[k] = len(reps)
            reps.append(c)
            frontier.append(c)
            if len(reps) > cap:
                raise CapExceeded("coset cap %d" % cap)
    if declared is not None:
        assert len(reps) == declared, (len(reps), declared)
    return CosetSpace(ctx, sub, reps, lookup)


def cross_section(ctx, small, gens, expect=None, cap=300000):
    """Least-representative cross-section of `small`-cosets reached by `gens`.

    BFS from the identity; positive generator steps first (inverses are only
    added if the positive steps stall), new cosets claimed least-key-first
    within a layer.  With `expect` set, stops once that many cosets exist.
    """
    gens = list(gens)
    for steps in (gens, gens + [ctx.inv(g) for g in gens]):
        reps = [ctx.identity]
        lookup = {small.coset_key(ctx.identity): 0}
        frontier = [ctx.identity]
        while frontier and (expect is None or len(reps) < expect):
            layer = []
            for r in frontier:
                for s in steps:
                    c = ctx.mul(s, r)
                    k = small.coset_key(c)
                    if k not in lookup:
                        layer.append((ctx.key(c), c, k))
            layer.sort(key=lambda t: t[0])
            frontier = []
            for _, c, k in layer:
                if k in lookup:
                    continue
                lookup[k] = len(reps)
                reps.append(c)
                frontier.append(c)
                if len(reps) > cap:
                    raise CapExceeded("coset cap %d" % cap)
                if expect is not None and len(reps) == expect:
                    frontier = []
                    break
        if expect is None or len(reps) == expect:
            return tuple(reps)
    raise CapExceeded("positive and two-sided BFS both stalled")


def cosets_within(ctx, big, small, cap=300000):
    """Cross-section of the cosets of `small` inside the subgroup `big`."""
    expect = None
    if big.index() is not None and small.index() is not None:
        assert small.index() % big.index() == 0
        expect = small.index() // big.index()
    return cross_section(ctx, small, big.gens(), expect=expect, cap=cap)


# ---------------------------------------------------------------------------
# normal core
# ---------------------------------------------------------------------------

def _perm_closure(perms, cap=2000000):
    n = len(perms[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for q in perms:
                r = tuple(p[q[i]] for i in range(n))
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
                    if len(seen) > cap:
                        raise CapExceeded("permutation closure cap %d" % cap)
        frontier = nxt
    return seen


def _nonnormality_witness(ctx, sub, radius=3):
    """(t, h) with t h t^-1 outside the subgroup, or None if none found."""
    try:
        hs = sub.gens()
    except NotImplementedError:
        return None
    for t in sorted(ctx.ball(radius), key=ctx.key):
        for h in hs:
            if not sub.member(ctx.conj(t, h)):
                return (t, h)
    return None


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def normal_core(ctx, sub, candidate=None, cap=300000):
    """The intersection of all conjugates of `sub`, with a certificate.

    Three exact routes:
      * the family certifies normality -> the core is the subgroup itself;
      * a candidate normal subgroup of prime index ratio is supplied -> the
        squeeze argument (candidate <= core <= sub, sub not normal) pins it;
      * small declared index -> the core is cut out by the full transversal
        and its index is the order of the coset permutation group.
    """
    if sub.normality() is True:
        return sub, {"route": "self_normal"}
    if candidate is not None:
        assert candidate.normality() is True, "candidate must certify normality"
        for h in candidate.gens():
            assert sub.member(h), "candidate not inside the subgroup"
        space = coset_table(ctx, sub, cap=cap)
        for x in space.reps:
            xi = ctx.inv(x)
            for h in candidate.gens():
                # x^-1 (candidate) x is generated by these conjugates
                assert sub.member(ctx.mul(ctx.mul(xi, h), x)), (x, h)
        ci, si = candidate.index(), sub.index()
        assert ci is not None and si is not None and ci % si == 0
        ratio = ci // si
        if _is_prime(ratio):
            wit = _nonnormality_witness(ctx, sub)
            assert wit is not None, "no non-normality witness found"
            return candidate, {
                "route": "squeeze",
                "ratio": ratio,
                "witness": wit,
            }
        # non-prime ratio: fall through to an exhaustive route and use the
        # candidate as a cross-check instead of a certificate
    if isinstance(sub, FiniteSubset):
        space = coset_table(ctx, sub, cap=cap)
        elems = [
            g for g in sub.elems
            if all(sub.member(ctx.mul(ctx.mul(ctx.inv(x), g), x))
                   for x in space.reps)
        ]
        core = FiniteSubset(ctx, elems, check_closed=False)
        if candidate is not None:
            assert all(core.member(h) for h in candidate.gens())
            assert candidate.index() == core.index(), "candidate is not the core"
        return core, {"route": "finite_intersection", "order": core.order}
    space = coset_table(ctx, sub, cap=cap)
    perms = space.generator_permutations()
    order = len(_perm_closure(list(perms), cap=cap))
    core = NormalCoreOf(sub, space.reps, declared_index=order)
    return core, {"route": "permutation_image", "image_order": order}
