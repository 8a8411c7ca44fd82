"""Stage data, validation, points, the action, and cocycles.

A parameter object holds, per stage n >= 1, a finite subset C_n with a
probability weighting kappa_n, and a finite "tower shape" F_n carrying the
level measure nu_n (F_0 = {1}, nu_0 = delta_1).  The structural laws checked
by validate_params:

  * 1 in F_n and C_n, #C_n > 1,
  * F_{n-1} C_n inside F_n with the translates F_{n-1} c pairwise disjoint,
  * nu_n(f c) = nu_{n-1}(f) kappa_n(c),
  * supp kappa_n = C_n, supp nu_n = F_n,
  * the running product of max kappa_n should die out (probed, not proved).

Points are (n, f, tail): a base level f in F_n plus finitely many known
coordinates c_{n+1}, c_{n+2}, ...  Left translation by g moves f and rebases
deeper whenever g f c_{n+1} ... c_m leaves the shape.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .groups import (
    BoxSet,
    CapExceeded,
    ExplicitSet,
    Heisenberg,
    IntLine,
    IntervalSet,
    as_set,
    box_corners,
    box_right_shift_overlap,
    box_shift_overlap,
    interval_shift_overlap,
)
from .measures import FinMeasure, UniformMeasure, frac, is_uniform

DEFAULT_THRESHOLD = Fraction(1, 10 ** 6)
DEFAULT_VALIDATE_DEPTH = 8
DEFAULT_PROBE_DEPTH = 12
ENUM_CAP = 1 << 21


class NeedsDeeperTail(Exception):
    """The requested operation ran out of known coordinates of the point."""


# ---------------------------------------------------------------------------
# verdicts for bounded-depth summability / vanishing probes
# ---------------------------------------------------------------------------

TERMWISE_ZERO = "TermwiseZero"
CONVERGENT = "ConvergentIndicated"
DIVERGENT = "DivergentIndicated"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Verdict:
    tag: str
    terms: tuple
    partials: tuple
    threshold: Fraction
    stage: Optional[int] = None  # first index of the all-zero tail
    note: str = ""

    def to_json(self):
        from .measures import fmt_frac

        return {
            "tag": self.tag,
            "terms": [fmt_frac(t) for t in self.terms],
            "partials": [fmt_frac(t) for t in self.partials],
            "threshold": fmt_frac(self.threshold),
            "stage": self.stage,
            "note": self.note,
        }


def series_verdict(terms, threshold=DEFAULT_THRESHOLD, note=""):
    """Classify a probed nonnegative term sequence whose sum should be finite.

    All verdicts are bounded-depth indications except TermwiseZero, which
    records an exact all-zero tail within the probe window.
    """
    terms = tuple(frac(t) for t in terms)
    partials = []
    acc = Fraction(0)
    for t in terms:
        acc += t
        partials.append(acc)
    partials = tuple(partials)
    if not terms:
        return Verdict(INCONCLUSIVE, terms, partials, threshold, note=note)
    if terms[-1] == 0:
        stage = len(terms)
        while stage > 0 and terms[stage - 1] == 0:
            stage -= 1
        return Verdict(TERMWISE_ZERO, terms, partials, threshold, stage=stage, note=note)
    if terms[-1] < threshold:
        return Verdict(CONVERGENT, terms, partials, threshold, note=note)
    half = terms[len(terms) // 2:]
    if 4 * terms[-1] <= max(terms) and all(
            b <= a for a, b in zip(half, half[1:])):
        # clear decay across the window
        return Verdict(CONVERGENT, terms, partials, threshold, note=note)
    if min(terms) > 0 and 2 * terms[-1] >= terms[0]:
        # no decay across the window and bounded below by min(terms) > 0
        return Verdict(DIVERGENT, terms, partials, threshold, note=note)
    return Verdict(INCONCLUSIVE, terms, partials, threshold, note=note)


def vanishing_verdict(factors, threshold=DEFAULT_THRESHOLD, note=""):
    """Classify a probed product of factors in (0,1] that should tend to 0."""
    factors = tuple(frac(t) for t in factors)
    partials = []
    acc = Fraction(1)
    for t in factors:
        assert 0 < t <= 1, t
        acc *= t
        partials.append(acc)
    partials = tuple(partials)
    if not factors:
        return Verdict(INCONCLUSIVE, factors, partials, threshold, note=note)
    if partials[-1] < threshold or 4 * partials[-1] <= partials[0]:
        return Verdict(CONVERGENT, factors, partials, threshold, note=note)
    if all(t == 1 for t in factors[len(factors) // 2:]):
        return Verdict(DIVERGENT, factors, partials, threshold, note=note)
    return Verdict(INCONCLUSIVE, factors, partials, threshold, note=note)


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

class CFParams:
    """Memoized stage access: C(n), F(n), kappa(n), nu(n).

    The stage rules are callables taking (params, n) so recursive
    definitions (nu from nu at the previous level, say) stay cheap.
    """

    def __init__(self, ctx, c_rule, f_rule, kappa_rule, nu_rule,
                 depth_cap=64, name=None):
        self.ctx = ctx
        self._c_rule = c_rule
        self._f_rule = f_rule
        self._kappa_rule = kappa_rule
        self._nu_rule = nu_rule
        self.depth_cap = depth_cap
        self.name = name
        self._memo = {}

    def _get(self, tag, rule, n):
        key = (tag, n)
        if key not in self._memo:
            self._memo[key] = rule(self, n)
        return self._memo[key]

    def C(self, n):
        assert 1 <= n <= self.depth_cap, n
        return self._get("C", self._c_rule, n)

    def F(self, n):
        assert 0 <= n <= self.depth_cap, n
        if n == 0:
            return ExplicitSet(self.ctx, [self.ctx.identity])
        return self._get("F", self._f_rule, n)

    def kappa(self, n):
        assert 1 <= n <= self.depth_cap, n
        k = self._get("kappa", self._kappa_rule, n)
        assert k.total == 1, "stage weights must be a probability vector"
        return k

    def nu(self, n):
        assert 0 <= n <= self.depth_cap, n
        if n == 0:
            return FinMeasure.point(self.ctx, self.ctx.identity)
        return self._get("nu", self._nu_rule, n)

    @classmethod
    def explicit(cls, ctx, Cs, Fs, kappas, nus, name=None):
        """From per-stage lists: Cs[i] is C_{i+1}, Fs[i] is F_{i+1}, etc."""
        Cs = [as_set(ctx, c) for c in Cs]
        Fs = [as_set(ctx, f) for f in Fs]
        depth = len(Cs)
        assert len(Fs) == depth and len(kappas) == depth and len(nus) == depth
        return cls(
            ctx,
            lambda T, n: Cs[n - 1],
            lambda T, n: Fs[n - 1],
            lambda T, n: kappas[n - 1],
            lambda T, n: nus[n - 1],
            depth_cap=depth,
            name=name,
        )

    @classmethod
    def haar_style(cls, ctx, c_rule, f_rule, name=None, depth_cap=64):
        """Uniform kappa on each C_n and uniform nu_n with the product weight."""

        def kappa_rule(T, n):
            return FinMeasure.uniform(ctx, T.C(n))

        def nu_rule(T, n):
            w = Fraction(1)
            for m in range(1, n + 1):
                w /= len(T.C(m))
            return UniformMeasure(ctx, T.F(n), w)

        return cls(ctx, c_rule, f_rule, kappa_rule, nu_rule,
                   depth_cap=depth_cap, name=name)


@dataclass(frozen=True)
class CFPoint:
    n: int
    f: object
    tail: tuple

    def depth(self):
        return self.n + len(self.tail)


def check_point(T, x):
    T.ctx.check(x.f)
    assert x.f in T.F(x.n), (x.n, x.f)
    for i, c in enumerate(x.tail):
        assert c in T.C(x.n + 1 + i), (x.n + 1 + i, c)
    return x


def rebase(T, x, m):
    """Rewrite the point with base level m >= x.n (consumes tail entries)."""
    assert x.n <= m <= x.depth(), (x.n, m, x.depth())
    f = x.f
    for i in range(m - x.n):
        f = T.ctx.mul(f, x.tail[i])
    return CFPoint(m, f, x.tail[m - x.n:])


def act(T, g, x):
    """Left translation by g: find the least level whose shape absorbs g."""
    f = x.f
    for m in range(x.n, x.depth() + 1):
        if m > x.n:
            f = T.ctx.mul(f, x.tail[m - 1 - x.n])
        gf = T.ctx.mul(g, f)
        if gf in T.F(m):
            return CFPoint(m, gf, x.tail[m - x.n:])
    raise NeedsDeeperTail("translation by %r not resolved within %d known levels"
                          % (g, len(x.tail)))


def cylinder_measure(T, n, f):
    assert f in T.F(n), (n, f)
    return T.nu(n).weight(f)


def rn_cocycle(T, x, y):
    """Density ratio between two points with the same base level and tail shape."""
    assert x.n == y.n and len(x.tail) == len(y.tail)
    num = T.nu(x.n).weight(x.f)
    den = T.nu(y.n).weight(y.f)
    assert num > 0 and den > 0
    val = Fraction(num, 1) / den
    for i, (cx, cy) in enumerate(zip(x.tail, y.tail)):
        k = T.kappa(x.n + 1 + i)
        wx, wy = k.weight(cx), k.weight(cy)
        assert wx > 0 and wy > 0
        val *= Fraction(wx, 1) / wy
    return val


def rn_derivative(T, g, x):
    """d(mu o g)/d(mu) at x, i.e. the cocycle between g.x and x."""
    y = act(T, g, x)
    xm = rebase(T, x, y.n)
    return rn_cocycle(T, y, xm)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class StageReport:
    n: int
    ok: bool
    violations: list = field(default_factory=list)
    route: str = ""


@dataclass
class ValidationReport:
    ok: bool
    stages: list
    vanishing: Verdict

    def to_json(self):
        return {
            "ok": self.ok,
            "stages": [
                {"n": s.n, "ok": s.ok, "route": s.route, "violations": s.violations}
                for s in self.stages
            ],
            "max_weight_product": self.vanishing.to_json(),
        }


def _validate_stage_enum(T, n, rep):
    ctx = T.ctx
    Fp, C, Fn = T.F(n - 1), T.C(n), T.F(n)
    kap, nup, nun = T.kappa(n), T.nu(n - 1), T.nu(n)
    if ctx.identity not in C:
        rep.violations.append("identity missing from C_%d" % n)
    if len(C) < 2:
        rep.violations.append("#C_%d < 2" % n)
    if ctx.identity not in Fn:
        rep.violations.append("identity missing from F_%d" % n)
    supp = set(g for g, _ in kap.items())
    if supp != set(C):
        rep.violations.append("supp kappa_%d != C_%d" % (n, n))
    if is_uniform(nun):
        if nun.support != Fn:
            rep.violations.append("supp nu_%d != F_%d" % (n, n))
    else:
        if Fn.small and set(g for g, _ in nun.items()) != set(Fn):
            rep.violations.append("supp nu_%d != F_%d" % (n, n))
    seen = set()
    for f in Fp:
        wf = nup.weight(f)
        for c in C:
            p = ctx.mul(f, c)
            if p not in Fn:
                rep.violations.append("F_%d C_%d escapes F_%d at %r" % (n - 1, n, n, p))
                return
            if p in seen:
                rep.violations.append("translates of F_%d collide at %r" % (n - 1, p))
                return
            seen.add(p)
            if nun.weight(p) != wf * kap.weight(c):
                rep.violations.append(
                    "copy weights broken at f=%r c=%r (level %d)" % (f, c, n))
                return


def _validate_stage_structural(T, n, rep):
    """Exact checks on interval / box shapes too large to enumerate."""
    ctx = T.ctx
    Fp, C, Fn = T.F(n - 1), T.C(n), T.F(n)
    kap, nup, nun = T.kappa(n), T.nu(n - 1), T.nu(n)
    assert is_uniform(nup) and is_uniform(nun), "structural route needs uniform levels"
    if ctx.identity not in C:
        rep.violations.append("identity missing from C_%d" % n)
    if len(C) < 2:
        rep.violations.append("#C_%d < 2" % n)
    if nun.support != Fn:
        rep.violations.append("supp nu_%d != F_%d" % (n, n))
    supp = set(g for g, _ in kap.items())
    if supp != set(C):
        rep.violations.append("supp kappa_%d != C_%d" % (n, n))
    for c in C:
        if nun.w != nup.w * kap.weight(c):
            rep.violations.append("copy weights broken at c=%r (level %d)" % (c, n))
            break
    cs = sorted(C, key=ctx.key)
    if isinstance(ctx, IntLine):
        assert isinstance(Fp, IntervalSet) and isinstance(Fn, IntervalSet)
        h0, h1 = Fp.h, Fn.h
        for c in cs:
            if not (0 <= c and c + h0 <= h1):
                rep.violations.append("F_%d + %d escapes F_%d" % (n - 1, c, n))
        for a, b in zip(cs, cs[1:]):
            if b - a < h0:
                rep.violations.append("translates %d and %d of F_%d collide" % (a, b, n - 1))
    elif isinstance(ctx, Heisenberg):
        assert isinstance(Fp, BoxSet) and isinstance(Fn, BoxSet)
        # f -> f c is affine in each coordinate of f, so the image of the box
        # lies in the target box iff all corners do
        for c in cs:
            for corner in box_corners(Fp.dims):
                if ctx.mul(corner, c) not in Fn:
                    rep.violations.append("F_%d %r escapes F_%d" % (n - 1, c, n))
                    break
        # F c and F c' meet iff F meets F (c c'^-1) as a right translate
        for c, c2 in itertools.combinations(cs, 2):
            d = ctx.mul(c, ctx.inv(c2))
            if box_right_shift_overlap(Fp.dims, d) != 0:
                rep.violations.append(
                    "translates %r and %r of F_%d collide" % (c, c2, n - 1))
    else:
        raise CapExceeded("no structural validation for %s shapes" % ctx.kind)


def validate_params(T, depth=DEFAULT_VALIDATE_DEPTH, threshold=DEFAULT_THRESHOLD):
    depth = min(depth, T.depth_cap)
    stages = []
    maxes = []
    for n in range(1, depth + 1):
        rep = StageReport(n=n, ok=True)
        Fp = T.F(n - 1)
        if Fp.small and len(Fp) * len(T.C(n)) <= ENUM_CAP and T.F(n).small:
            rep.route = "enumerate"
            _validate_stage_enum(T, n, rep)
        else:
            rep.route = "structural"
            _validate_stage_structural(T, n, rep)
        rep.ok = not rep.violations
        stages.append(rep)
        maxes.append(T.kappa(n).max_weight())
    verdict = vanishing_verdict(maxes, threshold,
                                note="running product of max kappa_n")
    ok = all(s.ok for s in stages) and verdict.tag != DIVERGENT
    return ValidationReport(ok=ok, stages=stages, vanishing=verdict)


# ---------------------------------------------------------------------------
# domain probes (how much of the space a fixed translation reaches)
# ---------------------------------------------------------------------------

def check_minimal_domain(T, g, n, depth=DEFAULT_PROBE_DEPTH):
    """Least m with g F_n C_{n+1} ... C_m inside F_m, or None within the probe."""
    depth = min(depth, T.depth_cap)
    ctx = T.ctx
    S = list(T.F(n))
    for m in range(n, depth + 1):
        if m > n:
            S = [ctx.mul(s, c) for s in S for c in T.C(m)]
            if len(S) > ENUM_CAP:
                raise CapExceeded("minimal-domain support blew past %d" % ENUM_CAP)
        Fm = T.F(m)
        if all(ctx.mul(g, s) in Fm for s in S):
            return m
    return None


def check_measure_domain(T, g, depth=DEFAULT_PROBE_DEPTH, start=0,
                         threshold=DEFAULT_THRESHOLD):
    """Deficit 1 - nu_m(S_m cap g^-1 F_m)/nu_m(S_m) for S_m = F_start C.. C_m.

    The deficits should tend to 0; bounded-depth verdict attached.
    """
    depth = min(depth, T.depth_cap)
    ctx = T.ctx
    S = [(f, T.nu(start).weight(f)) for f in T.F(start)]
    deficits = []
    for m in range(start + 1, depth + 1):
        nxt = []
        for f, w in S:
            kap = T.kappa(m)
            for c, wc in kap.items():
                nxt.append((ctx.mul(f, c), w * wc))
        S = nxt
        if len(S) > ENUM_CAP:
            raise CapExceeded("measure-domain support blew past %d" % ENUM_CAP)
        Fm = T.F(m)
        total = sum(w for _, w in S)
        inside = sum(w for f, w in S if ctx.mul(g, f) in Fm)
        deficits.append(1 - inside / total)
    return deficits, series_verdict(deficits, threshold,
                                    note="domain deficits for %r" % (g,))


# ---------------------------------------------------------------------------
# shape asymptotics
# ---------------------------------------------------------------------------

def haar_totals(T, depth=DEFAULT_PROBE_DEPTH, threshold=DEFAULT_THRESHOLD):
    """Size ratios |F_{n+1}|/(|F_n| #C_{n+1}) and the level totals nu_n(F_n).

    The running product of the ratios tracks whether the invariant version
    of the measure stays finite.
    """
    depth = min(depth, T.depth_cap)
    factors = []
    for n in range(depth):
        factors.append(Fraction(len(T.F(n + 1)), len(T.F(n)) * len(T.C(n + 1))))
    partials = []
    acc = Fraction(1)
    for q in factors:
        acc *= q
        partials.append(acc)
    totals = [T.nu(n).total for n in range(depth + 1)]
    return {"factors": factors, "partials": partials, "totals": totals}


def folner_defect(T, g, n):
    """(nu(F \\ gF) + nu(F \\ g^-1 F)) / nu(F): two-sided escape under g."""
    ctx = T.ctx
    F = T.F(n)
    nu = T.nu(n)
    if is_uniform(nu):
        if isinstance(ctx, IntLine) and isinstance(F, IntervalSet):
            loss = 2 * F.h - interval_shift_overlap(F.h, g) \
                - interval_shift_overlap(F.h, -g)
            return Fraction(loss, F.h)
        if isinstance(ctx, Heisenberg) and isinstance(F, BoxSet):
            size = len(F)
            loss = 2 * size - box_shift_overlap(F.dims, g) \
                - box_shift_overlap(F.dims, ctx.inv(g))
            return Fraction(loss, size)
    assert F.small, "no exact shortcut for this shape; support too large"
    ginv = ctx.inv(g)
    out = nu.mass(lambda f: ctx.mul(g, f) not in F)
    out += nu.mass(lambda f: ctx.mul(ginv, f) not in F)
    return out / nu.total


def folner_series(T, g, depth=DEFAULT_PROBE_DEPTH, threshold=DEFAULT_THRESHOLD):
    depth = min(depth, T.depth_cap)
    terms = [folner_defect(T, g, n) for n in range(1, depth + 1)]
    return terms, series_verdict(terms, threshold,
                                 note="boundary defects for %r" % (g,))


# ---------------------------------------------------------------------------
# telescoping
# ---------------------------------------------------------------------------

def check_schedule(l):
    l = tuple(int(v) for v in l)
    assert len(l) >= 2 and l[0] == 0, l
    assert all(a < b for a, b in zip(l, l[1:])), l
    return l


def telescope(T, l):
    """Group stages into the blocks (l_k, l_{k+1}]; returns new params.

    Point transport: a point based at level l_a whose tail covers complete
    blocks maps to the telescoped point with the blocks multiplied out.
    """
    l = check_schedule(l)
    assert l[-1] <= T.depth_cap

    def c_rule(S, k):
        ctx = T.ctx
        prods = [ctx.identity]
        for m in range(l[k - 1] + 1, l[k] + 1):
            prods = [ctx.mul(p, c) for p in prods for c in T.C(m)]
        out = frozenset(prods)
        assert len(out) == len(prods), "telescoped block products collide"
        return ExplicitSet(ctx, out)

    def kappa_rule(S, k):
        out = T.kappa(l[k - 1] + 1)
        for m in range(l[k - 1] + 2, l[k] + 1):
            out = out.convolve(T.kappa(m))
        return out

    S = CFParams(
        T.ctx,
        c_rule,
        lambda S, k: T.F(l[k]),
        kappa_rule,
        lambda S, k: T.nu(l[k]),
        depth_cap=len(l) - 1,
        name=(T.name + "~tel" if T.name else None),
    )

    def iota(x):
        assert x.n in l, "base level %d is not a block boundary" % x.n
        a = l.index(x.n)
        top = x.depth()
        blocks = []
        b = a
        while b + 1 < len(l) and l[b + 1] <= top:
            blocks.append(T.ctx.prod(x.tail[l[b] - x.n: l[b + 1] - x.n]))
            b += 1
        return CFPoint(a, x.f, tuple(blocks))

    return S, iota


def compose_schedules(l, m):
    """Telescope by l then by m (positions into l) = telescope by this."""
    l = check_schedule(l)
    m = check_schedule(m)
    assert m[-1] < len(l)
    return tuple(l[j] for j in m)


# ---------------------------------------------------------------------------
# passing to a sub-tower (thinning each C_n to A_n)
# ---------------------------------------------------------------------------

def reduce_params(T, A_list, bound=Fraction(1)):
    """Restrict stage n to A_n (prefix given; A_n = C_n beyond it).

    Rejects when the probed mass deficit sum reaches `bound`: past that
    there is no summability certificate for the thinning.  Returns the new
    params, the per-depth scaling products, and the inclusion map on points.
    """
    ctx = T.ctx
    A_sets = []
    deficit = Fraction(0)
    scale_prefix = []
    acc = Fraction(1)
    for i, A in enumerate(A_list):
        n = i + 1
        A = frozenset(A)
        C = set(T.C(n))
        assert A <= C, "A_%d is not inside C_%d" % (n, n)
        assert ctx.identity in A
        assert len(A) >= 2, "thinned stage %d has a single copy" % n
        mass = T.kappa(n).mass_of(A)
        assert mass > 0
        deficit += 1 - mass
        acc *= mass
        scale_prefix.append(acc)
        A_sets.append(ExplicitSet(ctx, A))
    assert deficit < bound, "thinning deficit %s reached the bound %s" % (deficit, bound)

    def c_rule(S, n):
        return A_sets[n - 1] if n <= len(A_sets) else T.C(n)

    def kappa_rule(S, n):
        if n <= len(A_sets):
            return T.kappa(n).restrict(A_sets[n - 1]).normalize()
        return T.kappa(n)

    def scaling(n):
        if n == 0:
            return Fraction(1)
        if n <= len(scale_prefix):
            return scale_prefix[n - 1]
        return scale_prefix[-1] if scale_prefix else Fraction(1)

    def nu_rule(S, n):
        return T.nu(n).scale(Fraction(1) / scaling(n))

    R = CFParams(ctx, c_rule, lambda S, n: T.F(n), kappa_rule, nu_rule,
                 depth_cap=T.depth_cap,
                 name=(T.name + "~red" if T.name else None))

    def iota(x):
        check_point(R, x)
        return check_point(T, CFPoint(x.n, x.f, x.tail))

    return R, scaling, iota
