"""Inverse limits of coset spaces along a strictly nested subgroup chain.

A chain spec gives Gamma_1 > Gamma_2 > ... of finite index; points of the
limit are consistent coset chains.  This module validates chains, extracts
cross-sections, rebuilds rank-one parameters whose tails enumerate the
chain (both in the tight cross-section form and in the padded form with
generator balls folded into the shapes), computes normal-core covers, and
decides compatibility / factor maps / isomorphism probes against a chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .groups import (
    Ambient,
    CapExceeded,
    ConjugatedBy,
    ExplicitSet,
    HeisenbergCongruence,
    IntLine,
    IntervalSet,
    LatticeCols,
    ZModulus,
    coset_table,
    cosets_within,
    cross_section,
    normal_core,
)
from .measures import FinMeasure, UniformMeasure, frac, is_uniform
from .cfcore import (
    DEFAULT_THRESHOLD,
    CFParams,
    CFPoint,
    Verdict,
    series_verdict,
)


class OdometerSpec:
    """Memoized access to the chain Gamma_n (n >= 1; level 0 is everything)."""

    def __init__(self, ctx, gamma_rule, depth_cap=32, name=None, core_hint=None):
        self.ctx = ctx
        self._rule = gamma_rule
        self.depth_cap = depth_cap
        self.name = name
        self._core_hint = core_hint
        self._memo = {}

    def gamma(self, n):
        assert 0 <= n <= self.depth_cap, n
        if n == 0:
            return Ambient(self.ctx)
        if n not in self._memo:
            self._memo[n] = self._rule(self, n)
        return self._memo[n]

    def core_hint(self, n):
        if self._core_hint is None:
            return None
        return self._core_hint(self, n)


@dataclass(frozen=True)
class CosetChain:
    reps: tuple  # representative g_n of the level-n coset, n = 1..N

    def depth(self):
        return len(self.reps)


def identity_chain(spec, N):
    return CosetChain((spec.ctx.identity,) * N)


def check_chain(spec, y):
    for n in range(1, y.depth()):
        r, r2 = y.reps[n - 1], y.reps[n]
        assert spec.gamma(n).member(spec.ctx.mul(spec.ctx.inv(r), r2)), \
            "chain inconsistent between levels %d and %d" % (n, n + 1)
    return y


def chain_keys(spec, y):
    return tuple(spec.gamma(n + 1).coset_key(r) for n, r in enumerate(y.reps))


def chains_equal(spec, y1, y2):
    assert y1.depth() == y2.depth()
    return chain_keys(spec, y1) == chain_keys(spec, y2)


def odometer_act(spec, g, y):
    return CosetChain(tuple(spec.ctx.mul(g, r) for r in y.reps))


# ---------------------------------------------------------------------------
# chain validation
# ---------------------------------------------------------------------------

@dataclass
class ChainReport:
    ok: bool
    stages: list
    faithful: list

    def to_json(self):
        return {"ok": self.ok, "stages": self.stages, "faithful": self.faithful}


def validate_chain(spec, depth=8, ball_radius=2, witness_cap=4096):
    """Nesting (exact, via generators), strictness witnesses, and a bounded
    faithfulness probe: every short word must escape some conjugate of some
    probed level."""
    ctx = spec.ctx
    depth = min(depth, spec.depth_cap)
    stages = []
    ok = True
    for n in range(1, depth):
        big, small = spec.gamma(n), spec.gamma(n + 1)
        nested = all(big.member(h) for h in small.gens())
        witness = None
        if nested:
            reps = cosets_within(ctx, big, small, cap=witness_cap)
            extra = [r for r in reps if r != ctx.identity]
            witness = extra[0] if extra else None
        strict = nested and witness is not None and not small.member(witness)
        ok = ok and nested and strict
        stages.append({
            "n": n,
            "nested": nested,
            "strict": strict,
            "witness": witness,
            "ratio": (None if big.index() is None or small.index() is None
                      else small.index() // big.index()),
        })
    faithful = []
    for b in sorted(ctx.ball(ball_radius), key=ctx.key):
        if b == ctx.identity:
            continue
        found = None
        for n in range(1, depth + 1):
            sub = spec.gamma(n)
            if not sub.member(b):
                found = (n, ctx.identity)
                break
            hit = False
            for t in sorted(ctx.ball(ball_radius), key=ctx.key):
                if not sub.member(ctx.mul(ctx.mul(ctx.inv(t), b), t)):
                    found = (n, t)
                    hit = True
                    break
            if hit:
                break
        ok = ok and found is not None
        faithful.append({"element": b, "separated_by": found})
    return ChainReport(ok=ok, stages=stages, faithful=faithful)


# ---------------------------------------------------------------------------
# cross-sections and the tight rank-one form
# ---------------------------------------------------------------------------

def cross_sections(spec, N):
    """D_n: least representatives of Gamma_n-cosets inside Gamma_{n-1}."""
    ctx = spec.ctx
    out = []
    for n in range(1, N + 1):
        if n == 1:
            D = cross_section(ctx, spec.gamma(1), ctx.generators,
                              expect=spec.gamma(1).index())
        else:
            D = cosets_within(ctx, spec.gamma(n - 1), spec.gamma(n))
        assert D[0] == ctx.identity
        out.append(D)
    return out


def omega_check(spec, Ds, N):
    """Products d_1 ... d_n must enumerate the level-n cosets bijectively."""
    ctx = spec.ctx
    counts = []
    for n in range(1, N + 1):
        sub = spec.gamma(n)
        keys = set()
        total = 0
        for tup in itertools.product(*Ds[:n]):
            keys.add(sub.coset_key(ctx.prod(tup)))
            total += 1
        assert len(keys) == total, "level-%d products collide" % n
        if sub.index() is not None:
            assert total == sub.index()
        counts.append(total)
    return counts


def rank_one_odometer_params(spec, N, kappas=None):
    """Tight parameters: C_n = D_n, F_n = D_1 ... D_n, product weights."""
    ctx = spec.ctx
    Ds = cross_sections(spec, N)
    omega_check(spec, Ds, N)
    Cs, Fs, kaps, nus = [], [], [], []
    F = [ctx.identity]
    nu = FinMeasure.point(ctx, ctx.identity)
    for n in range(1, N + 1):
        D = Ds[n - 1]
        kap = FinMeasure.uniform(ctx, D) if kappas is None else kappas[n - 1]
        assert set(g for g, _ in kap.items()) == set(D)
        atoms = {}
        for f, w in nu.atoms.items():
            for c, wc in kap.atoms.items():
                p = ctx.mul(f, c)
                assert p not in atoms
                atoms[p] = w * wc
        nu = FinMeasure(ctx, atoms)
        F = list(atoms)
        Cs.append(ExplicitSet(ctx, D))
        Fs.append(ExplicitSet(ctx, F))
        kaps.append(kap)
        nus.append(nu)
    return CFParams.explicit(ctx, Cs, Fs, kaps, nus,
                             name=(spec.name + "~tight" if spec.name else None))


# ---------------------------------------------------------------------------
# padded rank-one form: shapes absorb generator balls level by level
# ---------------------------------------------------------------------------

def _deep_candidates(sub, cap=20000):
    """Elements of the subgroup ordered small-first, central directions first
    where the group has a center to exploit."""
    ctx = sub.ctx
    if isinstance(sub, ZModulus):
        yield 0
        for k in range(1, cap):
            yield k * sub.m
            yield -k * sub.m
        return
    if isinstance(sub, HeisenbergCongruence):
        yield (0, 0, 0)
        for k in range(1, cap):
            yield (0, 0, k * sub.c)
            yield (0, 0, -k * sub.c)
        return
    # generic: BFS over the subgroup's own generators
    seen = {ctx.identity}
    frontier = [ctx.identity]
    yield ctx.identity
    while frontier:
        layer = []
        for a in frontier:
            for s in list(sub.gens()) + [ctx.inv(g) for g in sub.gens()]:
                b = ctx.mul(s, a)
                if b not in seen:
                    seen.add(b)
                    layer.append(b)
                    if len(seen) > cap:
                        raise CapExceeded("deep-candidate cap")
        layer.sort(key=ctx.key)
        for b in layer:
            yield b
        frontier = layer


def _spread(ctx, sub, Fprev, raw, cap=20000):
    """Translate each non-identity coset representative by subgroup elements
    until the Fprev-translates are pairwise disjoint (identity stays put)."""
    chosen = []
    used = set()
    for idx, c in enumerate(raw):
        placed = False
        for gamma in _deep_candidates(sub, cap=cap):
            cc = ctx.mul(c, gamma)
            if idx == 0:
                assert cc == ctx.identity
            block = set(ctx.mul(f, cc) for f in Fprev)
            if not (block & used):
                chosen.append(cc)
                used |= block
                placed = True
                break
        assert placed, "could not separate the translates within the cap"
    return chosen, used


@dataclass
class CoverBuild:
    spec: OdometerSpec
    params: CFParams
    Cs: list  # C_1 .. C_{N+1}
    radii: list


def rank_one_cover(spec, N, radii=None, spread_cap=20000):
    """Parameters whose stage-n copies enumerate Gamma_{n-1}/Gamma_n and whose
    shapes eat a growing generator ball, so every fixed translation lands
    inside the shape after finitely many levels.

    C_n starts from the least cross-section and is right-translated inside
    Gamma_n where needed to keep the copies disjoint; F_n = B_n F_{n-1} C_n
    with B_n the radius-r_n generator ball (r_n = n by default).
    """
    ctx = spec.ctx
    if radii is None:
        radii = list(range(1, N + 2))
    Ds = cross_sections(spec, N + 1)
    Cs = []
    Fprev = [ctx.identity]
    shapes = []
    for n in range(1, N + 2):
        C, used = _spread(ctx, spec.gamma(n), Fprev, Ds[n - 1], cap=spread_cap)
        Cs.append(C)
        if n <= N:
            B = ctx.ball(radii[n - 1])
            shape = set()
            for b in B:
                for fc in used:
                    shape.add(ctx.mul(b, fc))
            shapes.append(ExplicitSet(ctx, shape))
            Fprev = sorted(shape, key=ctx.key)

    def c_rule(T, n):
        return ExplicitSet(ctx, Cs[n - 1])

    def f_rule(T, n):
        return shapes[n - 1]

    params = CFParams.haar_style(
        ctx, c_rule, f_rule,
        name=(spec.name + "~cover" if spec.name else None), depth_cap=N)
    return CoverBuild(spec=spec, params=params, Cs=Cs, radii=radii)


def tau_check(spec, Cs, n):
    """Tuples (c_1, ..., c_{n+1}) -> product coset at level n+1: must be a
    bijection, and uniform stage weights must push to the uniform spread."""
    ctx = spec.ctx
    sub = spec.gamma(n + 1)
    seen = {}
    for tup in itertools.product(*Cs[:n + 1]):
        key = sub.coset_key(ctx.prod(tup))
        assert key not in seen, "tau collides at %r" % (tup,)
        seen[key] = tup
    if sub.index() is not None:
        assert len(seen) == sub.index()
    # uniform kappa: every tuple has the same mass, and each coset is hit once
    return len(seen)


# ---------------------------------------------------------------------------
# normal cores and the cover chain
# ---------------------------------------------------------------------------

@dataclass
class CoverLevel:
    n: int
    core: object
    certificate: dict
    ratio: Optional[int]
    h_reps: tuple
    alternating: bool  # Gamma_{n+1} inside the level-n core


@dataclass
class NormalCoverReport:
    levels: list
    cover_spec: OdometerSpec
    consistency: list  # per gap: list of (i, j) consistent H-entry pairs
    extendable: list  # per gap: H-entries at level n with a successor


def normal_cover(spec, N, h_cap=4096):
    """Per-level normal cores, the difference sets Gamma_n / core_n, their
    chain consistency, and the core chain as a spec of its own."""
    ctx = spec.ctx
    levels = []
    for n in range(1, N + 1):
        sub = spec.gamma(n)
        core, cert = normal_core(ctx, sub, candidate=spec.core_hint(n))
        ratio = None
        if core.index() is not None and sub.index() is not None:
            ratio = core.index() // sub.index()
        if ratio is not None and ratio <= h_cap:
            h_reps = cross_section(ctx, core, sub.gens(), expect=ratio)
        else:
            h_reps = (ctx.identity,)
        alternating = True
        if n < N:
            alternating = all(core.member(h) for h in spec.gamma(n + 1).gens())
        levels.append(CoverLevel(n=n, core=core, certificate=cert, ratio=ratio,
                                 h_reps=tuple(h_reps), alternating=alternating))
    consistency = []
    extendable = []
    for n in range(N - 1):
        core_n = levels[n].core
        pairs = set()
        for i, h in enumerate(levels[n].h_reps):
            for j, h2 in enumerate(levels[n + 1].h_reps):
                if core_n.member(ctx.mul(ctx.inv(h), h2)):
                    pairs.add((i, j))
        consistency.append(sorted(pairs))
        extendable.append(sorted(set(i for i, _ in pairs)))
    cores = [lv.core for lv in levels]
    cover_spec = OdometerSpec(
        ctx, lambda S, n: cores[n - 1], depth_cap=N,
        name=(spec.name + "~core" if spec.name else None))
    return NormalCoverReport(levels=levels, cover_spec=cover_spec,
                             consistency=consistency, extendable=extendable)


def count_h_chains(report, depth):
    """Consistent chains of H-entries (one per level) down to `depth`."""
    assert 1 <= depth <= len(report.levels)
    chains = [(i,) for i in range(len(report.levels[0].h_reps))]
    for n in range(depth - 1):
        allowed = set(report.consistency[n])
        chains = [ch + (j,) for ch in chains
                  for j in range(len(report.levels[n + 1].h_reps))
                  if (ch[-1], j) in allowed]
    return chains


def cover_injectivity_check(spec, report, level, cap=4096):
    """Exhaustive sanity check at a small level L: any two elements in the
    same Gamma_{L+1}-coset must share their core_L-coset.  Together with the
    alternating inclusions Gamma_{n+1} <= core_n this makes the projection
    from core-coset chains to plain coset chains one-to-one on deep chains.
    """
    ctx = spec.ctx
    assert 1 <= level < len(report.levels)
    core_L = report.levels[level - 1].core
    fine = report.levels[level].core  # core at level L+1: refines both sides
    gamma_next = spec.gamma(level + 1)
    if fine.index() is None or fine.index() > cap:
        raise CapExceeded("refined level too large for the exhaustive check")
    space = coset_table(ctx, fine, cap=cap)
    buckets = {}
    for r in space.reps:
        buckets.setdefault(gamma_next.coset_key(r), []).append(r)
    for members in buckets.values():
        keys = set(core_L.coset_key(r) for r in members)
        if len(keys) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# compatibility / factor maps / isomorphism probes against a chain
# ---------------------------------------------------------------------------

def odometer_compatibility(T, spec, y=None, depth=12, shift=0,
                           threshold=DEFAULT_THRESHOLD):
    """Stage terms kappa_n({c outside g Gamma_{n-shift} g^-1}).

    shift=0 pairs stage n with level n; shift=1 pairs it with level n-1,
    which is the right certificate when the copies C_n live one level up
    the chain (level 0 means no constraint, term 0).
    """
    ctx = T.ctx
    depth = min(depth, min(T.depth_cap, spec.depth_cap + shift))
    terms = []
    for n in range(1, depth + 1):
        m = n - shift
        if m < 1:
            terms.append(Fraction(0))
            continue
        g = ctx.identity if y is None or m > y.depth() else y.reps[m - 1]
        sub = spec.gamma(m) if g == ctx.identity else ConjugatedBy(spec.gamma(m), g)
        terms.append(T.kappa(n).mass(lambda c: not sub.member(c)))
    return terms, series_verdict(terms, threshold,
                                 note="chain escape masses (shift=%d)" % shift)


def odometer_factor_map(T, spec, x, y=None, levels=None, window=3):
    """Level-by-level stabilized cosets of f_m g_l along the known tail.

    Returns per-level dicts with the stabilized coset key (or None) and a
    representative; also checks the stabilized levels form a consistent
    chain.
    """
    ctx = T.ctx
    if levels is None:
        levels = min(spec.depth_cap, x.depth())
    fs = [x.f]
    f = x.f
    for c in x.tail:
        f = ctx.mul(f, c)
        fs.append(f)
    out = []
    chain_reps = []
    for l in range(1, levels + 1):
        g = ctx.identity if y is None or l > y.depth() else y.reps[l - 1]
        sub = spec.gamma(l)
        trace = [sub.coset_key(ctx.mul(fm, g)) for fm in fs]
        stable = len(trace) >= window and len(set(
            map(repr, trace[-window:]))) == 1
        rep = ctx.mul(fs[-1], g) if stable else None
        out.append({"level": l, "stable": stable,
                    "key": trace[-1] if stable else None, "trace": trace})
        chain_reps.append(rep)
    consistent = True
    for l in range(len(chain_reps) - 1):
        a, b = chain_reps[l], chain_reps[l + 1]
        if a is not None and b is not None:
            if spec.gamma(l + 1).coset_key(a) != spec.gamma(l + 1).coset_key(b):
                consistent = False
    return {"levels": out, "consistent": consistent}


def _coset_masses_over_shape(T, spec, m, l, g):
    """nu_m mass of each level-l coset class within the shape F_m."""
    ctx = T.ctx
    sub = spec.gamma(l)
    nu = T.nu(m)
    F = T.F(m)
    if (isinstance(ctx, IntLine) and isinstance(sub, ZModulus)
            and isinstance(F, IntervalSet) and is_uniform(nu)):
        M = sub.m
        out = {}
        for key in range(M):
            t = (key - g) % M
            cnt = (F.h - 1 - t) // M + 1 if t < F.h else 0
            if cnt:
                out[key] = nu.w * cnt
        return out
    assert F.small, "shape too large and no counting shortcut applies"
    out = {}
    for f in F:
        key = sub.coset_key(ctx.mul(f, g))
        out[key] = out.get(key, Fraction(0)) + nu.weight(f)
    return out


@dataclass
class IsoReport:
    passes: bool
    n: int
    eps: Fraction
    envelopes: dict  # (l, m) -> exact minimal symmetric-difference mass
    witness: Optional[dict] = None
    min_envelope: Optional[Fraction] = None

    def to_json(self):
        from .measures import fmt_frac

        return {
            "passes": self.passes,
            "n": self.n,
            "eps": fmt_frac(self.eps),
            "envelopes": {
                "%d,%d" % lm: fmt_frac(v) for lm, v in sorted(self.envelopes.items())
            },
            "witness": None if self.witness is None else {
                "l": self.witness["l"], "M": self.witness["M"],
                "target_classes": [repr(k) for k in self.witness["target_classes"]],
            },
            "min_envelope": None if self.min_envelope is None
            else fmt_frac(self.min_envelope),
        }


def isomorphism_check(T, spec, n, eps, l_max=8, m_max=8, y=None,
                      enum_cap=1 << 20, exhaustive_classes=8):
    """Can the depth-n tail sets be recovered from finitely many chain levels?

    For each probe level l and depth m, the exact lower envelope over all
    target unions D of level-l coset classes of
        nu_m( (C_{n+1} ... C_m)  symm-diff  {f in F_m : f g_l in D} )
    is sum_classes min(inside, outside); the check passes when some level
    drives it under eps for every probed depth beyond some M.
    """
    ctx = T.ctx
    assert n < m_max <= T.depth_cap and 1 <= l_max <= spec.depth_cap
    envelopes = {}
    details = {}
    S = [ctx.identity]
    for m in range(n + 1, m_max + 1):
        S = [ctx.mul(s, c) for s in S for c in T.C(m)]
        assert len(S) <= enum_cap
        nu = T.nu(m)
        for l in range(1, l_max + 1):
            g = ctx.identity if y is None or l > y.depth() else y.reps[l - 1]
            sub = spec.gamma(l)
            inside = {}
            for f in S:
                key = sub.coset_key(ctx.mul(f, g))
                inside[key] = inside.get(key, Fraction(0)) + nu.weight(f)
            total = _coset_masses_over_shape(T, spec, m, l, g)
            env = Fraction(0)
            chosen = []
            for key, tot in total.items():
                a = inside.get(key, Fraction(0))
                b = tot - a
                assert b >= 0
                env += min(a, b)
                if b <= a:
                    chosen.append(key)
            if len(total) <= exhaustive_classes:
                # brute force over every target union as a cross-check
                keys = sorted(total, key=repr)
                best = None
                for mask in range(1 << len(keys)):
                    D = set(k for i, k in enumerate(keys) if mask >> i & 1)
                    diff = Fraction(0)
                    for k in keys:
                        a = inside.get(k, Fraction(0))
                        diff += (total[k] - a) if k in D else a
                    best = diff if best is None else min(best, diff)
                assert best == env, "envelope disagrees with brute force"
            envelopes[(l, m)] = env
            details[(l, m)] = chosen
    witness = None
    for l in range(1, l_max + 1):
        for M in range(n + 1, m_max + 1):
            if all(envelopes[(l, m)] < eps for m in range(M, m_max + 1)):
                witness = {"l": l, "M": M,
                           "target_classes": details[(l, m_max)]}
                break
        if witness:
            break
    return IsoReport(
        passes=witness is not None,
        n=n,
        eps=frac(eps),
        envelopes=envelopes,
        witness=witness,
        min_envelope=min(envelopes.values()) if envelopes else None,
    )
