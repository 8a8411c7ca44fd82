"""Finitely supported measures on a group, with exact rational weights.

Two representations: explicit atom dicts, and uniform measures over a
(possibly huge) structured support where only the common weight and the
support size are stored.  All weights are fractions.Fraction; nothing in
this module touches floats.
"""

from __future__ import annotations

from fractions import Fraction

from .groups import ExplicitSet, as_set


def frac(x):
    if isinstance(x, Fraction):
        return x
    assert isinstance(x, int), x
    return Fraction(x)


def fmt_frac(q):
    q = frac(q)
    return "%d/%d" % (q.numerator, q.denominator)


def parse_frac(s):
    if isinstance(s, (int, Fraction)):
        return frac(s)
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den) if den else 1)


class FinMeasure:
    """Explicit finitely supported measure; zero-weight atoms are dropped."""

    kind = "explicit"

    def __init__(self, ctx, atoms):
        self.ctx = ctx
        clean = {}
        for g, w in atoms.items():
            w = frac(w)
            assert w >= 0, (g, w)
            if w > 0:
                clean[ctx.check(g)] = w
        self.atoms = clean
        self.total = sum(clean.values(), Fraction(0))

    @classmethod
    def uniform(cls, ctx, support):
        support = list(support)
        assert support
        w = Fraction(1, len(support))
        return cls(ctx, {g: w for g in support})

    @classmethod
    def point(cls, ctx, g):
        return cls(ctx, {g: Fraction(1)})

    @classmethod
    def from_weights(cls, ctx, pairs):
        return cls(ctx, dict(pairs))

    def weight(self, g):
        return self.atoms.get(g, Fraction(0))

    @property
    def support(self):
        return ExplicitSet(self.ctx, self.atoms.keys())

    def support_size(self):
        return len(self.atoms)

    def items(self):
        return sorted(self.atoms.items(), key=lambda kv: self.ctx.key(kv[0]))

    def mass(self, pred):
        return sum((w for g, w in self.atoms.items() if pred(g)), Fraction(0))

    def mass_of(self, subset):
        return sum((w for g, w in self.atoms.items() if g in subset), Fraction(0))

    def scale(self, r):
        r = frac(r)
        assert r > 0
        return FinMeasure(self.ctx, {g: w * r for g, w in self.atoms.items()})

    def normalize(self):
        assert self.total > 0
        return self.scale(Fraction(1) / self.total)

    def restrict(self, subset):
        return FinMeasure(
            self.ctx, {g: w for g, w in self.atoms.items() if g in subset}
        )

    def convolve(self, other):
        """Pushforward of the product measure under multiplication (self first)."""
        assert self.ctx is other.ctx
        out = {}
        mul = self.ctx.mul
        for a, wa in self.atoms.items():
            for b, wb in other.atoms.items():
                p = mul(a, b)
                out[p] = out.get(p, Fraction(0)) + wa * wb
        return FinMeasure(self.ctx, out)

    def map_through(self, fn):
        out = {}
        for g, w in self.atoms.items():
            h = fn(g)
            out[h] = out.get(h, Fraction(0)) + w
        return FinMeasure(self.ctx, out)

    def __eq__(self, other):
        if isinstance(other, UniformMeasure):
            other = other.to_explicit()
        return isinstance(other, FinMeasure) and self.atoms == other.atoms

    def max_weight(self):
        return max(self.atoms.values())

    def to_json(self):
        return {
            "kind": self.kind,
            "atoms": [[g, fmt_frac(w)] for g, w in self.items()],
        }


class UniformMeasure:
    """Constant weight on a structured support; size arithmetic is exact."""

    kind = "uniform"

    def __init__(self, ctx, support, w):
        self.ctx = ctx
        self.supp = support
        self.w = frac(w)
        assert self.w > 0
        self.total = self.w * len(support)

    def weight(self, g):
        return self.w if g in self.supp else Fraction(0)

    @property
    def support(self):
        return self.supp

    def support_size(self):
        return len(self.supp)

    def items(self):
        assert self.supp.small, "support too large to enumerate"
        return [(g, self.w) for g in self.supp]

    def mass(self, pred):
        assert self.supp.small, "support too large to enumerate"
        return self.w * sum(1 for g in self.supp if pred(g))

    def mass_of(self, subset):
        return self.w * sum(1 for g in subset if g in self.supp)

    def scale(self, r):
        return UniformMeasure(self.ctx, self.supp, self.w * frac(r))

    def normalize(self):
        return UniformMeasure(self.ctx, self.supp, Fraction(1, len(self.supp)))

    def restrict(self, subset):
        return FinMeasure(self.ctx, {g: self.w for g in subset if g in self.supp})

    def to_explicit(self):
        assert self.supp.small, "support too large to enumerate"
        return FinMeasure(self.ctx, {g: self.w for g in self.supp})

    def convolve(self, other):
        return self.to_explicit().convolve(
            other.to_explicit() if isinstance(other, UniformMeasure) else other
        )

    def max_weight(self):
        return self.w

    def __eq__(self, other):
        if isinstance(other, FinMeasure):
            return self.to_explicit() == other
        return (
            isinstance(other, UniformMeasure)
            and self.supp == other.supp
            and self.w == other.w
        )

    def to_json(self):
        return {
            "kind": self.kind,
            "support_size": len(self.supp),
            "weight": fmt_frac(self.w),
        }


def convolve_all(ctx, measures):
    out = None
    for m in measures:
        if isinstance(m, UniformMeasure):
            m = m.to_explicit()
        out = m if out is None else out.convolve(m)
    assert out is not None
    return out


def is_uniform(m):
    return isinstance(m, UniformMeasure)
