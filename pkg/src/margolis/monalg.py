"""Graded-commutative monomial algebras over F_p.

Generators carry a degree, a parity, and an exponent range: polynomial
[0, inf), exterior {0, 1}, truncated [0, h), or a Laurent interval
(-inf, emax] / (-inf, inf).  Products exceeding a bounded-above range are
zero (truncation relation); Koszul signs come from merging odd generators
in canonical order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .graded import GradedMap, Window, WindowedGradedSpace
from .fplin import FpMatrix

POLY = (0, None)
EXTERIOR = (0, 1)
LAURENT_FULL = (None, None)


def truncated(h: int):
    """Exponent range of P_h: exponents 0..h-1."""
    return (0, h - 1)


def laurent_upto(emax: int):
    return (None, emax)


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int
    parity: str  # "even" | "odd"
    range: tuple  # (emin or None, emax or None)

    def __post_init__(self):
        if self.degree == 0:
            raise ValueError("degree 0 generators are not allowed")
        if self.parity not in ("even", "odd"):
            raise ValueError(f"bad parity {self.parity!r}")
        if (self.degree % 2 == 0) != (self.parity == "even"):
            raise ValueError(f"generator {self.name}: degree {self.degree} contradicts parity")

    def to_json(self):
        lo, hi = self.range
        return {"name": self.name, "degree": self.degree, "parity": self.parity,
                "range": [lo, hi]}


# A Monomial is a tuple of (generator_index, exponent) pairs, sorted by index,
# exponents nonzero.  The empty tuple is the unit.
Monomial = tuple


class MonomialAlgebra:
    def __init__(self, p: int, generators: list[GeneratorSpec]):
        self.p = p
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for g in generators:
            if g.parity == "odd" and p != 2 and g.range != EXTERIOR:
                raise ValueError(f"odd generator {g.name} must be exterior at odd p")
        self.generators = list(generators)
        self.index = {g.name: i for i, g in enumerate(generators)}

    def gen_degree(self, i: int) -> int:
        return self.generators[i].degree

    def monomial(self, **exps) -> Monomial:
        pairs = []
        for name, e in exps.items():
            if e:
                pairs.append((self.index[name], e))
        return tuple(sorted(pairs))

    def monomial_from_pairs(self, pairs) -> Monomial:
        return tuple(sorted((i, e) for i, e in pairs if e))

    def degree(self, m: Monomial) -> int:
        return sum(self.generators[i].degree * e for i, e in m)

    def monomial_parity(self, m: Monomial) -> int:
        return sum(self.generators[i].degree * e for i, e in m) % 2

    def label(self, m: Monomial) -> str:
        if not m:
            return "1"
        parts = []
        for i, e in m:
            nm = self.generators[i].name
            parts.append(nm if e == 1 else f"{nm}^{e}")
        return "*".join(parts)

    def parse_label(self, s: str) -> Monomial:
        s = s.strip()
        if s == "1":
            return ()
        pairs = []
        for part in s.split("*"):
            if "^" in part:
                nm, e = part.split("^")
                pairs.append((self.index[nm.strip()], int(e)))
            else:
                pairs.append((self.index[part.strip()], 1))
        return self.monomial_from_pairs(pairs)

    def in_range(self, m: Monomial) -> bool:
        for i, e in m:
            lo, hi = self.generators[i].range
            if lo is not None and e < lo:
                return False
            if hi is not None and e > hi:
                return False
        return True

    # -- basis enumeration ------------------------------------------------

    def _check_enumerable(self):
        up = down = False
        for g in self.generators:
            lo, hi = g.range
            if hi is None:  # exponent unbounded above
                if g.degree > 0:
                    up = True
                else:
                    down = True
            if lo is None:  # exponent unbounded below
                if g.degree > 0:
                    down = True
                else:
                    up = True
        if up and down:
            raise ValueError(
                "unbounded exponent directions compensate; infinitely many "
                "monomials per degree"
            )

    def enumerate_monomials(self, window: Window) -> dict[int, list[Monomial]]:
        """All in-range monomials with degree inside window, per degree."""
        self._check_enumerable()
        inf = float("inf")
        n = len(self.generators)
        # suffix bounds on the degree the generators i.. can still contribute
        rmin = [0.0] * (n + 1)
        rmax = [0.0] * (n + 1)
        for i in range(n - 1, -1, -1):
            g = self.generators[i]
            lo, hi = g.range
            if g.degree > 0:
                cmin = -inf if lo is None else lo * g.degree
                cmax = inf if hi is None else hi * g.degree
            else:
                cmin = -inf if hi is None else hi * g.degree
                cmax = inf if lo is None else lo * g.degree
            rmin[i] = rmin[i + 1] + cmin
            rmax[i] = rmax[i + 1] + cmax

        out: dict[int, list[Monomial]] = {}

        def rec(i: int, deg: int, stack: list):
            if i == n:
                if deg in window:
                    out.setdefault(deg, []).append(tuple(stack))
                return
            g = self.generators[i]
            lo, hi = g.range
            d = g.degree
            # window-derived exponent bounds:
            #   window.lo - deg - rmax[i+1] <= e*d <= window.hi - deg - rmin[i+1]
            lo_num = window.lo - deg - rmax[i + 1]
            hi_num = window.hi - deg - rmin[i + 1]
            if d > 0:
                wlo = -inf if lo_num == -inf else -((-int(lo_num)) // d)  # ceil
                whi = inf if hi_num == inf else int(hi_num) // d  # floor
            else:
                wlo = -inf if hi_num == inf else -((-int(hi_num)) // d)  # ceil
                whi = inf if lo_num == -inf else int(lo_num) // d  # floor
            emin = wlo if lo is None else (lo if wlo == -inf else max(lo, int(wlo)))
            emax = whi if hi is None else (hi if whi == inf else min(hi, int(whi)))
            if emin == -inf or emax == inf:
                raise ValueError("enumeration bounds not finite; check generator ranges")
            if emax < emin:
                return
            emin, emax = int(emin), int(emax)
            for e in range(emin, emax + 1):
                if e:
                    stack.append((i, e))
                rec(i + 1, deg + d * e, stack)
                if e:
                    stack.pop()

        rec(0, 0, [])
        for d in out:
            out[d].sort()
        return out

    def min_degree(self):
        """Lower bound of the full algebra's support, or None if unbounded below."""
        inf = float("inf")
        tot = 0
        for g in self.generators:
            lo, hi = g.range
            if g.degree > 0:
                cmin = -inf if lo is None else lo * g.degree
            else:
                cmin = -inf if hi is None else hi * g.degree
            if cmin == -inf:
                return None
            tot += int(cmin)
        return tot

    def enumerate_basis(self, window: Window) -> WindowedGradedSpace:
        monos = self.enumerate_monomials(window)
        basis = {d: [self.label(m) for m in ms] for d, ms in monos.items()}
        return WindowedGradedSpace(self.p, window, basis, support_lo=self.min_degree())

    # -- multiplication ---------------------------------------------------

    def koszul_sign(self, a: Monomial, b: Monomial) -> int:
        """Sign of merging b past a into canonical order."""
        if self.p == 2:
            return 1
        aodd = [i for i, e in a if self.generators[i].degree % 2 and e % 2]
        bodd = [i for i, e in b if self.generators[i].degree % 2 and e % 2]
        inv = sum(1 for x in aodd for y in bodd if x > y)
        return -1 if inv % 2 else 1

    def multiply_monomials(self, a: Monomial, b: Monomial):
        """Return (sign, monomial) or None when a relation kills the product."""
        exps = dict(a)
        for i, e in b:
            exps[i] = exps.get(i, 0) + e
        for i, e in list(exps.items()):
            g = self.generators[i]
            lo, hi = g.range
            if hi is not None and e > hi:
                return None
            if lo is not None and e < lo:
                return None
            if g.parity == "odd" and self.p != 2 and e > 1:
                return None
        sign = self.koszul_sign(a, b)
        return sign, tuple(sorted((i, e) for i, e in exps.items() if e))

    def multiply(self, x: "AlgebraElement", y: "AlgebraElement") -> "AlgebraElement":
        out: dict[Monomial, int] = {}
        for ma, ca in x.terms.items():
            for mb, cb in y.terms.items():
                r = self.multiply_monomials(ma, mb)
                if r is None:
                    continue
                sign, m = r
                c = (out.get(m, 0) + sign * ca * cb) % self.p
                if c:
                    out[m] = c
                elif m in out:
                    del out[m]
        return AlgebraElement(self, out)

    def element(self, terms: dict[Monomial, int]) -> "AlgebraElement":
        return AlgebraElement(self, {m: c % self.p for m, c in terms.items() if c % self.p})

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(self, {(): 1})

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def gen_element(self, name: str, exp: int = 1) -> "AlgebraElement":
        return AlgebraElement(self, {self.monomial_from_pairs([(self.index[name], exp)]): 1})

    # -- derivations -------------------------------------------------------

    def derivation_monomial(self, m: Monomial, values: dict[int, "AlgebraElement"]) -> "AlgebraElement":
        """Leibniz extension D(xy) = D(x)y + (-1)^{|x|} x D(y) at monomial m.

        Products are formed left to right so multiply() supplies the correct
        canonical-form Koszul signs.
        """
        if not m:
            return self.zero()
        (i, e), tail = m[0], m[1:]
        tail_elem = self.element({tail: 1})
        out = self.zero()
        val = values.get(i)
        if val is not None and not val.is_zero() and e % self.p:
            # D(g^e) = e g^{e-1} D(g); for odd g at odd p, e is at most 1
            ge1 = self.element({((i, e - 1),) if e > 1 else (): e % self.p})
            out = out.add(self.multiply(self.multiply(ge1, val), tail_elem))
        dtail = self.derivation_monomial(tail, values)
        if not dtail.is_zero():
            head_deg = self.generators[i].degree * e
            sign = 1 if self.p == 2 or head_deg % 2 == 0 else -1
            head = self.element({((i, e),): sign % self.p})
            out = out.add(self.multiply(head, dtail))
        return out

    def derivation_extend(self, values: dict[str, "AlgebraElement"], shift: int,
                          window: Window) -> GradedMap:
        """Matrix of the Leibniz extension of generator values on the window basis."""
        by_index: dict[int, AlgebraElement] = {}
        for name, val in values.items():
            i = self.index[name]
            if not val.is_zero():
                if not val.is_homogeneous():
                    raise ValueError(f"value for {name} is inhomogeneous")
                if val.degree() != self.generators[i].degree + shift:
                    raise ValueError(
                        f"value for {name} has degree {val.degree()}, expected "
                        f"{self.generators[i].degree + shift}"
                    )
            by_index[i] = val
        space = self.enumerate_basis(window)
        monos = self.enumerate_monomials(window)
        blocks = {}
        for d, ms in sorted(monos.items()):
            td = d + shift
            if td not in window:
                continue
            rows = space.dim(td)
            target_index = {m: k for k, m in enumerate(monos.get(td, []))}
            ent = {}
            for col, m in enumerate(ms):
                img = self.derivation_monomial(m, by_index)
                for mm, c in img.terms.items():
                    k = target_index.get(mm)
                    if k is not None:
                        ent[(k, col)] = c
            blocks[d] = FpMatrix(self.p, rows, len(ms), ent)
        return GradedMap(space, space, shift, blocks)

    def to_json(self, window: Window | None = None) -> dict:
        obj = {"p": self.p, "generators": [g.to_json() for g in self.generators]}
        if window is not None:
            obj["window"] = [window.lo, window.hi]
        return obj

    @staticmethod
    def from_json(obj: dict) -> "MonomialAlgebra":
        gens = []
        for g in obj["generators"]:
            lo, hi = g["range"]
            gens.append(GeneratorSpec(g["name"], int(g["degree"]), g["parity"],
                                      (lo if lo is None else int(lo),
                                       hi if hi is None else int(hi))))
        return MonomialAlgebra(int(obj["p"]), gens)


def _max_pos(alg: MonomialAlgebra, start: int) -> int:
    # largest positive degree step remaining generators can still add with
    # one exponent unit; used only to bound search, correctness from leaf test
    tot = 0
    for g in alg.generators[start:]:
        if g.degree > 0 and g.range[1] != 0:
            tot += g.degree
    return tot


class AlgebraElement:
    """Homogeneous F_p combination of monomials (zero allowed)."""

    def __init__(self, algebra: MonomialAlgebra, terms: dict[Monomial, int]):
        self.algebra = algebra
        self.terms = {m: c % algebra.p for m, c in terms.items() if c % algebra.p}

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degs = {self.algebra.degree(m) for m in self.terms}
        return len(degs) <= 1

    def degree(self):
        if self.is_zero():
            return None
        (d,) = {self.algebra.degree(m) for m in self.terms}
        return d

    def add(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = (out.get(m, 0) + c) % self.algebra.p
            if v:
                out[m] = v
            elif m in out:
                del out[m]
        return AlgebraElement(self.algebra, out)

    def scale(self, c: int) -> "AlgebraElement":
        return AlgebraElement(self.algebra, {m: v * c for m, v in self.terms.items()})

    def mul(self, other: "AlgebraElement") -> "AlgebraElement":
        return self.algebra.multiply(self, other)

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.terms == other.terms

    def __repr__(self):
        if self.is_zero():
            return "0"
        return " + ".join(
            f"{c}*{self.algebra.label(m)}" if c != 1 else self.algebra.label(m)
            for m, c in sorted(self.terms.items())
        )


def parse_element(alg: MonomialAlgebra, s: str) -> AlgebraElement:
    """Parse '2*xi1^3*tau2 + tau1' style expressions (coefficient first, optional)."""
    terms: dict[Monomial, int] = {}
    for chunk in s.replace("-", "+-").split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        neg = chunk.startswith("-")
        if neg:
            chunk = chunk[1:].strip()
        coeff = 1
        parts = chunk.split("*")
        if parts and parts[0].strip().lstrip("-").isdigit():
            coeff = int(parts[0])
            parts = parts[1:]
        mono = alg.parse_label("*".join(parts)) if parts else ()
        c = -coeff if neg else coeff
        terms[mono] = (terms.get(mono, 0) + c) % alg.p
    return alg.element(terms)
