"""Windowed fragment of the dual Steenrod algebra and its comodules.

Conventions, frozen by golden tests: conjugate Milnor generators with
coproducts

    D(xi_k)  = sum_{i+j=k} xi_i (x) xi_j^{p^i}
    D(tau_k) = 1 (x) tau_k + sum_{i=0..k} tau_i (x) xi_{k-i}^{p^i}

(xi_0 = 1).  At p=2 the generators are the xi_i alone, with |xi_i| = 2^i-1
odd; the tau-role in the Milnor pairing is played by xi_{m+1}, so Q_m has
degree 2^{m+1}-1 = 2p^m-1 throughout.  Pairing normalization <Q_m, tau_m>=1.

Comodule primitives are computed two ways: directly as ker(nu - 1(x)-) and
as the joint kernel of the extractions against tau_0 and the xi_1^{p^i}
(the duals of a generating set of the Steenrod algebra); coassociativity
makes the two agree, and tests assert it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fplin
from .fplin import FpMatrix
from .graded import GradedMap, Window, WindowedGradedSpace, direct_sum as space_sum
from .monalg import (
    EXTERIOR,
    POLY,
    AlgebraElement,
    GeneratorSpec,
    Monomial,
    MonomialAlgebra,
)
from .qmod import QModule, Verdict


def xi_degree(p: int, i: int) -> int:
    if p == 2:
        return (1 << i) - 1
    return 2 * (p**i - 1)


def tau_degree(p: int, i: int) -> int:
    return 2 * p**i - 1


def milnor_q_degree(p: int, m: int) -> int:
    return 2 * p**m - 1


class DualSteenrodFragment:
    """Generators of A_* materialized up to the window top, with coproducts."""

    def __init__(self, p: int, window: Window):
        self.p = p
        self.window = window
        gens = []
        self.xi_max = 0
        i = 1
        while xi_degree(p, i) <= window.hi:
            parity = "odd" if p == 2 else "even"
            gens.append(GeneratorSpec(f"xi{i}", xi_degree(p, i), parity, POLY))
            self.xi_max = i
            i += 1
        self.tau_max = -1
        if p != 2:
            i = 0
            while tau_degree(p, i) <= window.hi:
                gens.append(GeneratorSpec(f"tau{i}", tau_degree(p, i), "odd", EXTERIOR))
                self.tau_max = i
                i += 1
        self.algebra = MonomialAlgebra(p, gens)

    def xi(self, i: int, exp: int = 1) -> Monomial:
        if i == 0 or exp == 0:
            return ()
        return self.algebra.monomial_from_pairs([(self.algebra.index[f"xi{i}"], exp)])

    def tau(self, i: int) -> Monomial:
        if self.p == 2:
            # tau-role at 2: xi_{i+1}
            return self.xi(i + 1)
        return self.algebra.monomial_from_pairs([(self.algebra.index[f"tau{i}"], 1)])

    def has_xi(self, i: int) -> bool:
        return 1 <= i <= self.xi_max

    def has_tau(self, i: int) -> bool:
        if self.p == 2:
            return self.has_xi(i + 1)
        return 0 <= i <= self.tau_max

    def coproduct_generator(self, name: str) -> list[tuple[Monomial, Monomial, int]]:
        """Terms (left, right, coeff) of the coproduct of a generator."""
        alg = self.algebra
        if name.startswith("xi"):
            k = int(name[2:])
            out = []
            for i in range(0, k + 1):
                j = k - i
                left = self.xi(i)
                right = self.xi(j, self.p**i) if j else ()
                out.append((left, right, 1))
            return out
        k = int(name[3:])
        out = [((), self.tau(k), 1)]
        for i in range(0, k + 1):
            out.append((self.tau(i), self.xi(k - i, self.p**i) if k - i else (), 1))
        return out

    def coproduct_monomial(self, m: Monomial) -> dict[tuple[Monomial, Monomial], int]:
        """Multiplicative extension; exact (the fragment is connective)."""
        terms = {((), ()): 1}
        alg = self.algebra
        for gi, e in m:
            gen_terms = self.coproduct_generator(alg.generators[gi].name)
            power = _tensor_power(self, gen_terms, e)
            terms = _tensor_multiply(self, terms, power)
        return terms

    def counit_check(self, m: Monomial) -> bool:
        terms = self.coproduct_monomial(m)
        return terms.get(((), m), 0) % self.p == 1 and terms.get((m, ()), 0) % self.p == 1

    def milnor_pairing_monomial(self, m: int) -> Monomial:
        """The fragment monomial whose coefficient Q_m extracts."""
        return self.tau(m)


def _tensor_multiply(frag: DualSteenrodFragment, a: dict, b: dict) -> dict:
    """Multiply fragment (x) fragment elements with Koszul signs."""
    alg = frag.algebra
    out: dict = {}
    for (l1, r1), c1 in a.items():
        d_r1 = alg.degree(r1)
        for (l2, r2), c2 in b.items():
            lm = alg.multiply_monomials(l1, l2)
            if lm is None:
                continue
            rm = alg.multiply_monomials(r1, r2)
            if rm is None:
                continue
            sgn = 1
            if frag.p != 2 and (d_r1 % 2) and (alg.degree(l2) % 2):
                sgn = -1
            c = (out.get((lm[1], rm[1]), 0) + sgn * lm[0] * rm[0] * c1 * c2) % frag.p
            key = (lm[1], rm[1])
            if c:
                out[key] = c
            elif key in out:
                del out[key]
    return out


def _tensor_power(frag: DualSteenrodFragment, terms: list, e: int) -> dict:
    base = {}
    for l, r, c in terms:
        base[(l, r)] = (base.get((l, r), 0) + c) % frag.p
    result = {((), ()): 1}
    b = dict(base)
    n = e
    while n:
        if n & 1:
            result = _tensor_multiply(frag, result, b)
        n >>= 1
        if n:
            b = _tensor_multiply(frag, b, b)
    return result


# -- comodules -------------------------------------------------------------


@dataclass
class PrimitiveReport:
    primitives: WindowedGradedSpace
    max_degree: int | None
    bound: int | None
    verdict: Verdict

    def to_json(self):
        return {
            "primitive_dims": {str(d): n for d, n in self.primitives.dims().items()},
            "max_primitive_degree": self.max_degree,
            "bound": self.bound,
            "verdict": "pass" if self.verdict.ok else ("inconclusive" if "inconclusive" in self.verdict.reason else "fail"),
            "reason": self.verdict.reason,
        }


class ComoduleWindow:
    """Explicit coaction terms nu(x) = sum a (x) y over a windowed space.

    terms[(d, i)] lists (fragment monomial, target index, coeff); the target
    degree is d - |fragment monomial|.  lossy marks window truncation drops.
    """

    def __init__(self, fragment: DualSteenrodFragment, space: WindowedGradedSpace,
                 terms: dict, lossy: bool = False):
        self.fragment = fragment
        self.space = space
        self.terms = terms
        self.lossy = lossy

    @property
    def p(self):
        return self.space.p

    def coaction_terms(self, d: int, i: int):
        return self.terms.get((d, i), [((), i, 1)])

    def counit_check(self) -> Verdict:
        for d in self.space.degrees():
            for i in range(self.space.dim(d)):
                idterms = [(j, c) for (f, j, c) in self.coaction_terms(d, i) if f == ()]
                if idterms != [(i, 1)]:
                    return Verdict(False, f"counit law fails at degree {d} index {i}", d)
        return Verdict(True)

    def coassociativity_check(self, degrees=None) -> Verdict:
        frag = self.fragment
        degs = degrees if degrees is not None else self.space.degrees()
        for d in degs:
            if d not in self.space.basis:
                continue
            for i in range(self.space.dim(d)):
                lhs: dict = {}
                rhs: dict = {}
                for f, j, c in self.coaction_terms(d, i):
                    td = d - frag.algebra.degree(f)
                    for (a1, a2), cc in frag.coproduct_monomial(f).items():
                        key = (a1, a2, td, j)
                        lhs[key] = (lhs.get(key, 0) + c * cc) % self.p
                    for f2, j2, c2 in self.coaction_terms(td, j):
                        key = (f, f2, td - frag.algebra.degree(f2), j2)
                        rhs[key] = (rhs.get(key, 0) + c * c2) % self.p
                lhs = {k: v for k, v in lhs.items() if v}
                rhs = {k: v for k, v in rhs.items() if v}
                if lhs != rhs:
                    return Verdict(False, f"coassociativity fails at degree {d} index {i}", d)
        return Verdict(True)

    def nonidentity_matrix(self, d: int) -> tuple[FpMatrix, list]:
        """Stacked coefficients of nu - 1(x)id at degree d; rows labeled."""
        cols = self.space.dim(d)
        rows: dict = {}
        ent = {}
        for i in range(cols):
            for f, j, c in self.coaction_terms(d, i):
                if f == ():
                    if j != i:
                        key = ((), j)
                        r = rows.setdefault(key, len(rows))
                        ent[(r, i)] = (ent.get((r, i), 0) + c) % self.p
                    continue
                key = (f, j)
                r = rows.setdefault(key, len(rows))
                ent[(r, i)] = (ent.get((r, i), 0) + c) % self.p
        ent = {k: v for k, v in ent.items() if v}
        labels = [None] * len(rows)
        for key, r in rows.items():
            labels[r] = key
        return FpMatrix(self.p, len(rows), cols, ent), labels


def trivial_comodule(fragment: DualSteenrodFragment, space: WindowedGradedSpace) -> ComoduleWindow:
    terms = {}
    for d in space.degrees():
        for i in range(space.dim(d)):
            terms[(d, i)] = [((), i, 1)]
    return ComoduleWindow(fragment, space, terms)


def comodule_direct_sum(a: ComoduleWindow, b: ComoduleWindow) -> ComoduleWindow:
    space = space_sum(a.space, b.space)
    terms = {}
    for d in space.degrees():
        na = a.space.dim(d)
        for i in range(space.dim(d)):
            if i < na:
                src = a.coaction_terms(d, i)
                terms[(d, i)] = [(f, j, c) for f, j, c in src]
            else:
                src = b.coaction_terms(d, i - na)
                terms[(d, i)] = [
                    (f, j + a.space.dim(d - a.fragment.algebra.degree(f)), c)
                    for f, j, c in src
                ]
    return ComoduleWindow(a.fragment, space, terms, lossy=a.lossy or b.lossy)


def comodule_primitives(c: ComoduleWindow, bound: int | None = None) -> PrimitiveReport:
    """Primitives per degree as the kernel of (nu - 1 (x) -), via fplin."""
    basis = {}
    maxdeg = None
    for d in c.space.degrees():
        m, _ = c.nonidentity_matrix(d)
        k = fplin.kernel_basis(m)
        if k.cols:
            basis[d] = [f"p{d}_{i}" for i in range(k.cols)]
            maxdeg = d if maxdeg is None else max(maxdeg, d)
    prim = WindowedGradedSpace(c.p, c.space.window, basis)
    verdict = Verdict(True)
    if bound is not None and maxdeg is not None and maxdeg > bound:
        verdict = Verdict(False, f"primitive at degree {maxdeg} exceeds bound {bound}", maxdeg)
    return PrimitiveReport(prim, maxdeg, bound, verdict)


def primitive_vectors(c: ComoduleWindow, d: int) -> FpMatrix:
    m, _ = c.nonidentity_matrix(d)
    return fplin.kernel_basis(m)


def condition_h_report(c: ComoduleWindow, M: int) -> PrimitiveReport:
    """Pass iff no primitive in degrees >= M inside the window."""
    rep = comodule_primitives(c)
    if c.space.window.hi < M:
        return PrimitiveReport(rep.primitives, rep.max_degree, M,
                               Verdict(False, "inconclusive: window top below the bound"))
    bad = [d for d in rep.primitives.degrees() if d >= M]
    if bad:
        v = Verdict(False, f"primitive at degree {bad[0]} >= {M}", bad[0])
    else:
        v = Verdict(True)
    return PrimitiveReport(rep.primitives, rep.max_degree, M, v)


def primitives_coproduct_additivity(c1: ComoduleWindow, c2: ComoduleWindow) -> Verdict:
    s = comodule_direct_sum(c1, c2)
    p1 = comodule_primitives(c1).primitives
    p2 = comodule_primitives(c2).primitives
    ps = comodule_primitives(s).primitives
    for d in set(p1.degrees()) | set(p2.degrees()) | set(ps.degrees()):
        if ps.dim(d) != p1.dim(d) + p2.dim(d):
            return Verdict(False, f"additivity fails at degree {d}", d)
    return Verdict(True)


def milnor_primitive_action(fragment: DualSteenrodFragment, m: int, c: ComoduleWindow) -> GradedMap:
    """Q_m on a comodule: the tau_m component of the coaction; shift -(2p^m-1)."""
    qdeg = milnor_q_degree(fragment.p, m)
    pair = fragment.milnor_pairing_monomial(m)
    blocks = {}
    space = c.space
    for d in space.degrees():
        td = d - qdeg
        rows = space.dim(td)
        ent = {}
        for i in range(space.dim(d)):
            for f, j, coeff in c.coaction_terms(d, i):
                if f == pair:
                    ent[(j, i)] = (ent.get((j, i), 0) + coeff) % c.p
        ent = {k: v for k, v in ent.items() if v}
        if ent:
            blocks[d] = FpMatrix(c.p, rows, space.dim(d), ent)
    return GradedMap(space, space, -qdeg, blocks)


def comodule_to_qmodule(fragment, m: int, c: ComoduleWindow) -> QModule:
    q = milnor_primitive_action(fragment, m, c)
    return QModule(c.space, q, milnor_q_degree(fragment.p, m))


# -- multiplicative comodules ---------------------------------------------


class ComoduleAlgebra:
    """Monomial algebra with a multiplicative coaction given on generators.

    gen_coactions[name] lists (fragment monomial, algebra monomial, coeff);
    the identity term (1, gen, 1) must be included.  Coactions of monomials
    are Koszul-signed products of the generator coactions, with terms whose
    algebra part dies by a truncation relation removed exactly and terms
    outside the window dropped (flagged lossy).
    """

    def __init__(self, fragment: DualSteenrodFragment, algebra: MonomialAlgebra,
                 gen_coactions: dict[str, list]):
        if fragment.p != algebra.p:
            raise ValueError("modulus mismatch")
        self.fragment = fragment
        self.algebra = algebra
        self.gen_coactions = gen_coactions
        self._cache: dict = {}

    @property
    def p(self):
        return self.algebra.p

    def _mul(self, a: dict, b: dict) -> dict:
        """Multiply fragment (x) algebra term dicts."""
        frag, alg = self.fragment.algebra, self.algebra
        out: dict = {}
        for (f1, x1), c1 in a.items():
            dx1 = alg.degree(x1)
            for (f2, x2), c2 in b.items():
                fm = frag.multiply_monomials(f1, f2)
                if fm is None:
                    continue
                xm = alg.multiply_monomials(x1, x2)
                if xm is None:
                    continue
                sgn = 1
                if self.p != 2 and (dx1 % 2) and (frag.degree(f2) % 2):
                    sgn = -1
                key = (fm[1], xm[1])
                c = (out.get(key, 0) + sgn * fm[0] * xm[0] * c1 * c2) % self.p
                if c:
                    out[key] = c
                elif key in out:
                    del out[key]
        return out

    def _gen_power(self, name: str, e: int) -> dict:
        key = (name, e)
        if key in self._cache:
            return self._cache[key]
        base: dict = {}
        for f, x, c in self.gen_coactions[name]:
            base[(f, x)] = (base.get((f, x), 0) + c) % self.p
        result = {((), ()): 1}
        b = dict(base)
        n = e
        while n:
            if n & 1:
                result = self._mul(result, b)
            n >>= 1
            if n:
                b = self._mul(b, b)
        self._cache[key] = result
        return result

    def coaction_monomial(self, m: Monomial) -> dict:
        terms = {((), ()): 1}
        for gi, e in m:
            terms = self._mul(terms, self._gen_power(self.algebra.generators[gi].name, e))
        return terms

    def materialize(self, window: Window) -> ComoduleWindow:
        space = self.algebra.enumerate_basis(window)
        monos = self.algebra.enumerate_monomials(window)
        index = {d: {mm: k for k, mm in enumerate(ms)} for d, ms in monos.items()}
        terms = {}
        lossy = False
        for d, ms in sorted(monos.items()):
            for i, m in enumerate(ms):
                lst = []
                for (f, x), c in sorted(self.coaction_monomial(m).items()):
                    td = d - self.fragment.algebra.degree(f)
                    j = index.get(td, {}).get(x)
                    if j is None:
                        lossy = True
                        continue
                    lst.append((f, j, c))
                terms[(d, i)] = lst
        return ComoduleWindow(self.fragment, space, terms, lossy=lossy)

    def qm_values(self, m: int) -> dict[str, AlgebraElement]:
        """tau_m components of the generator coactions, as derivation values."""
        pair = self.fragment.milnor_pairing_monomial(m)
        vals = {}
        for name, lst in self.gen_coactions.items():
            acc: dict = {}
            for f, x, c in lst:
                if f == pair:
                    acc[x] = (acc.get(x, 0) + c) % self.p
            vals[name] = self.algebra.element(acc)
        return vals

    def qm_derivation(self, m: int, window: Window) -> GradedMap:
        """Q_m as the Leibniz extension of its generator values (algebra comodule)."""
        return self.algebra.derivation_extend(self.qm_values(m), -milnor_q_degree(self.p, m), window)

    def qmodule(self, m: int, window: Window) -> QModule:
        return QModule(self.algebra.enumerate_basis(window), self.qm_derivation(m, window),
                       milnor_q_degree(self.p, m))

    # restricted expansion: only terms whose fragment is tau_0^eps * xi_1^c
    def _restricted_gen_power(self, name: str, e: int) -> dict:
        key = ("r", name, e)
        if key in self._cache:
            return self._cache[key]
        base: dict = {}
        for f, x, c in self.gen_coactions[name]:
            if _is_restricted_shape(self.fragment, f):
                base[(f, x)] = (base.get((f, x), 0) + c) % self.p
        result = {((), ()): 1}
        b = dict(base)
        n = e
        while n:
            if n & 1:
                result = self._mul(result, b)
            n >>= 1
            if n:
                b = self._mul(b, b)
        self._cache[key] = result
        return result

    def restricted_coaction(self, m: Monomial) -> dict:
        """Exact tau_0^eps xi_1^c components of the coaction of m."""
        terms = {((), ()): 1}
        for gi, e in m:
            terms = self._mul(terms, self._restricted_gen_power(self.algebra.generators[gi].name, e))
        return terms


def _is_restricted_shape(frag: DualSteenrodFragment, f: Monomial) -> bool:
    """True when f = tau_0^eps * xi_1^c (the extraction-op fragment shapes)."""
    alg = frag.algebra
    for gi, e in f:
        name = alg.generators[gi].name
        if name == "xi1":
            continue
        if frag.p != 2 and name == "tau0" and e == 1:
            continue
        return False
    return True


def extraction_ops(frag: DualSteenrodFragment, max_degree_span: int) -> list[Monomial]:
    """Fragment monomials dual to a generating set of the Steenrod algebra.

    tau_0 (odd p) and xi_1^{p^i}; joint kernels of their extractions cut out
    exactly the comodule primitives (coassociativity gives the composition
    rule for all other positive-degree operations).
    """
    ops = []
    if frag.p != 2:
        ops.append(frag.tau(0))
    c = 1
    while c * xi_degree(frag.p, 1) <= max_degree_span:
        ops.append(frag.xi(1, c))
        c *= frag.p
    return ops


def primitives_via_ops(ca: ComoduleAlgebra, window: Window) -> PrimitiveReport:
    """Primitive computation through the generator-extraction operators."""
    monos = ca.algebra.enumerate_monomials(window)
    index = {d: {mm: k for k, mm in enumerate(ms)} for d, ms in monos.items()}
    frag = ca.fragment
    span = window.hi - window.lo
    ops = extraction_ops(frag, span)
    basis = {}
    maxdeg = None
    for d in sorted(monos):
        ms = monos[d]
        rowmap: dict = {}
        ent = {}
        for i, m in enumerate(ms):
            for (f, x), c in ca.restricted_coaction(m).items():
                if f == ():
                    continue
                if f not in ops:
                    continue
                td = d - frag.algebra.degree(f)
                j = index.get(td, {}).get(x)
                if j is None:
                    continue
                r = rowmap.setdefault((f, j), len(rowmap))
                ent[(r, i)] = (ent.get((r, i), 0) + c) % ca.p
        ent = {k: v for k, v in ent.items() if v}
        mat = FpMatrix(ca.p, len(rowmap), len(ms), ent)
        k = fplin.kernel_basis(mat)
        if k.cols:
            basis[d] = [f"p{d}_{i}" for i in range(k.cols)]
            maxdeg = d if maxdeg is None else max(maxdeg, d)
    prim = WindowedGradedSpace(ca.p, window, basis)
    return PrimitiveReport(prim, maxdeg, None, Verdict(True))


# -- models ----------------------------------------------------------------


def bpn_generators(p: int, n: int, window: Window):
    """Generator specs and coactions for the homology model of BP<n>."""
    gens = []
    coact = {}
    frag = DualSteenrodFragment(p, Window(0, max(window.hi, 1)))
    if p == 2:
        i = 1
        while i <= n + 1 and 2 * xi_degree(2, i) <= window.hi:
            name = f"xisq{i}"
            gens.append(GeneratorSpec(name, 2 * xi_degree(2, i), "even", POLY))
            # Frobenius square of D(xi_i)
            terms = []
            for a in range(0, i + 1):
                left = frag.xi(a, 2) if a else ()
                right = _bpn_monomial_p2(frag, i - a, 1 << (a + 1), n)
                if right is None:
                    continue
                terms.append((left, right, 1))
            coact[name] = terms
            i += 1
        i = n + 2
        while xi_degree(2, i) <= window.hi:
            name = f"xi{i}"
            gens.append(GeneratorSpec(name, xi_degree(2, i), "odd", POLY))
            terms = []
            for a in range(0, i + 1):
                left = frag.xi(a)
                right = _bpn_monomial_p2(frag, i - a, 1 << a, n)
                if right is None:
                    continue
                terms.append((left, right, 1))
            coact[name] = terms
            i += 1
    else:
        i = 1
        while xi_degree(p, i) <= window.hi:
            name = f"xi{i}"
            gens.append(GeneratorSpec(name, xi_degree(p, i), "even", POLY))
            terms = []
            for a in range(0, i + 1):
                terms.append((frag.xi(a), frag.xi(i - a, p**a) if i - a else (), 1))
            coact[name] = terms
            i += 1
        j = n + 1
        while tau_degree(p, j) <= window.hi:
            name = f"tau{j}"
            gens.append(GeneratorSpec(name, tau_degree(p, j), "odd", EXTERIOR))
            terms = [((), frag.tau(j), 1)]
            for a in range(0, j + 1):
                terms.append((frag.tau(a), frag.xi(j - a, p**a) if j - a else (), 1))
            coact[name] = terms
            j += 1
    return frag, gens, coact


def _bpn_monomial_p2(frag, b: int, exp: int, n: int):
    """xi_b^exp written in the generators of H(BP<n>;F_2); None if absent."""
    if b == 0:
        return ()
    if b <= n + 1:
        if exp % 2:
            return None
        return frag.xi(b, exp)  # placeholder monomial; renamed downstream
    return frag.xi(b, exp)


def build_bpn_homology(p: int, n: int, window: Window) -> ComoduleAlgebra:
    """H_*(BP<n>;F_p) as a comodule algebra: P(xi_i) (x) E(tau_j, j>n) at odd
    p, P(xi_1^2..xi_{n+1}^2, xi_{n+2}, ...) at p=2."""
    frag, gens, coact = bpn_generators(p, n, window)
    algebra = MonomialAlgebra(p, gens)
    translated = {
        name: [(f, _translate_to(algebra, frag, x, p, n), c) for f, x, c in lst]
        for name, lst in coact.items()
    }
    # remove terms whose algebra part is not expressible (odd xi powers at 2)
    final = {
        name: [(f, x, c) for f, x, c in lst if x is not None]
        for name, lst in translated.items()
    }
    return ComoduleAlgebra(frag, algebra, final)


def _translate_to(algebra: MonomialAlgebra, frag: DualSteenrodFragment, fm, p, n):
    """Rewrite a fragment monomial as a monomial of the model algebra."""
    if fm is None:
        return None
    pairs = []
    for gi, e in fm:
        name = frag.algebra.generators[gi].name
        if p == 2 and name.startswith("xi"):
            i = int(name[2:])
            if i <= n + 1:
                if e % 2:
                    return None
                tgt = f"xisq{i}"
                ee = e // 2
            else:
                tgt = name
                ee = e
        else:
            tgt = name
            ee = e
        if tgt not in algebra.index:
            return None
        pairs.append((algebra.index[tgt], ee))
    return algebra.monomial_from_pairs(pairs)


def sigma_name(kind: str, i: int) -> str:
    return f"s{kind}{i}"


def build_thh_homology(p: int, n: int, window: Window) -> ComoduleAlgebra:
    """H_*(THH(BP<n>);F_p): the BP<n> model tensored with the sigma-classes.

    Odd p: E(s_xi_1..s_xi_{n+1}) (x) P(s_tau_{n+1}); the coaction of a
    sigma-class is (1 (x) sigma) applied to the coaction of its source, so
    s_xi_i is primitive and s_tau_{n+1} carries a tau_0 term.
    p=2: E(s_xi_1..s_xi_{n+1}) (x) P(s_xi_{n+2}), all primitive.
    """
    base = build_bpn_homology(p, n, window)
    frag = base.fragment
    gens = list(base.algebra.generators)
    coact = dict(base.gen_coactions)
    if xi_degree(p, 1) + 1 > window.hi:
        raise ValueError("window too small to contain the first sigma class")
    if p == 2:
        for i in range(1, n + 2):
            deg = xi_degree(2, i) + 1
            if deg > window.hi:
                continue
            name = sigma_name("xi", i)
            gens.append(GeneratorSpec(name, deg, "even" if deg % 2 == 0 else "odd", EXTERIOR))
            coact[name] = [((), (len(gens) - 1, 1), 1)]
        deg = xi_degree(2, n + 2) + 1
        if deg <= window.hi:
            name = sigma_name("xi", n + 2)
            gens.append(GeneratorSpec(name, deg, "even" if deg % 2 == 0 else "odd", POLY))
            coact[name] = [((), (len(gens) - 1, 1), 1)]
    else:
        for i in range(1, n + 2):
            deg = xi_degree(p, i) + 1
            if deg > window.hi:
                continue
            name = sigma_name("xi", i)
            gens.append(GeneratorSpec(name, deg, "odd", EXTERIOR))
            coact[name] = [((), (len(gens) - 1, 1), 1)]
        deg = tau_degree(p, n + 1) + 1
        if deg <= window.hi:
            name = sigma_name("tau", n + 1)
            gens.append(GeneratorSpec(name, deg, "even", POLY))
            terms = [((), (len(gens) - 1, 1), 1)]
            # (1 (x) sigma) of the tau_0 term of D(tau_{n+1}): tau_0 (x) s_xi_{n+1}
            sxi = sigma_name("xi", n + 1)
            if any(g.name == sxi for g in gens):
                idx = next(k for k, g in enumerate(gens) if g.name == sxi)
                terms.append((frag.tau(0), ((idx, 1),), 1))
            coact[name] = terms
    # base generators keep their indices (the new list extends the old), and
    # sigma classes were written directly with their final indices
    algebra = MonomialAlgebra(p, gens)
    return ComoduleAlgebra(frag, algebra, coact)
