"""Strongly cuspidal data on SL(2, Z/p^l) and the compact-induction model.

A ``SigmaRep`` is a full finite representation table on SL(2, Z/p^l).  Its
genuine extension to the preimage of SL(2, Z_p) in the cover is
eps * s(h) * table(h mod p^l) with s the validated Kubota splitting.  The
induced model keeps vectors as finitely supported coefficient maps over the
representative system {n(t) diag(p^n, p^-n)} in the eigencoordinates of the
upper-unipotent action, which makes the Whittaker functionals diagonal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .exactnum import CycValue, KElement, PadicContext, frac_valuation
from .localchar import AdditiveCharacter, square_class_data
from .cover import (
    MetaElement,
    SL2Element,
    coset_decompose,
    decompose_meta,
    kubota_split,
    validate_kubota_splitting,
)

Matrix = tuple  # tuple of row tuples of CycValue


# -- small exact matrix helpers ---------------------------------------------

def mat_identity(q: int, d: int) -> Matrix:
    return tuple(tuple(CycValue.one(q) if i == j else CycValue.zero(q) for j in range(d))
                 for i in range(d))

def mat_zero(q: int, d: int) -> Matrix:
    z = CycValue.zero(q)
    return tuple(tuple(z for _ in range(d)) for _ in range(d))

def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    d = len(A)
    return tuple(tuple(CycValue.sum([A[i][k] * B[k][j] for k in range(d)])
                       for j in range(d)) for i in range(d))

def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))

def mat_scale(A: Matrix, c) -> Matrix:
    return tuple(tuple(a * c for a in row) for row in A)

def mat_is_zero(A: Matrix) -> bool:
    return all(a.is_zero() for row in A for a in row)

def mat_eq(A: Matrix, B: Matrix) -> bool:
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))

def mat_rank(A: Matrix) -> int:
    rows = [list(row) for row in A]
    d = len(rows)
    rank = 0
    col = 0
    while rank < d and col < d:
        pivot = next((r for r in range(rank, d) if not rows[r][col].is_zero()), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(d):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank

def mat_inverse(A: Matrix) -> Matrix:
    d = len(A)
    q = A[0][0].q
    aug = [list(row) + [CycValue.one(q) if i == j else CycValue.zero(q) for j in range(d)]
           for i, row in enumerate(A)]
    for col in range(d):
        pivot = next((r for r in range(col, d) if not aug[r][col].is_zero()), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(d):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[d:]) for row in aug)


# -- sigma tables ------------------------------------------------------------

def _key_mul(k1, k2, modulus: int):
    a1, b1, c1, d1 = k1
    a2, b2, c2, d2 = k2
    return ((a1 * a2 + b1 * c2) % modulus, (a1 * b2 + b1 * d2) % modulus,
            (c1 * a2 + d1 * c2) % modulus, (c1 * b2 + d1 * d2) % modulus)


def sl2_group_order(p: int, level: int) -> int:
    # |SL2(Z/p^l)| = p^(3l) * (1 - p^-2)
    return p ** (3 * level) * (p * p - 1) // (p * p)


class SigmaValidationError(ValueError):
    pass


class SigmaRep:
    """A finite-dimensional representation table on SL(2, Z/p^l)."""

    def __init__(self, ctx: PadicContext, level: int, dim: int, table: dict):
        self.ctx = ctx
        self.level = level
        self.dim = dim
        self.modulus = ctx.p**level
        self.table = table

    def reduce(self, g: SL2Element):
        return g.reduce_mod(self.modulus)

    def value_of(self, g: SL2Element) -> Matrix:
        return self.table[self.reduce(g)]

    def n_key(self, x: int):
        return (1, x % self.modulus, 0, 1)

    # -- invariant checks ----------------------------------------------------

    def check_homomorphism(self, rng, trials: int = 100) -> None:
        keys = list(self.table)
        for _ in range(trials):
            k1 = rng.choice(keys)
            k2 = rng.choice(keys)
            prod = _key_mul(k1, k2, self.modulus)
            if not mat_eq(mat_mul(self.table[k1], self.table[k2]), self.table[prod]):
                raise SigmaValidationError(
                    f"table is not multiplicative at {k1} * {k2}")

    def check_conductor(self) -> None:
        """Conductor is exactly `level`: the table is keyed mod p^level (so it
        is trivial one level deeper) and must be nontrivial on the subgroup
        congruent to 1 mod p^(level-1)."""
        p, l = self.ctx.p, self.level
        ident = mat_identity(self.ctx.q, self.dim)
        stride = p ** (l - 1)
        nontrivial = any(
            not mat_eq(self.table[key], ident)
            for key in self.table
            if all((e - o) % stride == 0 for e, o in zip(key, (1, 0, 0, 1)))
        )
        if not nontrivial:
            raise SigmaValidationError(
                f"claimed conductor {l} but the table is trivial on the "
                f"congruence subgroup of level {l - 1}")

    def strong_cuspidality_sum(self) -> Matrix:
        p, l = self.ctx.p, self.level
        acc = mat_zero(self.ctx.q, self.dim)
        for c in range(p):
            acc = mat_add(acc, self.table[self.n_key(c * p ** (l - 1))])
        return acc

    def validate(self, rng=None) -> None:
        order = sl2_group_order(self.ctx.p, self.level)
        if len(self.table) != order:
            raise SigmaValidationError(
                f"table has {len(self.table)} entries, expected {order}")
        self.check_homomorphism(rng or random.Random(0))
        self.check_conductor()
        if not mat_is_zero(self.strong_cuspidality_sum()):
            raise SigmaValidationError(
                "strong cuspidality fails: sum of table(n(x)) over "
                f"x in p^{self.level - 1}Z/p^{self.level}Z is nonzero")


def check_strongly_cuspidal(sigma: SigmaRep) -> bool:
    return mat_is_zero(sigma.strong_cuspidality_sum())


def _close_table(ctx: PadicContext, level: int, dim: int, generators: dict) -> dict:
    """BFS closure of a generator->matrix assignment into a full table.
    Conflicting products raise, which catches non-homomorphic data."""
    modulus = ctx.p**level
    ident_key = (1, 0, 0, 1)
    table = {ident_key: mat_identity(ctx.q, dim)}
    frontier = [ident_key]
    while frontier:
        new = []
        for key in frontier:
            for gkey, gval in generators.items():
                nk = _key_mul(key, gkey, modulus)
                nv = mat_mul(table[key], gval)
                if nk in table:
                    if not mat_eq(table[nk], nv):
                        raise SigmaValidationError("inconsistent generator assignment")
                else:
                    table[nk] = nv
                    new.append(nk)
        frontier = new
    return table


def builtin_sigma_p3(ctx: PadicContext, which: int) -> SigmaRep:
    """The two one-dimensional strongly cuspidal representations of
    SL(2, Z/3): n(a) -> e(which * a / 3), w -> 1, extended through the
    abelianization.  Only exists for p = 3 (SL(2, F_p) is perfect for p > 3)."""
    if ctx.p != 3:
        raise ValueError("the builtin one-dimensional data requires p = 3")
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    e = CycValue.root_of_unity(ctx.q, Fraction(which, 3))
    generators = {
        (1, 1, 0, 1): ((e,),),
        (0, 2, 1, 0): ((CycValue.one(ctx.q),),),  # w = [[0,-1],[1,0]] mod 3
    }
    table = _close_table(ctx, 1, 1, generators)
    sigma = SigmaRep(ctx, 1, 1, table)
    sigma.validate(random.Random(1))
    return sigma


def sigma_from_dict(ctx: PadicContext, data: dict, rng=None) -> SigmaRep:
    """Load a sigma table from its file format:

        {"p": int, "l": int, "dim": int,
         "entries": [{"matrix": [[a, b], [c, d]],
                      "rep": d x d matrix, each entry a list of terms
                             [[exp_num, exp_den], [coeff_num, coeff_den]]
                      meaning sum coeff * e(2 pi i exp)}]}

    The loader validates determinant, multiplicativity on random pairs,
    conductor exactness and strong cuspidality before accepting."""
    if int(data["p"]) != ctx.p:
        raise SigmaValidationError(f"table is for p={data['p']}, context has p={ctx.p}")
    level = int(data["l"])
    dim = int(data["dim"])
    modulus = ctx.p**level
    table = {}
    for entry in data["entries"]:
        (a, b), (c, d) = entry["matrix"]
        key = (a % modulus, b % modulus, c % modulus, d % modulus)
        if (a * d - b * c) % modulus != 1:
            raise SigmaValidationError(f"entry {key} does not have determinant 1 mod p^l")
        rep = entry["rep"]
        if len(rep) != dim or any(len(row) != dim for row in rep):
            raise SigmaValidationError(f"entry {key} has a rep block of wrong shape")
        mat = tuple(
            tuple(
                CycValue.sum(
                    [CycValue.root_of_unity(ctx.q, Fraction(en, ed)) * Fraction(cn, cd)
                     for (en, ed), (cn, cd) in cell] or [CycValue.zero(ctx.q)],
                    ctx.q)
                for cell in row)
            for row in rep)
        table[key] = mat
    sigma = SigmaRep(ctx, level, dim, table)
    sigma.validate(rng or random.Random(2))
    return sigma


def sigma_to_dict(sigma: SigmaRep) -> dict:
    """Serialize a sigma table to the file format accepted by
    ``sigma_from_dict``."""
    entries = []
    for (a, b, c, d), mat in sorted(sigma.table.items()):
        rep = [[[[expo.numerator, expo.denominator], [coeff.numerator, coeff.denominator]]
                for coeff, expo, half in cell.terms() if not half]
               for row in mat for cell in row]
        # reshape the flat cell list back into rows
        rep = [rep[i * sigma.dim:(i + 1) * sigma.dim] for i in range(sigma.dim)]
        entries.append({"matrix": [[a, b], [c, d]], "rep": rep})
    return {"p": sigma.ctx.p, "l": sigma.level, "dim": sigma.dim, "entries": entries}


# -- eigenbasis ---------------------------------------------------------------

@dataclass(frozen=True)
class EigenEntry:
    index: int
    beta: Fraction          # sigma(n(a)) acts by psi(beta * a) on this line
    vector: tuple           # column vector in the original coordinates


class EigenBasis:
    """Diagonalizing data for the upper-unipotent action of a strongly
    cuspidal sigma: one line per character a -> psi(beta * a), all beta with
    exact denominator p^level."""

    def __init__(self, sigma: SigmaRep):
        ctx = sigma.ctx
        p, l, d = ctx.p, sigma.level, sigma.dim
        pl = p**l
        psi = AdditiveCharacter(ctx)
        entries = []
        ident = mat_identity(ctx.q, d)
        total = mat_zero(ctx.q, d)
        for j in range(pl):
            beta = Fraction(j, pl)
            proj = mat_zero(ctx.q, d)
            for x in range(pl):
                character = psi.value(-beta * x)
                proj = mat_add(proj, mat_scale(sigma.table[sigma.n_key(x)], character))
            proj = mat_scale(proj, Fraction(1, pl))
            if mat_is_zero(proj):
                continue
            rank = mat_rank(proj)
            if rank != 1:
                raise SigmaValidationError(
                    f"projection for beta={beta} has rank {rank}; sigma is reducible")
            if beta.denominator != pl:
                raise SigmaValidationError(
                    f"nonzero projection at beta={beta} contradicts strong cuspidality")
            col = next(c for c in range(d)
                       if any(not proj[r][c].is_zero() for r in range(d)))
            vector = tuple(proj[r][col] for r in range(d))
            entries.append(EigenEntry(len(entries), beta, vector))
            total = mat_add(total, proj)
        if len(entries) != d or not mat_eq(total, ident):
            raise SigmaValidationError("eigenprojections do not resolve the identity")
        self.entries = entries
        self.change = tuple(tuple(entries[j].vector[i] for j in range(d)) for i in range(d))
        self.change_inv = mat_inverse(self.change)

    @property
    def betas(self):
        return [e.beta for e in self.entries]


def eigenbasis(sigma: SigmaRep) -> EigenBasis:
    return EigenBasis(sigma)


# -- induced vectors ----------------------------------------------------------

class InducedVector:
    """A finite coefficient expansion sum c[(t, n, b)] * phi^{n(t)<p^n>}_b in
    the compact-induction model, coefficients in eigencoordinates."""

    __slots__ = ("q", "terms")

    def __init__(self, q: int, terms=None):
        self.q = q
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    @classmethod
    def zero(cls, q: int) -> "InducedVector":
        return cls(q, {})

    @classmethod
    def basis(cls, q: int, t=Fraction(0), n: int = 0, b: int = 0, coeff=None) -> "InducedVector":
        c = coeff if coeff is not None else CycValue.one(q)
        if not isinstance(c, CycValue):
            c = CycValue.rational(q, c)
        return cls(q, {(Fraction(t), int(n), int(b)): c})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "InducedVector") -> "InducedVector":
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, CycValue.zero(self.q)) + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return InducedVector(self.q, out)

    def __neg__(self) -> "InducedVector":
        return InducedVector(self.q, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "InducedVector":
        return InducedVector(self.q, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scaled(c)

    def __eq__(self, other):
        return isinstance(other, InducedVector) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = [f"({v!r})*phi(t={t}, n={n}, b={b})" for (t, n, b), v in sorted(
            self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0], kv[0][2]))]
        return " + ".join(bits)


# -- spectrum ------------------------------------------------------------------

@dataclass(frozen=True)
class XiRepresentative:
    xi: Fraction
    basis_index: int
    square_class: tuple
    abs_value: Fraction


@dataclass(frozen=True)
class SpectrumXPi:
    reps: tuple            # one per eigenbasis entry
    dedup: tuple           # one per square class, smallest fractional rep


# -- the compactly induced representation --------------------------------------

class Representation:
    """The compactly induced representation attached to a strongly cuspidal
    sigma, with its Whittaker machinery."""

    def __init__(self, sigma: SigmaRep, seed: int = 2025, validate: bool = True):
        self.sigma = sigma
        self.ctx = sigma.ctx
        self.level = sigma.level
        self.dim = sigma.dim
        self.psi = AdditiveCharacter(self.ctx)
        if validate:
            sigma.validate(random.Random(seed))
            validate_kubota_splitting(self.ctx, random.Random(seed + 1), trials=128)
        basis = EigenBasis(sigma)
        self.betas = basis.betas
        self._diag_table = {
            key: mat_mul(basis.change_inv, mat_mul(mat, basis.change))
            for key, mat in sigma.table.items()
        }
        self._diag_table_neg = {key: mat_scale(mat, -1)
                                for key, mat in self._diag_table.items()}
        self._twists: dict = {}
        reps = []
        for b, beta in enumerate(self.betas):
            xi = self.ctx.elem(beta)
            if xi.valuation() != -self.level:
                raise SigmaValidationError("spectrum member with wrong valuation")
            reps.append(XiRepresentative(beta, b, square_class_data(xi),
                                         Fraction(self.ctx.q) ** self.level))
        dedup: dict = {}
        for r in sorted(reps, key=lambda r: r.xi):
            dedup.setdefault(r.square_class, r)
        self._spectrum = SpectrumXPi(tuple(reps), tuple(dedup.values()))
        self._gamma_cache: dict = {}
        self._bessel_tables: dict = {}

    # -- basic model ----------------------------------------------------------

    def phi(self, t=Fraction(0), n: int = 0, b: int = 0, coeff=None) -> InducedVector:
        if not 0 <= b < self.dim:
            raise ValueError(f"basis index {b} out of range")
        return InducedVector.basis(self.ctx.q, Fraction(t), n, b, coeff)

    def spectrum(self) -> SpectrumXPi:
        return self._spectrum

    def basis_index_for(self, xi) -> int | None:
        """The eigenbasis index b with psi^xi agreeing with the b-th character
        on Z_p, i.e. xi - beta_b integral; None if xi is outside X(pi)."""
        xi = Fraction(xi.value if isinstance(xi, KElement) else xi)
        for b, beta in enumerate(self.betas):
            if frac_valuation(xi - beta, self.ctx.p) >= 0:
                return b
        return None

    def genuine_eval(self, x: MetaElement) -> Matrix:
        """The genuine extension of sigma at an integral cover element, in
        eigencoordinates: eps * s(g) * table(g mod p^l)."""
        sign = x.eps * kubota_split(x.g)
        key = x.g.reduce_mod(self.sigma.modulus)
        return self._diag_table[key] if sign == 1 else self._diag_table_neg[key]

    # -- the action -----------------------------------------------------------

    def act(self, g: MetaElement, v: InducedVector) -> InducedVector:
        """pi(g) v; right translation in the induced model."""
        ginv = g.inverse()
        out: dict = {}
        q = self.ctx.q
        for (t, n, b), coeff in v.terms.items():
            rep = InducedVectorRep(self.ctx, t, n)
            m = rep.meta() * ginv
            h_meta, dec = decompose_meta(m)
            mat = self.genuine_eval(h_meta.inverse())
            key_base = (dec.t, dec.n)
            for b2 in range(self.dim):
                c = mat[b2][b]
                if c.is_zero():
                    continue
                key = (key_base[0], key_base[1], b2)
                s = out.get(key, CycValue.zero(q)) + coeff * c
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return InducedVector(q, out)

    def evaluate_vector(self, v: InducedVector, g: MetaElement):
        """The model vector phi evaluated at the cover point g, as a tuple of
        eigencoordinates."""
        h_meta, dec = decompose_meta(g)
        coords = [CycValue.zero(self.ctx.q) for _ in range(self.dim)]
        for (t, n, b), coeff in v.terms.items():
            if t != dec.t or n != dec.n:
                continue
            # g = h * rep, so g * rep^{-1} = h and phi^rep_b(g) = sigma(h) b
            mat = self.genuine_eval(h_meta)
            for i in range(self.dim):
                coords[i] = coords[i] + coeff * mat[i][b]
        return tuple(coords)

    # -- Whittaker functionals --------------------------------------------------

    def _twist(self, xi: Fraction) -> AdditiveCharacter:
        tw = self._twists.get(xi)
        if tw is None:
            tw = self.psi.twist(xi)
            self._twists[xi] = tw
        return tw

    def whittaker_functional(self, xi, v: InducedVector) -> CycValue:
        """l^xi(v); on basis vectors psi^xi(-t) when n = 0 and the basis index
        matches the character of xi, else 0."""
        xi = Fraction(xi.value if isinstance(xi, KElement) else xi)
        b = self.basis_index_for(xi)
        if b is None:
            raise ValueError(f"xi={xi} is not in X(pi); no Whittaker functional instantiated")
        psi_xi = self._twist(xi)
        vals = [coeff * psi_xi.value(-t)
                for (t, n, b2), coeff in v.terms.items() if n == 0 and b2 == b]
        return CycValue.sum(vals, self.ctx.q)

    def whittaker_function(self, xi, v: InducedVector, g: MetaElement) -> CycValue:
        return self.whittaker_functional(xi, self.act(g, v))

    def c_factor(self, xi, a) -> CycValue:
        """The constant c_xi(a) with l^xi(pi(<a>) v) = c_xi(a) l^{a^2 xi}(v),
        computed on one test vector and verified on an independent second."""
        ctx = self.ctx
        a = Fraction(a.value if isinstance(a, KElement) else a)
        xi = Fraction(xi.value if isinstance(xi, KElement) else xi)
        if self.basis_index_for(xi) is None:
            raise ValueError(f"xi={xi} is not in X(pi)")
        target = a * a * xi
        b2 = self.basis_index_for(target)
        if b2 is None:
            raise ValueError(f"a^2 xi = {target} is not in X(pi)")
        torus = MetaElement.torus(ctx, a)
        psi_t = self.psi.twist(target)
        v1 = self.phi(b=b2)
        c1 = self.whittaker_functional(xi, self.act(torus, v1))  # l^{a^2 xi}(v1) = 1
        t0 = Fraction(1, ctx.p**self.level)
        v2 = self.phi(t=t0, b=b2)
        c2 = self.whittaker_functional(xi, self.act(torus, v2)) * psi_t.value(-t0).inverse()
        if c1 != c2:
            raise ArithmeticError(
                "c factor is not well defined; multiplicity one violated (bug)")
        return c1

    def central_sign_minus_one(self) -> CycValue:
        """omega_pi(-1): the scalar by which [-I, +1] acts."""
        v = self.phi(b=0)
        acted = self.act(MetaElement.lift(SL2Element.of(self.ctx, -1, 0, 0, -1), 1), v)
        key = (Fraction(0), 0, 0)
        if set(acted.terms) != {key}:
            raise ArithmeticError("central element did not act by a scalar")
        return acted.terms[key]


class InducedVectorRep:
    """Helper wrapping a representative n(t) diag(p^n, p^-n)."""

    __slots__ = ("ctx", "t", "n")

    def __init__(self, ctx: PadicContext, t: Fraction, n: int):
        self.ctx = ctx
        self.t = t
        self.n = n

    def matrix(self) -> SL2Element:
        pn = Fraction(self.ctx.p) ** self.n
        return SL2Element(self.ctx, pn, self.t / pn, Fraction(0), 1 / pn)

    def meta(self) -> MetaElement:
        return MetaElement(self.matrix(), 1)
