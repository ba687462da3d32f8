"""Shared test fixtures: a small signature and random generators."""

from __future__ import annotations

import random

from hammerkit.hol import (
    Abs,
    App,
    BOOL,
    Const,
    HolTerm,
    HolType,
    Signature,
    TyApp,
    TyVar,
    Var,
    dest_fun,
    free_vars,
    is_fun,
    mk_const_app,
    mk_eq,
    mk_exists,
    mk_forall,
    mk_foralls,
    mk_fun,
    mk_fun_chain,
    mk_neg,
)
from hammerkit.corpus import parse_tt

NAT = TyApp("nat")
LIST_NAT = TyApp("list", (NAT,))

TOY_DECLS = """\
tt(nat, ty, $t).
tt(list, ty, $t > $t).
tt(0, ty, nat).
tt(SUC, ty, nat > nat).
tt(ADD, ty, nat > nat > nat).
tt(LE, ty, nat > nat > bool).
tt(NIL, ty, ![A:$t]: (list A)).
tt(CONS, ty, ![A:$t]: (A > list A > list A)).
tt(HD, ty, ![A:$t]: (list A > A)).
tt(MAP, ty, ![A:$t, B:$t]: ((A > B) > list A > list B)).
"""


def toy_sig() -> Signature:
    sig = Signature()
    parse_tt(TOY_DECLS, sig)
    return sig


_POOL_TYPES = [NAT, BOOL, LIST_NAT, mk_fun(NAT, NAT), mk_fun(NAT, BOOL)]


def random_type(rng: random.Random) -> HolType:
    return rng.choice(_POOL_TYPES)


def _atoms_of(ty: HolType, scope: tuple[Var, ...]) -> list[HolTerm]:
    out: list[HolTerm] = [v for v in scope if v.ty == ty]
    if ty == NAT:
        out.append(Const("0"))
    if ty == mk_fun(NAT, NAT):
        out.append(Const("SUC"))
    if ty == LIST_NAT:
        out.append(Const("NIL", (NAT,)))
    if ty == mk_fun(LIST_NAT, NAT):
        out.append(Const("HD", (NAT,)))
    if ty == mk_fun_chain([NAT, LIST_NAT], LIST_NAT):
        out.append(Const("CONS", (NAT,)))
    return out


def random_term(
    rng: random.Random, ty: HolType, depth: int, scope: tuple[Var, ...] = ()
) -> HolTerm:
    """A well-typed term of the given type over the toy signature."""
    atoms = _atoms_of(ty, scope)
    choices = []
    if atoms:
        choices += ["atom", "atom"]
    if depth > 0:
        choices.append("app")
        if is_fun(ty):
            choices.append("abs")
    if not choices:
        return Var(f"y{rng.randrange(3)}", ty)
    c = rng.choice(choices)
    if c == "app":
        aty = random_type(rng)
        f = random_term(rng, mk_fun(aty, ty), depth - 1, scope)
        a = random_term(rng, aty, depth - 1, scope)
        return App(f, a)
    if c == "abs":
        a, r = dest_fun(ty)
        v = Var(f"x{rng.randrange(4)}", a)
        return Abs(v, random_term(rng, r, depth - 1, scope + (v,)))
    if c == "atom":
        return rng.choice(atoms)
    return Var(f"y{rng.randrange(3)}", ty)


def random_formula(
    rng: random.Random, depth: int, scope: tuple[Var, ...] = ()
) -> HolTerm:
    """A boolean formula over the toy signature."""
    if depth <= 0 or rng.random() < 0.3:
        t1 = random_term(rng, NAT, 2, scope)
        t2 = random_term(rng, NAT, 2, scope)
        if rng.random() < 0.5:
            return mk_eq(t1, t2, NAT)
        return mk_const_app("LE", (), [t1, t2])
    k = rng.choice(["conj", "disj", "imp", "neg", "forall", "exists", "iff"])
    if k == "neg":
        return mk_neg(random_formula(rng, depth - 1, scope))
    if k in ("forall", "exists"):
        v = Var(f"z{rng.randrange(4)}", random_type(rng))
        body = random_formula(rng, depth - 1, scope + (v,))
        return mk_forall(v, body) if k == "forall" else mk_exists(v, body)
    a = random_formula(rng, depth - 1, scope)
    b = random_formula(rng, depth - 1, scope)
    if k == "iff":
        return mk_eq(a, b, BOOL)
    op = {"conj": "&", "disj": "|", "imp": "=>"}[k]
    return mk_const_app(op, (), [a, b])


def random_closed_formula(rng: random.Random, depth: int = 4) -> HolTerm:
    f = random_formula(rng, depth)
    return mk_foralls(free_vars(f), f)
