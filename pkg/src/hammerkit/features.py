"""String features of theorem statements.

Four feature kinds, marked by prefix: ``t:`` type constructors, ``v:``
type variables, ``c:`` constants, and ``s:`` printed subterms.  Subterm
features are collected under three variable normalizations and unioned,
so two statements differing only in variable naming share all features.
"""

from __future__ import annotations

from enum import Enum

from .corpus import show_name, _Parser, _lex, ParseError
from .hol import (
    Abs,
    App,
    Const,
    HolTerm,
    HolType,
    TyApp,
    TyVar,
    Var,
    subterms,
    term_ty_vars,
)


class NormScheme(Enum):
    ONE_VAR = "onevar"
    DE_BRUIJN = "debruijn"
    TYPE_OF_VAR = "typeofvar"


def _norm_tyvar_name(i: int) -> str:
    if i < 26:
        return chr(ord("A") + i)
    return chr(ord("A") + i % 26) + str(i // 26)


class _TyNames:
    """First-occurrence renaming of type variables to A, B, ..."""

    def __init__(self) -> None:
        self.names: dict[str, str] = {}

    def get(self, name: str) -> str:
        if name not in self.names:
            self.names[name] = _norm_tyvar_name(len(self.names))
        return self.names[name]

    def type_text(self, ty: HolType) -> str:
        if isinstance(ty, TyVar):
            return self.get(ty.name)
        if not ty.args:
            return ty.con
        return "(" + ty.con + " " + " ".join(self.type_text(a) for a in ty.args) + ")"


def normalize_print(term: HolTerm, scheme: NormScheme) -> str:
    """Canonical parenthesized printing with variables rewritten.

    OneVar collapses every term variable to ``X``; DeBruijn prints bound
    occurrences as ``#k`` (binder distance) and free variables as ``#fN``
    by first occurrence; TypeOfVar prints a variable as its type, with
    type variables renamed to A, B, ... by first occurrence.
    """
    tynames = _TyNames()
    free: dict[Var, int] = {}

    def var_text(v: Var, bound: tuple[Var, ...]) -> str:
        if scheme is NormScheme.ONE_VAR:
            return "X"
        if scheme is NormScheme.TYPE_OF_VAR:
            return tynames.type_text(v.ty)
        for i in range(len(bound) - 1, -1, -1):
            if bound[i] == v:
                return f"#{len(bound) - 1 - i}"
        if v not in free:
            free[v] = len(free)
        return f"#f{free[v]}"

    def binder_text(v: Var) -> str:
        if scheme is NormScheme.ONE_VAR:
            return "X"
        if scheme is NormScheme.TYPE_OF_VAR:
            return tynames.type_text(v.ty)
        return ""

    def walk(t: HolTerm, bound: tuple[Var, ...]) -> str:
        if isinstance(t, Var):
            return var_text(t, bound)
        if isinstance(t, Const):
            return t.name
        if isinstance(t, Abs):
            return f"(\\{binder_text(t.var)}. {walk(t.body, bound + (t.var,))})"
        parts = []
        while isinstance(t, App):
            parts.append(t.arg)
            t = t.fun
        parts.append(t)
        parts.reverse()
        return "(" + " ".join(walk(p, bound) for p in parts) + ")"

    return walk(term, ())


def extract(statement: HolTerm) -> frozenset[str]:
    """All features of a statement: type constructors, normalized type
    variables, constant names, and printed subterms under every scheme."""
    out: set[str] = set()
    tynames = _TyNames()
    for tv in term_ty_vars(statement):
        out.add("v:" + tynames.get(tv.name))

    def add_ty(ty: HolType) -> None:
        if isinstance(ty, TyApp):
            out.add("t:" + ty.con)
            for a in ty.args:
                add_ty(a)

    def walk(t: HolTerm) -> None:
        if isinstance(t, Var):
            add_ty(t.ty)
        elif isinstance(t, Const):
            out.add("c:" + t.name)
            for i in t.inst:
                add_ty(i)
        elif isinstance(t, App):
            walk(t.fun)
            walk(t.arg)
        else:
            add_ty(t.var.ty)
            walk(t.body)

    walk(statement)
    for sub in subterms(statement):
        for scheme in NormScheme:
            out.add("s:" + normalize_print(sub, scheme))
    return frozenset(out)


# ------------------------------------------------------------------ fea IO


def print_fea(named_features: list[tuple[str, frozenset[str]]]) -> str:
    """fea(NAME, [feature, ...]). lines, features sorted."""
    lines = [
        f"fea({show_name(name)}, [{', '.join(show_name(f) for f in sorted(fs))}])."
        for name, fs in named_features
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_fea(text: str) -> list[tuple[str, frozenset[str]]]:
    p = _Parser(_lex(text))
    out = []
    while p.peek().kind != "eof":
        head = p.name()
        if head != "fea":
            raise ParseError(f"expected a fea entry, found {head!r}")
        p.expect("(")
        name = p.name()
        p.expect(",")
        p.expect("[")
        feats: list[str] = []
        if not p.at_op("]"):
            feats.append(p.name())
            while p.at_op(","):
                p.take()
                feats.append(p.name())
        p.expect("]")
        p.expect(")")
        p.expect(".")
        out.append((name, frozenset(feats)))
    return out
