"""Simply typed higher-order terms with shallow polymorphism.

Types are either type variables or constructor applications; the function
arrow is the binary constructor ``fun``.  Terms are variables, constants
(carrying an explicit type instantiation), applications, and abstractions.
Binding is by the full variable identity (name, type); the innermost
abstraction with a matching variable binds an occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union


class HolError(Exception):
    pass


class UnknownSymbol(HolError):
    pass


class ArityMismatch(HolError):
    pass


class TypeMismatch(HolError):
    pass


class NotBoolean(HolError):
    pass


# --------------------------------------------------------------------- types


@dataclass(frozen=True)
class TyVar:
    name: str


@dataclass(frozen=True)
class TyApp:
    con: str
    args: tuple["HolType", ...] = ()


HolType = Union[TyVar, TyApp]

BOOL = TyApp("bool")
FUN = "fun"


def mk_fun(arg: HolType, res: HolType) -> HolType:
    return TyApp(FUN, (arg, res))


def mk_fun_chain(args: Iterable[HolType], res: HolType) -> HolType:
    out = res
    for a in reversed(tuple(args)):
        out = mk_fun(a, out)
    return out


def dest_fun(ty: HolType) -> tuple[HolType, HolType]:
    if isinstance(ty, TyApp) and ty.con == FUN and len(ty.args) == 2:
        return ty.args[0], ty.args[1]
    raise TypeMismatch(f"not a function type: {ty}")


def is_fun(ty: HolType) -> bool:
    return isinstance(ty, TyApp) and ty.con == FUN and len(ty.args) == 2


def strip_fun(ty: HolType) -> tuple[list[HolType], HolType]:
    """Argument types and final result of a (possibly 0-arrow) function type."""
    args = []
    while is_fun(ty):
        a, ty = dest_fun(ty)
        args.append(a)
    return args, ty


def ty_vars(ty: HolType) -> list[TyVar]:
    """Type variables in first-occurrence order."""
    out: list[TyVar] = []
    seen = set()

    def walk(t: HolType) -> None:
        if isinstance(t, TyVar):
            if t.name not in seen:
                seen.add(t.name)
                out.append(t)
        else:
            for a in t.args:
                walk(a)

    walk(ty)
    return out


def ty_cons(ty: HolType) -> set[str]:
    out: set[str] = set()

    def walk(t: HolType) -> None:
        if isinstance(t, TyApp):
            out.add(t.con)
            for a in t.args:
                walk(a)

    walk(ty)
    return out


def ty_subst(ty: HolType, mapping: dict[str, HolType]) -> HolType:
    if isinstance(ty, TyVar):
        return mapping.get(ty.name, ty)
    return TyApp(ty.con, tuple(ty_subst(a, mapping) for a in ty.args))


# --------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str
    ty: HolType


@dataclass(frozen=True)
class Const:
    name: str
    inst: tuple[HolType, ...] = ()


@dataclass(frozen=True)
class App:
    fun: "HolTerm"
    arg: "HolTerm"


@dataclass(frozen=True)
class Abs:
    var: Var
    body: "HolTerm"


HolTerm = Union[Var, Const, App, Abs]


# ----------------------------------------------------------------- signature


@dataclass(frozen=True)
class ConstDecl:
    tyvars: tuple[str, ...]
    ty: HolType


# Connectives and equality are ordinary constants; quantifiers are constants
# applied to abstractions.
_A = TyVar("A")
BUILTIN_TYPES = {"bool": 0, FUN: 2}
BUILTIN_CONSTS = {
    "=": ConstDecl(("A",), mk_fun_chain([_A, _A], BOOL)),
    "!": ConstDecl(("A",), mk_fun(mk_fun(_A, BOOL), BOOL)),
    "?": ConstDecl(("A",), mk_fun(mk_fun(_A, BOOL), BOOL)),
    "&": ConstDecl((), mk_fun_chain([BOOL, BOOL], BOOL)),
    "|": ConstDecl((), mk_fun_chain([BOOL, BOOL], BOOL)),
    "=>": ConstDecl((), mk_fun_chain([BOOL, BOOL], BOOL)),
    "~": ConstDecl((), mk_fun(BOOL, BOOL)),
}


class Signature:
    """Declared type constructors (name -> arity) and constants."""

    def __init__(self) -> None:
        self.types: dict[str, int] = dict(BUILTIN_TYPES)
        self.consts: dict[str, ConstDecl] = dict(BUILTIN_CONSTS)

    def declare_type(self, name: str, arity: int) -> None:
        self.types[name] = arity

    def declare_const(self, name: str, tyvars: tuple[str, ...], ty: HolType) -> None:
        self.consts[name] = ConstDecl(tyvars, ty)

    def type_arity(self, name: str) -> int:
        try:
            return self.types[name]
        except KeyError:
            raise UnknownSymbol(f"undeclared type constructor: {name}") from None

    def const_decl(self, name: str) -> ConstDecl:
        try:
            return self.consts[name]
        except KeyError:
            raise UnknownSymbol(f"undeclared constant: {name}") from None

    def has_const(self, name: str) -> bool:
        return name in self.consts

    def const_type(self, c: Const) -> HolType:
        decl = self.const_decl(c.name)
        if len(c.inst) != len(decl.tyvars):
            raise ArityMismatch(
                f"constant {c.name} expects {len(decl.tyvars)} type arguments, "
                f"got {len(c.inst)}"
            )
        if not c.inst:
            return decl.ty
        return ty_subst(decl.ty, dict(zip(decl.tyvars, c.inst)))

    def copy(self) -> "Signature":
        s = Signature()
        s.types = dict(self.types)
        s.consts = dict(self.consts)
        return s


def validate_type(ty: HolType, sig: Signature) -> None:
    if isinstance(ty, TyVar):
        return
    arity = sig.type_arity(ty.con)
    if arity != len(ty.args):
        raise ArityMismatch(
            f"type constructor {ty.con} has arity {arity}, applied to {len(ty.args)}"
        )
    for a in ty.args:
        validate_type(a, sig)


# ------------------------------------------------------------------ printing

# Compact term printing for error messages and debugging; the canonical
# corpus syntax lives in hammerkit.corpus.


def show_type(ty: HolType) -> str:
    if isinstance(ty, TyVar):
        return ty.name
    if is_fun(ty):
        a, r = dest_fun(ty)
        left = show_type(a)
        if is_fun(a):
            left = f"({left})"
        return f"{left} > {show_type(r)}"
    if not ty.args:
        return ty.con
    return ty.con + " " + " ".join(
        s if _ty_atomic(a) else f"({s})" for a, s in ((a, show_type(a)) for a in ty.args)
    )


def _ty_atomic(ty: HolType) -> bool:
    return isinstance(ty, TyVar) or not ty.args


def show_term(t: HolTerm) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        if t.inst:
            return "(" + t.name + " " + " ".join(
                show_type(i) if _ty_atomic(i) else f"({show_type(i)})" for i in t.inst
            ) + ")"
        return t.name
    if isinstance(t, App):
        f, a = show_term(t.fun), show_term(t.arg)
        if isinstance(t.arg, (App, Abs)):
            a = f"({a})"
        return f"{f} {a}"
    return f"\\{t.var.name}:{show_type(t.var.ty)}. {show_term(t.body)}"


# -------------------------------------------------------------- basic fns


def free_vars(t: HolTerm) -> list[Var]:
    """Free variables in first-occurrence order."""
    out: list[Var] = []
    seen: set[Var] = set()

    def walk(t: HolTerm, bound: tuple[Var, ...]) -> None:
        if isinstance(t, Var):
            if t not in bound and t not in seen:
                seen.add(t)
                out.append(t)
        elif isinstance(t, App):
            walk(t.fun, bound)
            walk(t.arg, bound)
        elif isinstance(t, Abs):
            walk(t.body, bound + (t.var,))

    walk(t, ())
    return out


def term_ty_vars(t: HolTerm) -> list[TyVar]:
    """Type variables in variable types and constant instantiations, in order."""
    out: list[TyVar] = []
    seen: set[str] = set()

    def add(ty: HolType) -> None:
        for v in ty_vars(ty):
            if v.name not in seen:
                seen.add(v.name)
                out.append(v)

    def walk(t: HolTerm) -> None:
        if isinstance(t, Var):
            add(t.ty)
        elif isinstance(t, Const):
            for i in t.inst:
                add(i)
        elif isinstance(t, App):
            walk(t.fun)
            walk(t.arg)
        else:
            add(t.var.ty)
            walk(t.body)

    walk(t)
    return out


def type_of(t: HolTerm, sig: Signature) -> HolType:
    """Principal type, assuming the term is well-typed."""
    if isinstance(t, Var):
        return t.ty
    if isinstance(t, Const):
        return sig.const_type(t)
    if isinstance(t, App):
        fty = type_of(t.fun, sig)
        a, r = dest_fun(fty)
        return r
    return mk_fun(t.var.ty, type_of(t.body, sig))


def typecheck(t: HolTerm, sig: Signature) -> HolType:
    """Check and return the type of a term, naming the offending subterm on error."""
    if isinstance(t, Var):
        validate_type(t.ty, sig)
        return t.ty
    if isinstance(t, Const):
        for i in t.inst:
            validate_type(i, sig)
        return sig.const_type(t)
    if isinstance(t, App):
        fty = typecheck(t.fun, sig)
        aty = typecheck(t.arg, sig)
        if not is_fun(fty):
            raise TypeMismatch(f"applying non-function {show_term(t.fun)} : {show_type(fty)}")
        want, res = dest_fun(fty)
        if want != aty:
            raise TypeMismatch(
                f"in {show_term(t)}: expected argument of type {show_type(want)}, "
                f"got {show_term(t.arg)} : {show_type(aty)}"
            )
        return res
    validate_type(t.var.ty, sig)
    return mk_fun(t.var.ty, typecheck(t.body, sig))


# ------------------------------------------------------------- substitution


def _rename_avoiding(v: Var, avoid: set[str]) -> Var:
    name = v.name
    while name in avoid:
        name += "'"
    return Var(name, v.ty)


def subst(t: HolTerm, var: Var, value: HolTerm) -> HolTerm:
    """Capture-avoiding substitution of value for free occurrences of var."""
    fv_value = {v.name for v in free_vars(value)}

    def walk(t: HolTerm) -> HolTerm:
        if isinstance(t, Var):
            return value if t == var else t
        if isinstance(t, Const):
            return t
        if isinstance(t, App):
            return App(walk(t.fun), walk(t.arg))
        if t.var == var:
            return t
        if var not in free_vars(t.body):
            return t
        if t.var.name in fv_value:
            fresh = _rename_avoiding(
                t.var, fv_value | {v.name for v in free_vars(t.body)}
            )
            return Abs(fresh, walk(subst(t.body, t.var, fresh)))
        return Abs(t.var, walk(t.body))

    return walk(t)


def beta_normalize(t: HolTerm) -> HolTerm:
    """Full beta-normal form; terminates on simply typed terms."""
    if isinstance(t, (Var, Const)):
        return t
    if isinstance(t, Abs):
        return Abs(t.var, beta_normalize(t.body))
    fun = beta_normalize(t.fun)
    if isinstance(fun, Abs):
        return beta_normalize(subst(fun.body, fun.var, t.arg))
    return App(fun, beta_normalize(t.arg))


# --------------------------------------------------------- alpha equivalence


def alpha_key(t: HolTerm):
    """Hashable nameless form; equal keys iff alpha-equivalent terms."""

    def walk(t: HolTerm, env: tuple[Var, ...]):
        if isinstance(t, Var):
            for i in range(len(env) - 1, -1, -1):
                if env[i] == t:
                    return ("b", len(env) - 1 - i)
            return ("f", t.name, t.ty)
        if isinstance(t, Const):
            return ("c", t.name, t.inst)
        if isinstance(t, App):
            return ("a", walk(t.fun, env), walk(t.arg, env))
        return ("l", t.var.ty, walk(t.body, env + (t.var,)))

    return walk(t, ())


def alpha_equal(s: HolTerm, t: HolTerm) -> bool:
    return alpha_key(s) == alpha_key(t)


def subterms(t: HolTerm) -> list[HolTerm]:
    """All subterms including the term itself, deduplicated up to alpha."""
    out: list[HolTerm] = []
    seen = set()

    def walk(t: HolTerm) -> None:
        k = alpha_key(t)
        if k not in seen:
            seen.add(k)
            out.append(t)
        if isinstance(t, App):
            walk(t.fun)
            walk(t.arg)
        elif isinstance(t, Abs):
            walk(t.var)
            walk(t.body)

    walk(t)
    return out


# ----------------------------------------------------- formula constructors


def mk_const_app(name: str, inst: tuple[HolType, ...], args: Iterable[HolTerm]) -> HolTerm:
    t: HolTerm = Const(name, inst)
    for a in args:
        t = App(t, a)
    return t


def mk_eq(lhs: HolTerm, rhs: HolTerm, ty: HolType) -> HolTerm:
    return mk_const_app("=", (ty,), [lhs, rhs])


def mk_conj(a: HolTerm, b: HolTerm) -> HolTerm:
    return mk_const_app("&", (), [a, b])


def mk_disj(a: HolTerm, b: HolTerm) -> HolTerm:
    return mk_const_app("|", (), [a, b])


def mk_imp(a: HolTerm, b: HolTerm) -> HolTerm:
    return mk_const_app("=>", (), [a, b])


def mk_neg(a: HolTerm) -> HolTerm:
    return mk_const_app("~", (), [a])


def mk_forall(v: Var, body: HolTerm) -> HolTerm:
    return App(Const("!", (v.ty,)), Abs(v, body))


def mk_exists(v: Var, body: HolTerm) -> HolTerm:
    return App(Const("?", (v.ty,)), Abs(v, body))


def mk_foralls(vs: Iterable[Var], body: HolTerm) -> HolTerm:
    out = body
    for v in reversed(tuple(vs)):
        out = mk_forall(v, out)
    return out


def dest_binder(t: HolTerm, name: str) -> tuple[Var, HolTerm] | None:
    if (
        isinstance(t, App)
        and isinstance(t.fun, Const)
        and t.fun.name == name
        and isinstance(t.arg, Abs)
    ):
        return t.arg.var, t.arg.body
    return None


def dest_forall(t: HolTerm) -> tuple[Var, HolTerm] | None:
    return dest_binder(t, "!")


def dest_exists(t: HolTerm) -> tuple[Var, HolTerm] | None:
    return dest_binder(t, "?")


def strip_foralls(t: HolTerm) -> tuple[list[Var], HolTerm]:
    vs = []
    while (d := dest_forall(t)) is not None:
        vs.append(d[0])
        t = d[1]
    return vs, t


def dest_binop(t: HolTerm, name: str) -> tuple[HolTerm, HolTerm] | None:
    if (
        isinstance(t, App)
        and isinstance(t.fun, App)
        and isinstance(t.fun.fun, Const)
        and t.fun.fun.name == name
    ):
        return t.fun.arg, t.arg
    return None


def dest_conj(t: HolTerm) -> tuple[HolTerm, HolTerm] | None:
    return dest_binop(t, "&")


def dest_disj(t: HolTerm) -> tuple[HolTerm, HolTerm] | None:
    return dest_binop(t, "|")


def dest_imp(t: HolTerm) -> tuple[HolTerm, HolTerm] | None:
    return dest_binop(t, "=>")


def dest_neg(t: HolTerm) -> HolTerm | None:
    if isinstance(t, App) and isinstance(t.fun, Const) and t.fun.name == "~":
        return t.arg
    return None


def dest_eq(t: HolTerm) -> tuple[HolTerm, HolTerm] | None:
    return dest_binop(t, "=")


# ---------------------------------------------------------- conjunct splits


@dataclass(frozen=True)
class ConjunctAddress:
    """Position of a conjunct: L/R path through top-level conjunctions plus
    the 1-based flat index used in names like ``T_c2``."""

    path: tuple[str, ...]
    index: int


def split_conjuncts(formula: HolTerm, sig: Signature) -> list[tuple[ConjunctAddress, HolTerm]]:
    """Distribute top-level universals over conjunctions and split.

    Each returned conjunct re-binds, in original order, exactly the stripped
    universals it uses.  A conjunction-free formula yields a singleton at the
    root address.
    """
    if typecheck(formula, sig) != BOOL:
        raise NotBoolean(f"not a boolean formula: {show_term(formula)}")

    def walk(t: HolTerm) -> list[tuple[tuple[str, ...], HolTerm]]:
        vs, body = strip_foralls(t)
        parts = dest_conj(body)
        if parts is None:
            return [((), t)]
        out = []
        for step, sub in (("L", parts[0]), ("R", parts[1])):
            fv = set(free_vars(sub))
            requant = mk_foralls([v for v in vs if v in fv], sub)
            out.extend(((step,) + p, c) for p, c in walk(requant))
        return out

    flat = walk(formula)
    return [(ConjunctAddress(path, i + 1), c) for i, (path, c) in enumerate(flat)]


def conjunct_paths(formula: HolTerm, sig: Signature) -> list[tuple[str, ...]]:
    return [addr.path for addr, _ in split_conjuncts(formula, sig)]
