"""Translation of higher-order statements into untyped first-order logic.

Per statement: beta-normalize, lift remaining lambdas into fresh top-level
function symbols, pull boolean-typed arguments out through existentials,
then map the result onto first-order terms.  A constant applied to its
full declared arity becomes a direct application; variables, partial
applications and extra arguments go through the binary apply functor
``ap``, with arity-0 proxy constants bridging the two views.  Type
information otherwise erased is kept by wrapping terms in the tag
``s(flattened type, term)``; the distinguished predicate ``bool`` turns
boolean terms into formulas.

The reserved symbols are ``s``, ``ap``, ``bool`` and ``fn`` (the arrow in
flattened types).  Everything else is mangled to prover-friendly names,
with a reverse table for reading unsat cores back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .hol import (
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
    beta_normalize,
    dest_fun,
    free_vars,
    is_fun,
    mk_conj,
    mk_eq,
    mk_exists,
    mk_foralls,
    strip_fun,
    term_ty_vars,
    ty_vars,
    type_of,
)

RESERVED = frozenset({"s", "ap", "bool", "fn"})

_CONNECTIVES = frozenset({"=", "&", "|", "=>", "~", "!", "?"})


class TranslateError(Exception):
    pass


# ---------------------------------------------------------------- FOF AST


@dataclass(frozen=True)
class FofVar:
    name: str


@dataclass(frozen=True)
class FofApp:
    sym: str
    args: tuple["FofTerm", ...] = ()


FofTerm = Union[FofVar, FofApp]


@dataclass(frozen=True)
class Pred:
    sym: str
    args: tuple[FofTerm, ...] = ()


@dataclass(frozen=True)
class Eq:
    lhs: FofTerm
    rhs: FofTerm


@dataclass(frozen=True)
class Not:
    body: "FofFormula"


@dataclass(frozen=True)
class BinOp:
    op: str  # "&", "|", "=>", "<=>"
    lhs: "FofFormula"
    rhs: "FofFormula"


@dataclass(frozen=True)
class Quant:
    kind: str  # "!" or "?"
    vars: tuple[str, ...]
    body: "FofFormula"


FofFormula = Union[Pred, Eq, Not, BinOp, Quant]


@dataclass(frozen=True)
class LiftedDef:
    symbol: str
    arity: int
    axiom: "FofFormula"


@dataclass(frozen=True)
class FofProblem:
    axioms: tuple[tuple[str, FofFormula], ...]
    conjecture: tuple[str, FofFormula]
    reverse: Mapping[str, str]  # axiom name -> source premise name
    helpers: frozenset[str]  # axiom names of lifted defs and proxy bridges


# ------------------------------------------------------------- name mangling

_SYMBOL_OK = re.compile(r"[A-Za-z0-9_]")
_LOWER_WORD = re.compile(r"^[a-z][A-Za-z0-9_]*$")


def _encode(name: str) -> str:
    out = []
    for ch in name:
        if _SYMBOL_OK.match(ch):
            out.append(ch)
        else:
            out.append("".join(f"%{b:02x}" for b in ch.encode("utf-8")))
    return "".join(out)


class NameMangler:
    """Deterministic HOL-name to TPTP-name translation.

    Symbols (functions, predicates, flattened type constructors) share one
    namespace seeded with the reserved words; annotated-formula names live
    in a second namespace.  First letter is lowercased, other characters
    are kept when alphanumeric and percent-encoded otherwise, collisions
    get a numeric suffix.
    """

    def __init__(self) -> None:
        self._symbols: dict[tuple[str, str], str] = {}
        self._taken_symbols: set[str] = set(RESERVED)
        self._names: dict[str, str] = {}
        self._taken_names: set[str] = set()
        self.reverse: dict[str, str] = {}

    def _candidate(self, name: str) -> str:
        enc = _encode(name) or "x"
        if enc[0].isupper():
            enc = enc[0].lower() + enc[1:]
        elif not enc[0].isalpha():
            enc = "x" + enc
        return enc

    def _unique(self, base: str, taken: set[str]) -> str:
        if base not in taken:
            taken.add(base)
            return base
        k = 0
        while f"{base}{k}" in taken:
            k += 1
        taken.add(f"{base}{k}")
        return f"{base}{k}"

    def symbol(self, kind: str, name: str) -> str:
        """kind distinguishes namespaces sharing one spelling: "const",
        "type", and minted kinds like "proxy" or "lifted"."""
        key = (kind, name)
        if key not in self._symbols:
            base = self._candidate(name)
            if kind == "type" and name == "fun":
                base = "fn"  # the reserved arrow symbol, shared on purpose
                self._symbols[key] = base
                return base
            self._symbols[key] = self._unique(base, self._taken_symbols)
        return self._symbols[key]

    def fresh_symbol(self, base: str) -> str:
        return self._unique(base, self._taken_symbols)

    def axiom_name(self, source: str) -> str:
        if source not in self._names:
            mangled = self._unique(self._candidate(source), self._taken_names)
            self._names[source] = mangled
            self.reverse[mangled] = source
        return self._names[source]


def needs_quotes(name: str) -> bool:
    return not _LOWER_WORD.match(name)


# ------------------------------------------------------------ type flattening


class VarScope:
    """FOF variable names for one formula: term variables and the type
    variables appearing in tags, allocated first-come with de-duplication."""

    def __init__(self) -> None:
        self.used: set[str] = set()
        self.tyvars: dict[str, str] = {}

    def _alloc(self, name: str) -> str:
        base = re.sub(r"[^A-Za-z0-9_]", "", name)
        if not base or not base[0].isalpha():
            base = "V" + base
        base = base[0].upper() + base[1:]
        if base not in self.used:
            self.used.add(base)
            return base
        k = 0
        while f"{base}{k}" in self.used:
            k += 1
        self.used.add(f"{base}{k}")
        return f"{base}{k}"

    def tyvar(self, name: str) -> str:
        if name not in self.tyvars:
            self.tyvars[name] = self._alloc(name)
        return self.tyvars[name]

    def term_var(self, v: Var) -> str:
        return self._alloc(v.name)


def flatten_type(ty: HolType, scope: VarScope, mangler: NameMangler) -> FofTerm:
    """Types as first-order terms: variables stay variables, constructors
    become function symbols, the arrow becomes binary ``fn``."""
    if isinstance(ty, TyVar):
        return FofVar(scope.tyvar(ty.name))
    sym = mangler.symbol("type", ty.con)
    return FofApp(sym, tuple(flatten_type(a, scope, mangler) for a in ty.args))


# ------------------------------------------------------------ lambda lifting


def _is_quant(t: HolTerm) -> bool:
    return (
        isinstance(t, App)
        and isinstance(t.fun, Const)
        and t.fun.name in ("!", "?")
    )


def _formula_parts(t: HolTerm, sig: Signature):
    """Decompose one formula layer: ("bin", op, l, r), ("not", b),
    ("quant", kind, abs_or_term, ty), ("iff", l, r) or None for atoms."""
    if isinstance(t, App) and isinstance(t.fun, App) and isinstance(t.fun.fun, Const):
        c = t.fun.fun
        if c.name in ("&", "|", "=>"):
            return ("bin", c.name, t.fun.arg, t.arg)
        if c.name == "=" and c.inst and c.inst[0] == BOOL:
            return ("iff", t.fun.arg, t.arg)
    if isinstance(t, App) and isinstance(t.fun, Const):
        if t.fun.name == "~":
            return ("not", t.arg)
        if t.fun.name in ("!", "?"):
            return ("quant", t.fun.name, t.arg, t.fun.inst[0])
    return None


def _alpha_key(t: HolTerm, bound: tuple[Var, ...] = ()) -> object:
    """A hashable form of t modulo bound-variable names."""
    if isinstance(t, Var):
        for i in range(len(bound) - 1, -1, -1):
            if bound[i] == t:
                return ("b", len(bound) - 1 - i)
        return ("f", t.name, t.ty)
    if isinstance(t, Const):
        return ("c", t.name, t.inst)
    if isinstance(t, App):
        return ("a", _alpha_key(t.fun, bound), _alpha_key(t.arg, bound))
    return ("l", t.var.ty, _alpha_key(t.body, bound + (t.var,)))


def lambda_lift(t: HolTerm, state: "TranslationState") -> HolTerm:
    """Replace every non-quantifier abstraction by a fresh constant applied
    to the abstraction's free variables, innermost first.  Defining axioms
    are queued on the state for later translation.  Alpha-equivalent
    abstractions with the same captured variables share one constant, so a
    lambda occurring in several statements of a problem stays connected."""

    def formula(t: HolTerm) -> HolTerm:
        parts = _formula_parts(t, state.sig)
        if parts is None:
            return term(t)
        if parts[0] == "bin":
            _, op, l, r = parts
            return App(App(Const(op), formula(l)), formula(r))
        if parts[0] == "iff":
            _, l, r = parts
            return App(App(Const("=", (BOOL,)), formula(l)), formula(r))
        if parts[0] == "not":
            return App(Const("~"), formula(parts[1]))
        _, kind, body, ty = parts
        if isinstance(body, Abs):
            return App(Const(kind, (ty,)), Abs(body.var, formula(body.body)))
        return App(Const(kind, (ty,)), term(body))

    def term(t: HolTerm) -> HolTerm:
        if isinstance(t, (Var, Const)):
            return t
        if isinstance(t, App):
            if _is_quant(t) and isinstance(t.arg, Abs):
                # A formula embedded in term position; its binder is
                # structural and must survive until boolean-argument
                # removal relocates the whole subterm.
                return formula(t)
            return App(term(t.fun), term(t.arg))
        body = formula(t.body) if type_of(t.body, state.sig) == BOOL else term(t.body)
        lifted = Abs(t.var, body)
        captured = free_vars(lifted)
        key = (_alpha_key(lifted), tuple((v.name, v.ty) for v in captured))
        name = state.lam_cache.get(key)
        if name is None:
            chain_ty = type_of(lifted, state.sig)
            for v in reversed(captured):
                chain_ty = TyApp("fun", (v.ty, chain_ty))
            tyvars = tuple(v.name for v in ty_vars(chain_ty))
            name = state.fresh_const_name("lam")
            state.sig.declare_const(name, tyvars, chain_ty)
            state.arity[name] = len(captured)
            state.symbol_kind[name] = "lifted"
            state.lam_cache[key] = name
            head_ax: HolTerm = Const(name, tuple(TyVar(a) for a in tyvars))
            for v in captured:
                head_ax = App(head_ax, v)
            x = lifted.var
            axiom = mk_foralls(
                captured + [x],
                mk_eq(App(head_ax, x), body, type_of(body, state.sig)),
            )
            state.pending_defs.append((name, len(captured), axiom))
        decl = state.sig.const_decl(name)
        head: HolTerm = Const(name, tuple(TyVar(a) for a in decl.tyvars))
        for v in captured:
            head = App(head, v)
        return head

    return formula(t)


# ------------------------------------------------------- boolean arguments


def remove_bool_args(t: HolTerm, sig: Signature) -> HolTerm:
    """Pull boolean-typed argument subterms (other than plain variables)
    out of atoms: each becomes a fresh existential B with B = phi conjoined
    in front of the atom, phi processed recursively as a formula."""
    taken = set()

    def names(t: HolTerm) -> None:
        if isinstance(t, Var):
            taken.add(t.name)
        elif isinstance(t, App):
            names(t.fun)
            names(t.arg)
        elif isinstance(t, Abs):
            taken.add(t.var.name)
            names(t.body)

    names(t)
    counter = [0]

    def fresh_bool() -> Var:
        while True:
            name = f"B{counter[0]}" if counter[0] else "B"
            counter[0] += 1
            if name not in taken:
                taken.add(name)
                return Var(name, BOOL)

    def formula(t: HolTerm) -> HolTerm:
        parts = _formula_parts(t, sig)
        if parts is None:
            return atom(t)
        if parts[0] == "bin":
            _, op, l, r = parts
            return App(App(Const(op), formula(l)), formula(r))
        if parts[0] == "iff":
            _, l, r = parts
            return App(App(Const("=", (BOOL,)), formula(l)), formula(r))
        if parts[0] == "not":
            return App(Const("~"), formula(parts[1]))
        _, kind, body, ty = parts
        if isinstance(body, Abs):
            return App(Const(kind, (ty,)), Abs(body.var, formula(body.body)))
        return atom(t)

    def atom(t: HolTerm) -> HolTerm:
        extracted: list[tuple[Var, HolTerm]] = []

        def scan(t: HolTerm) -> HolTerm:
            if isinstance(t, (Var, Const)):
                return t
            if isinstance(t, Abs):
                return Abs(t.var, scan(t.body))
            fun = scan(t.fun)
            arg = t.arg
            # Variables pass through as term-level booleans; constants go
            # through their proxy, whose bridge axiom ties them back to
            # the formula world.  Everything else is pulled out.
            if not isinstance(arg, (Var, Const)) and type_of(arg, sig) == BOOL:
                b = fresh_bool()
                extracted.append((b, arg))
                return App(fun, b)
            return App(fun, scan(arg))

        out = scan(t)
        for b, phi in reversed(extracted):
            out = mk_exists(b, mk_conj(mk_eq(b, formula(phi), BOOL), out))
        return out

    return formula(t)


# ----------------------------------------------------------- the translator


@dataclass
class TranslationState:
    """Per-problem bookkeeping: a private signature copy, arities, proxy
    constants, pending lifted definitions, and the name mangler."""

    sig: Signature
    mangler: NameMangler = field(default_factory=NameMangler)
    tag_all: bool = False
    arity: dict[str, int] = field(default_factory=dict)
    symbol_kind: dict[str, str] = field(default_factory=dict)
    proxies: dict[str, str] = field(default_factory=dict)  # const -> proxy const
    pending_defs: list[tuple[str, int, HolTerm]] = field(default_factory=list)
    pending_proxy_axioms: list[tuple[str, HolTerm]] = field(default_factory=list)
    lifted: list[LiftedDef] = field(default_factory=list)
    lam_cache: dict[object, str] = field(default_factory=dict)
    _fresh: dict[str, int] = field(default_factory=dict)

    def fresh_const_name(self, base: str) -> str:
        k = self._fresh.get(base, 0) + 1
        while self.sig.has_const(f"{base}{k}"):
            k += 1
        self._fresh[base] = k
        return f"{base}{k}"

    def const_arity(self, name: str) -> int:
        if name not in self.arity:
            args, _ = strip_fun(self.sig.const_decl(name).ty)
            self.arity[name] = len(args)
        return self.arity[name]

    def is_pred(self, name: str) -> bool:
        """True when the symbol's saturated form is a formula.  Proxies
        are excluded: they live strictly in the term world."""
        if self.symbol_kind.get(name) == "proxy":
            return False
        res = _strip_arrows(self.sig.const_decl(name).ty, self.const_arity(name))
        return res == BOOL

    def symbol(self, name: str) -> str:
        return self.mangler.symbol(self.symbol_kind.get(name, "const"), name)

    def proxy_for(self, name: str) -> str:
        """The arity-0 twin of a constant, declared on first use together
        with its bridging axiom."""
        if name not in self.proxies:
            decl = self.sig.const_decl(name)
            pname = name + "_p"
            while self.sig.has_const(pname):
                pname += "_"
            self.sig.declare_const(pname, decl.tyvars, decl.ty)
            self.arity[pname] = 0
            self.symbol_kind[pname] = "proxy"
            self.proxies[name] = pname
            inst = tuple(TyVar(a) for a in decl.tyvars)
            args, res = strip_fun(decl.ty)
            xs = [Var(f"X{i}", a) for i, a in enumerate(args)]
            lhs: HolTerm = Const(pname, inst)
            rhs: HolTerm = Const(name, inst)
            for x in xs:
                lhs = App(lhs, x)
                rhs = App(rhs, x)
            axiom = mk_foralls(xs, mk_eq(lhs, rhs, res))
            self.pending_proxy_axioms.append((pname, axiom))
        return self.proxies[name]


def _strip_arrows(ty: HolType, n: int) -> HolType | None:
    """The general type after n more arguments; None when a type variable
    stands in the way (maximal information loss, so always tag)."""
    for _ in range(n):
        if not is_fun(ty):
            return None
        _, ty = dest_fun(ty)
    return ty


def _has_tyvar(ty: HolType | None) -> bool:
    return ty is None or bool(ty_vars(ty))


class _Translator:
    """HOL to FOF for one statement, sharing per-problem state.

    Tag placement is positional, so both sides of any possible
    instantiation agree: an argument slot is tagged iff the head symbol's
    general type at that slot contains a type variable (both slots of
    ``ap`` and both sides of ``=`` always qualify), and an application is
    additionally tagged when the head constant's general result type at
    the consumed arity contains one.  In tag-all mode everything is
    wrapped."""

    def __init__(self, state: TranslationState):
        self.state = state
        self.scope = VarScope()

    def _wrap(self, ty: HolType, t: FofTerm) -> FofTerm:
        flat = flatten_type(ty, self.scope, self.state.mangler)
        return FofApp("s", (flat, t))

    def _chain(self, t: HolTerm) -> tuple[HolTerm, list[HolTerm], list[HolTerm]]:
        args: list[HolTerm] = []
        spine: list[HolTerm] = []
        while isinstance(t, App):
            args.append(t.arg)
            spine.append(t)
            t = t.fun
        args.reverse()
        spine.reverse()
        return t, args, spine

    def term(
        self, t: HolTerm, env: Mapping[Var, str], slot: HolType | None
    ) -> FofTerm:
        """Encode t for a slot whose general type is `slot`; None means
        the slot always carries a tag."""
        core, tagged, inst = self._core(t, env)
        need = self.state.tag_all or slot is None or _has_tyvar(slot)
        if need and not tagged:
            return self._wrap(inst, core)
        return core

    def _core(
        self, t: HolTerm, env: Mapping[Var, str]
    ) -> tuple[FofTerm, bool, HolType]:
        """(encoded term, whether already tag-wrapped, instance type)."""
        sig = self.state.sig
        if isinstance(t, Var):
            return FofVar(env[t]), False, t.ty
        if isinstance(t, Abs):
            raise TranslateError("abstraction survived lambda lifting")
        head, args, spine = self._chain(t) if isinstance(t, App) else (t, [], [])
        if isinstance(head, Abs):
            raise TranslateError("abstraction survived lambda lifting")
        if isinstance(head, Var):
            out: FofTerm = FofVar(env[head])
            tagged = False
            prev_ty = head.ty
            for a, node in zip(args, spine):
                if not tagged:
                    out = self._wrap(prev_ty, out)
                out = FofApp("ap", (out, self.term(a, env, None)))
                tagged = False
                if self.state.tag_all:
                    out = self._wrap(type_of(node, sig), out)
                    tagged = True
                prev_ty = type_of(node, sig)
            return out, tagged, prev_ty
        name = head.name
        decl = sig.const_decl(name)
        k = self.state.const_arity(name)
        if self.state.is_pred(name):
            k = None  # the saturated form is a predicate; terms use the proxy
        if k is not None and len(args) >= k:
            gargs, _ = strip_fun(decl.ty)
            out = FofApp(
                self.state.symbol(name),
                tuple(
                    self.term(a, env, gargs[i]) for i, a in enumerate(args[:k])
                ),
            )
            node = spine[k - 1] if k else head
            prev_ty = type_of(node, sig)
            tagged = False
            if self.state.tag_all or _has_tyvar(_strip_arrows(decl.ty, k)):
                out = self._wrap(prev_ty, out)
                tagged = True
            for i, (a, node) in enumerate(zip(args[k:], spine[k:]), start=1):
                if not tagged:
                    out = self._wrap(prev_ty, out)
                out = FofApp("ap", (out, self.term(a, env, None)))
                tagged = False
                prev_ty = type_of(node, sig)
                if self.state.tag_all or _has_tyvar(_strip_arrows(decl.ty, k + i)):
                    out = self._wrap(prev_ty, out)
                    tagged = True
            return out, tagged, prev_ty
        proxy = self.state.proxy_for(name)
        out = FofApp(self.state.symbol(proxy))
        tagged = False
        prev_ty = sig.const_type(head)
        for i, (a, node) in enumerate(zip(args, spine), start=1):
            if not tagged:
                out = self._wrap(prev_ty, out)
            out = FofApp("ap", (out, self.term(a, env, None)))
            tagged = False
            prev_ty = type_of(node, sig)
            if self.state.tag_all or _has_tyvar(_strip_arrows(decl.ty, i)):
                out = self._wrap(prev_ty, out)
                tagged = True
        return out, tagged, prev_ty

    def formula(self, t: HolTerm, env: Mapping[Var, str]) -> FofFormula:
        sig = self.state.sig
        parts = _formula_parts(t, sig)
        if parts is not None:
            if parts[0] == "bin":
                _, op, l, r = parts
                return BinOp(op, self.formula(l, env), self.formula(r, env))
            if parts[0] == "iff":
                _, l, r = parts
                return BinOp("<=>", self.formula(l, env), self.formula(r, env))
            if parts[0] == "not":
                return Not(self.formula(parts[1], env))
            _, kind, body, ty = parts
            if not isinstance(body, Abs):
                # Eta-expand a point-free quantifier application.
                v = Var("Q", ty)
                while v.name in {x.name for x in free_vars(body)}:
                    v = Var(v.name + "0", ty)
                body = Abs(v, App(body, v))
            name = self.scope.term_var(body.var)
            inner = self.formula(body.body, {**env, body.var: name})
            return Quant(kind, (name,), inner)
        # Equality over non-boolean types is the remaining binary atom.
        # Its slots are tagged by the equation's instance type: a ground
        # equation stays bare (nothing to protect, and unit rewriting
        # needs the naked sides), a type-variable one keeps its guard.
        if (
            isinstance(t, App)
            and isinstance(t.fun, App)
            and isinstance(t.fun.fun, Const)
            and t.fun.fun.name == "="
        ):
            ety = t.fun.fun.inst[0]
            return Eq(
                self.term(t.fun.arg, env, ety), self.term(t.arg, env, ety)
            )
        head, args, _ = self._chain(t) if isinstance(t, App) else (t, [], [])
        if (
            isinstance(head, Const)
            and head.name not in _CONNECTIVES
            and self.state.is_pred(head.name)
            and len(args) == self.state.const_arity(head.name)
        ):
            gargs, _ = strip_fun(self.state.sig.const_decl(head.name).ty)
            return Pred(
                self.state.symbol(head.name),
                tuple(self.term(a, env, gargs[i]) for i, a in enumerate(args)),
            )
        return Pred("bool", (self.term(t, env, BOOL),))

    def statement(self, t: HolTerm) -> FofFormula:
        for tv in term_ty_vars(t):
            self.scope.tyvar(tv.name)
        env = {v: self.scope.term_var(v) for v in free_vars(t)}
        body = self.formula(t, env)
        closure = tuple(self.scope.tyvars.values()) + tuple(env.values())
        if closure:
            return Quant("!", closure, body)
        return body


def translate_statement(t: HolTerm, state: TranslationState) -> FofFormula:
    """One statement through the whole pipeline, accumulating lifted
    definitions and proxy axioms on the state."""
    t = beta_normalize(t)
    t = lambda_lift(t, state)
    t = remove_bool_args(t, state.sig)
    return _Translator(state).statement(t)


def _drain_pending(state: TranslationState) -> list[tuple[str, FofFormula, bool]]:
    """Translate queued lifted definitions and proxy axioms (which may in
    turn queue more proxies) until the state settles."""
    out: list[tuple[str, FofFormula, bool]] = []
    while state.pending_defs or state.pending_proxy_axioms:
        if state.pending_defs:
            name, arity, axiom = state.pending_defs.pop(0)
            axiom = remove_bool_args(beta_normalize(axiom), state.sig)
            f = _Translator(state).statement(axiom)
            state.lifted.append(LiftedDef(state.symbol(name), arity, f))
            out.append((state.symbol(name) + "_def", f, True))
            continue
        pname, axiom = state.pending_proxy_axioms.pop(0)
        axiom = remove_bool_args(beta_normalize(axiom), state.sig)
        f = _Translator(state).statement(axiom)
        out.append((state.symbol(pname) + "_ax", f, True))
    return out


def _term_key(t: FofTerm) -> object:
    if isinstance(t, FofVar):
        return ("", (t.name,))
    return (t.sym, tuple(_term_key(a) for a in t.args))


def _ground_tag_types(f: FofFormula, out: dict[object, FofTerm]) -> None:
    """Collect tag type arguments that contain no type variables."""

    def ground(t: FofTerm) -> bool:
        return isinstance(t, FofApp) and all(ground(a) for a in t.args)

    def term(t: FofTerm) -> None:
        if isinstance(t, FofVar):
            return
        if t.sym == "s" and len(t.args) == 2 and ground(t.args[0]):
            out.setdefault(_term_key(t.args[0]), t.args[0])
        for a in t.args:
            term(a)

    if isinstance(f, Pred):
        for a in f.args:
            term(a)
    elif isinstance(f, Eq):
        term(f.lhs)
        term(f.rhs)
    elif isinstance(f, Not):
        _ground_tag_types(f.body, out)
    elif isinstance(f, BinOp):
        _ground_tag_types(f.lhs, out)
        _ground_tag_types(f.rhs, out)
    elif isinstance(f, Quant):
        _ground_tag_types(f.body, out)


def translate_problem(
    premises: Iterable[tuple[str, HolTerm]],
    conjecture: tuple[str, HolTerm],
    sig: Signature,
    tag_all: bool = False,
) -> FofProblem:
    """A full problem: encoded premises, the encoded conjecture, lifted
    definitions and proxy bridges, with deterministic naming.

    Tags over a type without type variables are semantically inert, so
    each such type found in the encoded problem gets a collapse axiom
    s(ty, X) = X.  These bridge a polymorphic statement instantiated at a
    ground type to the bare terms of monomorphic statements.  Tag-all
    mode keeps every tag firmly in place instead."""
    state = TranslationState(sig=sig.copy(), tag_all=tag_all)
    axioms: list[tuple[str, FofFormula]] = []
    helpers: set[str] = set()
    for name, stmt in premises:
        f = translate_statement(stmt, state)
        axioms.append((state.mangler.axiom_name(name), f))
    goal_name, goal = conjecture
    goal_f = translate_statement(goal, state)
    for hname, f, _ in _drain_pending(state):
        n = state.mangler.axiom_name(hname)
        axioms.append((n, f))
        helpers.add(n)
    if not tag_all:
        tag_types: dict[object, FofTerm] = {}
        for _, f in axioms:
            _ground_tag_types(f, tag_types)
        _ground_tag_types(goal_f, tag_types)
        x = FofVar("X")
        for i, key in enumerate(sorted(tag_types, key=repr)):
            ty = tag_types[key]
            n = state.mangler.axiom_name(f"tag_collapse{i + 1}")
            axioms.append((n, Quant("!", ("X",), Eq(FofApp("s", (ty, x)), x))))
            helpers.add(n)
    return FofProblem(
        axioms=tuple(axioms),
        conjecture=(state.mangler.axiom_name(goal_name), goal_f),
        reverse=dict(state.mangler.reverse),
        helpers=frozenset(helpers),
    )


# ------------------------------------------------------------------- linting


def check_problem(problem: FofProblem) -> dict[str, int]:
    """Verify the first-order invariants: every symbol at one arity, no
    symbol both predicate and function.  Returns the symbol-arity map."""
    fun_arity: dict[str, int] = {}
    pred_arity: dict[str, int] = {}

    def term(t: FofTerm) -> None:
        if isinstance(t, FofVar):
            return
        seen = fun_arity.setdefault(t.sym, len(t.args))
        if seen != len(t.args):
            raise TranslateError(
                f"function {t.sym} used at arities {seen} and {len(t.args)}"
            )
        if t.sym in pred_arity:
            raise TranslateError(f"{t.sym} used as both function and predicate")
        for a in t.args:
            term(a)

    def formula(f: FofFormula) -> None:
        if isinstance(f, Pred):
            seen = pred_arity.setdefault(f.sym, len(f.args))
            if seen != len(f.args):
                raise TranslateError(
                    f"predicate {f.sym} used at arities {seen} and {len(f.args)}"
                )
            if f.sym in fun_arity:
                raise TranslateError(
                    f"{f.sym} used as both function and predicate"
                )
            for a in f.args:
                term(a)
        elif isinstance(f, Eq):
            term(f.lhs)
            term(f.rhs)
        elif isinstance(f, Not):
            formula(f.body)
        elif isinstance(f, BinOp):
            formula(f.lhs)
            formula(f.rhs)
        else:
            formula(f.body)

    for _, f in problem.axioms:
        formula(f)
    formula(problem.conjecture[1])
    return {**fun_arity, **pred_arity}


def formula_vars(f: FofFormula) -> set[str]:
    """Free and bound variable names, for well-formedness checks."""
    out: set[str] = set()

    def term(t: FofTerm) -> None:
        if isinstance(t, FofVar):
            out.add(t.name)
        else:
            for a in t.args:
                term(a)

    def walk(f: FofFormula) -> None:
        if isinstance(f, Pred):
            for a in f.args:
                term(a)
        elif isinstance(f, Eq):
            term(f.lhs)
            term(f.rhs)
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, BinOp):
            walk(f.lhs)
            walk(f.rhs)
        else:
            out.update(f.vars)
            walk(f.body)

    walk(f)
    return out
