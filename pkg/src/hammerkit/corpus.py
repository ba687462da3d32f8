"""Line-oriented theorem export format and the corpus model built from it.

A corpus directory holds one ``corpus.thy`` file naming the theories in
build order, one ``<theory>.tt`` file per theory with the exported
declarations and theorems, and optional ``<theory>.deps`` sidecars with
per-conjunct dependencies.  Entry syntax::

    tt(list, ty, $t > $t).
    tt(HD, ty, ![A:$t]: (list A > A)).
    tt(HD0, ax, ![n:int, t:(list int)]: ((HD int) ((CONS int) n t) = n)).

Roles are ``ty`` (type constructor or constant declaration), ``ax``
(theorem) and ``conj`` (conjecture).  Application is juxtaposition, the
type arguments of polymorphic constants are explicit, `` > `` is the
right-associative type arrow, and ``![A:$t]:`` binds a type variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Sequence, Union

from .hol import (
    Abs,
    App,
    BOOL,
    ConjunctAddress,
    Const,
    ConstDecl,
    HolTerm,
    HolType,
    NotBoolean,
    Signature,
    TyApp,
    TyVar,
    UnknownSymbol,
    Var,
    dest_binder,
    dest_fun,
    free_vars,
    is_fun,
    mk_const_app,
    mk_eq,
    mk_exists,
    mk_forall,
    mk_fun,
    split_conjuncts,
    subst,
    term_ty_vars,
    type_of,
    typecheck,
)


class ParseError(Exception):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        if line is not None:
            msg = f"line {line}, column {col}: {msg}"
        super().__init__(msg)
        self.line = line
        self.col = col


class PrintError(Exception):
    pass


class UnknownTheorem(Exception):
    pass


class CycleDetected(Exception):
    pass


# ------------------------------------------------------------------- lexing

# Bare names never start with ~ / . ' and never end with a dot, so the
# negation operator, the entry terminator and quote delimiters stay
# unambiguous; anything else must be single-quoted.
_BARE_NAME = re.compile(r"[A-Za-z0-9_](?:[A-Za-z0-9_~/.']*[A-Za-z0-9_~/'])?")

_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<tyt>\$t)
      | (?P<name>[A-Za-z0-9_](?:[A-Za-z0-9_~/.']*[A-Za-z0-9_~/'])?)
      | (?P<qname>'(?:[^'\\\n]|\\.)*')
      | (?P<op>=>|[=>!?^~&|()\[\],:.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # name | qname | tyt | op | eof
    value: str
    line: int
    col: int


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


def _quote(name: str) -> str:
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def show_name(name: str) -> str:
    """A name as it appears in a file: bare when the lexer allows it."""
    if _BARE_NAME.fullmatch(name):
        return name
    return _quote(name)


def _lex(text: str) -> list[Token]:
    toks: list[Token] = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - start + 1
            )
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            toks.append(Token(kind, value, line, pos - start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            start = pos + value.rindex("\n") + 1
        pos = m.end()
    toks.append(Token("eof", "", line, len(text) - start + 1))
    return toks


# ----------------------------------------------------------- raw expressions

# Parsing happens in two phases: a precedence parser builds a raw tree, then
# elaboration resolves names against the signature, consuming the explicit
# type arguments of polymorphic constants.


@dataclass(frozen=True)
class _RName:
    name: str


@dataclass(frozen=True)
class _RKind:  # the $t marker
    pass


@dataclass(frozen=True)
class _RApp:
    parts: tuple["_Raw", ...]


@dataclass(frozen=True)
class _ROp:
    op: str  # => | & = >
    lhs: "_Raw"
    rhs: "_Raw"


@dataclass(frozen=True)
class _RNot:
    body: "_Raw"


@dataclass(frozen=True)
class _RBinder:
    kind: str  # ! ? ^
    binds: tuple[tuple[str, "_Raw"], ...]
    body: "_Raw"


_Raw = Union[_RName, _RKind, _RApp, _ROp, _RNot, _RBinder]


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def take(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, msg: str) -> ParseError:
        t = self.peek()
        return ParseError(msg, t.line, t.col)

    def expect(self, op: str) -> None:
        t = self.take()
        if t.kind != "op" or t.value != op:
            raise ParseError(f"expected {op!r}, found {t.value!r}", t.line, t.col)

    def at_op(self, op: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.value == op

    def name(self) -> str:
        t = self.take()
        if t.kind == "name":
            return t.value
        if t.kind == "qname":
            return _unquote(t.value)
        raise ParseError(f"expected a name, found {t.value!r}", t.line, t.col)

    # precedence ladder, loosest first
    def expr(self) -> _Raw:
        return self._imp()

    def _imp(self) -> _Raw:
        l = self._disj()
        if self.at_op("=>"):
            self.take()
            return _ROp("=>", l, self._imp())
        return l

    def _disj(self) -> _Raw:
        l = self._conj()
        if self.at_op("|"):
            self.take()
            return _ROp("|", l, self._disj())
        return l

    def _conj(self) -> _Raw:
        l = self._neg()
        if self.at_op("&"):
            self.take()
            return _ROp("&", l, self._conj())
        return l

    def _neg(self) -> _Raw:
        t = self.peek()
        if t.kind == "op" and t.value == "~":
            self.take()
            return _RNot(self._neg())
        if t.kind == "op" and t.value in "!?^":
            return self._binder()
        return self._eq()

    def _binder(self) -> _Raw:
        kind = self.take().value
        self.expect("[")
        binds = [self._bind()]
        while self.at_op(","):
            self.take()
            binds.append(self._bind())
        self.expect("]")
        self.expect(":")
        return _RBinder(kind, tuple(binds), self._neg())

    def _bind(self) -> tuple[str, _Raw]:
        name = self.name()
        self.expect(":")
        if self.peek().kind == "tyt":
            self.take()
            return name, _RKind()
        return name, self._arrow()

    def _eq(self) -> _Raw:
        l = self._arrow()
        if self.at_op("="):
            self.take()
            r = self._arrow()
            if self.at_op("="):
                raise self.fail("chained = needs parentheses")
            return _ROp("=", l, r)
        return l

    def _arrow(self) -> _Raw:
        l = self._chain()
        if self.at_op(">"):
            self.take()
            return _ROp(">", l, self._arrow())
        return l

    def _chain(self) -> _Raw:
        parts = [self._atom()]
        while True:
            t = self.peek()
            if t.kind in ("name", "qname", "tyt") or (
                t.kind == "op" and t.value == "("
            ):
                parts.append(self._atom())
            else:
                break
        return parts[0] if len(parts) == 1 else _RApp(tuple(parts))

    def _atom(self) -> _Raw:
        t = self.peek()
        if t.kind == "name":
            self.take()
            return _RName(t.value)
        if t.kind == "qname":
            self.take()
            return _RName(_unquote(t.value))
        if t.kind == "tyt":
            self.take()
            return _RKind()
        if t.kind == "op" and t.value == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        raise self.fail(f"unexpected {t.value!r}")


# -------------------------------------------------------------- elaboration


class _Elab:
    def __init__(self, sig: Signature):
        self.sig = sig
        self.tyvars: set[str] = set()
        self.vars: dict[str, Var] = {}

    def type_(self, raw: _Raw) -> HolType:
        if isinstance(raw, _RName):
            if raw.name in self.tyvars:
                return TyVar(raw.name)
            arity = self.sig.type_arity(raw.name)
            if arity != 0:
                raise ParseError(
                    f"type constructor {raw.name} expects {arity} arguments"
                )
            return TyApp(raw.name)
        if isinstance(raw, _ROp) and raw.op == ">":
            return mk_fun(self.type_(raw.lhs), self.type_(raw.rhs))
        if isinstance(raw, _RApp):
            head = raw.parts[0]
            if not isinstance(head, _RName) or head.name in self.tyvars:
                raise ParseError("malformed type application")
            arity = self.sig.type_arity(head.name)
            args = tuple(self.type_(p) for p in raw.parts[1:])
            if arity != len(args):
                raise ParseError(
                    f"type constructor {head.name} has arity {arity}, "
                    f"applied to {len(args)}"
                )
            return TyApp(head.name, args)
        raise ParseError("expected a type")

    def term(self, raw: _Raw) -> HolTerm:
        if isinstance(raw, _RName):
            if raw.name in self.vars:
                return self.vars[raw.name]
            if self.sig.has_const(raw.name):
                decl = self.sig.const_decl(raw.name)
                if decl.tyvars:
                    raise ParseError(
                        f"polymorphic constant {raw.name} needs "
                        f"{len(decl.tyvars)} explicit type arguments"
                    )
                return Const(raw.name)
            raise UnknownSymbol(f"undeclared name: {raw.name}")
        if isinstance(raw, _RApp):
            return self._app(raw)
        if isinstance(raw, _RNot):
            return mk_const_app("~", (), [self.term(raw.body)])
        if isinstance(raw, _ROp):
            if raw.op == ">":
                raise ParseError("type arrow in a term")
            l, r = self.term(raw.lhs), self.term(raw.rhs)
            if raw.op == "=":
                return mk_eq(l, r, type_of(l, self.sig))
            return mk_const_app(raw.op, (), [l, r])
        if isinstance(raw, _RBinder):
            return self._binder(raw)
        raise ParseError("$t outside a binder annotation")

    def _app(self, raw: _RApp) -> HolTerm:
        head, rest = raw.parts[0], list(raw.parts[1:])
        if (
            isinstance(head, _RName)
            and head.name not in self.vars
            and self.sig.has_const(head.name)
        ):
            decl = self.sig.const_decl(head.name)
            k = len(decl.tyvars)
            if len(rest) < k:
                raise ParseError(
                    f"constant {head.name} expects {k} explicit type arguments"
                )
            try:
                inst = tuple(self.type_(r) for r in rest[:k])
            except (ParseError, UnknownSymbol) as e:
                raise ParseError(
                    f"constant {head.name} expects {k} explicit type "
                    f"arguments before its term arguments ({e})"
                ) from None
            t: HolTerm = Const(head.name, inst)
            rest = rest[k:]
        else:
            t = self.term(head)
        for r in rest:
            t = App(t, self.term(r))
        return t

    def _binder(self, raw: _RBinder) -> HolTerm:
        saved_vars: dict[str, Var | None] = {}
        added_ty: list[str] = []
        plan: list[Var | None] = []
        for name, annot in raw.binds:
            if isinstance(annot, _RKind):
                if raw.kind != "!":
                    raise ParseError("a $t binder must use !")
                if name not in self.tyvars:
                    self.tyvars.add(name)
                    added_ty.append(name)
                plan.append(None)
            else:
                v = Var(name, self.type_(annot))
                if name not in saved_vars:
                    saved_vars[name] = self.vars.get(name)
                self.vars[name] = v
                plan.append(v)
        body = self.term(raw.body)
        for name, old in saved_vars.items():
            if old is None:
                del self.vars[name]
            else:
                self.vars[name] = old
        for name in added_ty:
            self.tyvars.discard(name)
        for v in reversed(plan):
            if v is None:
                continue
            if raw.kind == "!":
                body = mk_forall(v, body)
            elif raw.kind == "?":
                body = mk_exists(v, body)
            else:
                body = Abs(v, body)
        return body


# ------------------------------------------------------------------ entries


class Role(Enum):
    TYPE_DECL = "type"
    CONST_DECL = "const"
    THEOREM = "theorem"
    CONJECTURE = "conjecture"


@dataclass(frozen=True)
class ObjectEntry:
    """One exported object.

    ``formula`` is the declared arity for a type constructor, a ConstDecl
    for a constant, and the statement term for a theorem or conjecture.
    """

    name: str
    role: Role
    formula: Union[int, ConstDecl, HolTerm]
    theory: str = ""
    seq: int = 0


_ROLE_TEXT = {
    Role.TYPE_DECL: "ty",
    Role.CONST_DECL: "ty",
    Role.THEOREM: "ax",
    Role.CONJECTURE: "conj",
}


def _kind_arity(raw: _Raw) -> int | None:
    """Arity if raw is a kind ($t > ... > $t), else None."""
    if isinstance(raw, _RKind):
        return 0
    if isinstance(raw, _ROp) and raw.op == ">" and isinstance(raw.lhs, _RKind):
        rest = _kind_arity(raw.rhs)
        return None if rest is None else rest + 1
    return None


def _contains_kind(raw: _Raw) -> bool:
    if isinstance(raw, _RKind):
        return True
    if isinstance(raw, _ROp):
        return _contains_kind(raw.lhs) or _contains_kind(raw.rhs)
    if isinstance(raw, _RApp):
        return any(_contains_kind(p) for p in raw.parts)
    return False


def _elaborate_ty_entry(name: str, raw: _Raw, sig: Signature) -> ObjectEntry:
    if _contains_kind(raw):
        arity = _kind_arity(raw)
        if arity is None:
            raise ParseError(f"malformed kind in declaration of {name}")
        sig.declare_type(name, arity)
        return ObjectEntry(name, Role.TYPE_DECL, arity)
    tyvars: list[str] = []
    while isinstance(raw, _RBinder):
        if not all(isinstance(a, _RKind) for _, a in raw.binds):
            raise ParseError(f"constant declaration {name} binds a term variable")
        if raw.kind != "!":
            raise ParseError("a $t binder must use !")
        tyvars.extend(n for n, _ in raw.binds)
        raw = raw.body
    el = _Elab(sig)
    el.tyvars = set(tyvars)
    ty = el.type_(raw)
    sig.declare_const(name, tuple(tyvars), ty)
    return ObjectEntry(name, Role.CONST_DECL, ConstDecl(tuple(tyvars), ty))


def parse_tt(text: str, signature: Signature | None = None, theory: str = "") -> list[ObjectEntry]:
    """Parse a .tt file.  Declarations are added to ``signature`` in place."""
    sig = signature if signature is not None else Signature()
    p = _Parser(_lex(text))
    entries: list[ObjectEntry] = []
    seq = 0
    while p.peek().kind != "eof":
        head = p.name()
        if head != "tt":
            raise ParseError(f"expected a tt entry, found {head!r}")
        p.expect("(")
        name = p.name()
        p.expect(",")
        role = p.name()
        p.expect(",")
        raw = p.expr()
        p.expect(")")
        p.expect(".")
        try:
            if role == "ty":
                entry = _elaborate_ty_entry(name, raw, sig)
            elif role in ("ax", "conj"):
                el = _Elab(sig)
                el.tyvars = {v.name for v in _raw_tyvars(raw)}
                term = el.term(raw)
                ty = typecheck(term, sig)
                if ty != BOOL:
                    raise NotBoolean(f"{name} is not a boolean formula")
                entry = ObjectEntry(
                    name,
                    Role.THEOREM if role == "ax" else Role.CONJECTURE,
                    term,
                )
            else:
                raise ParseError(f"unknown role {role!r}")
        except ParseError as e:
            if e.line is None:
                raise ParseError(f"in entry {name}: {e}") from None
            raise
        entries.append(replace(entry, theory=theory, seq=seq))
        seq += 1
    return entries


def _raw_tyvars(raw: _Raw) -> list[TyVar]:
    # Type binders scope over the whole statement; they are collected up
    # front so annotations anywhere in the formula can mention them.
    out: list[TyVar] = []
    if isinstance(raw, _RBinder):
        for n, a in raw.binds:
            if isinstance(a, _RKind):
                out.append(TyVar(n))
        out.extend(_raw_tyvars(raw.body))
    return out


# ----------------------------------------------------------------- printing

_LVL_IMP, _LVL_DISJ, _LVL_CONJ, _LVL_NEG, _LVL_EQ, _LVL_APP, _LVL_ATOM = range(7)

_BINOP_LEVEL = {"=>": _LVL_IMP, "|": _LVL_DISJ, "&": _LVL_CONJ}
_SPECIAL_CONSTS = {"=", "&", "|", "=>", "~", "!", "?"}


def _ty(ty: HolType, lvl: int) -> str:
    if isinstance(ty, TyVar):
        return ty.name
    if is_fun(ty):
        a, r = dest_fun(ty)
        s = f"{_ty(a, 1)} > {_ty(r, 0)}"
        return f"({s})" if lvl > 0 else s
    if not ty.args:
        return show_name(ty.con)
    s = show_name(ty.con) + " " + " ".join(_ty(a, 2) for a in ty.args)
    return f"({s})" if lvl > 1 else s


def type_text(ty: HolType) -> str:
    return _ty(ty, 0)


def _strip_quant(t: HolTerm) -> tuple[str, list[Var], HolTerm] | None:
    if isinstance(t, Abs):
        vs = [t.var]
        body = t.body
        while isinstance(body, Abs):
            vs.append(body.var)
            body = body.body
        return "^", vs, body
    for kind in ("!", "?"):
        d = dest_binder(t, kind)
        if d is not None:
            vs = [d[0]]
            body = d[1]
            while (d2 := dest_binder(body, kind)) is not None:
                vs.append(d2[0])
                body = d2[1]
            return kind, vs, body
    return None


def _dest_full_binop(t: HolTerm) -> tuple[str, HolTerm, HolTerm] | None:
    if (
        isinstance(t, App)
        and isinstance(t.fun, App)
        and isinstance(t.fun.fun, Const)
        and t.fun.fun.name in ("=", "&", "|", "=>")
    ):
        return t.fun.fun.name, t.fun.arg, t.arg
    return None


def _binder_group(kind: str, vs: list[Var]) -> str:
    binds = ", ".join(f"{show_name(v.name)}:{_ty(v.ty, 2)}" for v in vs)
    return f"{kind}[{binds}]:"


def _tm(t: HolTerm, lvl: int) -> str:
    if isinstance(t, Var):
        return show_name(t.name)
    if isinstance(t, Const):
        if t.name in _SPECIAL_CONSTS:
            raise PrintError(f"cannot print a bare occurrence of {t.name}")
        if t.inst:
            return "(" + show_name(t.name) + " " + " ".join(_ty(i, 2) for i in t.inst) + ")"
        return show_name(t.name)
    q = _strip_quant(t)
    if q is not None:
        kind, vs, body = q
        s = f"{_binder_group(kind, vs)} {_tm(body, _LVL_ATOM)}"
        return f"({s})" if lvl > _LVL_NEG else s
    if isinstance(t, App):
        if isinstance(t.fun, Const) and t.fun.name == "~":
            s = f"~{_tm(t.arg, _LVL_NEG)}"
            return f"({s})" if lvl > _LVL_NEG else s
        b = _dest_full_binop(t)
        if b is not None:
            op, l, r = b
            if op == "=":
                s = f"{_tm(l, _LVL_APP)} = {_tm(r, _LVL_APP)}"
                return f"({s})" if lvl > _LVL_EQ else s
            own = _BINOP_LEVEL[op]
            s = f"{_tm(l, own + 1)} {op} {_tm(r, own)}"
            return f"({s})" if lvl > own else s
        parts = []
        while isinstance(t, App):
            parts.append(t.arg)
            t = t.fun
        if isinstance(t, Const) and t.name in _SPECIAL_CONSTS:
            raise PrintError(f"cannot print a partial application of {t.name}")
        parts.append(t)
        parts.reverse()
        s = " ".join(_tm(p, _LVL_ATOM) for p in parts)
        return f"({s})" if lvl > _LVL_APP else s
    raise PrintError(f"unprintable term: {t!r}")


def _rename_apart(t: HolTerm) -> HolTerm:
    """Rename binders so the printed text rebinds exactly as the term does.

    The format identifies variables by bare name, so a binder must not
    reuse the name of an enclosing binder, of a free variable, or of a
    constant occurring in the term.  Two distinct free variables sharing a
    name cannot be expressed at all.
    """
    seen_free: dict[str, Var] = {}
    for v in free_vars(t):
        if seen_free.setdefault(v.name, v) != v:
            raise PrintError(f"two distinct free variables named {v.name}")

    names: set[str] = set()

    def collect(t: HolTerm) -> None:
        if isinstance(t, (Var, Const)):
            names.add(t.name)
        elif isinstance(t, App):
            collect(t.fun)
            collect(t.arg)
        else:
            names.add(t.var.name)
            collect(t.body)

    collect(t)
    consts: set[str] = set()

    def collect_consts(t: HolTerm) -> None:
        if isinstance(t, Const):
            consts.add(t.name)
        elif isinstance(t, App):
            collect_consts(t.fun)
            collect_consts(t.arg)
        elif isinstance(t, Abs):
            collect_consts(t.body)

    collect_consts(t)

    def walk(t: HolTerm, taken: frozenset[str]) -> HolTerm:
        if isinstance(t, (Var, Const)):
            return t
        if isinstance(t, App):
            return App(walk(t.fun, taken), walk(t.arg, taken))
        v, body = t.var, t.body
        if v.name in taken:
            fresh = v.name + "'"
            while fresh in names:
                fresh += "'"
            names.add(fresh)
            v2 = Var(fresh, v.ty)
            body = subst(body, v, v2)
            v = v2
        return Abs(v, walk(body, taken | {v.name}))

    taken0 = frozenset(seen_free) | frozenset(consts)
    return walk(t, taken0)


def term_text(t: HolTerm) -> str:
    """Canonical statement text, with a leading ![A:$t, ...]: group when the
    statement mentions type variables."""
    t = _rename_apart(t)
    tvs = term_ty_vars(t)
    if not tvs:
        return _tm(t, _LVL_IMP)
    group = "![" + ", ".join(f"{v.name}:$t" for v in tvs) + "]:"
    return f"{group} {_tm(t, _LVL_ATOM)}"


def print_tt(entry: ObjectEntry) -> str:
    """One canonical line; parse_tt(print_tt(e)) == [e]."""
    if entry.role is Role.TYPE_DECL:
        payload = " > ".join(["$t"] * (entry.formula + 1))
    elif entry.role is Role.CONST_DECL:
        decl = entry.formula
        if decl.tyvars:
            group = "![" + ", ".join(f"{v}:$t" for v in decl.tyvars) + "]:"
            payload = f"{group} {_ty(decl.ty, 2)}"
        else:
            payload = _ty(decl.ty, 0)
    else:
        payload = term_text(entry.formula)
    role = _ROLE_TEXT[entry.role]
    return f"tt({show_name(entry.name)}, {role}, {payload})."


# ------------------------------------------------------------------- corpus


@dataclass(frozen=True, order=True)
class TheoremId:
    theory: str
    seq: int


@dataclass(frozen=True, order=True)
class ConjunctId:
    theorem: TheoremId
    index: int  # 1-based


@dataclass(frozen=True)
class TheoremEntry:
    id: TheoremId
    name: str
    statement: HolTerm
    conjuncts: tuple[tuple[ConjunctAddress, HolTerm], ...]
    dependencies: tuple[frozenset[ConjunctId], ...]
    is_definition: bool = False

    def conjunct_ids(self) -> list[ConjunctId]:
        return [ConjunctId(self.id, k + 1) for k in range(len(self.conjuncts))]


class AccessRelation(Enum):
    EXACT_DEPS = "exact"
    TRANSITIVE_DEPS = "transitive"
    LOADED_THEORIES = "loaded"
    LINEAR_ORDER = "linear"


class Corpus:
    """Signature, theories in build order, and the theorem table.

    Built single-threaded by the loader, then treated as frozen.
    """

    def __init__(self) -> None:
        self.signature = Signature()
        self.theories: list[str] = []
        self.ancestors: dict[str, tuple[str, ...]] = {}
        self.entries: list[ObjectEntry] = []
        self.theorems: dict[TheoremId, TheoremEntry] = {}
        self.by_name: dict[str, TheoremId] = {}
        self.conjectures: list[ObjectEntry] = []
        self._order: list[TheoremId] | None = None
        self._pos: dict[TheoremId, int] | None = None

    def theorem(self, tid: TheoremId) -> TheoremEntry:
        try:
            return self.theorems[tid]
        except KeyError:
            raise UnknownTheorem(f"no theorem {tid.theory}#{tid.seq}") from None

    def theorem_named(self, name: str) -> TheoremEntry:
        try:
            return self.theorems[self.by_name[name]]
        except KeyError:
            raise UnknownTheorem(f"no theorem named {name}") from None

    def conjunct_statement(self, cid: ConjunctId) -> HolTerm:
        entry = self.theorem(cid.theorem)
        if not 1 <= cid.index <= len(entry.conjuncts):
            raise UnknownTheorem(f"{entry.name} has no conjunct {cid.index}")
        return entry.conjuncts[cid.index - 1][1]

    def conjunct_label(self, cid: ConjunctId) -> str:
        return f"{self.theorem(cid.theorem).name}_c{cid.index}"

    def exact_deps(self, tid: TheoremId) -> frozenset[TheoremId]:
        entry = self.theorem(tid)
        return frozenset(
            c.theorem for deps in entry.dependencies for c in deps
        )

    def order(self) -> list[TheoremId]:
        if self._order is None:
            self._order = linear_order(self)
            self._pos = {tid: i for i, tid in enumerate(self._order)}
        return self._order

    def position(self, tid: TheoremId) -> int:
        self.order()
        try:
            return self._pos[tid]
        except KeyError:
            raise UnknownTheorem(f"no theorem {tid.theory}#{tid.seq}") from None

    def theory_closure(self, theory: str) -> set[str]:
        """The theory and all its transitive ancestors."""
        out: set[str] = set()
        todo = [theory]
        while todo:
            t = todo.pop()
            if t in out:
                continue
            out.add(t)
            todo.extend(self.ancestors.get(t, ()))
        return out


def linear_order(corpus: Corpus) -> list[TheoremId]:
    """Theory build order refined by naming order; checks that every
    dependency precedes its theorem."""
    order: list[TheoremId] = []
    for theory in corpus.theories:
        ids = sorted(t for t in corpus.theorems if t.theory == theory)
        order.extend(ids)
    pos = {tid: i for i, tid in enumerate(order)}
    for tid, entry in corpus.theorems.items():
        for deps in entry.dependencies:
            for cid in deps:
                if cid.theorem not in pos:
                    raise UnknownTheorem(
                        f"{entry.name} depends on unknown {cid.theorem}"
                    )
                if pos[cid.theorem] >= pos[tid]:
                    raise CycleDetected(
                        f"{entry.name} depends on "
                        f"{corpus.theorem(cid.theorem).name}, which does not "
                        f"precede it"
                    )
    return order


def accessible_set(
    corpus: Corpus, target: TheoremId, relation: AccessRelation
) -> set[TheoremId]:
    """Theorems assumed available when attacking ``target``."""
    entry = corpus.theorem(target)
    if relation is AccessRelation.EXACT_DEPS:
        return set(corpus.exact_deps(target))
    if relation is AccessRelation.TRANSITIVE_DEPS:
        out: set[TheoremId] = set()
        todo = list(corpus.exact_deps(target))
        while todo:
            tid = todo.pop()
            if tid in out:
                continue
            out.add(tid)
            todo.extend(corpus.exact_deps(tid))
        return out
    if relation is AccessRelation.LOADED_THEORIES:
        loaded = set()
        for anc in corpus.theory_closure(target.theory) - {target.theory}:
            loaded.update(t for t in corpus.theorems if t.theory == anc)
        loaded.update(
            t
            for t in corpus.theorems
            if t.theory == target.theory and t.seq < target.seq
        )
        return loaded
    order = corpus.order()
    return set(order[: corpus.position(target)])


def qualify(corpus: Corpus, namespace: str) -> Corpus:
    """Prefix every object name with ``namespace/theory/``.  Names that
    already contain a separator are left alone, so qualify is idempotent."""

    ty_map: dict[str, str] = {}
    const_map: dict[str, str] = {}
    for e in corpus.entries:
        if "/" in e.name:
            continue
        q = f"{namespace}/{e.theory}/{e.name}"
        if e.role is Role.TYPE_DECL:
            ty_map[e.name] = q
        elif e.role is Role.CONST_DECL:
            const_map[e.name] = q

    def q_name(name: str, theory: str) -> str:
        return name if "/" in name else f"{namespace}/{theory}/{name}"

    def q_ty(ty: HolType) -> HolType:
        if isinstance(ty, TyVar):
            return ty
        return TyApp(ty_map.get(ty.con, ty.con), tuple(q_ty(a) for a in ty.args))

    def q_tm(t: HolTerm) -> HolTerm:
        if isinstance(t, Var):
            return Var(t.name, q_ty(t.ty))
        if isinstance(t, Const):
            return Const(const_map.get(t.name, t.name), tuple(q_ty(i) for i in t.inst))
        if isinstance(t, App):
            return App(q_tm(t.fun), q_tm(t.arg))
        return Abs(q_tm(t.var), q_tm(t.body))

    out = Corpus()
    out.theories = list(corpus.theories)
    out.ancestors = dict(corpus.ancestors)
    for e in corpus.entries:
        if e.role is Role.TYPE_DECL:
            name = ty_map.get(e.name, e.name)
            out.signature.declare_type(name, e.formula)
            out.entries.append(replace(e, name=name))
        elif e.role is Role.CONST_DECL:
            name = const_map.get(e.name, e.name)
            decl = ConstDecl(e.formula.tyvars, q_ty(e.formula.ty))
            out.signature.declare_const(name, decl.tyvars, decl.ty)
            out.entries.append(replace(e, name=name, formula=decl))
        else:
            e2 = replace(e, name=q_name(e.name, e.theory), formula=q_tm(e.formula))
            out.entries.append(e2)
            if e.role is Role.CONJECTURE:
                out.conjectures.append(e2)
    for tid, entry in corpus.theorems.items():
        out.theorems[tid] = replace(
            entry,
            name=q_name(entry.name, tid.theory),
            statement=q_tm(entry.statement),
            conjuncts=tuple((a, q_tm(c)) for a, c in entry.conjuncts),
        )
        out.by_name[out.theorems[tid].name] = tid
    return out


def rename_overwritten(
    events: Sequence[tuple[str, TheoremId]]
) -> dict[TheoremId, str]:
    """Final names for a chronological naming sequence: the last bearer of a
    name keeps it, earlier bearers become name~1, name~2, ..."""
    last: dict[str, TheoremId] = {name: tid for name, tid in events}
    taken = set(last.keys())
    mapping: dict[TheoremId, str] = {}
    gen: dict[str, int] = {}
    for name, tid in events:
        if last[name] == tid:
            mapping[tid] = name
            continue
        k = gen.get(name, 0) + 1
        while f"{name}~{k}" in taken:
            k += 1
        gen[name] = k
        mapping[tid] = f"{name}~{k}"
        taken.add(f"{name}~{k}")
    return mapping


# ----------------------------------------------------------------- sidecars


def parse_thy(text: str) -> list[tuple[str, tuple[str, ...]]]:
    """theory(NAME, [ANCESTOR, ...]). lines, in build order."""
    p = _Parser(_lex(text))
    out = []
    while p.peek().kind != "eof":
        head = p.name()
        if head != "theory":
            raise ParseError(f"expected a theory entry, found {head!r}")
        p.expect("(")
        name = p.name()
        p.expect(",")
        out.append((name, tuple(_parse_name_list(p))))
        p.expect(")")
        p.expect(".")
    return out


def print_thy(theories: Sequence[tuple[str, Sequence[str]]]) -> str:
    lines = [
        f"theory({show_name(n)}, [{', '.join(show_name(a) for a in ancs)}])."
        for n, ancs in theories
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def _parse_name_list(p: _Parser) -> list[str]:
    p.expect("[")
    names: list[str] = []
    if not p.at_op("]"):
        names.append(p.name())
        while p.at_op(","):
            p.take()
            names.append(p.name())
    p.expect("]")
    return names


def parse_deps(text: str) -> list[tuple[str, list[str]]]:
    """deps(NAME_cK, [DEP, ...]). lines; names are unresolved strings."""
    p = _Parser(_lex(text))
    out = []
    while p.peek().kind != "eof":
        head = p.name()
        if head != "deps":
            raise ParseError(f"expected a deps entry, found {head!r}")
        p.expect("(")
        key = p.name()
        p.expect(",")
        vals = _parse_name_list(p)
        p.expect(")")
        p.expect(".")
        out.append((key, vals))
    return out


def print_deps(corpus: Corpus) -> str:
    """One line per conjunct of every theorem, in linear order."""
    lines = []
    for tid in corpus.order():
        entry = corpus.theorem(tid)
        for k, deps in enumerate(entry.dependencies, start=1):
            ordered = sorted(deps, key=lambda c: (corpus.position(c.theorem), c.index))
            names = ", ".join(show_name(corpus.conjunct_label(c)) for c in ordered)
            lines.append(
                f"deps({show_name(f'{entry.name}_c{k}')}, [{names}])."
            )
    return "\n".join(lines) + ("\n" if lines else "")


_CONJ_SUFFIX = re.compile(r"^(.*)_c([0-9]+)$")


def resolve_dep_name(corpus: Corpus, name: str) -> tuple[TheoremId, int | None]:
    """A dependency string: a theorem name, or name_cK for one conjunct.
    Returns (id, index) with index None meaning the whole theorem."""
    if name in corpus.by_name:
        return corpus.by_name[name], None
    m = _CONJ_SUFFIX.match(name)
    if m and m.group(1) in corpus.by_name:
        tid = corpus.by_name[m.group(1)]
        k = int(m.group(2))
        n = len(corpus.theorem(tid).conjuncts)
        if not 1 <= k <= n:
            raise UnknownTheorem(f"{m.group(1)} has no conjunct {k}")
        return tid, k
    raise UnknownTheorem(f"unknown dependency name: {name}")


def _expand_dep(corpus: Corpus, name: str) -> frozenset[ConjunctId]:
    tid, k = resolve_dep_name(corpus, name)
    if k is not None:
        return frozenset([ConjunctId(tid, k)])
    return frozenset(corpus.theorem(tid).conjunct_ids())


# ------------------------------------------------------------------- loader


def _ingest_theory(corpus: Corpus, theory: str, entries: list[ObjectEntry]) -> None:
    theorem_entries = [e for e in entries if e.role is Role.THEOREM]
    events = [
        (e.name, TheoremId(theory, i)) for i, e in enumerate(theorem_entries)
    ]
    names = rename_overwritten(events)
    renamed: dict[int, str] = {
        e.seq: names[tid] for (_, tid), e in zip(events, theorem_entries)
    }
    counter = 0
    for e in entries:
        if e.role is Role.THEOREM:
            tid = TheoremId(theory, counter)
            counter += 1
            final = renamed[e.seq]
            conjs = tuple(split_conjuncts(e.formula, corpus.signature))
            corpus.theorems[tid] = TheoremEntry(
                id=tid,
                name=final,
                statement=e.formula,
                conjuncts=conjs,
                dependencies=tuple(frozenset() for _ in conjs),
                is_definition=e.name.endswith(("_def", "_DEF")),
            )
            corpus.by_name[final] = tid
            e = replace(e, name=final)
        elif e.role is Role.CONJECTURE:
            corpus.conjectures.append(e)
        corpus.entries.append(e)


def _ingest_deps(corpus: Corpus, lines: list[tuple[str, list[str]]]) -> None:
    # Order violations surface through linear_order once loading finishes.
    for key, vals in lines:
        tid, k = resolve_dep_name(corpus, key)
        entry = corpus.theorem(tid)
        resolved = frozenset(c for v in vals for c in _expand_dep(corpus, v))
        indices = [k] if k is not None else range(1, len(entry.conjuncts) + 1)
        deps = list(entry.dependencies)
        for i in indices:
            deps[i - 1] = deps[i - 1] | resolved
        corpus.theorems[tid] = replace(entry, dependencies=tuple(deps))


def load_corpus_files(
    thy_text: str, theory_files: dict[str, tuple[str, str | None]]
) -> Corpus:
    """Build a corpus from in-memory file texts.

    ``theory_files`` maps a theory name to its .tt text and an optional
    .deps text; ``thy_text`` fixes the build order.
    """
    corpus = Corpus()
    for theory, ancs in parse_thy(thy_text):
        if theory in corpus.ancestors:
            raise ParseError(f"duplicate theory {theory}")
        for a in ancs:
            if a not in corpus.ancestors:
                raise CycleDetected(
                    f"theory {theory} lists {a}, which is not built yet"
                )
        corpus.theories.append(theory)
        corpus.ancestors[theory] = tuple(ancs)
        if theory not in theory_files:
            raise ParseError(f"missing .tt file for theory {theory}")
        tt_text, deps_text = theory_files[theory]
        entries = parse_tt(tt_text, corpus.signature, theory=theory)
        _ingest_theory(corpus, theory, entries)
        if deps_text is not None:
            _ingest_deps(corpus, parse_deps(deps_text))
    corpus.order()
    return corpus


def load_corpus(root: str | Path) -> Corpus:
    """Load a corpus directory: corpus.thy plus <theory>.tt/.deps files."""
    root = Path(root)
    thy_path = root / "corpus.thy"
    if not thy_path.exists():
        raise ParseError(f"no corpus.thy in {root}")
    thy_text = thy_path.read_text(encoding="utf-8")
    files: dict[str, tuple[str, str | None]] = {}
    for theory, _ in parse_thy(thy_text):
        tt = root / f"{theory}.tt"
        if not tt.exists():
            raise ParseError(f"missing {tt}")
        deps = root / f"{theory}.deps"
        files[theory] = (
            tt.read_text(encoding="utf-8"),
            deps.read_text(encoding="utf-8") if deps.exists() else None,
        )
    return load_corpus_files(thy_text, files)


def parse_goal(text: str, sig: Signature) -> tuple[str, HolTerm]:
    """A goal: either a full tt(name, conj, ...) entry or a bare formula."""
    stripped = text.strip()
    if stripped.startswith("tt("):
        entries = parse_tt(stripped if stripped.endswith(".") else stripped + ".", sig.copy())
        if len(entries) != 1 or entries[0].role not in (
            Role.CONJECTURE,
            Role.THEOREM,
        ):
            raise ParseError("goal file must hold exactly one ax/conj entry")
        return entries[0].name, entries[0].formula
    p = _Parser(_lex(stripped))
    raw = p.expr()
    if p.at_op("."):
        p.take()
    if p.peek().kind != "eof":
        raise p.fail("trailing input after the goal formula")
    el = _Elab(sig)
    el.tyvars = {v.name for v in _raw_tyvars(raw)}
    term = el.term(raw)
    if typecheck(term, sig) != BOOL:
        raise NotBoolean("goal is not a boolean formula")
    return "goal", term
