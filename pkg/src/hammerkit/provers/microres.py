"""A small saturation prover for the problems this toolkit emits.

Given-clause saturation: binary resolution with factoring, equality by
paramodulation and equality resolution, demodulation with unit equations
oriented by a Knuth-Bendix ordering, forward subsumption, and weight/age
clause selection.  Nowhere near a competitive system, but complete
enough for modest problems and it reports verdicts and derivations in
the same SZS dialect the big provers use, so the rest of the pipeline
treats it uniformly.

Terms are tuples: ("v", name) or ("f", sym, args).  A literal is
(positive, predicate, args); equality is the predicate "=".  A clause is
a tuple of literals with canonically numbered variables.
"""

from __future__ import annotations

import argparse
import heapq
import sys
import time
from dataclasses import dataclass

from ..corpus import ParseError
from ..fof import BinOp, Eq, FofFormula, FofProblem, FofVar, Not, Pred
from ..tptp import _atom_name, parse_problem, print_formula

Term = tuple
Literal = tuple  # (positive: bool, pred: str, args: tuple[Term, ...])
Clause = tuple  # of Literal


# ------------------------------------------------------------ clausification


class _Clausifier:
    def __init__(self) -> None:
        self.counter = 0
        self.skolems = 0

    def fresh_var(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def nnf(self, f: FofFormula, sign: bool, env: dict, scope: tuple):
        """Negation normal form with on-the-fly skolemization.  env maps
        source variable names to terms; scope lists the universal
        variables governing fresh skolem functions."""
        if isinstance(f, Pred):
            args = tuple(self.term(a, env) for a in f.args)
            return ("lit", sign, f.sym, args)
        if isinstance(f, Eq):
            return ("lit", sign, "=", (self.term(f.lhs, env), self.term(f.rhs, env)))
        if isinstance(f, Not):
            return self.nnf(f.body, not sign, env, scope)
        if isinstance(f, BinOp):
            if f.op == "&":
                op = "and" if sign else "or"
                return (op, self.nnf(f.lhs, sign, env, scope), self.nnf(f.rhs, sign, env, scope))
            if f.op == "|":
                op = "or" if sign else "and"
                return (op, self.nnf(f.lhs, sign, env, scope), self.nnf(f.rhs, sign, env, scope))
            if f.op == "=>":
                if sign:
                    return ("or", self.nnf(f.lhs, False, env, scope), self.nnf(f.rhs, True, env, scope))
                return ("and", self.nnf(f.lhs, True, env, scope), self.nnf(f.rhs, False, env, scope))
            # <=> expands by cases; both polarities of both sides.
            if sign:
                return (
                    "and",
                    ("or", self.nnf(f.lhs, False, env, scope), self.nnf(f.rhs, True, env, scope)),
                    ("or", self.nnf(f.rhs, False, env, scope), self.nnf(f.lhs, True, env, scope)),
                )
            return (
                "or",
                ("and", self.nnf(f.lhs, True, env, scope), self.nnf(f.rhs, False, env, scope)),
                ("and", self.nnf(f.rhs, True, env, scope), self.nnf(f.lhs, False, env, scope)),
            )
        # Quantifier: universal under the current sign stays a variable,
        # existential becomes a skolem term over the universal scope.
        universal = (f.kind == "!") == sign
        env = dict(env)
        if universal:
            for v in f.vars:
                name = self.fresh_var()
                env[v] = ("v", name)
                scope = scope + (("v", name),)
        else:
            for v in f.vars:
                self.skolems += 1
                env[v] = ("f", f"sk{self.skolems}", scope)
        return self.nnf(f.body, sign, env, scope)

    def term(self, t, env) -> Term:
        if isinstance(t, FofVar):
            if t.name not in env:
                # Free variables are read as universally quantified.
                env[t.name] = ("v", self.fresh_var())
            return env[t.name]
        return ("f", t.sym, tuple(self.term(a, env) for a in t.args))

    def clauses(self, f: FofFormula, negate: bool) -> list[list[Literal]]:
        tree = self.nnf(f, not negate, {}, ())
        return [self._strip(c) for c in self._cnf(tree)]

    def _cnf(self, tree) -> list[list]:
        if tree[0] == "lit":
            return [[tree]]
        if tree[0] == "and":
            return self._cnf(tree[1]) + self._cnf(tree[2])
        left = self._cnf(tree[1])
        right = self._cnf(tree[2])
        return [l + r for l in left for r in right]

    @staticmethod
    def _strip(lits: list) -> list[Literal]:
        return [(l[1], l[2], l[3]) for l in lits]


# --------------------------------------------------------------- clause ops


def _canon(lits: list[Literal]) -> Clause:
    """Deduplicate and rename variables to v0.. in order of appearance,
    giving a structural identity for duplicate detection."""
    seen: dict[str, Term] = {}

    def walk(t: Term) -> Term:
        if t[0] == "v":
            if t[1] not in seen:
                seen[t[1]] = ("v", f"v{len(seen)}")
            return seen[t[1]]
        return ("f", t[1], tuple(walk(a) for a in t[2]))

    out = []
    for pos, p, args in dict.fromkeys(lits):
        out.append((pos, p, tuple(walk(a) for a in args)))
    return tuple(dict.fromkeys(out))


def _rename(c: Clause, tag: str) -> Clause:
    def walk(t: Term) -> Term:
        if t[0] == "v":
            return ("v", t[1] + tag)
        return ("f", t[1], tuple(walk(a) for a in t[2]))

    return tuple((pos, p, tuple(walk(a) for a in args)) for pos, p, args in c)


def _walk_binding(t: Term, s: dict) -> Term:
    while t[0] == "v" and t[1] in s:
        t = s[t[1]]
    return t


def _occurs(name: str, t: Term, s: dict) -> bool:
    t = _walk_binding(t, s)
    if t[0] == "v":
        return t[1] == name
    return any(_occurs(name, a, s) for a in t[2])


def unify(a: Term, b: Term, s: dict) -> dict | None:
    a = _walk_binding(a, s)
    b = _walk_binding(b, s)
    if a == b:
        return s
    if a[0] == "v":
        if _occurs(a[1], b, s):
            return None
        s2 = dict(s)
        s2[a[1]] = b
        return s2
    if b[0] == "v":
        return unify(b, a, s)
    if a[1] != b[1] or len(a[2]) != len(b[2]):
        return None
    for x, y in zip(a[2], b[2]):
        s = unify(x, y, s)
        if s is None:
            return None
    return s


def apply_subst(t: Term, s: dict) -> Term:
    t = _walk_binding(t, s)
    if t[0] == "v":
        return t
    return ("f", t[1], tuple(apply_subst(a, s) for a in t[2]))


def _apply_clause(lits, s) -> list[Literal]:
    return [(pos, p, tuple(apply_subst(a, s) for a in args)) for pos, p, args in lits]


def _match(pat: Term, t: Term, s: dict) -> dict | None:
    """One-way matching for subsumption."""
    if pat[0] == "v":
        if pat[1] in s:
            return s if s[pat[1]] == t else None
        s2 = dict(s)
        s2[pat[1]] = t
        return s2
    if t[0] == "v" or pat[1] != t[1] or len(pat[2]) != len(t[2]):
        return None
    for x, y in zip(pat[2], t[2]):
        s = _match(x, y, s)
        if s is None:
            return None
    return s


def subsumes(c: Clause, d: Clause) -> bool:
    """Does c theta-subsume d?"""
    if len(c) > len(d):
        return False

    def go(i: int, s: dict) -> bool:
        if i == len(c):
            return True
        pos, p, args = c[i]
        for dpos, dp, dargs in d:
            if dpos != pos or dp != p or len(dargs) != len(args):
                continue
            s2 = s
            for x, y in zip(args, dargs):
                s2 = _match(x, y, s2)
                if s2 is None:
                    break
            if s2 is not None and go(i + 1, s2):
                return True
        return False

    return go(0, {})


def _is_tautology(c: Clause) -> bool:
    lits = set(c)
    for pos, p, args in c:
        if pos and p == "=" and len(args) == 2 and args[0] == args[1]:
            return True
        if (not pos, p, args) in lits:
            return True
    return False


def _term_weight(t: Term) -> int:
    if t[0] == "v":
        return 1
    return 1 + sum(_term_weight(a) for a in t[2])


def _weight(c: Clause) -> int:
    return sum(1 + sum(_term_weight(a) for a in args) for _, _, args in c)


def _var_counts(t: Term, out: dict[str, int]) -> None:
    if t[0] == "v":
        out[t[1]] = out.get(t[1], 0) + 1
    else:
        for a in t[2]:
            _var_counts(a, out)


def _kbo_greater(l: Term, r: Term) -> bool:
    """Knuth-Bendix ordering with unit symbol weights and precedence by
    (arity, name).  A genuine reduction ordering, so l -> r instances
    can be used as terminating rewrite rules."""
    if l == r or l[0] == "v":
        return False
    cl: dict[str, int] = {}
    cr: dict[str, int] = {}
    _var_counts(l, cl)
    _var_counts(r, cr)
    if any(cl.get(v, 0) < n for v, n in cr.items()):
        return False
    wl, wr = _term_weight(l), _term_weight(r)
    if wl != wr:
        return wl > wr
    if r[0] == "v":
        return False
    pl = (len(l[2]), l[1])
    pr = (len(r[2]), r[1])
    if pl != pr:
        return pl > pr
    for a, b in zip(l[2], r[2]):
        if a != b:
            return _kbo_greater(a, b)
    return False


def _positions(t: Term, path: tuple = ()):
    """All non-variable subterm positions, as (path, subterm)."""
    if t[0] == "v":
        return
    yield path, t
    for i, a in enumerate(t[2]):
        yield from _positions(a, path + (i,))


def _replace(t: Term, path: tuple, repl: Term) -> Term:
    if not path:
        return repl
    i = path[0]
    return (
        "f",
        t[1],
        tuple(_replace(a, path[1:], repl) if k == i else a for k, a in enumerate(t[2])),
    )


def _paramod_sides(c: Clause):
    """Usable orientations (lit_index, from, to) of positive equations.
    Orientable equations rewrite one way only; the rest go both ways,
    skipping bare-variable sides whose unifiers would be unbounded."""
    for i, (pos, p, args) in enumerate(c):
        if not pos or p != "=":
            continue
        l, r = args
        if _kbo_greater(l, r):
            yield i, l, r
        elif _kbo_greater(r, l):
            yield i, r, l
        else:
            if l[0] != "v":
                yield i, l, r
            if r[0] != "v":
                yield i, r, l


def _normalize(t: Term, demods: list, used: set[int]) -> Term:
    """Rewrite t to normal form under the oriented unit equations.
    Terminates because every step strictly shrinks the term under the
    KBO weight."""
    while True:
        if t[0] == "f":
            t = ("f", t[1], tuple(_normalize(a, demods, used) for a in t[2]))
        rewritten = False
        for idx, l, r in demods:
            s = _match(l, t, {})
            if s is not None:
                t = apply_subst(r, s)
                used.add(idx)
                rewritten = True
                break
        if not rewritten:
            return t


def _demodulate(lits: list[Literal], demods: list, used: set[int]) -> list[Literal]:
    if not demods:
        return list(lits)
    return [
        (pos, p, tuple(_normalize(a, demods, used) for a in args))
        for pos, p, args in lits
    ]


# ------------------------------------------------------------- proof search


@dataclass
class _Entry:
    clause: Clause
    parents: tuple[int, ...]
    source: str | None  # input formula name, None for derived/equality


class Result:
    def __init__(self, status: str, used: list[str], generated: int):
        self.status = status
        self.used = used
        self.generated = generated


def saturate(
    inputs: list[tuple[Clause, str | None]],
    deadline: float | None,
    max_clauses: int,
) -> Result:
    entries: list[_Entry] = []
    by_weight: list[tuple[int, int]] = []
    by_age: list[int] = []
    seen: set[Clause] = set()
    active: list[int] = []
    demods: list[tuple[int, Term, Term]] = []

    def push(lits: list[Literal], parents: tuple[int, ...], source: str | None) -> bool:
        used: set[int] = set()
        lits = _demodulate(lits, demods, used)
        # Literals refuting themselves contribute nothing.
        lits = [
            l for l in lits if l[0] or l[1] != "=" or l[2][0] != l[2][1]
        ]
        if used:
            parents = parents + tuple(sorted(used))
        c = _canon(lits)
        if c in seen or _is_tautology(c):
            return False
        seen.add(c)
        idx = len(entries)
        entries.append(_Entry(c, parents, source))
        heapq.heappush(by_weight, (_weight(c), idx))
        heapq.heappush(by_age, idx)
        if len(c) == 1 and c[0][0] and c[0][1] == "=":
            # Renamed apart so rule variables never collide with the
            # variables of the clauses being rewritten.
            l, r = _rename(c, "_d")[0][2]
            if _kbo_greater(l, r):
                demods.append((idx, l, r))
            elif _kbo_greater(r, l):
                demods.append((idx, r, l))
        return not c  # empty clause

    empty_idx = None
    for c, src in inputs:
        if push(list(c), (), src):
            empty_idx = len(entries) - 1
            break

    processed: set[int] = set()
    steps = 0
    while empty_idx is None and (by_weight or by_age):
        if deadline is not None and time.monotonic() > deadline:
            return Result("Timeout", [], len(entries))
        if len(entries) > max_clauses:
            return Result("GaveUp", [], len(entries))
        steps += 1
        # Mostly lightest-first, with a periodic oldest-first pick for
        # fairness.
        gi = None
        if steps % 5 == 0:
            while by_age:
                i = heapq.heappop(by_age)
                if i not in processed:
                    gi = i
                    break
        else:
            while by_weight:
                _, i = heapq.heappop(by_weight)
                if i not in processed:
                    gi = i
                    break
        if gi is None:
            continue
        processed.add(gi)
        given = entries[gi].clause
        # Rules registered after this clause arrived may simplify it;
        # if any fire, the rewritten form replaces it in the queue.  A
        # unit equation must not rewrite itself to triviality, so the
        # clause's own rule is excluded.
        used_d: set[int] = set()
        renorm = _demodulate(
            list(given), [d for d in demods if d[0] != gi], used_d
        )
        if used_d:
            if push(renorm, (gi,) + tuple(sorted(used_d)), None):
                empty_idx = len(entries) - 1
                break
            continue
        if any(subsumes(entries[a].clause, given) for a in active):
            continue
        given_r = _rename(given, "g")
        # Factoring on the given clause.
        for i in range(len(given_r)):
            for j in range(i + 1, len(given_r)):
                pi, pp, pa = given_r[i]
                qi, qp, qa = given_r[j]
                if pi != qi or pp != qp or len(pa) != len(qa):
                    continue
                s: dict | None = {}
                for x, y in zip(pa, qa):
                    s = unify(x, y, s)
                    if s is None:
                        break
                if s is None:
                    continue
                lits = _apply_clause(
                    [l for k, l in enumerate(given_r) if k != j], s
                )
                if push(lits, (gi,), None):
                    empty_idx = len(entries) - 1
                    break
            if empty_idx is not None:
                break
        if empty_idx is not None:
            break
        # Equality resolution on the given clause.
        for i, (pi, pp, pa) in enumerate(given_r):
            if pi or pp != "=":
                continue
            s = unify(pa[0], pa[1], {})
            if s is None:
                continue
            lits = _apply_clause([l for k, l in enumerate(given_r) if k != i], s)
            if push(lits, (gi,), None):
                empty_idx = len(entries) - 1
                break
        if empty_idx is not None:
            break
        # Resolution and paramodulation against active clauses and a
        # fresh copy of the given clause itself.
        partners = active + [gi]
        for ai in partners:
            other = _rename(entries[ai].clause, "a")
            for i, (pi, pp, pa) in enumerate(given_r):
                for j, (qi, qp, qa) in enumerate(other):
                    if pi == qi or pp != qp or len(pa) != len(qa):
                        continue
                    s = {}
                    for x, y in zip(pa, qa):
                        s = unify(x, y, s)
                        if s is None:
                            break
                    if s is None:
                        continue
                    lits = _apply_clause(
                        [l for k, l in enumerate(given_r) if k != i]
                        + [l for k, l in enumerate(other) if k != j],
                        s,
                    )
                    if push(lits, (gi, ai), None):
                        empty_idx = len(entries) - 1
                        break
                if empty_idx is not None:
                    break
            if empty_idx is not None:
                break
            # Paramodulation in both directions between the pair.
            for src, si, dst, di in (
                (given_r, gi, other, ai),
                (other, ai, given_r, gi),
            ):
                for ei, l, r in _paramod_sides(src):
                    rest = [x for k, x in enumerate(src) if k != ei]
                    for lj, (qpos, qp, qargs) in enumerate(dst):
                        for aj, arg in enumerate(qargs):
                            for path, sub in _positions(arg):
                                s = unify(l, sub, {})
                                if s is None:
                                    continue
                                newlit = (
                                    qpos,
                                    qp,
                                    qargs[:aj]
                                    + (_replace(arg, path, r),)
                                    + qargs[aj + 1 :],
                                )
                                lits = _apply_clause(
                                    rest
                                    + [x for k, x in enumerate(dst) if k != lj]
                                    + [newlit],
                                    s,
                                )
                                if push(lits, (si, di), None):
                                    empty_idx = len(entries) - 1
                                    break
                            if empty_idx is not None:
                                break
                        if empty_idx is not None:
                            break
                    if empty_idx is not None:
                        break
                if empty_idx is not None:
                    break
            if empty_idx is not None:
                break
        if empty_idx is not None:
            break
        active.append(gi)

    if empty_idx is None:
        return Result("CounterSatisfiable", [], len(entries))

    used: list[str] = []
    stack = [empty_idx]
    visited: set[int] = set()
    while stack:
        i = stack.pop()
        if i in visited:
            continue
        visited.add(i)
        e = entries[i]
        if e.source is not None and e.source not in used:
            used.append(e.source)
        stack.extend(e.parents)
    return Result("Theorem", used, len(entries))


# ------------------------------------------------------------------ driving


def prove(
    problem: FofProblem, timeout: float | None = None, max_clauses: int = 100000
) -> tuple[str, Result]:
    """Run the prover on a parsed problem; returns the SZS-formatted
    output text and the raw result."""
    cl = _Clausifier()
    inputs: list[tuple[Clause, str | None]] = []
    for name, f in problem.axioms:
        for lits in cl.clauses(f, negate=False):
            inputs.append((_canon(lits), name))
    gname, gf = problem.conjecture
    for lits in cl.clauses(gf, negate=True):
        inputs.append((_canon(lits), gname))
    deadline = time.monotonic() + timeout if timeout is not None else None
    res = saturate(inputs, deadline, max_clauses)

    lines = [f"% SZS status {res.status}"]
    if res.status == "Theorem":
        by_name = dict(problem.axioms)
        lines.append("% SZS output start Proof")
        for name in res.used:
            if name in by_name:
                lines.append(f"fof({_q(name)}, axiom, {print_formula(by_name[name])}).")
            elif name == gname:
                lines.append(f"fof({_q(name)}, conjecture, {print_formula(gf)}).")
        lines.append("% SZS output end Proof")
    lines.append(f"% clauses generated: {res.generated}")
    return "\n".join(lines) + "\n", res


def _q(name: str) -> str:
    return _atom_name(name)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="hammer-microres", description="small resolution prover"
    )
    ap.add_argument("file", help="TPTP problem file, or - for stdin")
    ap.add_argument("--timeout", type=float, default=30.0, help="seconds")
    ap.add_argument("--max-clauses", type=int, default=100000)
    args = ap.parse_args(argv)
    if args.file == "-":
        text = sys.stdin.read()
    else:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    try:
        problem = parse_problem(text)
    except ParseError as e:
        print("% SZS status InputError")
        print(f"% {e}")
        return 1
    out, _ = prove(problem, timeout=args.timeout, max_clauses=args.max_clauses)
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
