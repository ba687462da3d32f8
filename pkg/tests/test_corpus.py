"""Export-format parsing and printing, corpus loading, accessibility."""

import random

import pytest

from hammerkit.corpus import (
    AccessRelation,
    ObjectEntry,
    ConjunctId,
    Corpus,
    CycleDetected,
    ParseError,
    PrintError,
    Role,
    TheoremId,
    UnknownTheorem,
    accessible_set,
    load_corpus_files,
    parse_deps,
    parse_goal,
    parse_thy,
    parse_tt,
    print_deps,
    print_thy,
    print_tt,
    qualify,
    rename_overwritten,
    resolve_dep_name,
    show_name,
    term_text,
)
from hammerkit.hol import (
    App,
    BOOL,
    Const,
    NotBoolean,
    Signature,
    TyApp,
    UnknownSymbol,
    Var,
    alpha_equal,
    mk_eq,
    subterms,
    type_of,
)
from .helpers import NAT, TOY_DECLS, random_closed_formula, toy_sig

CANONICAL_LINES = [
    "tt(int, ty, $t).",
    "tt(list, ty, $t > $t).",
    "tt(HD, ty, ![A:$t]: (list A > A)).",
    "tt(CONS, ty, ![A:$t]: (A > list A > list A)).",
    "tt(HD0, ax, ![n:int, t:(list int)]: ((HD int) ((CONS int) n t) = n)).",
]


def test_canonical_lines_round_trip_bytes():
    text = "\n".join(CANONICAL_LINES) + "\n"
    sig = Signature()
    entries = parse_tt(text, sig)
    assert [e.name for e in entries] == ["int", "list", "HD", "CONS", "HD0"]
    printed = "\n".join(print_tt(e) for e in entries) + "\n"
    assert printed == text
    # And printing is a fixpoint of parse . print.
    again = parse_tt(printed, Signature())
    assert "\n".join(print_tt(e) for e in again) + "\n" == printed


def test_parse_is_whitespace_tolerant():
    messy = """
    tt( int ,ty,$t).
    tt(list, ty,
       $t > $t).
    % a comment line
    tt(HD ,ty, ![A : $t]:
        (list A > A)).
    """
    entries = parse_tt(messy, Signature())
    assert [e.name for e in entries] == ["int", "list", "HD"]
    assert print_tt(entries[1]) == "tt(list, ty, $t > $t)."


def test_declarations_populate_signature():
    sig = Signature()
    parse_tt("\n".join(CANONICAL_LINES), sig)
    assert sig.type_arity("list") == 1
    decl = sig.const_decl("HD")
    assert decl.tyvars == ("A",)
    assert sig.type_arity("int") == 0


def test_theorem_statements_typecheck_to_bool():
    sig = Signature()
    entries = parse_tt("\n".join(CANONICAL_LINES), sig)
    hd0 = entries[-1]
    assert hd0.role is Role.THEOREM
    assert type_of(hd0.formula, sig) == BOOL


def test_ax_entry_must_be_boolean():
    sig = toy_sig()
    with pytest.raises(NotBoolean):
        parse_tt("tt(bad, ax, SUC 0).", sig)


def test_polymorphic_constant_needs_type_arguments():
    sig = toy_sig()
    with pytest.raises(ParseError, match="type argument"):
        parse_tt("tt(bad, ax, HD NIL = 0).", sig)
    entries = parse_tt("tt(ok, ax, (HD nat) (NIL nat) = 0).", sig)
    assert type_of(entries[0].formula, sig) == BOOL


def test_unknown_names_are_rejected():
    sig = toy_sig()
    with pytest.raises(UnknownSymbol):
        parse_tt("tt(bad, ax, FOO = FOO).", sig)
    with pytest.raises(UnknownSymbol):
        parse_tt("tt(bad, ty, wibble > bool).", sig)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_tt("tt(x, ty, $t).\ntt(y, ty, ($t).", Signature())
    assert info.value.line == 2


def test_chained_equality_is_rejected():
    sig = toy_sig()
    with pytest.raises(ParseError, match="parenthes"):
        parse_tt("tt(bad, ax, 0 = 0 = 0).", sig)
    parse_tt("tt(ok, ax, (0 = 0) = (0 = 0)).", sig)


def test_precedence_shapes():
    sig = toy_sig()

    def roundtrip(formula: str) -> str:
        [e] = parse_tt(f"tt(t, ax, {formula}).", sig.copy())
        return print_tt(e)

    # Negation binds tighter than conjunction, looser than equality.
    assert roundtrip("~(0 = SUC 0) & (0 = 0)") == "tt(t, ax, ~0 = SUC 0 & 0 = 0)."
    assert roundtrip("~0 = SUC 0 & 0 = 0") == "tt(t, ax, ~0 = SUC 0 & 0 = 0)."
    # Implication is right-associative; conjunction binds tighter.
    a = "LE 0 0"
    assert (
        roundtrip(f"{a} => {a} => {a} & {a}")
        == "tt(t, ax, LE 0 0 => LE 0 0 => LE 0 0 & LE 0 0)."
    )
    # A binder body stops at the first loose connective.
    both = parse_tt(f"tt(t, ax, (![z:nat]: (LE z z)) & {a}).", sig.copy())
    loose = parse_tt(f"tt(t, ax, ![z:nat]: (LE z z) & {a}).", sig.copy())
    assert alpha_equal(both[0].formula, loose[0].formula)


def test_quoted_names_round_trip():
    sig = toy_sig()
    line = "tt('odd name with space', ax, LE 0 0)."
    [e] = parse_tt(line, sig)
    assert e.name == "odd name with space"
    assert print_tt(e) == line
    assert show_name("plain_name.0") == "plain_name.0"
    assert show_name("needs quoting!") == "'needs quoting!'"
    # Interior apostrophes lex fine bare; a leading one needs quoting.
    assert show_name("it's") == "it's"
    assert show_name("'quote") == "'\\'quote'"


def test_tilde_and_slash_names_lex_bare():
    sig = toy_sig()
    [e] = parse_tt("tt(T~1, ax, LE 0 0).", sig)
    assert e.name == "T~1"
    [e] = parse_tt("tt(h4/list/HD0, ax, LE 0 0).", sig)
    assert e.name == "h4/list/HD0"


def test_binder_merging_in_printer():
    sig = toy_sig()
    [e] = parse_tt("tt(t, ax, ![x:nat]: (![y:nat]: (LE x y | LE y x))).", sig)
    assert print_tt(e) == "tt(t, ax, ![x:nat, y:nat]: (LE x y | LE y x))."


def test_exists_and_lambda_syntax():
    sig = toy_sig()
    [e] = parse_tt("tt(t, ax, ?[x:nat]: (LE x x)).", sig)
    assert print_tt(e) == "tt(t, ax, ?[x:nat]: (LE x x))."
    [e] = parse_tt("tt(t, ax, (^[x:nat]: x) 0 = 0).", sig)
    assert print_tt(e) == "tt(t, ax, (^[x:nat]: x) 0 = 0)."


def test_bare_connectives_cannot_be_printed():
    eq = Const("=", (NAT,))
    with pytest.raises(PrintError):
        term_text(App(eq, Var("x", NAT)))


def test_random_statement_round_trips():
    rng = random.Random(23)
    sig = toy_sig()
    for i in range(300):
        f = random_closed_formula(rng)
        entry = ObjectEntry(name=f"R{i}", role=Role.THEOREM, formula=f, theory="", seq=0)
        line = print_tt(entry)
        [back] = parse_tt(line, sig.copy())
        assert alpha_equal(back.formula, f), line
        assert print_tt(back) == line


# ------------------------------------------------------------------ corpus


THY = "theory(base, []).\ntheory(more, [base]).\n"

BASE_TT = TOY_DECLS + """\
tt(B0, ax, LE 0 0).
tt(B1, ax, (LE 0 0) & (LE 0 (SUC 0))).
"""

MORE_TT = """\
tt(M0, ax, ![x:nat]: (LE x x)).
tt(M1, ax, (LE 0 0) & (LE (SUC 0) (SUC 0))).
"""

MORE_DEPS = """\
deps(M0_c1, [B1_c1]).
deps(M1_c1, [M0, B0_c1]).
deps(M1_c2, [M0]).
"""


def small_corpus() -> Corpus:
    return load_corpus_files(
        THY, {"base": (BASE_TT, None), "more": (MORE_TT, MORE_DEPS)}
    )


def test_corpus_tables():
    c = small_corpus()
    assert c.theories == ["base", "more"]
    b1 = c.theorem_named("B1")
    assert len(b1.conjuncts) == 2
    assert c.conjunct_label(ConjunctId(b1.id, 2)) == "B1_c2"
    m1 = c.theorem_named("M1")
    m0 = c.theorem_named("M0")
    b0 = c.theorem_named("B0")
    # Whole-theorem dependency names expand to every conjunct.
    assert m1.dependencies[0] == frozenset(
        [ConjunctId(m0.id, 1), ConjunctId(b0.id, 1)]
    )
    assert m1.dependencies[1] == frozenset([ConjunctId(m0.id, 1)])
    assert c.exact_deps(m1.id) == frozenset([m0.id, b0.id])


def test_resolve_dep_name():
    c = small_corpus()
    b1 = c.by_name["B1"]
    assert resolve_dep_name(c, "B1") == (b1, None)
    assert resolve_dep_name(c, "B1_c2") == (b1, 2)
    with pytest.raises(UnknownTheorem):
        resolve_dep_name(c, "B1_c3")
    with pytest.raises(UnknownTheorem):
        resolve_dep_name(c, "nope")


def test_linear_order_and_positions():
    c = small_corpus()
    names = [c.theorem(t).name for t in c.order()]
    assert names == ["B0", "B1", "M0", "M1"]
    assert c.position(c.by_name["B0"]) == 0
    assert c.position(c.by_name["M1"]) == 3


def test_accessible_sets_by_hand():
    c = small_corpus()
    m1 = c.by_name["M1"]
    by = lambda rel: {
        c.theorem(t).name for t in accessible_set(c, m1, rel)
    }
    assert by(AccessRelation.EXACT_DEPS) == {"M0", "B0"}
    assert by(AccessRelation.TRANSITIVE_DEPS) == {"M0", "B0", "B1"}
    assert by(AccessRelation.LOADED_THEORIES) == {"B0", "B1", "M0"}
    assert by(AccessRelation.LINEAR_ORDER) == {"B0", "B1", "M0"}
    b0 = c.by_name["B0"]
    assert accessible_set(c, b0, AccessRelation.LINEAR_ORDER) == set()


def test_dependency_must_precede():
    bad_deps = "deps(M0_c1, [M1]).\n"
    with pytest.raises(CycleDetected):
        load_corpus_files(
            THY, {"base": (BASE_TT, None), "more": (MORE_TT, bad_deps)}
        )


def test_unknown_dependency_name():
    with pytest.raises(UnknownTheorem):
        load_corpus_files(
            THY,
            {"base": (BASE_TT, None), "more": (MORE_TT, "deps(M0_c1, [ZZZ]).\n")},
        )


def test_ancestor_must_be_built_first():
    thy = "theory(more, [base]).\ntheory(base, []).\n"
    with pytest.raises(CycleDetected):
        load_corpus_files(
            thy, {"base": (BASE_TT, None), "more": (MORE_TT, None)}
        )


def test_thy_and_deps_round_trip():
    theories = parse_thy(THY)
    assert theories == [("base", ()), ("more", ("base",))]
    assert print_thy(theories) == THY
    c = small_corpus()
    text = print_deps(c)
    lines = dict(parse_deps(text))
    assert lines["M1_c1"] == ["B0_c1", "M0_c1"]
    # Reloading from the printed sidecar reproduces the dependency tables.
    c2 = load_corpus_files(
        THY, {"base": (BASE_TT, None), "more": (MORE_TT, text)}
    )
    for name in ("B0", "B1", "M0", "M1"):
        assert (
            c2.theorem_named(name).dependencies
            == c.theorem_named(name).dependencies
        )


def test_rename_overwritten_spec_examples():
    t = lambda i: TheoremId("th", i)
    assert rename_overwritten([("T", t(1)), ("T", t(2))]) == {
        t(1): "T~1",
        t(2): "T",
    }
    assert rename_overwritten([("T", t(1)), ("U", t(2))]) == {
        t(1): "T",
        t(2): "U",
    }
    assert rename_overwritten(
        [("T", t(1)), ("T", t(2)), ("T", t(3))]
    ) == {t(1): "T~1", t(2): "T~2", t(3): "T"}
    # A literal name~1 already in use is skipped, not clobbered.
    got = rename_overwritten([("T~1", t(0)), ("T", t(1)), ("T", t(2))])
    assert got[t(0)] == "T~1"
    assert got[t(1)] == "T~2"
    assert got[t(2)] == "T"


def test_overwritten_names_in_corpus():
    tt = TOY_DECLS + "tt(T, ax, LE 0 0).\ntt(T, ax, LE 0 (SUC 0)).\n"
    c = load_corpus_files("theory(base, []).\n", {"base": (tt, None)})
    assert {c.theorem(t).name for t in c.order()} == {"T~1", "T"}
    assert c.theorem_named("T").statement != c.theorem_named("T~1").statement


def test_qualify_rewrites_everything():
    c = small_corpus()
    q = qualify(c, "h4")
    assert q.theorem_named("h4/more/M1")
    assert "h4/base/LE" in {e.name for e in q.entries}
    stmt = q.theorem_named("h4/base/B0").statement
    # The statement's constants were renamed along with the declarations.
    assert type_of(stmt, q.signature) == BOOL
    consts = {t.name for t in subterms(stmt) if isinstance(t, Const)}
    assert "h4/base/LE" in consts
    # Qualifying twice changes nothing.
    q2 = qualify(q, "h4")
    assert {e.name for e in q2.entries} == {e.name for e in q.entries}


def test_parse_goal_forms():
    sig = toy_sig()
    name, g = parse_goal("tt(G, conj, LE 0 0).", sig)
    assert name == "G"
    assert type_of(g, sig) == BOOL
    name, g2 = parse_goal("LE 0 0", sig)
    assert name == "goal"
    assert alpha_equal(g, g2)
    with pytest.raises(NotBoolean):
        parse_goal("SUC 0", sig)


# ------------------------------------------------- randomized accessibility


def random_corpus(rng: random.Random) -> Corpus:
    decl = "tt(o, ty, $t).\ntt(k, ty, o).\ntt(EQL, ty, o > o > bool).\n"
    thy: list[tuple[str, tuple[str, ...]]] = []
    files: dict[str, tuple[str, str | None]] = {}
    known: list[tuple[str, int]] = []  # (name, #conjuncts) in build order
    n_theories = rng.randrange(1, 4)
    for ti in range(n_theories):
        theory = f"th{ti}"
        ancs = tuple(t for t, _ in thy if rng.random() < 0.6)
        thy.append((theory, ancs))
        lines = [decl] if ti == 0 else []
        dep_lines = []
        for i in range(rng.randrange(1, 7)):
            name = f"T{ti}_{i}"
            two = rng.random() < 0.4
            stmt = "(EQL k k) & (k = k)" if two else "EQL k k"
            lines.append(f"tt({name}, ax, {stmt}).")
            pool = [n for n, _ in known]
            picked = rng.sample(pool, k=min(len(pool), rng.randrange(0, 3)))
            for ci in range(1, (2 if two else 1) + 1):
                chosen = [d for d in picked if rng.random() < 0.8]
                if chosen:
                    dep_lines.append(f"deps({name}_c{ci}, [{', '.join(chosen)}]).")
            known.append((name, 2 if two else 1))
        files[theory] = (
            "\n".join(lines) + "\n",
            "\n".join(dep_lines) + "\n" if dep_lines else None,
        )
    return load_corpus_files(print_thy(thy), files)


def transitive_oracle(c: Corpus, tid: TheoremId) -> set[TheoremId]:
    out: set[TheoremId] = set()
    frontier = {tid}
    while frontier:
        nxt: set[TheoremId] = set()
        for t in frontier:
            for d in c.exact_deps(t):
                if d not in out:
                    out.add(d)
                    nxt.add(d)
        frontier = nxt
    return out


def loaded_oracle(c: Corpus, tid: TheoremId) -> set[TheoremId]:
    closure: set[str] = set()
    todo = [tid.theory]
    while todo:
        t = todo.pop()
        if t not in closure:
            closure.add(t)
            todo.extend(c.ancestors[t])
    return {
        t
        for t in c.theorems
        if (t.theory in closure - {tid.theory})
        or (t.theory == tid.theory and t.seq < tid.seq)
    }


def test_accessibility_laws_on_random_corpora():
    rng = random.Random(2024)
    for _ in range(40):
        c = random_corpus(rng)
        linear = c.order()
        for tid in linear:
            ed = accessible_set(c, tid, AccessRelation.EXACT_DEPS)
            td = accessible_set(c, tid, AccessRelation.TRANSITIVE_DEPS)
            lt = accessible_set(c, tid, AccessRelation.LOADED_THEORIES)
            lo = accessible_set(c, tid, AccessRelation.LINEAR_ORDER)
            assert ed <= td <= lo
            assert lt <= lo
            assert td == transitive_oracle(c, tid)
            assert lt == loaded_oracle(c, tid)
            assert lo == set(linear[: c.position(tid)])
