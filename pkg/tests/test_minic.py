from pathlib import Path

import pytest

from hlslock import benchmarks
from hlslock.minic import (
    MiniCSyntaxError, SemanticError, UnsupportedConstruct, emit_source, parse, same_shape,
)
from hlslock.minic.ast import Binary, IntLit, walk

CORPUS = sorted((Path(__file__).parent / "corpus").glob("*.c"))
SOURCES = [p.read_text() for p in CORPUS] + [benchmarks.source(b) for b in benchmarks.BENCHMARKS]

MINIMAL = "int top(int a, int out[1]){out[0]=a+1; return 0;}"


def test_minimal_program_shape():
    prog = parse(MINIMAL)
    assert len(prog.functions) == 1
    assert prog.top_name == "top"
    binaries = [n for n in walk(prog.top.body) if isinstance(n, Binary)]
    literals = [n for n in walk(prog.top.body) if isinstance(n, IntLit)]
    assert [b.op for b in binaries] == ["+"]
    # out[0], a + 1 and return 0
    assert sorted(lit.value for lit in literals) == [0, 0, 1]


def test_corpus_is_large_enough():
    assert len(SOURCES) >= 20


@pytest.mark.parametrize("source", SOURCES, ids=[p.stem for p in CORPUS] + list(benchmarks.BENCHMARKS))
def test_round_trip(source):
    prog = parse(source)
    text = emit_source(prog)
    again = parse(text)
    assert same_shape(prog, again)
    assert emit_source(again) == text


def test_node_ids_deterministic():
    a = parse(benchmarks.source("patricia"))
    b = parse(benchmarks.source("patricia"))
    ids_a = [(type(n).__name__, n.node_id) for n in walk(a)]
    ids_b = [(type(n).__name__, n.node_id) for n in walk(b)]
    assert ids_a == ids_b
    assert [i for _, i in ids_a] == list(range(len(ids_a)))


def test_widths_survive_round_trip():
    src = (Path(__file__).parent / "corpus" / "c10_stdint.c").read_text()
    prog = parse(emit_source(parse(src)))
    widths = [(p.ctype.signed, p.ctype.width) for p in prog.top.params]
    assert widths == [(False, 8), (True, 16), (False, 32), (True, 8)]
    assert (prog.top.ret.signed, prog.top.ret.width) == (False, 16)


@pytest.mark.parametrize("source, error", [
    ("int top(int a){ float x; return a; }", UnsupportedConstruct),
    ("int top(int a){ double d; return a; }", UnsupportedConstruct),
    ("int top(int a){ goto end; return a; }", UnsupportedConstruct),
    ("struct s { int a; }; int top(int a){ return a; }", UnsupportedConstruct),
    ("int top(int a){ return f(a); } int f(int b){ return top(b); }", UnsupportedConstruct),
    ("int top(int a){ return top(a - 1); }", UnsupportedConstruct),
    ("int top(int *p){ return 0; }", UnsupportedConstruct),
    ("int top(int a){ return 1.5; }", UnsupportedConstruct),
    ("int top(int a){ return a + ; }", MiniCSyntaxError),
    ("int top(int a){ return b; }", SemanticError),
    ("int f(int a){ return a; } int g(int a){ return a; }", SemanticError),
    ("", SemanticError),
    ("int top(int a){ if (a) break; return a; }", SemanticError),
])
def test_diagnostics(source, error):
    with pytest.raises(error) as info:
        parse(source)
    assert info.value.line >= 0


def test_syntax_error_has_position():
    with pytest.raises(MiniCSyntaxError) as info:
        parse("int top(int a) {\n    return a +;\n}")
    assert info.value.line == 2
    assert info.value.col > 0


def test_explicit_top_resolves_ambiguity():
    prog = parse("int f(int a){ return a; } int g(int a){ return a + 1; }", top="g")
    assert prog.top_name == "g"


def test_locked_key_syntax():
    from hlslock.lockpoints import find_points
    from hlslock.locker import LockingKey, apply_locking

    prog = parse("int top(int a, int b){ if (a < b) return 1; return a ^ b; }")
    points = find_points(prog)
    locked = apply_locking(prog, points, (1, 0, 0), LockingKey((0,)))
    text = emit_source(locked.ast)
    assert "const unsigned char KEY[]" in text
    assert "!= 0) ^ KEY[0]" in text
    assert same_shape(parse(text), locked.ast)
