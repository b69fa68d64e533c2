"""Smoke test for the stt Python bindings."""

import pathlib
import tempfile

import stt

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def test_tope_queries():
    assert stt.entails(["x", "y", "z"], "x ≤ y ∧ y ≤ z", "x ≤ z")
    assert not stt.entails(["x", "y"], "⊤", "x ≤ y")
    assert stt.oracle_entails(["x", "y"], "⊤", "x ≤ y ∨ y ≤ x")
    assert stt.shape_included(["t", "s"], "s ≡ 0 ∨ t ≡ 1", "s ≤ t")
    assert not stt.shape_included(["t", "s"], "s ≤ t", "s ≡ 0 ∨ t ≡ 1")
    try:
        stt.entails(["x"], "⊤", "x ≤ q")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown variable accepted")


def test_corpus():
    run = stt.check([str(CORPUS / "all.stt")], jobs=2)
    assert run.ok and run.exit_code == stt.EXIT_OK, run
    assert len(run.reports) >= 14
    assert all(r.ok and not r.diagnostics for r in run.reports)
    assert sum(r.declarations for r in run.reports) > 300
    assert run.hits == 0


def test_failure_and_cache():
    with tempfile.TemporaryDirectory() as d:
        bad = pathlib.Path(d) / "bad.stt"
        bad.write_text("def x : U := U;\n")
        run = stt.check([str(bad)], use_cache=True, cache_dir=str(pathlib.Path(d) / "cache"))
        assert run.exit_code == stt.EXIT_CHECK
        [report] = run.reports
        assert not report.ok and report.diagnostics[0].severity == "error"
        assert '"status":"failed"' in report.json
        again = stt.check([str(bad)], use_cache=True, cache_dir=str(pathlib.Path(d) / "cache"))
        assert again.hits == 1 and again.reports[0].cached
        try:
            stt.check([str(pathlib.Path(d) / "missing.stt")])
        except OSError:
            pass
        else:
            raise AssertionError("missing target accepted")


def test_format():
    src = "def  idf (A : U) : A → A := λ x . x;"
    once = stt.format_source(src)
    assert stt.format_source(once) == once
    try:
        stt.format_source("def := ;")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error not raised")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok  {name}")
