import json
import os

import pytest

from transdigraph.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATIONS, main, run_command

from conftest import CORPUS, EXAMPLES, GOLDEN

DATA = EXAMPLES.parent / "tests" / "data"


def run(*argv):
    return run_command([str(a) for a in argv])


def ex(name):
    return EXAMPLES / name


def test_components_weak_fig1():
    out, code = run("components", ex("fig1.tdg"), "--kind", "weak", "--rank", "1", "--format", "json")
    assert code == EXIT_OK
    assert len(json.loads(out)["result"]["components"]) == 1


def test_star_has_no_arrow_tips():
    out, code = run("tips", ex("star.tdg"), "--rank", "arrow", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["result"] == []


def test_reach_chain():
    assert run("reach", ex("chain.tdg"), "u", "w", "--rank", "0") == ("true\n", EXIT_OK)
    assert run("reach", ex("chain.tdg"), "w", "u", "--rank", "0") == ("false\n", EXIT_OK)


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_validates(name):
    out, code = run("validate", ex(name))
    assert (out, code) == ("ok\n", EXIT_OK)


def test_json_schema_and_meta():
    out, _ = run("validate", ex("chain.tdg"), "--format", "json", "--unfold-depth", "7")
    doc = json.loads(out)
    assert set(doc) == {"command", "result", "meta"}
    assert doc["command"] == "validate" and doc["meta"] == {"unfold_depth": 7}


def test_text_and_json_agree():
    for argv in (["components", ex("fork.tdg"), "--kind", "unilateral", "--rank", "0"],
                 ["tips", ex("fig1.tdg"), "--rank", "0", "--unfold-depth", "4"]):
        text, _ = run(*argv)
        js, _ = run(*argv, "--format", "json")
        res = json.loads(js)["result"]
        if isinstance(res, dict):
            assert text.splitlines() == ["{" + ", ".join(c) + "}" for c in res["components"]]
        else:
            assert [ln.split()[0] for ln in text.splitlines()] == [t["id"] for t in res]


def test_elevate_commands():
    out, code = run("elevate", ex("fig1.tdg"), "--partition", DATA / "fig1_top.tdg", "--unfold-depth", "4")
    assert code == EXIT_OK and out == "top rank 2: out:W1\n"
    out, code = run("elevate", ex("fig1.tdg"), "--partition", DATA / "fig1_bad.tdg", "--unfold-depth", "4")
    assert code == EXIT_VIOLATIONS and "partition overlap" in out
    out, code = run("elevate", ex("arrow_out.tdg"), "--partition", DATA / "omega_pair.tdg")
    assert code == EXIT_OK and out == "w rank omega: out:Wo\n"
    out, code = run("elevate", ex("star.tdg"), "--partition", DATA / "star_omega.tdg", "--format", "json")
    assert code == EXIT_VIOLATIONS and json.loads(out)["result"]["error"] == "empty-tip-set"


def test_exit_codes():
    assert run("reach", ex("chain.tdg"), "u", "zz", "--rank", "0")[1] == EXIT_VIOLATIONS
    assert run("tips", ex("chain.tdg"), "--rank", "banana")[1] == EXIT_USAGE
    assert run("tips", EXAMPLES / "missing.tdg", "--rank", "0")[1] == EXIT_USAGE
    with pytest.raises(SystemExit) as e:
        run("frobnicate", ex("chain.tdg"))
    assert e.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as e:
        run("components", ex("chain.tdg"), "--kind", "sideways", "--rank", "0")
    assert e.value.code == EXIT_USAGE


def test_max_components_flag():
    out, code = run("components", ex("fork.tdg"), "--kind", "unilateral", "--rank", "0",
                    "--max-components", "1", "--format", "json")
    res = json.loads(out)["result"]
    assert code == EXIT_OK and res["truncated"] and len(res["components"]) == 1


def test_main_writes_stdout(capsys):
    assert main(["reach", str(ex("chain.tdg")), "u", "v", "--rank", "0"]) == EXIT_OK
    assert capsys.readouterr().out == "true\n"


def test_dot_export_small():
    out, _ = run("export-dot", ex("chain.tdg"))
    assert out.count("->") == 2 and '"u" -> "v" [label="a"];' in out
    anti = EXAMPLES.parent / "tests" / "data" / "anti.tdg"
    out, _ = run("export-dot", anti)
    assert '"u" -> "v"' in out and '"v" -> "u"' in out


# -- goldens ----------------------------------------------------------------------

GOLDEN_CASES = {f"{n[:-4]}.dot": ["export-dot", ex(n), "--unfold-depth", "3"] for n in CORPUS}
GOLDEN_CASES.update({
    "fig1_tips.json": ["tips", ex("fig1.tdg"), "--rank", "0", "--unfold-depth", "3", "--format", "json"],
    "fig1_weak.json": ["components", ex("fig1.tdg"), "--kind", "weak", "--rank", "1",
                       "--unfold-depth", "3", "--format", "json"],
    "fork_unilateral.json": ["components", ex("fork.tdg"), "--kind", "unilateral", "--rank", "0",
                             "--format", "json"],
    "arrow_endless_tips.json": ["tips", ex("arrow_endless.tdg"), "--rank", "arrow", "--format", "json"],
    "fig1_underlying.json": ["underlying", ex("fig1.tdg"), "--unfold-depth", "3", "--format", "json"],
})


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden(name):
    first, code = run(*GOLDEN_CASES[name])
    second, _ = run(*GOLDEN_CASES[name])
    assert code == EXIT_OK and first == second
    path = GOLDEN / name
    if os.environ.get("UPDATE_GOLDEN"):
        path.write_text(first)
    assert path.read_text() == first
