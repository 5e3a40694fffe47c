from pathlib import Path

import pytest
from harness import run_all_subcommands

from ctypeinfer.cli import RunConfig, main, parse_project_spec, read_manifest
from ctypeinfer.evaluation import evaluate_lopo, format_metrics
from ctypeinfer.extract import Occurrence, read_jsonl, scan_project, write_jsonl
from ctypeinfer.features import FEATURE_NAMES, featurize_expr
from ctypeinfer.frontend import parse_expression
from ctypeinfer.learn import LearnerConfig, Leaf, Node, Sample, evaluate_tests, tree_from_json
from ctypeinfer.registry import CType
from ctypeinfer.resolve import MethodId

USER_CONFIG = """import java.io.File;
class UserConfig {
    File open() {
        String username = getCurrentUserName();
        String path = "/home/" + username + "/user.cfg";
        File config = new File(path);
        return config;
    }
    String getCurrentUserName() { return "guest"; }
}
"""

NET = """import java.net.Socket;
class Client {
    Socket connect(String serverHost, int serverPort) throws Exception {
        return new Socket(serverHost, serverPort);
    }
}
"""


def _project(root: Path, name: str, files: dict) -> Path:
    base = root / name
    for rel, text in files.items():
        (base / rel).parent.mkdir(parents=True, exist_ok=True)
        (base / rel).write_text(text)
    return base


def _occ(project, text, label, line=1):
    expr = parse_expression(text)
    return Occurrence(project, "F.java", line, MethodId.parse("java.io.File.<init>(LString;)V"),
                      0, label, expr, text, featurize_expr(expr))


def test_extract_two_projects(tmp_path):
    a = _project(tmp_path, "a", {"UserConfig.java": USER_CONFIG})
    b = _project(tmp_path, "b", {"net/Client.java": NET})
    out = tmp_path / "out"
    assert main(["extract", f"a={a}", f"b={b}", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "a.jsonl", "b.jsonl", "counts.tsv", "counts.txt", "extract.log"]
    (occ,) = read_jsonl(out / "a.jsonl")
    assert (occ.label, occ.expr_text) == (CType.PATH, "path")
    rows = [r.split("\t") for r in (out / "counts.tsv").read_text().splitlines()]
    assert rows[0][:3] == ["Project", "PATH", "URL"] and rows[-1][0] == "Total"
    assert rows[-1][-1] == "3"


def test_extract_missing_root_is_partial(tmp_path):
    a = _project(tmp_path, "a", {"UserConfig.java": USER_CONFIG})
    out = tmp_path / "out"
    assert main(["extract", f"a={a}", f"gone={tmp_path / 'gone'}", "--out", str(out)]) == 0
    assert (out / "a.jsonl").exists() and not (out / "gone.jsonl").exists()
    assert "gone" in (out / "extract.log").read_text()
    assert main(["extract", f"gone={tmp_path / 'gone'}", "--out", str(tmp_path / "o2")]) == 1


def test_extract_manifest(tmp_path):
    a = _project(tmp_path, "a", {"UserConfig.java": USER_CONFIG})
    manifest = tmp_path / "m.tsv"
    manifest.write_text(f"# projects\na\t{a}\n")
    assert read_manifest(manifest) == [("a", a)]
    assert main(["extract", "--manifest", str(manifest), "--out", str(tmp_path / "o")]) == 0
    bad = tmp_path / "bad.tsv"
    bad.write_text("just-a-name\n")
    with pytest.raises(ValueError):
        read_manifest(bad)


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(min_items=0)
    with pytest.raises(ValueError):
        RunConfig(project_specs=[("a", Path("x")), ("a", Path("y"))])
    with pytest.raises(Exception):
        parse_project_spec("no-equals-sign")


def test_usage_errors(tmp_path):
    assert main(["extract", "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as info:
        main(["extract", "--segmentation", "weird"])
    assert info.value.code == 2
    assert main(["train", str(tmp_path / "x.jsonl"), "--min-items", "0"]) == 2


def _write(tmp_path, name, occs):
    path = tmp_path / name
    write_jsonl(occs, path)
    return path


def test_train_pure_corpus_gives_leaf(tmp_path):
    data = _write(tmp_path, "p.jsonl", [_occ("p", "path", CType.PATH, i) for i in range(12)])
    assert main(["train", str(data), "--out", str(tmp_path)]) == 0
    assert tree_from_json((tmp_path / "tree.json").read_text()) == Leaf(CType.PATH)
    assert (tmp_path / "rules.txt").read_text() == "ctype = PATH\n"


def test_train_below_cutoff(tmp_path):
    occs = [_occ("p", "path", CType.PATH, i) for i in range(5)]
    occs += [_occ("p", "port", CType.PORT, i) for i in range(4)]
    data = _write(tmp_path, "p.jsonl", occs)
    assert main(["train", str(data), "--out", str(tmp_path)]) == 0
    assert isinstance(tree_from_json((tmp_path / "tree.json").read_text()), Leaf)


def test_train_root_is_min_entropy_test(tmp_path, corpus_occurrences):
    data = _write(tmp_path, "all.jsonl", corpus_occurrences)
    assert main(["train", str(data), "--out", str(tmp_path)]) == 0
    tree = tree_from_json((tmp_path / "tree.json").read_text())
    samples = [Sample(o.features, o.label) for o in corpus_occurrences]
    scored = evaluate_tests(samples)
    low = min(h for h, _, _ in scored)
    fi, word = min((fi, w) for h, fi, w in scored if h <= low + 1e-12)
    assert isinstance(tree, Node) and (tree.feature, tree.word) == (FEATURE_NAMES[fi], word)
    rules = (tmp_path / "rules.txt").read_text()
    assert rules.startswith(f'if "{word}" in ')


def test_train_empty_input(tmp_path):
    empty = tmp_path / "e.jsonl"
    empty.write_text("")
    assert main(["train", str(empty), "--out", str(tmp_path)]) == 1


def test_predict(tmp_path, capsys):
    occs = [_occ("p", t, CType.PATH, i) for i, t in enumerate(
        ["path", "getPath()", "dir.getPath()", "filePath", "basePath"] * 3)]
    occs += [_occ("p", t, CType.URL, i) for i, t in enumerate(["url", "baseUrl", "getUrl()"] * 3)]
    data = _write(tmp_path, "p.jsonl", occs)
    assert main(["train", str(data), "--out", str(tmp_path)]) == 0
    tree = str(tmp_path / "tree.json")
    capsys.readouterr()
    assert main(["predict", "--tree", tree, "--expr", "config.getPath(i)"]) == 0
    assert capsys.readouterr().out == "PATH\n"
    assert main(["predict", "--tree", tree, "--expr", '"not an expr']) == 1
    assert "cannot parse" in capsys.readouterr().err
    odd = _write(tmp_path, "odd.jsonl", [_occ("q", "urlPath", CType.URL)])
    assert main(["predict", "--tree", tree, str(odd)]) == 0
    (line,) = capsys.readouterr().out.splitlines()
    assert line.endswith("PATH\tMISMATCH recorded=URL")


def test_evaluate(tmp_path):
    occs = []
    for p in ("a", "b", "c"):
        occs += [_occ(p, t, CType.PATH) for t in ("path", "filePath", "getPath()")] * 3
        occs += [_occ(p, t, CType.PORT) for t in ("port", "serverPort", "getPort()")] * 3
    files = [str(_write(tmp_path, f"{p}.jsonl", [o for o in occs if o.project == p]))
             for p in "abc"]
    out = tmp_path / "ev"
    assert main(["evaluate", *files, "--out", str(out)]) == 0
    folds = (out / "folds.tsv").read_text().splitlines()
    assert len(folds) == 4
    avg = [l for l in (out / "metrics.tsv").read_text().splitlines() if l.startswith("Average")]
    assert avg[0].split("\t")[3] == "1.000"
    assert main(["evaluate", files[0], "--out", str(out)]) != 0


def test_report(tmp_path, corpus_occurrences):
    data = _write(tmp_path, "all.jsonl", corpus_occurrences)
    out = tmp_path / "rep"
    assert main(["report", str(data), "--out", str(out), "--top", "2"]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["counts.txt", "lengths.tsv", "lengths.txt", "report.log",
                     "top_expressions.txt", "top_words.tsv"]
    assert "baseDir + fileName" in (out / "top_expressions.txt").read_text()


def test_generate(tmp_path):
    assert main(["generate", "--out", str(tmp_path), "--projects", "3"]) == 0
    specs = read_manifest(tmp_path / "manifest.tsv")
    assert [n for n, _ in specs] == ["alpha", "bravo", "charlie"]


def test_file_pipeline_equals_in_process(tmp_path, corpus, registry):
    out = tmp_path / "x"
    args = [f"{n}={p}" for n, p in corpus]
    assert main(["extract", *args, "--out", str(out)]) == 0
    assert main(["evaluate", *[str(out / f"{n}.jsonl") for n, _ in corpus],
                 "--out", str(out)]) == 0
    occs = [o for n, p in corpus for o in scan_project(p, registry, n)]
    ev = evaluate_lopo(occs, LearnerConfig(10))
    assert (out / "metrics.txt").read_text() == format_metrics(ev.report)


def test_every_subcommand_is_byte_deterministic(tmp_path, corpus):
    first = run_all_subcommands(tmp_path / "one", corpus)
    second = run_all_subcommands(tmp_path / "two", corpus)
    assert first.keys() == second.keys()
    assert first == second
