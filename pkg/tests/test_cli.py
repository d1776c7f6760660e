import json
import subprocess
import sys

import pytest

from avoidmatch.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main
from avoidmatch.hypercore import Hypergraph
from avoidmatch.pipeline import ConfigError, PipelineConfig, run_pipeline

from conftest import FANO, PASCH


def run(capsys, *argv):
    rc = main([str(a) for a in argv])
    out = capsys.readouterr()
    return rc, out.out, out.err


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def test_build_steiner_counts(tmp_path, capsys):
    rc, _, _ = run(capsys, "build-steiner", "--n", 7, "--q", 3, "--r", 2, "--g", 4, "-o", tmp_path)
    assert rc == EXIT_OK
    info = json.loads((tmp_path / "build.json").read_text())
    assert info["edges"] == 35 and info["configs"] == 210
    G = json.loads((tmp_path / "G.json").read_text())
    assert G["meta"]["command"] == "build-steiner" and "config_hash" in G["meta"]


def test_build_rejects_q_not_above_r(capsys):
    rc, _, err = run(capsys, "build-steiner", "--n", 7, "--q", 2, "--r", 2, "--g", 4)
    assert rc == EXIT_USAGE and "error" in err


def test_build_rainbow(tmp_path, capsys):
    G = Hypergraph(4, [[0, 1], [1, 2], [2, 3]])
    gp = write_json(tmp_path / "g.json", G.to_dict())
    cp = write_json(tmp_path / "c.json", {"colors": [0, 1, 0]})
    rc, out, _ = run(capsys, "build-rainbow", "--graph", gp, "--coloring", cp)
    assert rc == EXIT_OK
    rainbow = json.loads(out)
    assert len(rainbow["edges"]) == 3
    assert all(len(e) == 3 for e in rainbow["edges"])


def test_verify_fano_and_pasch(tmp_path, capsys):
    fano = write_json(tmp_path / "fano.json", {"n": 7, "q": 3, "r": 2, "blocks": FANO})
    rc, out, _ = run(capsys, "verify", "--design", fano, "--g", 2)
    assert rc == EXIT_OK and json.loads(out)["passed"]
    pasch = write_json(tmp_path / "pasch.json", {"n": 7, "q": 3, "r": 2, "blocks": PASCH})
    rc, out, _ = run(capsys, "verify", "--design", pasch, "--g", 4)
    assert rc == EXIT_VERIFY and not json.loads(out)["passed"]


def test_missing_and_malformed_input(tmp_path, capsys):
    rc, _, err = run(capsys, "verify", "--design", tmp_path / "absent.json")
    assert rc == EXIT_USAGE and "no such file" in err
    (tmp_path / "bad.json").write_text("{not json")
    rc, _, _ = run(capsys, "verify", "--design", tmp_path / "bad.json")
    assert rc == EXIT_USAGE
    rc, _, _ = run(capsys, "pipeline", "--n", 20, "--q", 3, "--r", 2, "--g", 4, "--overrides", "{oops")
    assert rc == EXIT_USAGE


def pipeline_args(out, seed=3, n=20):
    return ["pipeline", "--kind", "steiner", "--n", n, "--q", 3, "--r", 2, "--g", 4, "--seed", seed, "-o", out]


def test_pipeline_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, *pipeline_args(a))[0] == EXIT_OK
    assert run(capsys, *pipeline_args(b))[0] == EXIT_OK
    names = sorted(p.name for p in a.iterdir())
    assert names == ["design.json", "matching.json", "report.json", "trace.jsonl"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_pipeline_outputs_carry_meta(tmp_path, capsys):
    run(capsys, *pipeline_args(tmp_path, seed=9))
    for name in ("matching.json", "report.json"):
        meta = json.loads((tmp_path / name).read_text())["meta"]
        assert meta["seed"] == 9 and meta["version"] and len(meta["config_hash"]) == 16
    design = json.loads((tmp_path / "design.json").read_text())
    assert design["provenance"]["seed"] == 9
    hashes = {json.loads(line)["meta_hash"] for line in (tmp_path / "trace.jsonl").read_text().splitlines()}
    assert hashes == {design["provenance"]["config_hash"]}


def test_pipeline_output_verifies_independently(tmp_path, capsys):
    run(capsys, *pipeline_args(tmp_path, n=50))
    rc, out, _ = run(capsys, "verify", "--design", tmp_path / "design.json")
    assert rc == EXIT_OK and json.loads(out)["passed"]


def test_fault_injection_is_caught(tmp_path, capsys):
    rc, out, _ = run(capsys, *pipeline_args(tmp_path), "--corrupt")
    assert rc == EXIT_VERIFY
    assert json.loads(out.splitlines()[-1])["verified"] is False
    rc, _, _ = run(capsys, "verify", "--design", tmp_path / "design.json")
    assert rc == EXIT_VERIFY


def test_toml_config_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('seed = 1\nbeta = 0.5\n[instance]\nkind = "steiner"\nn = 20\nq = 3\nr = 2\ng = 4\n')
    rc, out, _ = run(capsys, "pipeline", "--config", cfg, "--seed", 4, "-o", tmp_path / "o")
    assert rc == EXIT_OK
    assert json.loads(out)["seed"] == 4
    meta = json.loads((tmp_path / "o" / "matching.json").read_text())["meta"]
    assert meta["config"]["instance"]["n"] == 20


def test_unknown_config_key(tmp_path, capsys):
    cfg = write_json(tmp_path / "c.json", {"instance": {"kind": "steiner", "n": 9, "q": 3, "r": 2, "g": 4},
                                           "seeed": 1})
    rc, _, err = run(capsys, "pipeline", "--config", cfg)
    assert rc == EXIT_USAGE and "seeed" in err


def test_config_validation():
    with pytest.raises(ConfigError):
        PipelineConfig({"kind": "steiner", "n": 9, "q": 2, "r": 2, "g": 4})
    with pytest.raises(ConfigError):
        PipelineConfig({"kind": "steiner", "n": 9, "q": 3, "r": 2, "g": 4}, beta=1.5)
    with pytest.raises(ConfigError):
        PipelineConfig({"kind": "files"})


def test_files_pipeline_with_finisher(tmp_path, capsys, rng):
    from conftest import random_bipartite
    G, H = random_bipartite(rng, 6, 2, 6, 12, n_configs=4)
    gp = write_json(tmp_path / "G.json", G.to_dict())
    hp = write_json(tmp_path / "H.json", H.to_dict())
    rc, out, _ = run(capsys, "pipeline", "--G", gp, "--H", hp, "--alpha", 0.05, "--seed", 2,
                     "--no-sparsify", "-o", tmp_path / "o")
    assert rc == EXIT_OK, out
    rc, _, _ = run(capsys, "verify", "--G", gp, "--H", hp, "--matching", tmp_path / "o" / "matching.json")
    assert rc == EXIT_OK


def test_nibble_then_diagnose(tmp_path, capsys):
    run(capsys, "build-steiner", "--n", 9, "--q", 3, "--r", 2, "--g", 4, "-o", tmp_path)
    rc, _, _ = run(capsys, "nibble", "--G", tmp_path / "G.json", "--H", tmp_path / "H.json", "--seed", 0,
                   "--overrides", '{"epsilon": 0.2, "rounds": 4}', "-o", tmp_path / "n")
    assert rc == EXIT_OK
    rc, out, _ = run(capsys, "diagnose", "--trace", tmp_path / "n" / "trace.jsonl")
    assert rc == EXIT_OK
    assert json.loads(out)


def test_pipeline_api_matches_cli(tmp_path, capsys):
    run(capsys, *pipeline_args(tmp_path, seed=5))
    res = run_pipeline(PipelineConfig({"kind": "steiner", "n": 20, "q": 3, "r": 2, "g": 4}, seed=5))
    assert res.outputs()["matching.json"] == (tmp_path / "matching.json").read_text()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "avoidmatch.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
