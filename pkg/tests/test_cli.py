import json

import pytest
import yaml

import main

CONFIG = {
    "run":  {"seed": 11, "threads": 1},
    "maps": {"enumeration_cap": 8, "max_maps": 200000, "tail_tolerance": 1.0e-6, "max_inner": 100000},
}


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    (tmp_path / "config.yaml").write_text(yaml.safe_dump(CONFIG))
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("CARDYLAB_THREADS", raising=False)
    return tmp_path


def _files(path):
    return sorted(p.name for p in path.iterdir() if p.name != "config.yaml")


def test_sample_map(workdir):
    assert main.main(["sample-map", "--boundary", "4", "--count", "3", "--inner", "2"]) == 0
    assert _files(workdir) == ["maps.envelope.json", "maps.jsonl"]
    records = [json.loads(line) for line in (workdir / "maps.jsonl").read_text().splitlines()]
    assert [r["index"] for r in records] == [0, 1, 2]
    assert all(r["n"] == 2 and r["a"] == 0 and 0 < r["b"] < r["c"] < 4 for r in records)
    envelope = json.loads((workdir / "maps.envelope.json").read_text())
    assert envelope["command"] == "sample-map"
    assert envelope["payload"]["sizes"] == [2, 2, 2]
    assert "sample-map" in envelope["metadata"]["seeds"]


def test_reruns_are_byte_identical(workdir):
    argv = ["--seed", "5", "sample-map", "--boundary", "5", "--count", "4"]
    runs = []
    for _ in range(2):
        assert main.main(argv) == 0
        envelope = json.loads((workdir / "maps.envelope.json").read_text())
        runs.append(((workdir / "maps.jsonl").read_bytes(), json.dumps(envelope["payload"], sort_keys=True)))
    assert runs[0] == runs[1]


def test_global_options_after_the_command(workdir):
    assert main.main(["--seed", "9", "sample-map", "--boundary", "4", "--count", "2", "--out", "before.jsonl"]) == 0
    assert main.main(["sample-map", "--boundary", "4", "--count", "2", "--out", "after.jsonl", "--seed", "9"]) == 0
    assert (workdir / "before.jsonl").read_bytes() == (workdir / "after.jsonl").read_bytes()
    assert main.main(["sample-map", "--boundary", "4", "--count", "2", "--out", "other.jsonl"]) == 0
    envelope = json.loads((workdir / "other.envelope.json").read_text())
    assert envelope["metadata"]["seeds"]["sample-map"]["master"] == 11


def test_unknown_flag_writes_nothing(workdir):
    with pytest.raises(SystemExit) as exc:
        main.main(["sample-map", "--boundary", "4", "--bogus"])
    assert exc.value.code == 2
    assert _files(workdir) == []


def test_invalid_input_exit_code(workdir):
    assert main.main(["sample-map", "--boundary", "2"]) == 2
    assert main.main(["--config", "missing.yaml", "sample-map", "--boundary", "4"]) == 2
    assert _files(workdir) == []


def test_budget_exit_code(workdir):
    assert main.main(["sample-map", "--boundary", "3", "--inner", "9", "--enumerate"]) == 3
    assert _files(workdir) == []


def test_enumerated_maps(workdir):
    assert main.main(["sample-map", "--boundary", "3", "--inner", "1", "--enumerate", "--out", "all.jsonl"]) == 0
    assert len((workdir / "all.jsonl").read_text().splitlines()) == 4


def test_ctmc_checks_pass(workdir):
    assert main.main(["ctmc", "--random", "3", "--max-inner", "4", "--out", "ctmc.json"]) == 0
    envelope = json.loads((workdir / "ctmc.json").read_text())
    payload = envelope["payload"]
    assert payload["pass"] is True
    assert payload["worst"] <= payload["tolerance"] == 1e-12
    assert len(payload["checks"]) == 9


def test_dynamics_on_a_sampled_map(workdir):
    assert main.main(["sample-map", "--boundary", "4", "--inner", "6"]) == 0
    assert main.main(["dynamics", "--map", "maps.jsonl", "--mode", "cutoff", "--eps", "0", "--horizon", "5"]) == 0
    lines = (workdir / "traj.jsonl").read_text().splitlines()
    header = json.loads(lines[0])
    assert header["policy"]["mode"] == "cutoff"
    assert len(lines) == header["events"] + 1
    payload = json.loads((workdir / "traj.envelope.json").read_text())["payload"]
    assert payload["n_inner"] == 6
