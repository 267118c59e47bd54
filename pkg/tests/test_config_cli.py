import json
import os

import pytest

from rwentropy.cli import main
from rwentropy.config import ConfigError, parse_config


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def read_dir(d):
    return {f: open(os.path.join(d, f), "rb").read() for f in sorted(os.listdir(d))}


@pytest.mark.parametrize("doc, field", [
    ({"model": "torus", "non_elementary": True,
      "generators": [{"label": "A", "matrix": [[2, 1], [1, 1]], "weight": "1/2"},
                     {"label": "B", "matrix": [[3, 2], [1, 1]], "weight": "1/4"}]}, "generators"),
    ({"model": "torus", "non_elementary": True,
      "generators": [{"label": "A", "matrix": [[2, 1], [1, 1]], "weight": "x"}]},
     "generators[0].weight"),
    ({"model": "torus", "non_elementary": True,
      "generators": [{"label": "A", "matrix": [[2, 1], [1, 2]], "weight": 1}]},
     "generators[0].matrix"),
    ({"model": "torus",
      "generators": [{"label": "A", "matrix": [[2, 1], [1, 1]], "weight": 1}]}, "non_elementary"),
    ({"preset": "nope"}, "preset"),
    ({"preset": "golden", "paths": 0}, "paths"),
    ({"preset": "golden", "colour": 1}, "colour"),
])
def test_config_errors_name_field(doc, field):
    with pytest.raises(ConfigError) as e:
        parse_config(doc)
    assert e.value.path.startswith(field)


def test_weights_message():
    doc = {"model": "torus", "non_elementary": True,
           "generators": [{"label": "A", "matrix": [[2, 1], [1, 1]], "weight": "1/2"},
                          {"label": "B", "matrix": [[3, 2], [1, 1]], "weight": "1/4"}]}
    with pytest.raises(ConfigError, match="3/4"):
        parse_config(doc)


def test_cli_config_error_exit(tmp_path, capsys):
    cfg = write(tmp_path, {"preset": "golden", "tolerances": {"z": -1}})
    assert main(["drift", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "tolerances" in capsys.readouterr().err


def test_cli_model_mismatch(tmp_path):
    cfg = write(tmp_path, {"preset": "braid-pa"})
    assert main(["drift", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_cli_verify_golden(tmp_path):
    cfg = write(tmp_path, {"preset": "golden", "paths": 1, "horizon": 64})
    out = str(tmp_path / "o")
    assert main(["verify", "--config", cfg, "--out", out]) == 0
    rep = json.load(open(os.path.join(out, "report.json")))
    man = json.load(open(os.path.join(out, "manifest.json")))
    assert rep["pass"] is True and rep["config_hash"] == man["config_hash"]
    assert set(man["artifacts"]) == {"report.json", "estimates.jsonl", "estimates.csv"}


def test_cli_reruns_identical(tmp_path):
    cfg = write(tmp_path, {"preset": "random-ab", "paths": 3, "horizon": 64,
                           "partition": {"n_min": -8, "n_max": 16}})
    for cmd in ("walk", "lyapunov", "entropy", "partition"):
        a, b, c = (str(tmp_path / (cmd + x)) for x in "abc")
        assert main([cmd, "--config", cfg, "--out", a]) == 0
        assert main([cmd, "--config", cfg, "--out", b]) == 0
        assert main([cmd, "--config", cfg, "--out", c, "--threads", "2"]) == 0
        assert read_dir(a) == read_dir(b) == read_dir(c)


def test_cli_seed_override_and_env(tmp_path, monkeypatch):
    cfg = write(tmp_path, {"preset": "random-ab", "walk": {"n_min": -2, "n_max": 2}})
    monkeypatch.setenv("RWENTROPY_OUT", str(tmp_path / "env"))
    assert main(["walk", "--config", cfg, "--seed", "9"]) == 0
    man = json.load(open(tmp_path / "env" / "manifest.json"))
    assert man["seed"] == 9
    rows = (tmp_path / "env" / "walk.jsonl").read_text().splitlines()
    assert len(rows) == 5


def test_cli_partition_report(tmp_path):
    cfg = write(tmp_path, {"preset": "golden", "partition": {"n_min": -4, "n_max": 8}})
    out = tmp_path / "o"
    assert main(["partition", "--config", cfg, "--out", str(out)]) == 0
    sm = json.load(open(out / "semi_markov.json"))
    assert sm["ok"] and sm["M1"] == 0 and sm["M2"] == 0
    assert (out / "partitions.txt").read_text().startswith("# config_hash")
