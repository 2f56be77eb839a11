"""Command-line behaviour: exit codes, output formats and JSON schemas."""
import csv
import io
import json
import math
import os
import pathlib
import subprocess

import jsonschema
import pytest

CLI = os.environ["MODALBRIDGE_CLI"]
SCHEMAS = pathlib.Path(__file__).resolve().parent.parent / "tools" / "schema"


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def run(tmp_path, *args, config=None):
    cmd = [CLI, *args]
    if config is not None:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        jsonschema.validate(config, schema("config"))
        cmd += ["--config", str(path)]
    return subprocess.run(cmd, capture_output=True, text=True, timeout=300)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def normal_pdf(x, mean, var):
    return math.exp(-0.5 * (x - mean) ** 2 / var) / math.sqrt(2 * math.pi * var)


def test_kernel_brownian_columns_are_one(tmp_path):
    r = run(tmp_path, "kernel", config={"kernel": {"hurst": 0.5, "n": 4}})
    assert r.returncode == 0
    assert r.stdout.splitlines()[0] == "t,s,K_hyp,K_alt,abs_rel_diff"
    for row in rows(r.stdout):
        assert float(row["K_hyp"]) == 1.0
        assert float(row["K_alt"]) == 1.0


def test_kernel_forms_agree(tmp_path):
    r = run(tmp_path, "kernel", config={"kernel": {"hurst": 0.75, "t_max": 2.0, "n": 10}})
    assert r.returncode == 0
    assert max(float(row["abs_rel_diff"]) for row in rows(r.stdout)) <= 1e-8


def test_csv_is_lf_terminated_with_full_precision(tmp_path):
    r = subprocess.run([CLI, "kernel", "--config", "/dev/stdin"], input=b'{"kernel": {"hurst": 0.3, "n": 3}}',
                       capture_output=True)
    assert r.returncode == 0
    assert b"\r" not in r.stdout
    for row in rows(r.stdout.decode()):
        for value in row.values():
            assert value == f"{float(value):.17g}"


def test_out_of_range_hurst_names_the_field(tmp_path):
    r = run(tmp_path, "kernel", config={"kernel": {"hurst": 0.5, "n": 4}})
    assert r.returncode == 0
    bad = tmp_path / "bad.json"
    bad.write_text('{"kernel": {"hurst": 1.5}}')
    r = subprocess.run([CLI, "kernel", "--config", str(bad)], capture_output=True, text=True)
    assert r.returncode == 2
    assert "kernel.hurst" in r.stderr


@pytest.mark.parametrize(
    "document, field",
    [
        ('{"model": {"hurst": 0.3, "T": 1, "foo": 1}}', "model.foo"),
        ('{"model": {"hurst": 0.3, "T": 1, "h1": "x + * y"}, "density": {"endpoints": [[0, 0]]}}', "model.h1"),
        ('{"model": {"hurst": 0.3, "T": -1}, "density": {"endpoints": [[0, 0]]}}', "model.T"),
        ('{"model": {"hurst": 0.3, "T": 1}, "density": {"endpoints": []}}', "density.endpoints"),
        ('{"model": {"hurst": 0.3, "T": 1}', "invalid JSON"),
    ],
)
def test_config_errors_exit_2(tmp_path, document, field):
    path = tmp_path / "c.json"
    path.write_text(document)
    r = subprocess.run([CLI, "density", "--config", str(path)], capture_output=True, text=True)
    assert r.returncode == 2
    assert field in r.stderr


def test_config_schema_rejects_what_the_parser_rejects():
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"model": {"hurst": 0.3, "T": 1, "foo": 1}}, schema("config"))
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"kernel": {"hurst": 1.5}}, schema("config"))


def test_missing_subcommand_and_file(tmp_path):
    assert subprocess.run([CLI], capture_output=True).returncode == 2
    r = subprocess.run([CLI, "density", "--config", str(tmp_path / "absent.json")], capture_output=True, text=True)
    assert r.returncode == 2


def test_modal_path_examples(tmp_path):
    straight = run(tmp_path, "modal-path", config={"model": {"hurst": 0.49, "T": 1},
                                                    "modal_path": {"n": 1000, "endpoint": [1, 1]}})
    assert straight.returncode == 0
    data = rows(straight.stdout)
    assert max(max(abs(float(r["x_path"]) - float(r["t"])), abs(float(r["y_path"]) - float(r["t"]))) for r in data) <= 0.05
    assert abs(float(data[-1]["x_path"]) - 1) <= 1e-10 and abs(float(data[-1]["y_path"]) - 1) <= 1e-10
    rough = run(tmp_path, "modal-path", config={"model": {"hurst": 0.01, "T": 1},
                                                 "modal_path": {"n": 1000, "endpoint": [1, 1]}})
    assert 0.45 < float(rows(rough.stdout)[50]["y_path"]) < 0.55


def test_modal_path_svg(tmp_path):
    r = run(tmp_path, "modal-path", "--format", "svg", "--out", str(tmp_path / "o"),
            config={"model": {"hurst": 0.3, "rho": 0.5, "T": 1}, "modal_path": {"n": 50, "endpoint": [1, -1]}})
    assert r.returncode == 0
    svg = (tmp_path / "o" / "modal_path.svg").read_text()
    assert svg.startswith("<svg") and "<polyline" in svg


def test_density_outputs(tmp_path):
    r = run(tmp_path, "density", config={"model": {"hurst": 0.3, "rho": 0.4, "T": 1},
                                          "density": {"n": 100, "endpoints": [[0.1, 0.2], [0, 0]]}})
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    jsonschema.validate(doc, schema("density"))
    for e in doc["endpoints"]:
        assert e["p_hat_leading"] == e["phi"]
        assert e["alpha"] is None

    mu, nu, T = 0.2, -0.1, 0.5
    r = run(tmp_path, "density", config={"model": {"hurst": 0.5, "T": T, "x0": 1, "y0": 2, "h1": "0.2", "h2": "-0.1"},
                                          "density": {"n": 200, "endpoints": [[1.3, 1.8]]}})
    e = json.loads(r.stdout)["endpoints"][0]
    exact = normal_pdf(0.3, mu * T, T) * normal_pdf(-0.2, nu * T, T)
    assert abs(e["p_hat_full"] - exact) <= 1e-10 * exact


def test_density_rejects_general_drift_above_three_quarters(tmp_path):
    r = run(tmp_path, "density", config={"model": {"hurst": 0.8, "T": 1, "h1": "sin(x)", "holder_gamma": 0.4},
                                          "density": {"endpoints": [[0, 0]]}})
    assert r.returncode == 4


def test_simulate_and_bridge_outputs(tmp_path):
    config = {"model": {"hurst": 0.4, "rho": 0.3, "T": 0.5, "h1": "-x", "h2": "t"},
              "simulation": {"n_paths": 5000, "n_steps": 16, "seed": 4, "endpoint": [0.1, 0.1], "estimator": "bin",
                             "width_x": 0.2, "width_y": 0.2},
              "bridge_mc": {"n_paths": 1000, "n_steps": 16, "endpoint": [0.1, 0.1]}}
    sim = run(tmp_path, "simulate", config=config)
    assert sim.returncode == 0
    doc = json.loads(sim.stdout)
    jsonschema.validate(doc, schema("simulate"))
    assert doc["seed"] == 4 and doc["estimator"] == "bin"
    bridge = run(tmp_path, "bridge-mc", "--seed", "9", config=config)
    assert bridge.returncode == 0
    doc = json.loads(bridge.stdout)
    jsonschema.validate(doc, schema("bridge_mc"))
    assert doc["seed"] == 9


def test_simulate_writes_terminals(tmp_path):
    config = {"model": {"hurst": 0.5, "T": 1},
              "simulation": {"n_paths": 300, "n_steps": 4, "endpoint": [0, 0], "write_terminals": True}}
    out = tmp_path / "o"
    assert run(tmp_path, "simulate", "--out", str(out), config=config).returncode == 0
    assert len(rows((out / "terminals.csv").read_text())) == 300
    jsonschema.validate(json.loads((out / "simulate.json").read_text()), schema("simulate"))


def test_zero_drift_bridge_returns_prefactor(tmp_path):
    config = {"model": {"hurst": 0.3, "rho": 0.2, "T": 1},
              "density": {"endpoints": [[0.4, -0.1]]},
              "bridge_mc": {"n_paths": 100, "n_steps": 8, "endpoint": [0.4, -0.1]}}
    phi = json.loads(run(tmp_path, "density", config=config).stdout)["endpoints"][0]["phi"]
    estimate = json.loads(run(tmp_path, "bridge-mc", config=config).stdout)["estimate"]
    assert estimate == pytest.approx(phi, rel=1e-12)


def test_general_drift_warning_goes_to_stderr(tmp_path):
    config = {"model": {"hurst": 0.5, "T": 1, "h1": "3*sin(x)"},
              "simulation": {"n_paths": 200, "n_steps": 4, "endpoint": [0, 0]}}
    r = run(tmp_path, "simulate", config=config)
    assert r.returncode == 0
    assert "horizon" in r.stderr
    assert json.loads(r.stdout)["warnings"]


def test_validate_report(tmp_path):
    r = subprocess.run([CLI, "validate", "--quick", "--criteria", "1,4"], capture_output=True, text=True, timeout=120)
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    jsonschema.validate(doc, schema("validate"))
    assert [c["id"] for c in doc["criteria"]] == [1, 4]
    assert "PASS" in r.stderr


def test_validate_detects_a_corrupted_constant():
    r = subprocess.run([CLI, "validate", "--quick", "--criteria", "1", "--kappa-fault", "1.01"],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 1
    doc = json.loads(r.stdout)
    assert doc["all_passed"] is False
