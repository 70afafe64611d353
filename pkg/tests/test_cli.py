import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from eikonal_defects.cli import main, sample_grid
from eikonal_defects.config import dumps, load_job, spec_from_dict, spec_to_dict
from eikonal_defects.exceptions import ConfigError, ConstraintViolation
from eikonal_defects.solutions import compose, make_cyl_string, make_elliptic, make_hedgehog, make_massive

FIXTURES = Path(__file__).parent / "fixtures"


def write(tmp_path, obj, name="job.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


def report(out, name):
    return json.loads((out / f"{name}.report.json").read_text())


def test_two_strand_job(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(FIXTURES / "two_strand.json"), "--output", str(out)]) == 0
    assert report(out, "charge")["result"]["index"] == 2
    closure = report(out, "closure")["result"]
    assert closure["link_label"] == "T(2,-3)" and closure["torus_type"] == [2, 3]
    assert "trefoil" in capsys.readouterr().out
    rows = list(csv.DictReader(open(out / "curves.csv")))
    assert set(rows[0]) == {"x", "y", "z", "branch"}
    assert {r["branch"] for r in rows} == {"0", "1"}


def test_report_embeds_spec_and_tolerances(tmp_path):
    out = tmp_path / "out"
    main(["run", str(FIXTURES / "two_strand.json"), "--output", str(out), "--quiet", "--seed", "11"])
    rep = report(out, "verify")
    assert rep["seed"] == 11
    assert rep["spec"]["family"] == "cyl_string"
    assert rep["tolerances"]["eikonal"] == 1e-6
    assert "timing" not in rep and "seconds" in json.loads((out / "timing.json").read_text())


def test_constraint_violation_exit_code(capsys):
    assert main(["run", str(FIXTURES / "bad_ratio.json")]) == 1
    assert "k_j/n_j" in capsys.readouterr().err
    assert main(["validate", str(FIXTURES / "bad_ratio.json")]) == 1


def test_hedgehog_job(tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(FIXTURES / "hedgehog.json"), "--output", str(out), "--quiet"]) == 0
    assert report(out, "charge")["result"]["index"] == 1
    assert report(out, "verify-2")["result"]["reports"][0]["identity"] == "o3_eom"
    grid = np.loadtxt(out / "grid.csv", delimiter=",", skiprows=1)
    r = np.linalg.norm(grid[:, :3], axis=1)
    inner, outer = grid[np.isclose(r, 1.0)], grid[np.isclose(r, 2.0)]
    assert len(inner) == len(outer) == 40
    assert np.allclose(inner[:, 5:], outer[:, 5:], atol=1e-14)


def test_threshold_failure_exit_code(tmp_path):
    job = json.loads((FIXTURES / "two_strand.json").read_text())
    job["tasks"] = [{"task": "verify"}]
    job["tolerances"] = {"eikonal": 1e-300}
    assert main(["run", str(write(tmp_path, job)), "--output", str(tmp_path / "o"), "--quiet"]) == 2
    assert report(tmp_path / "o", "verify")["passed"] is False


@pytest.mark.parametrize(
    "text,needle",
    [
        ('{"spec": {"family": "cyl_string",\n "components": [}', "job.json:2:"),
        ('{"spec": {"family": "torus"}, "tasks": ["verify"]}', "spec.family"),
        ('{"spec": {"family": "cyl_string", "components": [{"n": 2}]}, "tasks": ["verify"]}', "spec.components[0].k"),
        ('{"spec": {"family": "cyl_string", "components": [{"n": 2, "k": 1}]}, "tasks": []}', "config.tasks"),
        ('{"spec": {"family": "cyl_string", "components": [{"n": 2, "k": 1}]}, "tasks": ["fly"]}', "tasks[0].task"),
        (
            '{"spec": {"family": "cyl_string", "components": [{"n": 2, "k": 1}]}, "tasks": ["verify"], "tolerances": {"eikonal": -1}}',
            "tolerances.eikonal",
        ),
        ('{"spec": {"family": "elliptic_string", "k": 1, "a": 1, "n": 1, "lam": 0.5}, "tasks": ["verify"]}', "quantization"),
    ],
)
def test_config_errors(tmp_path, capsys, text, needle):
    assert main(["validate", str(write(tmp_path, text))]) == 1
    assert needle in capsys.readouterr().err


def test_validate_ok(tmp_path, capsys):
    assert main(["validate", str(FIXTURES / "elliptic.json")]) == 0
    assert "ok" in capsys.readouterr().out


SPECS = [
    make_cyl_string([(1 + 2j, 2, 1), (0.5, 4, 2)], c=0.25, sign=-1),
    make_massive(1j, n=2, k=0.3, m=1.5),
    make_massive(1, n=1, m=1, dim=2),
    make_elliptic(n=2, sign=-1),
    make_hedgehog([(1, 2), (0.5j, 1)], c=0.1),
    make_hedgehog([(1, 3)], m_pow=1.5),
    compose(make_cyl_string([(1, 2, 1)], c=1), [0, -2, 0, 1]),
]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.family)
def test_spec_roundtrip(spec):
    d = spec_to_dict(spec)
    again = spec_from_dict(json.loads(dumps(d)))
    assert spec_to_dict(again) == d
    p = np.array([0.7, 0.4, 0.3])
    assert again(p) == spec(p)


def test_elliptic_lambda_resolved():
    spec = spec_from_dict({"family": "elliptic_string", "k": 1, "a": 1, "n": 3, "c0": 0.2})
    assert spec_to_dict(spec)["lam"] == pytest.approx(2.9791302450815269616, abs=1e-12)


def test_spec_errors_carry_path():
    with pytest.raises(ConstraintViolation, match="^spec: winding ratio"):
        spec_from_dict({"family": "cyl_string", "components": [{"n": 1, "k": 1}, {"n": 2, "k": 1}]})
    with pytest.raises(ConfigError, match=r"spec\.components\[0\]\.n"):
        spec_from_dict({"family": "cyl_string", "components": [{"n": 1.5, "k": 1}]})
    with pytest.raises(ConfigError, match=r"spec\.base"):
        spec_from_dict({"family": "composite", "coeffs": [0, 1], "base": 3})


def test_missing_file():
    with pytest.raises(ConfigError):
        load_job("/nonexistent/job.json")


def test_sample_grid_constant_spec():
    rows = sample_grid(make_cyl_string([(0, 1, 0)], c=0.5 + 0.5j), {"x": [0.1, 1, 2], "y": [0.1, 1, 2], "z": 0.0})
    assert rows.shape == (4, 8)
    assert np.all(rows[:, 3:] == rows[0, 3:])


def test_sample_grid_on_string_points_south():
    from eikonal_defects.topology import predict_strings_N1

    rho0 = predict_strings_N1(2, 1, 1.0).rho0
    spec = make_cyl_string([(1, 2, 1)], c=1)
    rows = sample_grid(spec, {"system": "cylindrical", "rho": rho0, "phi": np.pi / 2, "z": 0.0})
    assert rows[0, 7] == pytest.approx(-1.0, abs=1e-12)


def test_sample_grid_domain_error():
    with pytest.raises(ConfigError, match="validity domain"):
        sample_grid(make_hedgehog([(1, 1)]), {"x": 0.0, "y": 0.0, "z": 0.0})


def test_sample_subcommand_default_grid(tmp_path):
    out = tmp_path / "s"
    assert main(["sample", str(FIXTURES / "massive_planar.json"), "--output", str(out), "--quiet"]) == 0
    assert (out / "grid.csv").exists() and not (out / "verify.report.json").exists()


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "eikonal_defects", "run", str(FIXTURES / "composite.json"), "--output", str(tmp_path), "--quiet"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0, res.stderr
