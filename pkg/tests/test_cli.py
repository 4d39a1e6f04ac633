import csv
import io
import json
import math

import numpy as np
import pytest

from urnldp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_dist_rows_and_header(capsys):
    code, out, err = run(capsys, "dist", "--urn", "constant:0.5", "--n", "3")
    assert code == 0 and "done in" in err and "done in" not in out
    assert out.startswith("# urnldp ")
    p = [float(r["p"]) for r in rows(out)]
    assert p == pytest.approx([0.125, 0.375, 0.375, 0.125], rel=1e-14)


def test_classify_majority(capsys):
    code, out, _ = run(capsys, "classify", "--urn", "majority3")
    data = json.loads(out)
    assert code == 0 and data["provenance"]["tool"] == "urnldp"
    assert data["result"]["z_minus"] == 0.0 and data["result"]["z_plus"] == 1.0
    assert [c["s"] for c in data["result"]["contacts"]] == pytest.approx([0.0, 0.5, 1.0])


def test_simulate_is_reproducible(capsys):
    args = ("simulate", "--urn", "linear:0.3,0.2", "--n", "20", "--trials", "500", "--seed", "4")
    first = run(capsys, *args)[1]
    assert first == run(capsys, *args)[1]
    assert sum(int(r["count"]) for r in rows(first)) == 500


def test_cgf_methods_agree(capsys):
    outs = {}
    for method in ("closed", "ode"):
        code, out, _ = run(capsys, "cgf", "--urn", "linear:0.3,0.2", "--method", method, "--lambda", "-1,0.5,2")
        assert code == 0
        outs[method] = [float(r["psi"]) for r in rows(out)]
    assert outs["closed"] == pytest.approx(outs["ode"], abs=1e-6)


def test_phi_inline_flow_spec(capsys):
    code, out, _ = run(capsys, "phi", "--urn", "{kind:linear,a:0.3,b:0.2}", "--s-grid", "0.375,1")
    values = {float(r["s"]): float(r["phi"]) for r in rows(out)}
    assert code == 0 and values[0.375] == 0.0 and values[1.0] == pytest.approx(math.log(0.5))


def test_trajectory_then_rate(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    assert main(["trajectory", "--urn", "majority3", "--s", "0.8", "--nodes", "1001", "--out", str(path)]) == 0
    code, out, _ = run(capsys, "rate", "--urn", "majority3", "--trajectory", str(path))
    assert code == 0
    assert float(json.loads(out)["result"]["I"]) < 1e-6


def test_bagchi_pal_exact_output(capsys):
    code, out, _ = run(capsys, "bagchi-pal", "--matrix", "2,1,1,2")
    res = json.loads(out)["result"]
    assert code == 0 and (res["s0"], res["b"], res["M"]) == ("1/2", "1/3", 3)


def test_invert_design_from_table(capsys, tmp_path):
    s = np.linspace(0, 1, 401)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = -(np.where(s > 0, s * np.log(s / 0.3), 0) + np.where(s < 1, (1 - s) * np.log((1 - s) / 0.7), 0))
    table = tmp_path / "f.csv"
    np.savetxt(table, np.column_stack([s, f]), delimiter=",", header="s,f", comments="")
    # the spline slope is finite at the ends while f' is not, so the endpoint check fails
    assert run(capsys, "invert-design", "--f", str(table), "--grid", "101")[0] == 3
    code, out, _ = run(capsys, "invert-design", "--f", str(table), "--grid", "101", "--lenient")
    points = np.array(json.loads(out)["result"]["urn"]["points"])
    assert code == 0 and np.max(np.abs(points[5:-5, 1] - 0.3)) < 1e-4


@pytest.mark.parametrize(
    "argv,code",
    [
        (["dist", "--urn", "{kind: nope", "--n", "3"], 2),
        (["dist", "--urn", "constant:0.5"], 2),
        (["dist", "--urn", "constant:1.5", "--n", "3"], 3),
        (["dist", "--urn", "constant:0.5", "--n", "0"], 3),
    ],
)
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code and out == "" and err.startswith("urnldp: ")


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    assert main(["psi-n", "--urn", "constant:0.3", "--n", "50", "--lambda-grid", "-1:1:5", "--out", str(target)]) == 0
    assert len(rows(target.read_text())) == 5
