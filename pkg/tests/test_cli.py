"""Command-line front end: schemas, determinism, exit codes, limits."""

import io
import json
import math
from contextlib import redirect_stderr, redirect_stdout

import pytest

from wishart_dynamics import ChannelDims, WishartEnsemble, cdf_largest
from wishart_dynamics.cli import main

J0_FIRST_ZERO = 2.404825557695772768622


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        rc = main(argv)
    return rc, out.getvalue(), err.getvalue()


def rows_of(csv_text):
    lines = csv_text.strip().split("\n")
    header = lines[0].split(",")
    return header, [[float(v) for v in line.split(",")] for line in lines[1:]]


def test_eval_csv_schema_and_roundtrip():
    rc, out, err = run(["eval", "--ntx", "4", "--nrx", "2", "--rho-sq", "0.5",
                        "--grid", "1:8:8"])
    assert rc == 0 and err == ""
    header, rows = rows_of(out)
    assert header == ["threshold", "cdf_largest", "ccdf_smallest",
                      "joint_cdf_largest_diag", "joint_ccdf_smallest_diag"]
    assert len(rows) == 8
    ens = WishartEnsemble(ChannelDims(4, 2), 1.0)
    for i, row in enumerate(rows):
        assert row[0] == float(i + 1)
        # %.17g serialization must round-trip to the exact double
        assert row[1] == cdf_largest(ens, row[0])
        for v in row[1:]:
            assert 0.0 <= v <= 1.0
        assert row[3] <= row[1] and row[4] <= row[2]


def test_eval_json_metadata():
    rc, out, _ = run(["eval", "--ntx", "3", "--nrx", "2", "--rho-sq", "0.25",
                      "--grid", "1:4:4", "--format", "json", "--seed", "99"])
    assert rc == 0
    obj = json.loads(out)
    meta = obj["metadata"]
    assert meta["command"] == "eval"
    assert (meta["n_t"], meta["n_r"]) == (3, 2)
    assert meta["sigma_sq"] == 1.0
    assert meta["seed"] == 99
    assert meta["correlation"] == {"rho_sq": 0.25}
    assert meta["grid"] == {"start": 1.0, "stop": 4.0, "points": 4, "db": False}
    assert len(obj["rows"]) == 4
    assert set(obj["rows"][0]) == {"threshold", "cdf_largest", "ccdf_smallest",
                                   "joint_cdf_largest_diag",
                                   "joint_ccdf_smallest_diag"}


def test_eval_deterministic_db_grid(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    argv = ["eval", "--ntx", "4", "--nrx", "2", "--rho-sq", "0.5",
            "--grid=-10:0:5:db"]
    assert run(argv + ["--out", str(a)])[0] == 0
    assert run(argv + ["--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    header, rows = rows_of(a.read_text())
    assert len(rows) == 5


def test_double_outage_independence_limit():
    # a Clarke lag on the first Bessel zero decorrelates the pair entirely
    fd = repr(J0_FIRST_ZERO / (2.0 * math.pi))
    rc, out, _ = run(["double-outage", "--ntx", "2", "--nrx", "2",
                      "--clarke", f"{fd},1.0", "--grid=-6:0:4:db"])
    assert rc == 0
    header, rows = rows_of(out)
    assert header == ["threshold_db", "p_out", "p_double", "p_out_sq"]
    for row in rows:
        assert row[2] == pytest.approx(row[3], rel=1e-9)
        assert row[1] > 0.0


def test_double_outage_orders_with_correlation():
    rc, out, _ = run(["double-outage", "--ntx", "4", "--nrx", "2",
                      "--rho-sq", "0.7", "--grid=-9:0:4:db",
                      "--which", "smallest"])
    assert rc == 0
    _, rows = rows_of(out)
    for row in rows:
        assert row[3] - 1e-12 <= row[2] <= row[1] + 1e-12
    # outage grows with the threshold along the grid
    assert all(a[1] < b[1] for a, b in zip(rows, rows[1:]))


def test_mi_curve_endpoints_and_ordering():
    stop = repr(J0_FIRST_ZERO / (2.0 * math.pi))
    for ntx in (2, 4):
        rc, out, _ = run(["mi-curve", "--ntx", str(ntx), "--nrx", "2",
                          "--grid", f"0:{stop}:3", "--pout-target", "0.01"])
        assert rc == 0
        header, rows = rows_of(out)
        assert header == ["f_d_tau", "rho_sq", "mi_largest", "mi_smallest"]
        top, mid, bottom = rows
        assert top[1] == 1.0
        assert top[2] == pytest.approx(1.0, abs=1e-12)
        assert top[3] == pytest.approx(1.0, abs=1e-12)
        assert bottom[1] < 1e-18
        assert bottom[2] < 1e-9 and bottom[3] < 1e-9
        assert mid[2] >= mid[3]


def test_lcr_afd_curves_share_schema(tmp_path):
    a = tmp_path / "lcr.csv"
    b = tmp_path / "afd.csv"
    common = ["--ntx", "2", "--nrx", "2", "--ofdm", "0.1,1.0,1",
              "--grid=-10:0:5:db"]
    assert run(["lcr-curve"] + common + ["--out", str(a)])[0] == 0
    assert run(["afd-curve"] + common + ["--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    header, rows = rows_of(a.read_text())
    assert header == ["u_db", "n_f_normalized", "a_f_normalized"]
    assert len(rows) == 5


def test_afd_deep_threshold_is_delay_spread():
    # tau * delta_f survives as the floor of the normalized fade duration
    rc, out, _ = run(["afd-curve", "--ntx", "2", "--nrx", "2",
                      "--ofdm", "0.1,1.0,1", "--grid=-35:-20:4:db"])
    assert rc == 0
    _, rows = rows_of(out)
    for row in rows:
        assert row[2] == pytest.approx(0.1, rel=1e-4)


def test_mc_validate_passes_and_reports():
    rc, out, _ = run(["mc-validate", "--ntx", "2", "--nrx", "2",
                      "--rho-sq", "0.5", "--samples", "10000"])
    assert rc == 0
    rep = json.loads(out)
    assert rep["pass"] is True
    assert len(rep["points"]) == 50
    stats = {p["statistic"] for p in rep["points"]}
    assert stats == {"largest", "smallest"}
    for p in rep["points"]:
        assert p["tolerance"] >= 0.005
        assert p["pass"] is True
        assert p["abs_diff"] <= p["tolerance"]
    assert rep["metadata"]["corrupted"] is False
    assert rep["metadata"]["n_samples"] == 10000


def test_mc_validate_detects_corruption():
    rc, out, _ = run(["mc-validate", "--ntx", "2", "--nrx", "2",
                      "--rho-sq", "0.5", "--samples", "10000",
                      "--corrupt-closed-form"])
    assert rc == 4
    rep = json.loads(out)
    assert rep["pass"] is False
    assert rep["metadata"]["corrupted"] is True
    assert any(not p["pass"] for p in rep["points"])


def test_mc_validate_byte_identical(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    argv = ["mc-validate", "--ntx", "2", "--nrx", "2", "--rho-sq", "0.5",
            "--samples", "10000", "--which", "largest", "--seed", "777"]
    assert run(argv + ["--out", str(a)])[0] == 0
    assert run(argv + ["--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors_exit_2():
    bad = (
        ["no-such-command"],
        ["eval", "--ntx", "2", "--nrx", "2", "--rho-sq", "0.5", "--grid", "1:2"],
        ["eval", "--ntx", "2", "--nrx", "2", "--rho-sq", "0.5",
         "--clarke", "0.1,1.0", "--grid", "1:2:2"],
        ["eval", "--ntx", "2", "--nrx", "2", "--grid", "1:2:2"],
        ["eval", "--ntx", "2", "--nrx", "2", "--rho-sq", "1.5", "--grid", "1:2:2"],
        ["eval", "--ntx", "0", "--nrx", "2", "--rho-sq", "0.5", "--grid", "1:2:2"],
        ["eval", "--ntx", "2", "--nrx", "2", "--rho-sq", "0.5", "--grid", "1:2:1"],
        ["mc-validate", "--ntx", "2", "--nrx", "2", "--rho-sq", "0.5",
         "--samples", "100"],
        ["mi-curve", "--ntx", "2", "--nrx", "2", "--grid", "0:1:5:db"],
        ["lcr-curve", "--ntx", "2", "--nrx", "2", "--rho-sq", "0.5",
         "--grid=-10:0:5:db"],
        ["afd-curve", "--ntx", "2", "--nrx", "2", "--clarke", "0.1,1.0",
         "--grid=-10:0:5:db"],
        ["mi-curve", "--ntx", "2", "--nrx", "2", "--grid", "0:1:5",
         "--pout-target", "0"],
    )
    for argv in bad:
        rc, _, _ = run(argv)
        assert rc == 2, argv


def test_domain_error_reported_as_usage():
    # capability limits surface through the same exit code with a message
    rc, out, err = run(["eval", "--ntx", "9", "--nrx", "9", "--rho-sq", "0.5",
                        "--grid", "1:2:2"])
    assert rc == 2
    assert err.startswith("error:")


def test_numerical_failure_exit_3():
    # thresholds this deep leave no crossings to measure
    rc, out, err = run(["afd-curve", "--ntx", "2", "--nrx", "2",
                        "--ofdm", "0.1,1.0,1", "--grid=-1900:-1890:2:db"])
    assert rc == 3
    assert err.startswith("numerical failure:")


def test_version_flag():
    rc, out, _ = run(["--version"])
    assert rc == 0
    assert out.strip()
