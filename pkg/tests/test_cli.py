import json
import re

import pytest

from ychannel import cli

TOY_ARGS = ["--dof", "2,0,1,1,1,0", "-N", "3"]


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_in_region(capsys):
    code, out, _ = run(["check", *TOY_ARGS], capsys)
    assert code == 0
    assert out.strip() == "IN REGION"


def test_check_out_of_region_lists_bounds(capsys):
    code, out, _ = run(["check", "--dof", "3,0,1,1,1,0", "-N", "3"], capsys)
    assert code == 2
    assert "OUT OF REGION" in out
    assert "d12 + d13 + d23 = 4 > 3" in out


def test_check_json_document(capsys):
    code, out, _ = run(["check", "--dof", "3,0,1,1,1,0", "-N", "3", "--format", "json"], capsys)
    assert code == 2
    doc = json.loads(out)
    assert doc["in_region"] is False
    assert {"permutation": [1, 2, 3], "lhs": 4.0, "rhs": 3} in doc["violated"]


def test_check_text_and_json_agree(capsys):
    _, text_out, _ = run(["check", "--dof", "3,0,1,1,1,0", "-N", "3"], capsys)
    _, json_out, _ = run(
        ["check", "--dof", "3,0,1,1,1,0", "-N", "3", "--format", "json"], capsys
    )
    doc = json.loads(json_out)
    for bound in doc["violated"]:
        assert f"= {bound['lhs']:g} > {bound['rhs']}" in text_out


def test_malformed_tuple_names_token(capsys):
    code, _, err = run(["check", "--dof", "1,2,3", "-N", "3"], capsys)
    assert code == 1
    assert "1,2,3" in err


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main([])
    assert info.value.code == 1


def test_relay_antennas_long_flag(capsys):
    code, out, _ = run(["check", "--dof", "2,0,1,1,1,0", "--relay-antennas", "3"], capsys)
    assert code == 0 and out.strip() == "IN REGION"


def test_allocate_toy_joint(capsys):
    code, out, _ = run(["allocate", *TOY_ARGS, "--mode", "joint"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["two_cycle"] == {"12": 1, "13": 0, "23": 0}
    assert doc["three_cycle"] == {"123": 1, "132": 0}
    assert all(v == 0 for v in doc["uni"].values())
    assert doc["n_s"] == 3 and doc["feasible"] is True
    assert "plan" not in doc


def test_allocate_separable_is_infeasible(capsys):
    code, out, _ = run(["allocate", *TOY_ARGS, "--mode", "separable"], capsys)
    assert code == 2
    doc = json.loads(out)
    assert doc["n_s"] == 4 and doc["feasible"] is False


def test_plan_includes_subchannel_assignment(capsys):
    code, out, _ = run(["plan", *TOY_ARGS], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["plan"] == [
        {"kind": "bidir", "pair": [1, 2], "sub": 0},
        {"kind": "cyclic", "cycle": [1, 2, 3], "subs": [1, 2]},
    ]


def test_allocate_text_and_json_numbers_agree(capsys):
    _, json_out, _ = run(["allocate", *TOY_ARGS], capsys)
    _, text_out, _ = run(["allocate", *TOY_ARGS, "--format", "text"], capsys)
    doc = json.loads(json_out)
    assert f"n_s: {doc['n_s']}" in text_out
    for key, value in doc["two_cycle"].items():
        assert f"two-cycle ({key[0]},{key[1]}): {value}" in text_out
    for key, value in doc["three_cycle"].items():
        assert f"three-cycle ({key[0]},{key[1]},{key[2]}): {value}" in text_out


def test_fractional_dof_is_input_error(capsys):
    code, _, err = run(["allocate", "--dof", "0.5,0,0,0,0,0", "-N", "3"], capsys)
    assert code == 1
    assert "error" in err


def test_csv_format_rejected_for_documents(capsys):
    code, _, err = run(["allocate", *TOY_ARGS, "--format", "csv"], capsys)
    assert code == 1
    assert "CSV" in err


SWEEP_ARGS = [
    "sweep",
    "--dof",
    "1,0,1,0,0,0",
    "-N",
    "3",
    "-M",
    "3",
    "--snr-grid",
    "40,60,80",
    "--trials",
    "20",
]


def test_sweep_emits_csv(capsys):
    code, out, _ = run(SWEEP_ARGS, capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "snr_db,stream_src,stream_dst,strategy,sinr_db,rate_bits,ser"
    assert len(lines) == 1 + 3 * 2  # 3 points, 2 streams


def test_sweep_json_has_slopes(capsys):
    code, out, _ = run([*SWEEP_ARGS, "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["slopes"]) == 2
    for s in doc["slopes"]:
        assert 0.8 <= s["slope"] <= 1.2


def test_sweep_reruns_identically(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main([*SWEEP_ARGS, "--out", str(a)]) == 0
    assert cli.main([*SWEEP_ARGS, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_infeasible_demand(capsys):
    code, out, _ = run(
        ["sweep", "--dof", "2,0,1,1,1,0", "-N", "3", "-M", "3", "--mode", "separable"],
        capsys,
    )
    assert code == 2
    doc = json.loads(out)
    assert doc["kind"] == "infeasible-demand" and doc["n_s"] == 4 and doc["n"] == 3


def test_sweep_needs_antennas(capsys):
    code, _, err = run(["sweep", "--dof", "1,0,1,0,0,0", "-N", "3"], capsys)
    assert code == 1
    assert "-M" in err


def test_simulate_runs_qpsk_ser(capsys):
    code, out, _ = run(
        [
            "simulate",
            "--dof",
            "1,0,1,0,0,0",
            "-N",
            "3",
            "-M",
            "3",
            "--snr-grid",
            "60",
            "--trials",
            "50",
        ],
        capsys,
    )
    assert code == 0
    lines = out.strip().splitlines()
    for line in lines[1:]:
        assert line.endswith(",0.0")  # SER column, error-free at 60 dB


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = {
        "m": 3,
        "n": 3,
        "dof": [1, 0, 1, 0, 0, 0],
        "snr_grid_db": [40, 60],
        "trials_per_point": 10,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(
        ["sweep", "--config", str(path), "--trials", "5", "--format", "json"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["trials_per_point"] == 5
    assert doc["config"]["dof"] == [1.0, 0.0, 1.0, 0.0, 0.0, 0.0]


def test_seed_flag_feeds_channel_and_noise(capsys):
    code, out, _ = run([*SWEEP_ARGS, "--seed", "99", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["channel_seed"] == 99
    assert doc["config"]["noise_seed"] == 100


def test_env_seed_default(capsys, monkeypatch):
    monkeypatch.setenv("YCHAN_SEED", "123")
    code, out, _ = run([*SWEEP_ARGS, "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["config"]["channel_seed"] == 123


def test_inseparability_json(capsys):
    code, out, _ = run(["inseparability", "-N", "3"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["joint"]["feasible"] is True
    assert doc["separable"]["feasible"] is False
    assert doc["uni_dimensions"] == 5


def test_inseparability_text(capsys):
    code, out, _ = run(["inseparability", "-N", "3", "--format", "text"], capsys)
    assert code == 0
    assert "joint: n_s=3 feasible=true" in out
    assert "separable: n_s=4 feasible=false" in out


def test_inseparability_custom_witness(capsys):
    code, out, _ = run(
        ["inseparability", "-N", "4", "--witness", "3,0,1,1,1,0"], capsys
    )
    assert code == 0
    assert json.loads(out)["separable"]["n_s"] == 5


def test_inseparability_bad_default_witness(capsys):
    code, _, err = run(["inseparability", "-N", "4"], capsys)
    assert code == 1
    assert "witness" in err


def test_out_file_writing(capsys, tmp_path):
    path = tmp_path / "alloc.json"
    code = cli.main(["allocate", *TOY_ARGS, "--out", str(path)])
    assert code == 0
    assert json.loads(path.read_text())["n_s"] == 3
