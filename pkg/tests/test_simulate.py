import dataclasses
import json
import math

import numpy as np
import pytest

import ychannel as yc
from ychannel import simulate
from ychannel.dof import DofTuple
from ychannel.errors import ContractError, InfeasibleDemandError

from conftest import TOY


def toy_config(**overrides):
    base = dict(
        m=3,
        n=3,
        dof=TOY,
        snr_grid_db=(40.0, 60.0, 80.0),
        trials_per_point=100,
        channel_seed=7,
        noise_seed=11,
    )
    base.update(overrides)
    return yc.SimConfig(**base)


def test_sweep_is_deterministic(tmp_path):
    cfg = toy_config()
    first = yc.run_sweep(cfg)
    second = yc.run_sweep(cfg)
    assert first == second
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    yc.persist(first, str(p1))
    yc.persist(second, str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_stream_count_matches_demand_total():
    res = yc.run_sweep(toy_config(trials_per_point=10))
    points = len(res.config.snr_grid_db)
    assert len(res.rows) == points * int(TOY.total())
    assert {(r.src, r.dst) for r in res.rows} == {(1, 2), (2, 1), (2, 3), (3, 1)}


def test_zero_demand_gives_empty_result():
    res = yc.run_sweep(toy_config(dof=DofTuple.zero(), trials_per_point=5))
    assert res.rows == ()
    assert res.slopes == ()
    assert res.sum_dof_fit == 0.0


def test_infeasible_demand_raises_with_report():
    with pytest.raises(InfeasibleDemandError) as info:
        yc.run_sweep(toy_config(mode="separable"))
    assert info.value.n_s == 4 and info.value.n == 3


def test_noiseless_sweep_disables_slope_fit():
    res = yc.run_sweep(toy_config(noise=False, trials_per_point=5))
    assert res.slopes is None and res.sum_dof_fit is None
    assert "noiseless" in res.fit_note
    for row in res.rows:
        assert row.sinr_db > 150  # floating-point floor, far above any noisy value


def test_single_point_grid_has_no_fit():
    res = yc.run_sweep(toy_config(snr_grid_db=(60.0,), trials_per_point=10))
    assert res.slopes is None
    assert "2 SNR points" in res.fit_note


def test_slopes_near_unity_and_sum_consistent():
    res = yc.run_sweep(toy_config(trials_per_point=150))
    assert res.slopes is not None and len(res.slopes) == 5
    for s in res.slopes:
        assert 0.85 <= s.slope <= 1.15
    assert res.sum_dof_fit == pytest.approx(sum(s.slope for s in res.slopes), abs=1e-9)
    assert res.sum_dof_fit <= 2 * res.config.n + 0.5


def test_sum_dof_ceiling_for_max_demand():
    d, _ = yc.sum_dof_plan(3)
    res = yc.run_sweep(toy_config(dof=d, trials_per_point=150))
    assert res.sum_dof_fit <= 2 * 3 + 0.5


def test_sinr_grows_decibel_per_decibel():
    # per-stream SINR in dB vs SNR in dB: slope 1 within 0.05 for a
    # fixed channel once the grid sits well above the noise floor
    cfg = toy_config(
        snr_grid_db=(40.0, 50.0, 60.0, 70.0, 80.0), trials_per_point=1000
    )
    res = yc.run_sweep(cfg)
    by_stream = {}
    for row in res.rows:
        by_stream.setdefault((row.src, row.dst, row.strategy), []).append(
            (row.snr_db, row.sinr_db)
        )
    for points in by_stream.values():
        x = np.array([p[0] for p in points])
        y = np.array([p[1] for p in points])
        slope = np.polyfit(x, y, 1)[0]
        assert abs(slope - 1.0) <= 0.05


def test_ser_run_rejects_gaussian_payload():
    with pytest.raises(ContractError):
        yc.run_ser(toy_config())


def test_ser_run_forces_decision_directed():
    cfg = toy_config(constellation="qpsk", snr_grid_db=(50.0,), trials_per_point=50)
    res = yc.run_ser(cfg)
    assert res.config.cancellation == "decision-directed"
    for row in res.rows:
        assert row.ser is not None and 0.0 <= row.ser <= 1.0


def test_noiseless_ser_is_exactly_zero():
    cfg = toy_config(
        constellation="qpsk", noise=False, snr_grid_db=(20.0,), trials_per_point=50
    )
    res = yc.run_ser(cfg)
    assert all(r.ser == 0.0 for r in res.rows)


def test_gaussian_rows_leave_ser_blank():
    res = yc.run_sweep(toy_config(trials_per_point=5))
    assert all(r.ser is None for r in res.rows)


def test_config_validation():
    with pytest.raises(ValueError):
        toy_config(snr_grid_db=(60.0, 50.0))
    with pytest.raises(ValueError):
        toy_config(snr_grid_db=())
    with pytest.raises(ValueError):
        toy_config(trials_per_point=0)
    with pytest.raises(ValueError):
        toy_config(mode="both")
    with pytest.raises(ValueError):
        toy_config(channel_seed=-1)
    with pytest.raises(ValueError):
        toy_config(constellation="qam")


def test_config_json_round_trip():
    cfg = toy_config(constellation="qpsk", cancellation="decision-directed", noise=False)
    assert yc.SimConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg


# ---------------------------------------------------------------------------
# Joint vs separable report.


def test_inseparability_default_witness():
    rep = yc.inseparability_experiment(3)
    assert rep.witness == TOY
    assert rep.uni_dimensions == 5
    assert rep.joint_feasible and rep.joint["n_s"] == 3
    assert not rep.separable_feasible and rep.separable["n_s"] == 4


def test_inseparability_two_cycle_only_witness():
    rep = yc.inseparability_experiment(3, DofTuple(1, 0, 1, 0, 0, 0))
    assert rep.joint_feasible and rep.separable_feasible


def test_inseparability_sum_dof_witness():
    # separation is enough when only the stream total matters
    d, _ = yc.sum_dof_plan(3)
    rep = yc.inseparability_experiment(3, d)
    assert rep.joint_feasible and rep.separable_feasible
    assert rep.joint["n_s"] == 3 and rep.separable["n_s"] == 3


def test_inseparability_default_needs_small_relay():
    # the default witness pattern leaves the region for N > 3
    with pytest.raises(ContractError):
        yc.inseparability_experiment(4)


def test_inseparability_explicit_witness_for_larger_relay():
    rep = yc.inseparability_experiment(4, DofTuple(3, 0, 1, 1, 1, 0))
    assert rep.joint_feasible and rep.joint["n_s"] == 4
    assert not rep.separable_feasible and rep.separable["n_s"] == 5


def test_inseparability_input_checks():
    with pytest.raises(ValueError):
        yc.inseparability_experiment(2)
    with pytest.raises(ContractError):
        yc.inseparability_experiment(3, DofTuple(0.5, 0, 0.5, 0, 0, 0))
    with pytest.raises(ContractError):
        yc.inseparability_experiment(3, DofTuple(3, 3, 3, 3, 3, 3))


def test_inseparability_json_round_trip():
    rep = yc.inseparability_experiment(3)
    back = yc.InseparabilityReport.from_json(json.loads(json.dumps(rep.to_json())))
    assert back == rep


# ---------------------------------------------------------------------------
# Persistence.


def test_csv_header_and_round_trip(tmp_path):
    cfg = toy_config(constellation="qpsk", trials_per_point=20)
    res = yc.run_sweep(cfg)
    path = tmp_path / "sweep.csv"
    yc.persist(res, str(path))
    text = path.read_text().splitlines()
    assert text[0] == "snr_db,stream_src,stream_dst,strategy,sinr_db,rate_bits,ser"
    assert len(text) == 1 + len(res.rows)
    assert yc.load_sweep_csv(str(path)) == res.rows


def test_sweep_json_round_trip():
    res = yc.run_sweep(toy_config(trials_per_point=20))
    doc = json.loads(json.dumps(yc.sweep_to_json(res)))
    assert yc.sweep_from_json(doc) == res


def test_persist_report_and_dict(tmp_path):
    rep = yc.inseparability_experiment(3)
    path = tmp_path / "report.json"
    yc.persist(rep, str(path))
    assert yc.InseparabilityReport.from_json(json.loads(path.read_text())) == rep
    yc.persist({"a": 1}, str(tmp_path / "d.json"))
    assert json.loads((tmp_path / "d.json").read_text()) == {"a": 1}


def test_persist_unknown_type_rejected(tmp_path):
    with pytest.raises(TypeError):
        yc.persist(object(), str(tmp_path / "x"))


def test_persist_io_error_names_path():
    res = yc.run_sweep(toy_config(trials_per_point=5))
    with pytest.raises(OSError, match="no/such/dir"):
        yc.persist(res, "/no/such/dir/out.csv")


def test_rate_proxy_matches_sinr_column():
    res = yc.run_sweep(toy_config(trials_per_point=30))
    for row in res.rows:
        sinr = 10 ** (row.sinr_db / 10)
        assert row.rate_bits == pytest.approx(math.log2(1 + sinr), rel=1e-9)
