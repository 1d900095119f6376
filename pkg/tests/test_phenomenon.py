"""
测试现象模拟：带种子的采样、条件频率、时间方向判定与测量协议
"""
import numpy as np
import pytest

from lawless.config import LawlessConfig
from lawless.errors import EmptyLog, FileNotFound, InvalidParameter, NotUnitary, SchemaError, UnknownLabel
from lawless.models import TimeDirection, TrialLog
from lawless.runtime.geometry import basis_state, make_state, random_state, ray_equal
from lawless.runtime.phenomenon import (
    alternating_protocol,
    analyze_log,
    apply_symmetry,
    classify_time_direction,
    log_frame,
    projective_measure,
    protective_measure,
    protective_tomography,
    reverse_log,
    run_phenomenon,
    score_time_direction,
)
from lawless.runtime.scenarios import (
    dump_scenario,
    get_scenario,
    identity,
    load_scenario,
    penrose,
    penrose_rotation,
    scenario_from_dict,
    scenario_to_dict,
    stern_gerlach,
    three_outcome,
)

SIGMA_Z = np.diag([1.0, -1.0])
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def _frequency(log: TrialLog, label: str) -> float:
    return float(np.mean(log.final == label))


FREQUENCY_TOL = 0.0047


def test_stern_gerlach_frequencies():
    """x+ 入射，上下各一半，误差在 3σ 内"""
    n = 100_000
    log = run_phenomenon(stern_gerlach(), "x+", n, seed=42)
    assert abs(_frequency(log, "up") - 0.5) <= FREQUENCY_TOL
    assert len(log) == n


def test_penrose_frequencies():
    """种子 42、10^5 次：P(β1|α1) 在 0.5 ± 0.0047 内，反向 P(α1|β1) = 1"""
    n = 100_000
    log = run_phenomenon(penrose(), "alpha_1", n, seed=42)
    assert abs(_frequency(log, "beta_1") - 0.5) <= FREQUENCY_TOL
    assert set(log.final.tolist()) == {"beta_1", "beta_2"}
    analysis = analyze_log(log)
    assert abs(analysis.forward["alpha_1"]["beta_1"] - 0.5) <= FREQUENCY_TOL
    assert analysis.backward["beta_1"]["alpha_1"] == 1.0


def test_process_probabilities_of_penrose():
    probs = penrose().process_probabilities()
    assert np.allclose(probs, 0.5, atol=1e-15)


def test_same_seed_same_log():
    sc = penrose()
    a = run_phenomenon(sc, "alpha_1", 1000, seed=123)
    b = run_phenomenon(sc, "alpha_1", 1000, seed=123)
    c = run_phenomenon(sc, "alpha_1", 1000, seed=124)
    assert np.array_equal(a.final, b.final)
    assert not np.array_equal(a.final, c.final)


def test_chunking_does_not_change_samples():
    """分块大小与线程数不影响采样结果"""
    sc = penrose()
    reference = run_phenomenon(sc, "alpha_1", 1001, seed=99, config=LawlessConfig(trial_chunk=65536))
    for chunk, workers in ((4, 1), (64, 1), (64, 4), (200, 3)):
        config = LawlessConfig(trial_chunk=chunk, parallel_workers=workers)
        log = run_phenomenon(sc, "alpha_1", 1001, seed=99, config=config)
        assert np.array_equal(log.final, reference.final)


def test_trial_chunk_is_aligned():
    assert LawlessConfig(trial_chunk=6).trial_chunk == 8


def test_identity_scenario_is_deterministic():
    log = run_phenomenon(identity(), "beta_1", 500, seed=1)
    assert np.all(log.final == "beta_1")


def test_run_phenomenon_rejects_bad_input():
    sc = penrose()
    with pytest.raises(InvalidParameter):
        run_phenomenon(sc, "alpha_1", 0, seed=1)
    with pytest.raises(InvalidParameter):
        run_phenomenon(sc, "alpha_1", 10, seed=-1)
    with pytest.raises(UnknownLabel):
        run_phenomenon(sc, "gamma", 10, seed=1)


def test_analyze_penrose_log():
    """正向条件频率约为一半；反向条件下初态总是 α_1"""
    log = run_phenomenon(penrose(), "alpha_1", 20_000, seed=5)
    analysis = analyze_log(log)
    assert analysis.trials == 20_000
    assert analysis.backward["beta_1"]["alpha_1"] == 1.0
    assert analysis.backward["beta_2"]["alpha_1"] == 1.0
    assert analysis.forward["alpha_1"]["beta_1"] == pytest.approx(0.5, abs=0.02)
    assert analysis.final_entropy == pytest.approx(1.0, abs=0.01)
    assert analysis.forward_conditional_entropy == pytest.approx(1.0, abs=0.01)
    assert analysis.backward_conditional_entropy == pytest.approx(0.0, abs=1e-12)


def test_analyze_three_outcome_entropy():
    """c² = (1/2, 1/4, 1/4) 的终态熵约为 1.5 比特"""
    log = run_phenomenon(three_outcome(), "psi", 50_000, seed=11)
    analysis = analyze_log(log)
    assert analysis.final_entropy == pytest.approx(1.5, abs=0.02)
    assert analysis.final_distribution["b1"] == pytest.approx(0.5, abs=0.02)


def test_analyze_empty_log():
    empty = TrialLog(scenario="penrose", seed=0, initial=[], final=[], scenario_labels=tuple(penrose().labels))
    with pytest.raises(EmptyLog):
        analyze_log(empty)


def test_trial_log_rejects_unknown_label():
    with pytest.raises(UnknownLabel):
        TrialLog(scenario="penrose", seed=0, initial=["alpha_1"], final=["gamma"],
                 scenario_labels=tuple(penrose().labels))


def test_reverse_log_swaps_pairs():
    log = run_phenomenon(penrose(), "alpha_1", 50, seed=3)
    back = reverse_log(log)
    assert back.reversed
    assert np.array_equal(back.initial, log.final)
    assert np.array_equal(back.final, log.initial)
    assert not reverse_log(back).reversed


def test_log_frame_columns():
    frame = log_frame(run_phenomenon(penrose(), "alpha_1", 10, seed=3))
    assert list(frame.columns) == ["trial_index", "initial", "final"]
    assert frame["trial_index"].tolist() == list(range(10))


def test_penrose_time_direction():
    """正放的记录判为 Forward，倒放的判为 Backward"""
    sc = penrose()
    log = run_phenomenon(sc, "alpha_1", 10_000, seed=2024)
    verdict = score_time_direction(log, sc)
    assert verdict.direction == TimeDirection.FORWARD
    assert verdict.forward_score > -10.0
    assert verdict.backward_score == pytest.approx(-10_000 * np.log(2), rel=1e-9)
    assert classify_time_direction(reverse_log(log), sc) == TimeDirection.BACKWARD


def test_time_direction_over_many_seeds():
    """50 个种子下正放与倒放都判对"""
    sc = penrose()
    for seed in range(50):
        log = run_phenomenon(sc, "alpha_1", 200, seed=seed)
        assert classify_time_direction(log, sc) == TimeDirection.FORWARD
        assert classify_time_direction(reverse_log(log), sc) == TimeDirection.BACKWARD


def test_identity_time_direction_is_undecidable():
    sc = identity()
    log = run_phenomenon(sc, "beta_1", 100, seed=0)
    assert classify_time_direction(log, sc) == TimeDirection.UNDECIDABLE
    assert classify_time_direction(reverse_log(log), sc) == TimeDirection.UNDECIDABLE


def test_impossible_pairs_are_undecidable():
    """两个方向都出现零概率对时无法判定"""
    sc = identity()
    log = TrialLog(scenario="identity", seed=0, initial=["beta_1"], final=["beta_2"],
                   scenario_labels=tuple(sc.labels))
    verdict = score_time_direction(log, sc)
    assert verdict.direction == TimeDirection.UNDECIDABLE
    assert verdict.forward_score == -np.inf


def test_symmetry_preserves_process_probabilities():
    """装置旋转 180° 后过程概率不变，灯与探测器互换"""
    sc = penrose()
    rotated = apply_symmetry(sc, penrose_rotation())
    assert np.allclose(rotated.process_probabilities(), sc.process_probabilities(), atol=1e-15)
    assert ray_equal(rotated.initials["alpha_1"], sc.finals["beta_1"])

    rng = np.random.default_rng(4)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    assert np.allclose(apply_symmetry(sc, q).process_probabilities(), sc.process_probabilities(), atol=1e-12)

    with pytest.raises(NotUnitary):
        apply_symmetry(sc, 2 * np.eye(4))


def test_scenario_json_roundtrip_and_file(data_dir):
    sc = get_scenario(str(data_dir / "scenarios" / "beam_splitter.json"))
    assert sc.final_labels == ["out_0", "out_1"]
    assert np.allclose(sc.process_probabilities(), 0.5)
    again = scenario_from_dict(scenario_to_dict(penrose()))
    assert np.allclose(again.evolution, penrose().evolution)
    assert again.same_conditions(penrose())
    assert not penrose().same_conditions(stern_gerlach())
    assert not penrose().same_conditions(apply_symmetry(penrose(), penrose_rotation()))

    with pytest.raises(SchemaError):
        scenario_from_dict({"label": "broken", "dim": 2})
    with pytest.raises(UnknownLabel):
        get_scenario("no_such_scenario")


def test_dump_and_load_scenario_file(tmp_path):
    """写出的场景文件读回后是同一组实验条件"""
    for sc in (penrose(), three_outcome(), stern_gerlach()):
        path = tmp_path / f"{sc.label}.json"
        dump_scenario(sc, str(path))
        again = load_scenario(str(path))
        assert again.label == sc.label
        assert again.same_conditions(sc)
        assert np.allclose(again.process_probabilities(), sc.process_probabilities(), atol=1e-15)

    with pytest.raises(FileNotFound):
        load_scenario(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_scenario(str(broken))


def test_protective_measurement_leaves_state():
    plus = make_state([1, 1])
    assert protective_measure(plus, SIGMA_Z) == pytest.approx(0.0, abs=1e-15)
    assert protective_measure(plus, SIGMA_X) == pytest.approx(1.0)


def test_projective_measurement_collapses():
    plus = make_state([1, 1])
    outcome = projective_measure(plus, SIGMA_Z, rng=17)
    assert outcome.eigenvalue in (-1.0, 1.0)
    expected = basis_state(2, 0) if outcome.eigenvalue == 1.0 else basis_state(2, 1)
    assert ray_equal(outcome.post, expected)


def test_alternating_protocol_modes():
    """保护测量读数恒定；投影测量下非对易可观测量的读数随机变化"""
    plus = make_state([1, 1])
    protective = alternating_protocol(plus, SIGMA_Z, SIGMA_X, 10)
    assert protective.constant
    assert protective.values.tolist() == pytest.approx([0.0, 1.0] * 10, abs=1e-15)

    projective = alternating_protocol(plus, SIGMA_Z, SIGMA_X, 50, mode="projective", seed=8)
    assert not projective.constant

    commuting = alternating_protocol(plus, SIGMA_Z, np.diag([2.0, 3.0]), 10, mode="projective", seed=8)
    assert commuting.constant

    rng = np.random.default_rng(5)
    for _ in range(20):
        state = random_state(3, rng)
        a, b = rng.normal(size=(2, 3, 3)) + 1j * rng.normal(size=(2, 3, 3))
        result = alternating_protocol(state, a + a.conj().T, b + b.conj().T, 5)
        assert result.constant
    assert any(
        not alternating_protocol(plus, SIGMA_Z, SIGMA_X, 5, mode="projective", seed=s).constant
        for s in range(20)
    )

    with pytest.raises(InvalidParameter):
        alternating_protocol(plus, SIGMA_Z, SIGMA_X, 1)
    with pytest.raises(InvalidParameter):
        alternating_protocol(plus, SIGMA_Z, SIGMA_X, 3, mode="weak")


def test_protective_tomography_recovers_state():
    """只用保护测量读数即可重建任意纯态"""
    rng = np.random.default_rng(21)
    for dim in (2, 3, 4):
        s = random_state(dim, rng)
        assert ray_equal(protective_tomography(s), s)
