import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starsearch.errors import InvalidConfigError, InvalidDataError
from starsearch.harness import (
    CSV_COLUMNS,
    SweepConfig,
    compare_walk_oracle,
    fit_scaling,
    generate_instance,
    make_rng,
    records_to_csv,
    records_to_json,
    run_sweep,
    sweep_window,
    trace_to_csv,
    walk_profile_for_instance,
)
from starsearch.oracle import build_oracle, run_search
from starsearch.spectral import (
    GroupedPhaseSpec,
    degenerate_eigenvalues,
    dense_unitary,
    match_spectra,
    principal_eigenvalues,
)
from starsearch.trace import PredictionRecord
from starsearch.walk import uniform_initial


# -- instances ----------------------------------------------------------------


def test_even_counts():
    assert generate_instance(243, 3, 1, seed=7).value_counts() == {0: 1, 1: 121, 2: 121}
    assert generate_instance(4, 2, 1, seed=123).value_counts() == {0: 1, 1: 3}


def test_same_seed_same_instance():
    a = generate_instance(100, 4, 3, distribution="random", seed=11)
    b = generate_instance(100, 4, 3, distribution="random", seed=11)
    c = generate_instance(100, 4, 3, distribution="random", seed=12)
    assert np.array_equal(a.f, b.f)
    assert not np.array_equal(a.f, c.f)


def test_balanced_counts():
    counts = generate_instance(2187, 3, 4, distribution="balanced").value_counts()
    assert counts[0] == 4
    assert abs(counts[1] - counts[2]) == 1


def test_even_rejects_indivisible():
    with pytest.raises(InvalidConfigError):
        generate_instance(2187, 3, 4, distribution="even")


@pytest.mark.parametrize("kw", [dict(M=0), dict(M=20), dict(distribution="skewed")])
def test_generate_rejects(kw):
    with pytest.raises(InvalidConfigError):
        generate_instance(10, 3, **{"M": 1, **kw})


def test_rng_streams_are_keyed():
    a = make_rng(5, 1, 2).integers(0, 2**63, 4)
    b = make_rng(5, 1, 2).integers(0, 2**63, 4)
    c = make_rng(5, 2, 1).integers(0, 2**63, 4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


# -- sweeps -------------------------------------------------------------------


def test_window_clamp():
    assert sweep_window(9, 2, 1) == 32
    assert sweep_window(2187, 3, 1) == math.ceil(2 * PredictionRecord.from_parameters(2187, 3, 1).k_max_pred)
    assert sweep_window(2187, 3, 1, 7) == 7


def test_single_cell():
    (rec,) = run_sweep(SweepConfig(Ns=[243], ds=[3]))
    assert rec.P_max_sim == pytest.approx(0.75, abs=0.05)
    assert rec.k_max_sim == 14
    assert rec.queries == 1
    assert rec.wall_ms is None
    assert not rec.regime_warn


def test_n_ratio():
    recs = run_sweep(SweepConfig(Ns=[243, 972], ds=[3], distribution="balanced"))
    assert recs[1].k_max_sim / recs[0].k_max_sim == pytest.approx(2, rel=0.1)


def test_m_ratio():
    recs = run_sweep(SweepConfig(Ns=[729], ds=[3], Ms=[1, 4], distribution="balanced"))
    assert recs[0].k_max_sim / recs[1].k_max_sim == pytest.approx(2, rel=0.15)


def test_prediction_columns_recompute():
    for rec in run_sweep(SweepConfig(Ns=[81, 100], ds=[2, 3], Ms=[1, 2], distribution="balanced")):
        pred = PredictionRecord.from_parameters(rec.N, rec.d, rec.M)
        assert rec.k_max_pred == pred.k_max_pred
        assert rec.P_max_pred == pred.p_max_pred


def test_regime_tags_and_errors():
    recs = run_sweep(SweepConfig(Ns=[8, 30], ds=[3, 9], Ms=[1, 4]))
    for rec in recs:
        assert rec.regime_warn == (rec.M / rec.N > 0.1 or rec.d >= rec.N)
    # even split impossible here: the cell records the failure and carries on
    bad = [r for r in recs if r.error]
    assert bad and all(r.k_max_sim is None for r in bad)
    assert any(r.error is None for r in recs)


def test_config_validation():
    with pytest.raises(InvalidConfigError):
        SweepConfig(Ns=[], ds=[3])
    with pytest.raises(InvalidConfigError):
        SweepConfig(Ns=[9], ds=[3], modes=["bogus"])
    with pytest.raises(InvalidConfigError):
        SweepConfig(Ns=[9], ds=[3], window=0)


def test_cells_canonical_order():
    cfg = SweepConfig(Ns=[729, 81], ds=[3, 2], modes=["sign-flip", "multi-phase"])
    keys = cfg.cells()
    assert keys[0] == (81, 2, 1, "multi-phase")
    assert keys == sorted(keys, key=lambda k: (k[0], k[1], k[2], k[3] != "multi-phase"))


def test_parallel_matches_serial():
    cfg = dict(Ns=[81, 243], ds=[2, 3], Ms=[1, 2], distribution="balanced", seed=3)
    serial = records_to_csv(run_sweep(SweepConfig(**cfg)))
    parallel = records_to_csv(run_sweep(SweepConfig(**cfg, workers=4)))
    assert serial == parallel


def test_byte_identical_files(tmp_path):
    cfg = dict(Ns=[81, 243], ds=[3], Ms=[1, 2], distribution="random", seed=99)
    a = run_sweep(SweepConfig(**cfg, csv_path=str(tmp_path / "a.csv"), json_path=str(tmp_path / "a.json")))
    run_sweep(SweepConfig(**cfg, csv_path=str(tmp_path / "b.csv"), json_path=str(tmp_path / "b.json")))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert len(a) == 4


def test_timing_column_optional():
    (rec,) = run_sweep(SweepConfig(Ns=[81], ds=[3], record_timing=True))
    assert rec.wall_ms is not None and rec.wall_ms >= 0


# -- formats ------------------------------------------------------------------


def test_csv_schema():
    recs = run_sweep(SweepConfig(Ns=[81], ds=[3]))
    rows = list(csv.reader(io.StringIO(records_to_csv(recs))))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert ",".join(rows[0]) == "N,d,M,mode,seed,k_max_sim,P_max_sim,k_max_pred,P_max_pred,queries,wall_ms,regime_warn"
    assert float(rows[1][6]) == recs[0].P_max_sim


def test_json_mirrors_csv():
    recs = run_sweep(SweepConfig(Ns=[81], ds=[2, 3]))
    data = json.loads(records_to_json(recs))
    assert len(data) == 2
    for row in data:
        assert set(CSV_COLUMNS) <= set(row)


def test_trace_columns():
    text = trace_to_csv(run_search(generate_instance(81, 3, 1), 5))
    lines = text.splitlines()
    assert lines[0] == "k,P_k,P_pred"
    assert len(lines) == 7


# -- fits ---------------------------------------------------------------------


def test_fit_exact_sqrt():
    fit = fit_scaling([(x, math.sqrt(x)) for x in (1, 4, 9, 16, 100)], "x", "y")
    assert fit.exponent == pytest.approx(0.5, abs=1e-12)
    assert fit.residual < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 10))
def test_fit_recovers_power(a, c):
    pts = [(x, c * x**a) for x in (2.0, 3.0, 5.0, 7.0)]
    assert fit_scaling(pts, "x", "y").exponent == pytest.approx(a, abs=1e-9)


def test_fit_rejects():
    with pytest.raises(InvalidDataError):
        fit_scaling([(1, 1), (2, 2)], "x", "y")
    with pytest.raises(InvalidDataError):
        fit_scaling([(2, 1), (2, 2), (2, 3)], "x", "y")


def test_fit_skips_flagged():
    rows = [
        {"N": 10, "k": 1.0, "regime_warn": True, "error": None},
        {"N": 100, "k": 10.0, "regime_warn": False, "error": None},
        {"N": 400, "k": 20.0, "regime_warn": False, "error": None},
        {"N": 1600, "k": 40.0, "regime_warn": False, "error": None},
    ]
    assert fit_scaling(rows, "N", "k").n_points == 3
    assert fit_scaling(rows, "N", "k", include_flagged=True).n_points == 4


def test_sqrt_n_sweep_fit():
    recs = run_sweep(SweepConfig(Ns=[81, 243, 729, 2187], ds=[3], distribution="balanced"))
    assert fit_scaling(recs, "N", "k_max_sim").exponent == pytest.approx(0.5, abs=0.05)


def test_p_max_tracks_d():
    # finite-N excess grows with d; at N=216 the d=6 point is 0.06 high
    recs = run_sweep(SweepConfig(Ns=[1296], ds=[2, 3, 4, 5, 6], distribution="balanced"))
    for rec in recs:
        assert rec.P_max_sim == pytest.approx(min(1, 3 / (rec.d + 1)), abs=0.05)


# -- walk against oracle ----------------------------------------------------


def test_compare_d3():
    cmp = compare_walk_oracle(243, 3)
    assert cmp.k_max_oracle == 14
    assert cmp.m_max_walk == 29
    assert cmp.step_gap <= 2
    assert cmp.probability_gap < 0.02
    assert cmp.trace_gap < 1e-12


def test_compare_d2():
    cmp = compare_walk_oracle(256, 2)
    assert cmp.p_max_oracle >= 0.95 and cmp.p_max_walk >= 0.95
    assert cmp.step_gap <= 2


def test_compare_dense_n27():
    inst = generate_instance(27, 3, 1)
    prof = walk_profile_for_instance(inst)
    U = dense_unitary(prof)
    G = build_oracle(inst).matrix()
    v = uniform_initial(27).to_vector()
    psi = np.full(27, 1 / math.sqrt(27), dtype=complex)
    marked = prof.members(0)
    v = U @ v
    for k in range(12):
        p_walk = np.sum(np.abs(v[marked]) ** 2 + np.abs(v[27 + marked]) ** 2)
        p_oracle = np.sum(np.abs(psi[inst.f == 0]) ** 2)
        assert p_walk == pytest.approx(p_oracle, abs=1e-12)
        v = U @ (U @ v)
        psi = G @ psi


@pytest.mark.parametrize("N, d, M", [(27, 3, 1), (40, 4, 2), (31, 5, 3)])
def test_g_spectrum_equals_walk_z_values(N, d, M):
    # principal and degenerate walk z = lambda^2 together give all N eigenvalues of G
    inst = generate_instance(N, d, M, distribution="random", seed=N)
    counts = inst.value_counts()
    values = [v for v in range(d) if counts[v]]
    spec = GroupedPhaseSpec(tuple(-2 * math.pi * v / d for v in values), tuple(counts[v] for v in values))
    zs = [s.z for s in principal_eigenvalues(spec)]
    for sol in degenerate_eigenvalues(spec):
        zs.extend([sol.z] * sol.degeneracy)
    assert len(zs) == N
    gap, _ = match_spectra(np.array(zs), np.linalg.eigvals(build_oracle(inst).matrix()))
    assert gap < 1e-9
