import numpy as np
import pytest

from resfact.bench import (
    CAPACITY_ACCURACY,
    CapacityRow,
    SweepConfig,
    M_for_target,
    brute_force_oracle,
    make_instance,
    operational_capacity,
    oracle_agreement,
    run_sweep,
    run_trial,
    trial_seed_for,
    wilson_interval,
)
from resfact.factorizer import VariantSpec
from resfact.vsa import Codebook, bind_product, generate_codebook, random_bipolar


# --- size arithmetic ---


@pytest.mark.parametrize(
    "target,F,expected",
    [
        (10_000, 2, 100),
        (1_000_000, 3, 100),
        (10_000_000, 3, 215),  # 215**3 beats 216**3
        (5_000_000, 2, 2236),
        (4, 2, 2),
        (110, 2, 10),
        (1160, 3, 10),  # cube root rounds to 11 but 10**3 is closer
    ],
)
def test_m_for_target(target, F, expected):
    assert M_for_target(target, F) == expected


def test_m_for_target_rejects():
    with pytest.raises(ValueError):
        M_for_target(100, 1)
    with pytest.raises(ValueError):
        M_for_target(7, 3)  # below 2**3


# --- seeding and instances ---


def test_trial_seed_properties():
    assert trial_seed_for(0, 0, 0) == trial_seed_for(0, 0, 0)
    assert trial_seed_for(2**64 + 1, 0, 0) == trial_seed_for(1, 0, 0)
    seeds = {trial_seed_for(0, i, t) for i in range(3) for t in range(50)}
    assert len(seeds) == 150


def test_make_instance_is_planted_product():
    x, books, truth, fact_seed = make_instance(424242, M=7, F=3, D=96)
    assert len(books) == 3 and books[0].size == 7 and books[0].dim == 96
    assert all(0 <= i < 7 for i in truth)
    assert np.array_equal(x, bind_product(books, truth))
    again = make_instance(424242, M=7, F=3, D=96)
    assert np.array_equal(x, again[0])
    assert fact_seed == again[3]


def test_run_trial_deterministic():
    a = run_trial(99, M=20, F=2, D=400, variant=VariantSpec.brn())
    b = run_trial(99, M=20, F=2, D=400, variant=VariantSpec.brn())
    assert a == b
    assert a.seed == 99


def test_run_trial_easy_regime():
    hits = sum(
        run_trial(trial_seed_for(7, 0, t), M=10, F=2, D=1000, variant=VariantSpec.brn()).correct
        for t in range(100)
    )
    assert hits >= 99


# --- exhaustive oracle ---


def test_oracle_tiny_handmade():
    g = np.random.default_rng(0)
    v, w = random_bipolar(4, g), random_bipolar(4, g)
    b0 = Codebook(np.stack([v, -v]))
    b1 = Codebook(np.stack([w, np.array([w[0], -w[1], w[2], -w[3]], dtype=np.int8)]))
    x = v * w
    got = brute_force_oracle(x, [b0, b1])
    assert got.indices == (0, 0)
    assert got.similarity == 1.0


def test_oracle_tie_is_lexicographic():
    g = np.random.default_rng(1)
    v, w = random_bipolar(8, g), random_bipolar(8, g)
    # (0,0) and (1,1) produce the same product vector
    b0 = Codebook(np.stack([v, -v]))
    b1 = Codebook(np.stack([w, -w]))
    got = brute_force_oracle(v * w, [b0, b1])
    assert got.indices == (0, 0)


def test_oracle_recovers_planted_truth_under_noise():
    g = np.random.default_rng(5)
    books = [generate_codebook(6, 256, g) for _ in range(3)]
    truth = (2, 5, 1)
    x = bind_product(books, truth).copy()
    flips = g.choice(256, size=12, replace=False)  # ~5% corruption
    x[flips] *= -1
    got = brute_force_oracle(x, books)
    assert got.indices == truth
    assert got.similarity == pytest.approx(1 - 2 * 12 / 256)


def test_oracle_rejects():
    g = np.random.default_rng(2)
    books = [generate_codebook(4, 32, g) for _ in range(2)]
    with pytest.raises(ValueError):
        brute_force_oracle(random_bipolar(32, g), books, cap=15)
    with pytest.raises(ValueError):
        brute_force_oracle(random_bipolar(32, g), books[:1])
    mixed = [books[0], generate_codebook(4, 64, g)]
    with pytest.raises(ValueError):
        brute_force_oracle(random_bipolar(32, g), mixed)


def test_oracle_agreement_easy_regime():
    check = oracle_agreement(M=8, F=2, D=256, variant=VariantSpec.brn(), n_trials=10)
    assert check.trials == 10
    assert check.converged == 10
    assert check.all_agree


def test_oracle_agreement_rejects():
    with pytest.raises(ValueError):
        oracle_agreement(M=8, F=2, D=64, variant=VariantSpec.brn(), n_trials=0)
    with pytest.raises(ValueError):
        oracle_agreement(M=101, F=3, D=64, variant=VariantSpec.brn(), n_trials=1)


# --- aggregation ---


def test_wilson_interval_values():
    low, high = wilson_interval(99, 100)
    assert low == pytest.approx(0.9455, abs=2e-4)
    assert high == pytest.approx(0.9982, abs=2e-4)
    assert wilson_interval(0, 50)[0] == 0.0
    assert wilson_interval(50, 50)[1] == 1.0
    low1, high1 = wilson_interval(0, 1)
    assert low1 == 0.0 and high1 == pytest.approx(0.7935, abs=2e-4)


def test_wilson_interval_rejects():
    with pytest.raises(ValueError):
        wilson_interval(0, 0)
    with pytest.raises(ValueError):
        wilson_interval(-1, 10)
    with pytest.raises(ValueError):
        wilson_interval(11, 10)


def _row(search_space, accuracy):
    return CapacityRow(
        variant="brn",
        F=2,
        M=2,
        D=8,
        search_space=search_space,
        trials=10,
        accuracy=accuracy,
        ci_low=0.0,
        ci_high=1.0,
        mean_iterations=1.0,
        sigma=None,
        flip_rate=None,
        activation_threshold=0.0,
        convergence_threshold=0.8,
        max_iters=10,
        preset_exact="n/a",
    )


def test_operational_capacity_rule():
    rows = [_row(100, 1.0), _row(10_000, CAPACITY_ACCURACY), _row(1_000_000, 0.42)]
    assert operational_capacity(rows) == 10_000
    assert operational_capacity([_row(100, 0.5)]) is None
    assert operational_capacity([]) is None


# --- sweep config ---


def test_sweep_config_sorts_sizes():
    cfg = SweepConfig(F=2, variant_kind="brn", search_space_sizes=(100, 16, 49), D=64)
    assert cfg.search_space_sizes == (16, 49, 100)


@pytest.mark.parametrize(
    "kwargs,needle",
    [
        (dict(variant_kind="zzz"), "variant_kind"),
        (dict(search_space_sizes=()), "search_space_sizes"),
        (dict(trials_per_size=0), "trials_per_size"),
        (dict(parallelism=0), "parallelism"),
        (dict(max_iters=0), "max_iters"),
        (dict(convergence_threshold=0.0), "convergence_threshold"),
        (dict(D=None), "D is required"),
        (dict(variant_kind="imf"), "sigma is required"),
        (dict(variant_kind="acf"), "flip_rate is required"),
        (dict(use_presets=True), "must be omitted"),
        (dict(use_presets=True, D=None, F=5), "presets cover F"),
    ],
)
def test_sweep_config_rejects(kwargs, needle):
    base = dict(F=2, variant_kind="brn", search_space_sizes=(16,), D=64)
    base.update(kwargs)
    with pytest.raises(ValueError, match=needle):
        SweepConfig(**base)


def test_explicit_variant_resolution():
    cfg = SweepConfig(
        F=2, variant_kind="imf", search_space_sizes=(16,), D=64,
        sigma=0.02, activation_threshold=0.1,
    )
    v = cfg.explicit_variant()
    assert (v.kind, v.sigma, v.activation_threshold) == ("imf", 0.02, 0.1)


# --- sweeps ---


def test_run_sweep_degenerate_size():
    cfg = SweepConfig(
        F=2, variant_kind="brn", search_space_sizes=(16,), D=256,
        trials_per_size=20, master_seed=3,
    )
    seen = []
    report = run_sweep(cfg, progress=seen.append)
    assert len(report.rows) == 1
    row = report.rows[0]
    assert seen == [row]
    assert (row.M, row.search_space, row.D) == (4, 16, 256)
    assert row.accuracy == 1.0
    assert row.trials == 20
    assert row.preset_exact == "n/a"
    assert row.max_iters == 16  # min(M**F, default cap)
    assert row.ci_low < 1.0 <= row.ci_high
    assert report.operational_capacity == 16


def test_run_sweep_rows_sorted():
    cfg = SweepConfig(
        F=2, variant_kind="brn", search_space_sizes=(100, 16), D=128,
        trials_per_size=5,
    )
    report = run_sweep(cfg)
    assert [r.search_space for r in report.rows] == [16, 100]


def test_run_sweep_unconverged_bills_full_budget():
    # strict detection can never beat threshold 1.0, so nothing converges
    cfg = SweepConfig(
        F=2, variant_kind="brn", search_space_sizes=(16,), D=128,
        trials_per_size=8, convergence_threshold=1.0, max_iters=3,
    )
    report = run_sweep(cfg)
    row = report.rows[0]
    assert row.accuracy == 0.0
    assert row.mean_iterations == 3.0
    assert report.operational_capacity is None


def test_run_sweep_parallelism_matches_serial():
    base = dict(
        F=2, variant_kind="imf", search_space_sizes=(16, 64), D=128,
        sigma=0.01, trials_per_size=8, master_seed=11,
    )
    serial = run_sweep(SweepConfig(**base, parallelism=1))
    parallel = run_sweep(SweepConfig(**base, parallelism=2))
    assert serial.rows == parallel.rows
    assert serial.operational_capacity == parallel.operational_capacity


def test_run_sweep_with_preset_table(tmp_path):
    table = tmp_path / "table.csv"
    table.write_text(
        "F,search_space,D,acf_flip_rate,acf_activation_threshold,"
        "imf_sigma,imf_activation_threshold\n"
        "2,16,96,0.05,0,0.01,0\n"
        "2,10000,128,0.1,0,0.01,0\n"
    )
    cfg = SweepConfig(
        F=2, variant_kind="acf", search_space_sizes=(16, 49),
        use_presets=True, presets_path=str(table), trials_per_size=4,
    )
    report = run_sweep(cfg)
    by_size = {r.search_space: r for r in report.rows}
    assert by_size[16].preset_exact == "true"
    assert by_size[16].D == 96
    assert by_size[16].flip_rate == 0.05
    assert by_size[49].preset_exact == "false"  # nearest row substituted
    assert by_size[49].D == 96
