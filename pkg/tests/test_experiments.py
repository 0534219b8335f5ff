from expsos.experiments import (
    CSV_HEADER,
    bench,
    bench_cell,
    derive_seed,
    rows_to_csv,
    rows_to_table,
    verify_mc,
    verify_mc_ec,
)


def test_csv_header_and_stability():
    rows = bench([64], [2, 4], 3, seed=1)
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == "bits,B,pi_oracle,pi_local,alpha,pass_rate,trials"
    assert ",".join(CSV_HEADER) == text.splitlines()[0]
    assert rows_to_csv(bench([64], [2, 4], 3, seed=1)) == text
    assert "alpha" in rows_to_table(rows)


def test_alpha_is_ratio():
    row = bench_cell(64, 4, 5, seed=2)
    assert abs(row.alpha - row.pi_oracle / row.pi_local) < 1e-12
    assert row.pass_rate == 1.0


def test_hcs_local_cost_is_three():
    row = bench_cell(128, 2, 5, seed=3, mode="hcs")
    assert row.pi_local == 3.0


def test_seed_derivation_order_independent():
    assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2) != derive_seed(1, "a", 3)


def test_honest_mc():
    assert verify_mc("honest", 4, 50, seed=1).rate == 1.0


def test_replay_mc():
    assert verify_mc("replay", 4, 100, seed=1).accepted == 0


def test_ec_mc_honest(f97):
    assert verify_mc_ec("honest", f97, 4, 30, seed=1).rate == 1.0


def test_alpha_meets_cost_model_bound():
    """alpha >= 1.5*log2(a) / (5 + 3*log2(B)): direct binary exponentiation
    against the fixed session cost plus two tag exponentiations."""
    import math

    for B in (4, 16):
        row = bench_cell(512, B, 60, seed=9)
        assert row.alpha >= 1.5 * 512 / (5 + 3 * math.log2(B))
