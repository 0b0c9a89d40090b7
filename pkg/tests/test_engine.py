"""Tests for the exact branch enumerator and its sampling helpers."""
import io
import math

import pytest

from mcrsp.protocol import (
    CLUSTER_TARGET,
    SQRT_HALF,
    ChannelPair,
    TargetState,
    all_outcome_keys,
)
from mcrsp.engine import (
    ccc_count,
    enumerate_branches,
    message_bits,
    monte_carlo,
    sample_run,
    write_branch_csv,
)

MAXIMAL = ChannelPair(SQRT_HALF, SQRT_HALF, SQRT_HALF, SQRT_HALF, 1, 1)
GENERIC = ChannelPair(math.sqrt(0.8), math.sqrt(0.2),
                      math.sqrt(0.7), math.sqrt(0.3), 1, 1)


@pytest.fixture(scope="module")
def maximal_report():
    return enumerate_branches(CLUSTER_TARGET, MAXIMAL)


def test_maximal_channels_reach_unit_tsp(maximal_report):
    assert len(maximal_report.branches) == 128
    assert maximal_report.tsp == pytest.approx(1.0)
    assert maximal_report.min_success_fidelity() == pytest.approx(1.0)
    assert maximal_report.correction_source == "derived"


def test_tsp_matches_product_of_smaller_coefficients():
    report = enumerate_branches(CLUSTER_TARGET, GENERIC)
    assert report.tsp == pytest.approx(4.0 * 0.2 * 0.3)


def test_cluster_target_sector_probabilities():
    """Every basis row has amplitude magnitude 1/2 for the canonical cluster
    target, so each of the four first-step outcomes occurs with probability
    1/4 whatever the channels are."""
    report = enumerate_branches(CLUSTER_TARGET, GENERIC)
    for branch in report.branches:
        assert branch.norm_factor == pytest.approx(0.25)


def test_probabilities_sum_to_one(maximal_report):
    total = sum(b.probability for b in maximal_report.branches)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_branches_in_lexicographic_record_order(maximal_report):
    keys = [k.bits() for k in all_outcome_keys()]
    got = [b.key.bits() for b in maximal_report.branches]
    assert got == [bits for bits in keys for _ in (0, 1)]
    assert [b.ancilla for b in maximal_report.branches] == [0, 1] * 64


def test_success_branches_have_ancilla_zero(maximal_report):
    for branch in maximal_report.success_branches():
        assert branch.ancilla == 0
        assert branch.probability == pytest.approx(1 / 64)
        assert branch.bob_state.labels == ("B1", "B2", "B3", "B4")


def test_ccc_count_examples():
    assert ccc_count(1, 1) == 6
    assert ccc_count(0, 0) == 4
    assert ccc_count(2, 3) == 9
    with pytest.raises(ValueError, match="nonnegative"):
        ccc_count(-1, 0)


def test_message_log_structure(maximal_report):
    branch = maximal_report.branches[0]
    senders = [m.sender for m in branch.messages]
    assert senders == ["Alice", "Alice", "C1", "D1"]
    assert [m.step for m in branch.messages] == [1, 2, 3, 3]
    assert all(m.receiver == "Bob" for m in branch.messages)
    assert branch.messages[0].bits == (branch.key.i, branch.key.j)
    assert branch.messages[1].bits == (branch.key.p, branch.key.q)
    assert message_bits(branch.messages) == maximal_report.ccc == 6


def test_no_controllers_reduces_key_parities():
    channels = ChannelPair(SQRT_HALF, SQRT_HALF, SQRT_HALF, SQRT_HALF, 0, 0)
    report = enumerate_branches(CLUSTER_TARGET, channels)
    assert len(report.branches) == 32
    assert report.ccc == 4
    assert all(b.key.g == 0 and b.key.h == 0 for b in report.branches)
    assert all(b.controller_bits == () for b in report.branches)
    assert report.tsp == pytest.approx(1.0)


def test_unbalanced_controller_counts():
    channels = ChannelPair(SQRT_HALF, SQRT_HALF, SQRT_HALF, SQRT_HALF, 2, 0)
    report = enumerate_branches(CLUSTER_TARGET, channels)
    assert len(report.branches) == 4 * 2 ** 4 * 2
    assert report.ccc == 6
    assert report.tsp == pytest.approx(1.0)
    # reported parity g is the XOR of both controller bits
    for branch in report.branches:
        assert branch.key.g == branch.controller_bits[0] ^ branch.controller_bits[1]


def test_paper_table_loses_the_corrupt_keys():
    report = enumerate_branches(CLUSTER_TARGET, MAXIMAL, source="paper")
    assert report.correction_source == "paper"
    assert report.tsp == pytest.approx(59 / 64)


def test_correction_table_object_accepted_as_source():
    from mcrsp.oracle import published_correction_table
    report = enumerate_branches(CLUSTER_TARGET, MAXIMAL,
                                source=published_correction_table())
    assert report.correction_source == "paper"
    assert report.tsp == pytest.approx(59 / 64)


def test_unknown_source_rejected():
    with pytest.raises(ValueError, match="source"):
        enumerate_branches(CLUSTER_TARGET, MAXIMAL, source="folklore")
    with pytest.raises(ValueError, match="source"):
        enumerate_branches(CLUSTER_TARGET, MAXIMAL, source=42)


def test_flip_report_validation():
    with pytest.raises(ValueError, match="flip_report"):
        enumerate_branches(CLUSTER_TARGET, MAXIMAL, flip_report=("E", 1))
    with pytest.raises(ValueError, match="flip_report"):
        enumerate_branches(CLUSTER_TARGET, MAXIMAL, flip_report=("C", 2))
    with pytest.raises(ValueError, match="flip_report"):
        enumerate_branches(CLUSTER_TARGET, MAXIMAL, flip_report="C1")


def test_flip_report_corrupts_key_and_messages_only():
    report = enumerate_branches(CLUSTER_TARGET, MAXIMAL, flip_report=("C", 1))
    for branch in report.branches:
        reported = branch.messages[2].bits[0]
        assert reported == 1 - branch.controller_bits[0]
        assert branch.key.g == reported
        assert branch.key.h == branch.controller_bits[1]


def test_flip_report_degrades_success_fidelity():
    report = enumerate_branches(TargetState.normalized(2, 3, 4, 5), GENERIC,
                                flip_report=("D", 1))
    fids = [b.fid for b in report.branches
            if b.ancilla == 0 and b.probability > 1e-12]
    assert min(fids) < 1.0 - 1e-3
    assert report.tsp < 0.5 * 4.0 * 0.2 * 0.3


def test_sample_run_is_deterministic():
    first = sample_run(CLUSTER_TARGET, GENERIC, seed=99)
    second = sample_run(CLUSTER_TARGET, GENERIC, seed=99)
    assert first.key == second.key
    assert first.controller_bits == second.controller_bits
    assert first.ancilla == second.ancilla


def test_sample_run_never_succeeds_with_empty_channel():
    channels = ChannelPair(1.0, 0.0, SQRT_HALF, SQRT_HALF, 1, 1)
    for seed in range(5):
        assert sample_run(CLUSTER_TARGET, channels, seed=seed).ancilla == 1


def test_monte_carlo_tracks_exact_value():
    result = monte_carlo(CLUSTER_TARGET, GENERIC, trials=20000, seed=5)
    assert result.exact == pytest.approx(0.24)
    assert abs(result.estimate - result.exact) <= 4.0 * result.std_error
    again = monte_carlo(CLUSTER_TARGET, GENERIC, trials=20000, seed=5)
    assert again.successes == result.successes


def test_monte_carlo_exact_at_maximal_channels():
    result = monte_carlo(CLUSTER_TARGET, MAXIMAL, trials=500, seed=0)
    assert result.estimate == 1.0
    assert result.std_error == 0.0


def test_monte_carlo_rejects_bad_trials():
    with pytest.raises(ValueError, match="trials"):
        monte_carlo(CLUSTER_TARGET, MAXIMAL, trials=0)


def test_branch_csv_format(maximal_report):
    buf = io.StringIO()
    write_branch_csv(maximal_report, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "ijpqgh,controller_bits,ancilla,probability,fidelity"
    assert len(lines) == 129
    assert lines[1] == "000000,00,0,0.015625,1"
    assert lines[2] == "000000,00,1,0,0"
