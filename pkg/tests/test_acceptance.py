"""Acceptance suite: every criterion at its stated size, seed, and tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass/fail
line per criterion, or use ``hyperent verify --suite full`` for the
same checks through the CLI.
"""

from hyperent import verify


def _check(result):
    status = "PASS" if result.passed else "FAIL"
    print(
        f"{status} criterion {result.criterion} [{result.name}] "
        f"({result.seconds:.2f}s, budget {result.budget_seconds:.0f}s): {result.observed}"
    )
    assert result.passed, f"{result.name}: expected {result.expected}, got {result.observed}"
    assert result.seconds < result.budget_seconds, f"{result.name} exceeded its runtime budget"
    return result


def test_criterion_01_exact_cz_mean():
    _check(verify.criterion_01_cz_exact_mean())


def test_criterion_02_exact_cz_variance():
    _check(verify.criterion_02_cz_exact_variance())


def test_criterion_03_exact_ccz_mean():
    result = _check(verify.criterion_03_ccz_exact_mean())
    assert "exact equality: True" in result.observed


def test_criterion_04_exact_half_ccz_moments():
    result = _check(verify.criterion_04_half_ccz_exact())
    assert "var 9/256" in result.observed
    assert "var 27/1024" in result.observed


def test_criterion_05_tuple_count_oracle():
    result = _check(verify.criterion_05_tuple_count_oracle())
    assert "dp=136" in result.observed and "dp=704" in result.observed


def test_criterion_06_rank_purity_equivalence():
    _check(verify.criterion_06_rank_purity_equivalence())


def test_criterion_07_mc_consistency():
    _check(verify.criterion_07_mc_consistency())


def test_criterion_08_ccz_variance_order():
    _check(verify.criterion_08_ccz_variance_order())


def test_criterion_09_rank_distribution():
    _check(verify.criterion_09_rank_distribution())


def test_criterion_10_entropy_variance_separation():
    _check(verify.criterion_10_entropy_variance_separation())


def test_criterion_11_mc_determinism():
    _check(verify.criterion_11_determinism())


def test_full_suite_aggregation():
    report = verify.run_suite("quick")
    assert report.passed
    assert [r.criterion for r in report.results] == sorted(verify.QUICK_IDS, key=int)
    doc = report.to_json()
    assert '"passed": true' in doc
