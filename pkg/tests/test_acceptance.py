"""Reproduction criteria, one test per criterion.

These are the binding end-to-end checks (also runnable as ``mladlasso
reproduce``).  Several involve full simulation studies and take minutes;
deselect with ``-m "not slow"`` during development.
"""

import pytest

from mladlasso import acceptance


def _assert_criterion(result):
    line = (f"[{'PASS' if result.passed else 'FAIL'}] {result.name}: "
            f"{result.measured} | expected: {result.expected}")
    print(line)
    assert result.passed, line


def test_augmentation_identity():
    _assert_criterion(acceptance.check_augmentation_identity())


@pytest.mark.slow
def test_oracle_equivalence():
    _assert_criterion(acceptance.check_oracle_equivalence())


def test_lambda_zero_reduction():
    _assert_criterion(acceptance.check_lambda_zero_reduction())


def test_shrinkage_to_null():
    _assert_criterion(acceptance.check_shrinkage_to_null())


@pytest.mark.slow
def test_qtl_recovery():
    _assert_criterion(acceptance.check_qtl_recovery())


@pytest.mark.slow
def test_bias_reduction():
    _assert_criterion(acceptance.check_bias_reduction())


@pytest.mark.slow
def test_robustness():
    _assert_criterion(acceptance.check_robustness())


@pytest.mark.slow
def test_excess_of_zeros():
    _assert_criterion(acceptance.check_excess_of_zeros())


def test_irls_descent():
    _assert_criterion(acceptance.check_irls_descent())


@pytest.mark.slow
def test_cli_determinism():
    _assert_criterion(acceptance.check_cli_determinism())
