from __future__ import annotations

import numpy as np
import pytest

from app.core.csscode import build_css
from app.core.errors import ResourceLimitError, UsageError
from app.core.exponents import e_gv
from app.core.gfvec import LinearCode
from app.core.models import EnsembleVariant
from app.core.oracle import (
    decoding_error_identity_check,
    egv_tilting,
    enumerate_self_orthogonal,
    exact_failure_probability,
    exact_marginal_failure,
    run_verify_suite,
    sampling_tail_bound,
    sampling_tail_check,
    verify_group_symmetry,
    wilson_interval,
)
from app.domain.channels import depolarizing_dist, dephasing_dist


def test_wilson_interval() -> None:
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0
    assert 0.0 < hi < 0.1
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_census_without_isotropic_vectors() -> None:
    # em F_3^2, x·x = x1² + x2² só zera em x = 0
    census = enumerate_self_orthogonal(3, 2, 1)
    assert census.size == 0
    with pytest.raises(UsageError):
        verify_group_symmetry(census)


def test_all_ones_variant_n4() -> None:
    census = enumerate_self_orthogonal(2, 4, 1, EnsembleVariant.CONTAINS_ALL_ONES)
    assert census.size == 1
    assert census.codes[0].contains(np.ones(4, dtype=np.int64))


@pytest.mark.parametrize(
    "d,n,kappa,variant",
    [
        (3, 4, 1, EnsembleVariant.ALL_SELF_ORTHOGONAL),
        (2, 4, 1, EnsembleVariant.CONTAINS_ALL_ONES),
        (2, 6, 2, EnsembleVariant.CONTAINS_ALL_ONES),
    ],
)
def test_group_symmetry(d: int, n: int, kappa: int, variant: EnsembleVariant) -> None:
    report = verify_group_symmetry(enumerate_self_orthogonal(d, n, kappa, variant))
    assert report.passed, report.violations
    assert report.worst_ratio <= report.ratio_bound + 1e-12


def test_census_argument_errors() -> None:
    with pytest.raises(UsageError):
        enumerate_self_orthogonal(2, 4, 3)
    with pytest.raises(UsageError):
        enumerate_self_orthogonal(3, 4, 1, EnsembleVariant.CONTAINS_ALL_ONES)
    with pytest.raises(ResourceLimitError):
        enumerate_self_orthogonal(2, 12, 1, cap=1000)


def test_exact_failure_noiseless(example_css) -> None:
    noiseless = np.array([[1.0, 0.0], [0.0, 0.0]])
    result = exact_failure_probability(example_css, noiseless)
    assert result.joint == pytest.approx(0.0, abs=1e-12)
    assert result.marginal_x == 0.0 and result.marginal_z == 0.0
    assert exact_marginal_failure(example_css, [1.0, 0.0]) == 0.0


def test_union_bound_holds(example_css) -> None:
    result = exact_failure_probability(example_css, depolarizing_dist(2, 0.1), exponent=0.05)
    assert result.union_ok
    assert result.joint <= result.marginal_x + result.marginal_z + 1e-12
    assert result.fidelity_ok


def test_exact_marginal_failure_shape_check(example_css) -> None:
    with pytest.raises(UsageError):
        exact_marginal_failure(example_css, np.full((3, 2), 0.5))


def test_decoding_error_identity(rng) -> None:
    code = LinearCode.from_rows(["11111111", "11110000"], 2)
    css = build_css(code)
    noiseless = decoding_error_identity_check(css, [1.0, 0.0], 200, rng)
    assert noiseless.exact == 0.0 and noiseless.failures == 0
    noisy = decoding_error_identity_check(css, dephasing_dist(2, 0.1).sum(axis=0), 3000, rng)
    assert noisy.within


def test_egv_oracle_agrees() -> None:
    joint = depolarizing_dist(2, 0.05)
    assert e_gv(0.3, joint).value == pytest.approx(egv_tilting(0.3, joint.reshape(-1)), abs=1e-4)


def test_sampling_tails(rng) -> None:
    report = sampling_tail_check(2, 40, 20, np.array([0] * 20 + [1] * 20), 1000, rng)
    assert report.violations == 0
    assert report.empirical[0] == 1.0
    assert sampling_tail_bound(0.5, 40, 20, 2) > 0
    with pytest.raises(UsageError):
        sampling_tail_check(2, 10, 10, None, 10, rng)


@pytest.mark.slow
def test_quick_verify_suite_passes() -> None:
    results = run_verify_suite(quick=True, seed=2024)
    assert [r.name for r in results][0] == "ensemble_symmetry"
    failed = [(r.name, r.detail) for r in results if not r.passed]
    assert not failed
