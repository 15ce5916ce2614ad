from pathlib import Path

import pytest

from fmmkit import datasets
from fmmkit.tensor import type_polynomial, verify_approximate, verify_exact

REPO_DATA = Path(__file__).resolve().parent.parent / "data"


def test_dataset_names():
    assert datasets.dataset_names() == ("strassen", "3x5x5_58", "teps")


@pytest.mark.parametrize("name", datasets.dataset_names())
def test_bundled_datasets_are_clean(name):
    assert datasets.check_dataset(name) == []


def test_expected_info_is_copied():
    info = datasets.expected_info("strassen")
    info["rank"] = 99
    assert datasets.expected_info("strassen")["rank"] == 7
    with pytest.raises(KeyError):
        datasets.expected_info("nope")


def test_strassen_contents(strassen):
    assert strassen.dims == (2, 2, 2)
    assert strassen.rank == 7
    assert verify_exact(strassen).passed
    assert type_polynomial(strassen).as_dict() == {(2, 2, 2): 1, (1, 1, 1): 6}


def test_58_term_tensor_contents(t58):
    assert t58.dims == (3, 5, 5)
    assert t58.rank == 58
    report = verify_exact(t58)
    assert report.passed
    assert report.total_equations == 5625
    assert type_polynomial(t58).total() == 58


def test_approx_tensor_contents(teps):
    assert teps.dims == (5, 5, 5)
    assert teps.rank == 55
    assert teps.support is not None
    masked = sum(1 for row in teps.support for v in row if not v)
    assert masked == 9
    report = verify_approximate(teps)
    assert report.valid and report.discrepancy_order == 1
    assert type_polynomial(teps).total() == 55


@pytest.mark.parametrize("name", datasets.dataset_names())
def test_repo_copies_match_package_data(name):
    packaged = datasets.dataset_text(name)
    repo = (REPO_DATA / (name + ".fmm")).read_text()
    assert packaged == repo
