import numpy as np
import pytest

from hjbcontrol import EXAMPLE_II_CASE_1, EXAMPLE_II_CASE_2, builtin_example


@pytest.fixture(scope="session")
def model_i():
    return builtin_example("I")


@pytest.fixture(scope="session")
def model_ii_case1():
    return builtin_example("II", EXAMPLE_II_CASE_1)


@pytest.fixture(scope="session")
def model_ii_case2():
    return builtin_example("II", EXAMPLE_II_CASE_2)


@pytest.fixture(scope="session")
def model_iii():
    return builtin_example("III")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def all_builtin_models():
    return [
        builtin_example("I"),
        builtin_example("II", EXAMPLE_II_CASE_1),
        builtin_example("II", EXAMPLE_II_CASE_2),
        builtin_example("III"),
    ]
