import functools

import pytest

from qhblowup.cli import load_descriptor, shipped_expected
from qhblowup.pipeline import Pipeline

B2_2 = ["M2_22", "M2_27", "M2_30", "M2_33", "M2_21", "M2_26", "M2_29"]
B2_3 = ["M3_12", "M3_18", "M3_25", "M3_10", "M3_15", "M3_20"]
ALL = B2_2 + B2_3


@functools.lru_cache(maxsize=None)
def pipeline(name):
    return Pipeline(load_descriptor(name))


@functools.lru_cache(maxsize=None)
def expected(name):
    return shipped_expected(name)


@pytest.fixture(params=ALL)
def shipped(request):
    return pipeline(request.param)
