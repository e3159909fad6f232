from pathlib import Path

import numpy as np
import pytest

from ebsw.measures import EmpiricalMeasure

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def random_measure(rng: np.random.Generator, n: int, d: int, scale: float = 1.0,
                   shift: float = 0.0) -> EmpiricalMeasure:
    return EmpiricalMeasure(rng.standard_normal((n, d)) * scale + shift)
