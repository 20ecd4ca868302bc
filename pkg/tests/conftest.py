import numpy as np
import pytest

from fieldshift import PhantomParams, SubjectPair, Volume, generate_subject


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def random_volume(rng):
    return Volume(rng.random((6, 7, 8), dtype=np.float32), spacing=(1.0, 0.9, 1.1))


@pytest.fixture(scope="session")
def tiny_pairs():
    """Three 16^3 phantom subjects; small enough for fast training tests."""
    params = PhantomParams(size=16, deform_amplitude=1.0)
    return [generate_subject(11, sid, phantom_params=params) for sid in range(3)]


@pytest.fixture(scope="session")
def identity_pairs(tiny_pairs):
    """Pairs whose source equals the target (the learnable identity task)."""
    return [SubjectPair(p.subject_id, p.target, p.target) for p in tiny_pairs]
