import numpy as np
import pytest

from masmark import codec, synth


@pytest.fixture(scope="session")
def defaults():
    return codec.EmbedParams()


@pytest.fixture(scope="session")
def fixture_clip():
    return synth.music_like(0)


@pytest.fixture(scope="session")
def fixture_payload():
    return codec.random_payload(128, 42)


@pytest.fixture(scope="session")
def marked_clip(fixture_clip, fixture_payload, defaults):
    """Embedded once per session; attack tests must not mutate it."""
    return codec.embed(fixture_clip, fixture_payload, defaults)


@pytest.fixture()
def rng():
    return np.random.Generator(np.random.PCG64(1234))
