from __future__ import annotations

from pathlib import Path

import hypothesis
import pytest

from genzip.synthetic import synthetic_image, write_mock_corpus

hypothesis.settings.register_profile("ci", deadline=None)
hypothesis.settings.load_profile("ci")

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def photo_128():
    """128x128 synthetic photograph (the downsampled-condition scale)."""
    return synthetic_image(128, 128, 2024)


@pytest.fixture(scope="session")
def photo_128_b():
    return synthetic_image(128, 128, 2027)


@pytest.fixture(scope="session")
def mock_corpus_dir(tmp_path_factory) -> Path:
    """Ten 1024x1024 synthetic PNGs, the offline stand-in for the eval set."""
    corpus = tmp_path_factory.mktemp("corpus")
    write_mock_corpus(corpus, count=10, width=1024, height=1024)
    return corpus
