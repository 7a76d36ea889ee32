"""Acceptance suite: one test per exit criterion, fully offline via mocks.

Run with `pytest tests/test_acceptance.py -v` to get one pass/fail line per
criterion.  Every tolerance is pinned here, not configured elsewhere.
"""

import json
import random
import statistics
import threading
import time
import zlib
from pathlib import Path

import numpy as np
import pytest
from scipy.fft import dctn

from deflate_reference import deflate_stored, inflate
from fake_server import FakeBackendServer
from genzip import metrics
from genzip.backends import (
    BackendEndpoint,
    CaptionClient,
    ConnectionFailedError,
    DegenerateEmbeddingError,
    EmbeddingClient,
    EmptyCaptionError,
    GenerationClient,
    GenerationRequest,
    HTTPStatusError,
    MalformedResponseError,
    TransportTimeoutError,
    UndecodableImageError,
    make_mock_backends,
)
from genzip.container import (
    BadMagicError,
    ReservedFlagBitsError,
    TrailingGarbageError,
    TruncatedPayloadError,
    UnsupportedVersionError,
    VarintError,
    VisualPayload,
    deserialize,
    make_container,
    serialize,
)
from genzip.harness.config import RunConfig
from genzip.harness.dataset import load_prepared, prepare_dataset
from genzip.harness.matrix import load_results, run_matrix
from genzip.harness.modes import DEFAULT_MATRIX, PRESETS
from genzip.harness.pipeline import encode_image
from genzip.prompting import DimensionSet, PromptSpec, build_prompt, validate_caption
from genzip.synthetic import synthetic_image
from genzip.textcodec import Caption, compress_text, decompress_text
from genzip.visualcodec import (
    CodecSettings,
    RasterImage,
    decode_builtin,
    downsample8,
    encode_builtin,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="module")
def prepared_corpus(tmp_path_factory, mock_corpus_dir) -> Path:
    out = tmp_path_factory.mktemp("prepared")
    prepare_dataset(mock_corpus_dir, out)
    return out


def test_criterion_01_container_roundtrip_and_malformed_classes():
    start = time.perf_counter()
    rng = random.Random(20240811)
    for i in range(1000):
        kind = rng.choice(["text", "visual", "both"])
        text = (
            bytes(rng.randrange(256) for _ in range(rng.randrange(0, 400)))
            if kind in ("text", "both")
            else None
        )
        visual = (
            VisualPayload(
                codec_id=rng.choice([0, 1]),
                data=bytes(rng.randrange(256) for _ in range(rng.randrange(1, 400))),
            )
            if kind in ("visual", "both")
            else None
        )
        c = make_container(
            rng.randrange(1, 65536),
            rng.randrange(1, 65536),
            text_payload=text,
            visual_payload=visual,
        )
        assert deserialize(serialize(c)) == c, f"roundtrip failed at case {i}"

    base = serialize(make_container(64, 64, text_payload=b"payload-bytes"))
    raised = {}
    with pytest.raises(BadMagicError) as e:
        deserialize(b"\x00\x00\x00\x00" + base[4:])
    raised["bad_magic"] = type(e.value)
    with pytest.raises(UnsupportedVersionError) as e:
        deserialize(base[:4] + b"\x09" + base[5:])
    raised["version"] = type(e.value)
    with pytest.raises(ReservedFlagBitsError) as e:
        deserialize(base[:5] + bytes([base[5] | 0x80]) + base[6:])
    raised["reserved"] = type(e.value)
    with pytest.raises(TruncatedPayloadError) as e:
        deserialize(base[:-4])
    raised["truncated"] = type(e.value)
    with pytest.raises(VarintError) as e:
        deserialize(base[:10] + b"\xff\xff\xff\xff\x7f")
    raised["varint"] = type(e.value)
    with pytest.raises(TrailingGarbageError) as e:
        deserialize(base + b"\x00")
    raised["trailing"] = type(e.value)
    assert len(set(raised.values())) == 6, "the six malformed classes must be distinct"

    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"criterion 1 took {elapsed:.2f}s (budget 5s)"


def test_criterion_02_deflate_interop_both_directions():
    fixture_texts = sorted((FIXTURES / "text").glob("*.txt"))
    assert fixture_texts, "text fixtures missing"
    for txt_path in fixture_texts:
        text = txt_path.read_text("utf-8")
        ours = txt_path.with_suffix(".bin").read_bytes()
        # our stream under an independent reference decoder
        assert inflate(ours).decode("utf-8") == text
        # a reference-encoder stream under our decoder
        reference_stream = deflate_stored(text.encode("utf-8"))
        assert decompress_text(reference_stream).text == text
        # and zlib agrees with both
        assert zlib.decompress(ours, -15).decode("utf-8") == text


def test_criterion_03_text_only_rate_band(prepared_corpus):
    backends = make_mock_backends()
    images = load_prepared(prepared_corpus)
    assert len(images) == 10
    start = time.perf_counter()
    bpps = []
    for _image_id, image in images:
        result = encode_image(image, PRESETS["text30"], backends)
        assert result.container.header.text_present
        assert not result.container.header.visual_present
        bpps.append(result.rate.bpp)
    elapsed = time.perf_counter() - start
    mean_bpp = statistics.mean(bpps)
    assert 0.0008 <= mean_bpp <= 0.0030, f"text30 mean bpp {mean_bpp:.6f} outside band"
    assert elapsed < 30.0, f"criterion 3 took {elapsed:.2f}s (budget 30s)"


def test_criterion_04_multimodal_rate_band(prepared_corpus):
    backends = make_mock_backends()
    images = load_prepared(prepared_corpus)
    start = time.perf_counter()
    bpps = []
    for _image_id, image in images:
        result = encode_image(image, PRESETS["mm15"], backends)
        assert result.container.header.text_present
        assert result.container.header.visual_present
        assert result.container.visual_payload.codec_id == 0
        bpps.append(result.rate.bpp)
    elapsed = time.perf_counter() - start
    mean_bpp = statistics.mean(bpps)
    assert 0.002 <= mean_bpp <= 0.008, f"mm15 mean bpp {mean_bpp:.6f} outside band"
    assert elapsed < 60.0, f"criterion 4 took {elapsed:.2f}s (budget 60s)"


def test_criterion_05_builtin_codec_properties():
    # orthonormal energy on 100 random blocks
    rng = np.random.default_rng(99)
    blocks = rng.integers(0, 256, size=(100, 8, 8)).astype(np.float64) - 128.0
    coeffs = dctn(blocks, axes=(-2, -1), norm="ortho")
    for i in range(100):
        assert float((coeffs[i] ** 2).sum()) == pytest.approx(
            float((blocks[i] ** 2).sum()), rel=1e-6
        )

    # weak rate monotonicity across quality on two fixtures
    for seed in (2024, 2027):
        fixture = synthetic_image(128, 128, seed)
        sizes = [
            len(encode_builtin(fixture, CodecSettings(quality=q)))
            for q in range(10, 100, 10)
        ]
        assert all(a <= b for a, b in zip(sizes, sizes[1:])), (seed, sizes)

    # uniform mid-gray roundtrips exactly
    gray = RasterImage.constant(64, 64, (128, 128, 128))
    assert decode_builtin(encode_builtin(gray, CodecSettings(quality=35))) == gray

    # q50 PSNR on the 128px fixture, against the pinned first-run value
    pin = json.loads((FIXTURES / "images" / "builtin_psnr_pin.json").read_text())
    fixture = synthetic_image(pin["width"], pin["height"], pin["seed"])
    decoded = decode_builtin(encode_builtin(fixture, CodecSettings(quality=pin["quality"])))
    measured = metrics.psnr(fixture, decoded)
    assert measured >= 28.0, f"q50 PSNR {measured:.3f} below 28 dB"
    assert measured == pytest.approx(pin["psnr_db"], abs=0.1)


def test_criterion_06_downsample_upsample_oracles():
    big = synthetic_image(1024, 1024, 7)
    small = downsample8(big)
    assert (small.width, small.height) == (128, 128)

    constant = RasterImage.constant(96, 64, (77, 77, 77))
    assert set(downsample8(constant).to_array().ravel().tolist()) == {77}

    block = np.arange(64, dtype=np.uint8).reshape(8, 8)
    img = RasterImage.from_array(np.stack([block] * 3, axis=-1))
    assert downsample8(img).to_array().tolist() == [[[32, 32, 32]]]


def test_criterion_07_prompt_engine():
    prompt = build_prompt(PromptSpec(word_budget=30), DimensionSet())
    assert "Describe the visual elements in a top-to-bottom, left-to-right order" in prompt
    for name in (
        "feature correspondence",
        "geometric consistency",
        "photometric properties",
        "stylistic alignment",
        "semantic coherence",
        "structural integrity",
    ):
        assert name in prompt, f"missing dimension clause: {name}"
    assert "in 30 words or fewer" in prompt

    unstructured = build_prompt(PromptSpec(word_budget=15, variant="unstructured"))
    assert unstructured == "Describe this image in 15 words or fewer."

    forty = Caption(" ".join(f"w{i}" for i in range(40)))
    report = validate_caption(forty, PromptSpec(word_budget=30))
    assert report.action_taken == "truncated"
    assert not report.within_budget
    assert report.caption.word_count == 30


def test_criterion_08_metrics_closed_forms():
    a = RasterImage.constant(16, 16, (100, 100, 100))
    b = RasterImage.constant(16, 16, (101, 101, 101))
    assert metrics.psnr(a, b) == pytest.approx(48.131, abs=1e-3)

    img = synthetic_image(64, 64, 12)
    assert metrics.ssim(img, img) == pytest.approx(1.0, abs=1e-9)

    assert metrics.embed_cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(0.97463, abs=1e-5)

    rows = [
        {"image_id": "a", "mode_name": "m", "repeat_index": r, "bpp": v}
        for r, v in zip((1, 2, 3), (0.001, 0.002, 0.003))
    ]
    assert metrics.aggregate(rows)["m"]["metrics"]["bpp"].mean == 0.002


def test_criterion_09_end_to_end_determinism(prepared_corpus, tmp_path):
    start = time.perf_counter()

    def run_into(out_dir: Path):
        config = RunConfig(
            dataset_dir=prepared_corpus,
            output_dir=out_dir,
            modes=DEFAULT_MATRIX,
            repeats=3,
            mock_backends=True,
        )
        return config, run_matrix(config)

    _cfg_a, first = run_into(tmp_path / "run_a")
    _cfg_b, second = run_into(tmp_path / "run_b")
    assert first.rows_written == 180, f"expected 180 rows, wrote {first.rows_written}"
    assert second.rows_written == 180
    assert not first.failures and not second.failures

    def normalized(path: Path) -> str:
        rows = []
        for row in load_results(path):
            row["wall_time_s"] = None  # excluded from the determinism check
            rows.append(json.dumps(row, sort_keys=True))
        return "\n".join(rows)

    assert normalized(first.results_path) == normalized(second.results_path)

    cfg_a2, resumed = run_into(tmp_path / "run_a")
    assert resumed.rows_written == 0, "resume must add zero rows"
    assert len(load_results(resumed.results_path)) == 180

    elapsed = time.perf_counter() - start
    assert elapsed < 180.0, f"criterion 9 took {elapsed:.1f}s (budget 180s)"


def test_criterion_10_backend_client_behavior():
    image = RasterImage.constant(16, 16, (5, 5, 5))
    no_sleep = lambda _s: None

    # success after exactly two retries
    sleeps = []
    with FakeBackendServer() as server:
        server.script("/v1/caption", [(500, {}), (500, {}), (200, {"caption": "ok"})])
        client = CaptionClient(
            BackendEndpoint(server.base_url, max_retries=2), sleeper=sleeps.append
        )
        assert client.caption(image, "p", 15).text == "ok"
        assert server.count("/v1/caption") == 3
        assert sleeps == [1.0, 2.0]

    # parallelism never exceeds the configured limit
    with FakeBackendServer(delay_s=0.08) as server:
        server.script("/v1/caption", [(200, {"caption": "ok"})])
        client = CaptionClient(
            BackendEndpoint(server.base_url, parallelism_limit=3), sleeper=no_sleep
        )
        threads = [
            threading.Thread(target=lambda: client.caption(image, "p", 15))
            for _ in range(12)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert server.count("/v1/caption") == 12
        assert server.max_in_flight <= 3, f"saw {server.max_in_flight} in flight"

    # every failure class maps to its typed error
    with FakeBackendServer() as server:
        server.script("/v1/caption", [(404, {})])
        with pytest.raises(HTTPStatusError):
            CaptionClient(BackendEndpoint(server.base_url), sleeper=no_sleep).caption(
                image, "p", 15
            )
    with FakeBackendServer() as server:
        server.script("/v1/caption", [(200, {"nope": 1})])
        with pytest.raises(MalformedResponseError):
            CaptionClient(BackendEndpoint(server.base_url), sleeper=no_sleep).caption(
                image, "p", 15
            )
    with FakeBackendServer() as server:
        server.script("/v1/caption", [(200, {"caption": " "})])
        with pytest.raises(EmptyCaptionError):
            CaptionClient(BackendEndpoint(server.base_url), sleeper=no_sleep).caption(
                image, "p", 15
            )
    with FakeBackendServer(delay_s=0.5) as server:
        server.script("/v1/caption", [(200, {"caption": "slow"})])
        with pytest.raises(TransportTimeoutError):
            CaptionClient(
                BackendEndpoint(server.base_url, timeout=0.05, max_retries=0),
                sleeper=no_sleep,
            ).caption(image, "p", 15)
    import socket

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    dead_port = sock.getsockname()[1]
    sock.close()
    with pytest.raises(ConnectionFailedError):
        CaptionClient(
            BackendEndpoint(f"http://127.0.0.1:{dead_port}", max_retries=0),
            sleeper=no_sleep,
        ).caption(image, "p", 15)
    with FakeBackendServer() as server:
        server.script("/v1/generate", [(200, {"image": "@@@"})])
        with pytest.raises(UndecodableImageError):
            GenerationClient(BackendEndpoint(server.base_url), sleeper=no_sleep).generate(
                GenerationRequest(8, 8, prompt_text="x")
            )
    with FakeBackendServer() as server:
        server.script("/v1/embed", [(200, {"embedding": [0.0, 0.0, 0.0], "dim": 3})])
        with pytest.raises(DegenerateEmbeddingError):
            EmbeddingClient(BackendEndpoint(server.base_url), sleeper=no_sleep).embed(image)
