import pytest

from genzip.backends import make_mock_backends
from genzip.container import CODEC_EXTERNAL, serialize
from genzip.harness.modes import Mode, ModeError, PRESETS, resolve_mode
from genzip.harness.pipeline import decode_container, encode_image, make_registry
from genzip.synthetic import synthetic_image
from genzip.textcodec import decompress_text
from genzip.visualcodec import (
    MalformedStreamError,
    SymbolCountError,
    VisualCodecError,
    decode_builtin,
    downsample8,
    upsample_to,
)


@pytest.fixture(scope="module")
def image():
    return synthetic_image(256, 192, 123)


@pytest.fixture()
def backends():
    return make_mock_backends()


class TestModes:
    def test_presets_cover_the_experiment_grid(self):
        assert set(PRESETS) == {
            "text15",
            "text30",
            "text120",
            "text30_unstructured",
            "mm0",
            "mm15",
            "mm60",
        }
        assert PRESETS["mm0"].text_budget == 0
        assert PRESETS["mm0"].visual == "builtin"
        assert PRESETS["text30_unstructured"].prompt_variant == "unstructured"

    def test_invalid_mode_rejected(self):
        with pytest.raises(ModeError):
            Mode(name="nothing", text_budget=0, visual="none")
        with pytest.raises(ModeError):
            Mode(name="odd", text_budget=17)

    def test_resolve_quality_override(self):
        assert resolve_mode("mm0", 70).builtin_quality == 70
        assert resolve_mode("text30", 70).builtin_quality == 35  # no visual branch
        with pytest.raises(ModeError):
            resolve_mode("nope")


class TestEncode:
    def test_text_only(self, image, backends):
        result = encode_image(image, PRESETS["text30"], backends)
        c = result.container
        assert c.header.text_present and not c.header.visual_present
        assert (c.header.width, c.header.height) == (256, 192)
        caption = decompress_text(c.text_payload)
        assert caption.word_count == 30
        assert result.caption_report.within_budget
        assert result.rate.bits_visual == 0

    def test_text_only_deterministic(self, image, backends):
        a = encode_image(image, PRESETS["text30"], backends)
        b = encode_image(image, PRESETS["text30"], backends)
        assert serialize(a.container) == serialize(b.container)

    def test_visual_only(self, image, backends):
        result = encode_image(image, PRESETS["mm0"], backends)
        c = result.container
        assert c.header.visual_present and not c.header.text_present
        decoded = decode_builtin(c.visual_payload.data)
        assert (decoded.width, decoded.height) == (32, 24)  # 256x192 / 8
        assert result.caption_report is None

    def test_multimodal(self, image, backends):
        result = encode_image(image, PRESETS["mm15"], backends)
        c = result.container
        assert c.header.text_present and c.header.visual_present
        assert result.rate.bits_total == (
            result.rate.bits_text + result.rate.bits_visual + result.rate.bits_overhead
        )

    def test_external_codec_mode(self, image, backends):
        mode = Mode(name="mm0ext", text_budget=0, visual="external", external_target_bpp=0.05)
        result = encode_image(image, mode, backends)
        assert result.container.visual_payload.codec_id == CODEC_EXTERNAL
        registry = make_registry(backends)
        echoed = registry.decode(CODEC_EXTERNAL, result.container.visual_payload.data)
        assert echoed == downsample8(image)


class TestDecode:
    def test_repeat_count(self, image, backends):
        container = encode_image(image, PRESETS["text15"], backends).container
        results = decode_container(container, backends, repeats=3)
        assert len(results) == 3

    def test_multimodal_mock_equals_upsampled_condition(self, image, backends):
        container = encode_image(image, PRESETS["mm15"], backends).container
        condition = decode_builtin(container.visual_payload.data)
        expected = upsample_to(condition, 256, 192)
        for result in decode_container(container, backends, repeats=2):
            assert result.image == expected  # mock ignores text when image present

    def test_text_only_mock_constant(self, image, backends):
        container = encode_image(image, PRESETS["text30"], backends).container
        results = decode_container(container, backends, repeats=2)
        arr = results[0].image.to_array()
        assert (results[0].image.width, results[0].image.height) == (256, 192)
        assert (arr == arr[0, 0]).all()  # constant color

    def test_output_dims_follow_header(self, image, backends):
        container = encode_image(image, PRESETS["mm0"], backends).container
        for result in decode_container(container, backends, repeats=1):
            assert (result.image.width, result.image.height) == (256, 192)

    def test_corrupted_visual_payload_surfaces_codec_error(self, image, backends):
        from genzip.container import VisualPayload, make_container

        good = encode_image(image, PRESETS["mm0"], backends).container
        bad = make_container(
            256,
            192,
            visual_payload=VisualPayload(0, good.visual_payload.data[: len(good.visual_payload.data) // 2]),
        )
        with pytest.raises((MalformedStreamError, SymbolCountError, VisualCodecError)):
            decode_container(bad, backends, repeats=1)

    def test_seed_count_mismatch(self, image, backends):
        container = encode_image(image, PRESETS["text15"], backends).container
        with pytest.raises(ValueError):
            decode_container(container, backends, repeats=3, seeds=[1, 2])
