import pytest

from genzip.backends import CaptionClient, MockCaptionBackend
from genzip.harness.config import (
    ConfigError,
    RunConfig,
    build_backends,
    load_run_config,
    parse_config_text,
)
from genzip.harness.modes import DEFAULT_MATRIX


GOOD = '''
# a run configuration
dataset_dir = "data/prepared"
output_dir = "runs/demo"
modes = "text15, text30 ,mm0"
repeats = 2
builtin_quality = 40
mock_backends = true

[caption]
base_url = "http://cap.example:8008"
api_key = "top \\"secret\\""
timeout = 30
parallelism_limit = 8
adapter = "chat"

[generation]
base_url = "http://gen.example:8009"
'''


class TestParser:
    def test_sections_and_values(self):
        sections = parse_config_text(GOOD)
        assert sections[""]["dataset_dir"] == "data/prepared"
        assert sections[""]["repeats"] == "2"
        assert sections["caption"]["api_key"] == 'top "secret"'
        assert sections["caption"]["adapter"] == "chat"
        assert sections["generation"]["base_url"] == "http://gen.example:8009"

    def test_bare_tokens(self):
        sections = parse_config_text("repeats = 3\nmock_backends = true")
        assert sections[""] == {"repeats": "3", "mock_backends": "true"}

    def test_malformed_line(self):
        with pytest.raises(ConfigError, match="expected"):
            parse_config_text("this is not an assignment")

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config_text("[telemetry]\nkey = 1")

    def test_unquoted_spaces_rejected(self):
        with pytest.raises(ConfigError, match="malformed value"):
            parse_config_text("key = two words")


class TestLoadRunConfig:
    def test_full_config(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(GOOD)
        cfg = load_run_config(path)
        assert str(cfg.dataset_dir) == "data/prepared"
        assert cfg.modes == ("text15", "text30", "mm0")
        assert cfg.repeats == 2
        assert cfg.builtin_quality == 40
        assert cfg.mock_backends is True
        assert cfg.backend_roles["caption"].parallelism_limit == 8
        assert cfg.backend_roles["caption"].adapter == "chat"

    def test_defaults(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text('dataset_dir = "d"\noutput_dir = "o"\n')
        cfg = load_run_config(path)
        assert cfg.modes == DEFAULT_MATRIX
        assert cfg.repeats == 3
        assert cfg.builtin_quality == 35
        assert cfg.seed_base == 1
        assert cfg.mock_backends is False

    def test_missing_required(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text('output_dir = "o"\n')
        with pytest.raises(ConfigError, match="dataset_dir"):
            load_run_config(path)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text('dataset_dir = "d"\noutput_dir = "o"\nturbo = true\n')
        with pytest.raises(ConfigError, match="unknown top-level key"):
            load_run_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "absent.cfg")

    def test_bad_repeats(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text('dataset_dir = "d"\noutput_dir = "o"\nrepeats = 0\n')
        with pytest.raises(ConfigError):
            load_run_config(path)


class TestBuildBackends:
    def test_mock(self):
        cfg = RunConfig(dataset_dir=".", output_dir=".", mock_backends=True)
        backends = build_backends(cfg)
        assert isinstance(backends.caption, MockCaptionBackend)
        assert backends.embedding is not None

    def test_http_requires_roles(self):
        cfg = RunConfig(dataset_dir=".", output_dir=".", mock_backends=False)
        with pytest.raises(ConfigError, match="caption"):
            build_backends(cfg)

    def test_http_clients_built(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(GOOD.replace("mock_backends = true", "mock_backends = false"))
        backends = build_backends(load_run_config(path))
        assert isinstance(backends.caption, CaptionClient)
        assert backends.caption.adapter == "chat"
        assert backends.caption.transport.endpoint.parallelism_limit == 8
        assert backends.embedding is None
