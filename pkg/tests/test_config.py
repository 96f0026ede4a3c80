import numpy as np
import pytest

from fbf.config import (ConfigError, config_hash, load_config,
                        parse_config_text, resolved_text)


def write(tmp_path, text):
    p = tmp_path / "exp.cfg"
    p.write_text(text)
    return p


class TestParse:
    def test_basic_pairs_and_comments(self):
        vals = parse_config_text(
            "# a comment\nsystem = ikeda\ntrials=3  # trailing\n\nsnr_db = 3.0\n")
        assert vals == {"system": "ikeda", "trials": 3, "snr_db": 3.0}

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key 'frobnicate'"):
            parse_config_text("frobnicate = 1\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("trials = 1\ntrials = 2\n")

    def test_malformed_line_has_position(self):
        with pytest.raises(ConfigError, match=r"line 2"):
            parse_config_text("system = ikeda\nnot a pair\n")

    def test_bad_value_has_position(self):
        with pytest.raises(ConfigError, match=r"line 1, column"):
            parse_config_text("trials = many\n")

    def test_inf_snr(self):
        assert parse_config_text("snr_db = inf\n")["snr_db"] == np.inf

    def test_booleans(self):
        vals = parse_config_text("gram_cache = false\nsave_model = yes\n")
        assert vals == {"gram_cache": False, "save_model": True}


class TestLoadConfig:
    def test_missing_system(self, tmp_path):
        with pytest.raises(ConfigError, match="'system'"):
            load_config(write(tmp_path, "trials = 2\n"))

    def test_unknown_system(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown system"):
            load_config(write(tmp_path, "system = lorenz\n"))

    def test_unknown_noise(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown noise"):
            load_config(write(tmp_path, "system = ikeda\nnoise = pink\n"))

    def test_defaults_applied(self, tmp_path):
        cfg = load_config(write(tmp_path, "system = ikeda\n"))
        assert cfg.sigma2_y == 40.0 and cfg.n_train == 201

    def test_override_and_seed(self, tmp_path):
        cfg = load_config(write(tmp_path, "system = ikeda\nseed = 5\ntrials=2\n"),
                          seed_override=9)
        assert cfg.seed == 9 and cfg.trials == 2

    def test_noise_key_maps_to_family(self, tmp_path):
        cfg = load_config(write(tmp_path, "system = ikeda\nnoise = laplacian\n"))
        assert cfg.noise_family == "laplacian"


class TestResolvedEcho:
    def test_round_trips_through_parser(self, tmp_path):
        cfg = load_config(write(tmp_path, "system = ikeda\ntrials = 4\n"))
        echoed = resolved_text(cfg)
        reparsed = parse_config_text(echoed)
        assert reparsed["system"] == "ikeda"
        assert reparsed["trials"] == 4
        assert reparsed["sigma2_y"] == cfg.sigma2_y

    def test_hash_stability_and_sensitivity(self, tmp_path):
        a = load_config(write(tmp_path, "system = ikeda\n"))
        b = load_config(write(tmp_path, "system = ikeda\n"))
        c = load_config(write(tmp_path, "system = ikeda\ntrials = 7\n"))
        assert config_hash(a) == config_hash(b)
        assert config_hash(a) != config_hash(c)
