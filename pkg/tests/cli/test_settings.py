from __future__ import annotations

import pytest

from lumaca.cli import load_settings, parse_settings
from lumaca.closed_form import LinearCoeffs, ModelPreset
from lumaca.exceptions import ConfigurationError

CONFIG = """\
[run]
command = moments
seed = 7
n_paths = 50

[clock]
kind = inverse_stable
beta = 0.5
step = 0.01

[moments]
checks = mittag_leffler, ou_mean
"""


# ------- parsing

def test_defaults_with_a_command():
    settings = parse_settings("", command="special")
    assert settings.command == "special"
    assert settings.seed == 0
    assert settings.n_paths == 100
    assert settings.section("special")["function"] == "mittag_leffler"


def test_file_values():
    settings = parse_settings(CONFIG)
    assert settings.command == "moments"
    assert settings.seed == 7
    assert settings.section("moments")["checks"] == ("mittag_leffler", "ou_mean")
    clock = settings.clock()
    assert clock.kind == "inverse_stable"
    assert clock.beta == 0.5


def test_overrides():
    settings = parse_settings(CONFIG, ["clock.beta=0.3", "seed=5", "verify.threshold = 0.1"])
    assert settings.clock().beta == 0.3
    assert settings.seed == 5
    assert settings.section("verify")["threshold"] == 0.1
    with pytest.raises(ConfigurationError):
        parse_settings(CONFIG, ["clock.beta"])


# ------- errors name the line

@pytest.mark.parametrize(
    ("text", "section", "key", "line"),
    [
        ("[run]\ncommand = special\n[bogus]\nx = 1\n", "bogus", None, 3),
        ("[run]\ncommand = special\n[clock]\nkindd = identity\n", "clock", "kindd", 4),
        ("[run]\ncommand = special\nseed = abc\n", "run", "seed", 3),
        ("[run]\ncommand = special\nn_paths = 0\n", "run", "n_paths", 3),
        ("[run]\ncommand = dance\n", "run", "command", 2),
    ],
)
def test_errors_are_located(text, section, key, line):
    with pytest.raises(ConfigurationError) as exc:
        parse_settings(text)
    assert exc.value.section == section
    assert exc.value.key == key
    assert exc.value.line == line


def test_unreadable_file_text():
    with pytest.raises(ConfigurationError):
        parse_settings("no section header\n")


def test_command_must_agree():
    with pytest.raises(ConfigurationError) as exc:
        parse_settings(CONFIG, command="verify")
    assert exc.value.key == "command"
    with pytest.raises(ConfigurationError):
        parse_settings("")


def test_clock_errors_point_at_the_clock():
    settings = parse_settings("[clock]\nkind = inverse_stable\n", command="simulate")
    with pytest.raises(ConfigurationError) as exc:
        settings.clock()
    assert exc.value.section == "clock"
    assert exc.value.key == "beta"


# ------- models

def test_preset_model():
    settings = parse_settings("[model]\npreset = black_scholes\nsigma = 0.2\n", command="simulate")
    model = settings.model()
    assert isinstance(model, ModelPreset)
    assert model.parameters["sigma"] == 0.2


def test_linear_model():
    text = "[model]\npreset = linear\nmu2 = -0.5\nsigma1 = 0.1\nx0 = 2\n"
    model = parse_settings(text, command="simulate").model()
    assert isinstance(model, LinearCoeffs)
    assert model.x0 == 2.0

    bad = parse_settings("[model]\npreset = linear\nalpha = 1\n", command="simulate")
    with pytest.raises(ConfigurationError) as exc:
        bad.model()
    assert exc.value.key == "alpha"
    assert exc.value.line == 3


def test_unknown_preset():
    settings = parse_settings("[model]\npreset = heston\n", command="simulate")
    with pytest.raises(ConfigurationError) as exc:
        settings.model()
    assert exc.value.key == "preset"
    assert exc.value.line == 2


# ------- digests and files

def test_digest_tracks_the_values():
    a = parse_settings(CONFIG)
    assert a.digest == parse_settings(CONFIG).digest
    assert a.digest != parse_settings(CONFIG, ["seed=8"]).digest


def test_load_settings(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(CONFIG, encoding="utf-8")
    assert load_settings(path).seed == 7
    assert load_settings(None, command="special").command == "special"
    with pytest.raises(ConfigurationError) as exc:
        load_settings(tmp_path / "missing.ini")
    assert exc.value.key == "config"
