import pytest
from snowflake.cli.api.exceptions import CliError

from snowflakecli.cavtun.commands import (
    ConfigCliError,
    PhysicsDomainCliError,
    THREADS_ENV,
    resolve_threads,
    translate_errors,
)
from snowflakecli.cavtun.config.commands import check_config_value
from snowflakecli.cavtun.physics import DomainViolationError, TruncationError
from snowflakecli.cavtun.scenario_spec import ConfigParseError


@pytest.mark.parametrize("env, plugin_config, expected", [
    ({}, {}, 1),
    ({}, None, 1),
    ({}, {"threads": "2"}, 2),
    ({THREADS_ENV: "4"}, {}, 4),
    ({THREADS_ENV: "4"}, {"threads": "2"}, 4),
])
def test_resolve_threads(env, plugin_config, expected) -> None:
    assert resolve_threads(env=env, plugin_config=plugin_config) == expected


@pytest.mark.parametrize("env, plugin_config", [
    ({THREADS_ENV: "many"}, {}),
    ({THREADS_ENV: "0"}, {}),
    ({}, {"threads": "-3"}),
])
def test_resolve_threads_rejects(env, plugin_config) -> None:
    with pytest.raises(CliError):
        resolve_threads(env=env, plugin_config=plugin_config)


def test_parse_errors_exit_with_two() -> None:
    with pytest.raises(ConfigCliError) as excinfo:
        with translate_errors("revival_split2.cfg"):
            raise ConfigParseError("unknown key 'foo'", 2, 3)
    assert excinfo.value.exit_code == 2
    assert "revival_split2.cfg: line 2, column 3: unknown key 'foo'" in str(excinfo.value)


@pytest.mark.parametrize("error", [DomainViolationError("window too short"), TruncationError("tail too heavy")])
def test_physics_errors_exit_with_three(error) -> None:
    with pytest.raises(PhysicsDomainCliError) as excinfo:
        with translate_errors("revival_split2.cfg"):
            raise error
    assert excinfo.value.exit_code == 3
    assert str(error) in str(excinfo.value)


def test_other_errors_pass_through() -> None:
    with pytest.raises(KeyError):
        with translate_errors("revival_split2.cfg"):
            raise KeyError("kind")


def test_check_config_value() -> None:
    check_config_value("threads", "3")
    check_config_value("output_dir", "/tmp/cavtun")
    for key, value in (("colour", "red"), ("threads", "0"), ("threads", "two")):
        with pytest.raises(CliError):
            check_config_value(key, value)
