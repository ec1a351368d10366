import os
from contextlib import contextmanager
from pathlib import Path

import typer
from snowflake.cli.api.commands.snow_typer import SnowTyperFactory
from snowflake.cli.api.output.types import CommandResult, MessageResult
from snowflake.cli.api.exceptions import CliError
from snowflake.cli.api.plugins.plugin_config import PluginConfigProvider
from snowflakecli.cavtun.config.commands import app as config_app, PLUGIN_NAME
from snowflakecli.cavtun.manager import ScenarioManager
from snowflakecli.cavtun.physics.exceptions import CavityTunnelingError
from snowflakecli.cavtun.scenario_spec import ConfigParseError, describe_keys, parse_config

THREADS_ENV = "CAVTUN_THREADS"


class ConfigCliError(CliError):
    """Raised when a scenario or protocol file cannot be parsed"""
    exit_code = 2


class PhysicsDomainCliError(CliError):
    """Raised when a scenario violates a physical precondition"""
    exit_code = 3


app = SnowTyperFactory(
    name="cavtun",
    help="Simulate cavity-assisted tunneling of an atom in a double well",
)

app.add_typer(config_app)


def resolve_threads(env: dict = None, plugin_config: dict = None) -> int:
    """
    Worker cap: CAVTUN_THREADS, then the plugin `threads` key, then 1.
    """
    env = os.environ if env is None else env
    raw, source = env.get(THREADS_ENV), THREADS_ENV
    if raw is None:
        raw, source = (plugin_config or {}).get("threads"), "plugin config key 'threads'"
    if raw is None:
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise CliError(f"{source} must be an integer, got '{raw}'")
    if threads < 1:
        raise CliError(f"{source} must be at least 1, got {threads}")
    return threads


@contextmanager
def translate_errors(config_path: str):
    try:
        yield
    except ConfigParseError as e:
        raise ConfigCliError(f"{config_path}: {e}")
    except CavityTunnelingError as e:
        raise PhysicsDomainCliError(f"{config_path}: {e}")


def _load_manager(config_path: str) -> ScenarioManager:
    plugin_config = PluginConfigProvider.get_config(PLUGIN_NAME).internal_config
    output_dir = plugin_config.get("output_dir")
    scenario = parse_config(config_path, Path(output_dir) if output_dir else None)
    return ScenarioManager(scenario, threads=resolve_threads(plugin_config=plugin_config))


@app.command("run")
def run_scenario(
    config_path: str = typer.Argument(
        help="Scenario file to run"
    ),
    **options,
) -> CommandResult:
    """
    Run a scenario and write its series and report files.
    """
    with translate_errors(config_path):
        manager = _load_manager(config_path)
        outcome = manager.run()

    written = "\n".join(f"  {path}" for path in outcome.outputs)
    return MessageResult(f"Scenario {manager.scenario.kind} completed, wrote:\n{written}")


@app.command("validate")
def validate_config(
    config_path: str = typer.Argument(
        help="Scenario file to check"
    ),
    **options,
) -> CommandResult:
    """
    Check a scenario file without running it.
    """
    with translate_errors(config_path):
        _load_manager(config_path).validate()

    return MessageResult("OK")


@app.command("list")
def list_scenarios(**options) -> CommandResult:
    """
    Describe the scenario kinds and configuration keys.
    """
    return MessageResult(describe_keys())
