from snowflake.cli.api.commands.snow_typer import SnowTyperFactory
from snowflake.cli.api.output.types import CommandResult, MessageResult
import typer
from snowflake.cli.api.config import set_config_value, PLUGINS_SECTION_PATH
from snowflake.cli.api.plugins.plugin_config import PluginConfigProvider
from snowflake.cli.api.exceptions import CliError

PLUGIN_NAME = "cavtun"

KNOWN_KEYS = {
    "threads": "worker cap for sector evaluation (CAVTUN_THREADS overrides it)",
    "output_dir": "directory for outputs of scenarios without an `output` key",
}

app = SnowTyperFactory(
    name="config",
    help="Manage cavtun plugin configuration",
)


def check_config_value(key: str, value: str) -> None:
    if key not in KNOWN_KEYS:
        raise CliError(f"Unknown key {key}; known keys: {', '.join(KNOWN_KEYS)}")
    if key == "threads" and (not value.isdigit() or int(value) < 1):
        raise CliError(f"threads must be a positive integer, got '{value}'")


@app.command()
def set(
    key: str = typer.Option(
        ...,
        "-key",
        help="The key to set",
        show_default=False,
    ),
    value: str = typer.Option(
        ...,
        "-value",
        help="The value to set",
        show_default=False,
    ),
    **options,
) -> CommandResult:
    """
    Set a configuration value for the cavtun plugin.
    """
    check_config_value(key, value)
    set_config_value(path=PLUGINS_SECTION_PATH+[PLUGIN_NAME, "config", key], value=value)

    return MessageResult(f"Successfully set config for {key} to {value}")


@app.command()
def get(
    key: str = typer.Option(
        ...,
        "-key",
        help="The key to get",
        show_default=False,
    ),
    **options,
) -> CommandResult:
    """
    Get a configuration value for the cavtun plugin.
    """
    if key not in KNOWN_KEYS:
        raise CliError(f"Unknown key {key}; known keys: {', '.join(KNOWN_KEYS)}")
    plugin_config = PluginConfigProvider.get_config(PLUGIN_NAME)
    if key not in plugin_config.internal_config:
        raise CliError(f"Key {key} not found in plugin config")

    return MessageResult(f"{key} = {plugin_config.internal_config[key]}")
