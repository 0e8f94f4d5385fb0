from circle.exceptions import CircleMaxError


class CliError(CircleMaxError):
    """Errors raised while reading run inputs or writing run outputs."""


class InputError(CliError, ValueError):
    """A config, map, potential or plan file that is missing or malformed."""


class OutputError(CliError, OSError):
    """The output directory could not be written."""
