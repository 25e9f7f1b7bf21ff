class ConfigError(ValueError):
    """Bad user-facing configuration: unknown ids, invalid field values, malformed config files."""
