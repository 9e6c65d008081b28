"""Exception types shared across the simulator."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(ValueError):
    """A scenario is well-formed but cannot be simulated."""


class ConfigParseError(ConfigurationError):
    """A configuration file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.source = source


class SchemaError(ConfigurationError):
    """A configuration value violates the scenario schema."""

    def __init__(self, field: str, constraint: str, value: object = None):
        super().__init__(f"{field}: {constraint} (got {value!r})")
        self.field = field
        self.constraint = constraint
        self.value = value


class ScenarioNotFoundError(LookupError):
    """No built-in scenario with the requested id."""
