"""Exception types shared across the package."""


class CombatNetError(Exception):
    """Base class for all package errors."""


class NetworkStructureError(CombatNetError):
    """A network value violates a structural rule (bad id, bad arc, bad layer)."""


class ConfigError(CombatNetError):
    """A configuration value is out of range, unknown, or inconsistent."""
