"""Schema migrations for the artifact cache."""

from .manager import SCHEMA_MIGRATIONS, Migration, MigrationManager

__all__ = ["Migration", "MigrationManager", "SCHEMA_MIGRATIONS"]
