import logging
import sqlite3
from typing import Callable, Dict, List, Optional

from ..core.connection_pool import ConnectionPool

logger = logging.getLogger(__name__)


class Migration:
    """One schema step of the artifact cache."""

    def __init__(
        self,
        version: str,
        up: Callable[[sqlite3.Connection], None],
        down: Callable[[sqlite3.Connection], None],
        name: str = "",
    ):
        """
        Args:
            version: Zero-padded version string, ordered lexically
            up: Applies the step on an open connection
            down: Reverts the step
            name: Human-readable description
        """
        self.version = version
        self.up = up
        self.down = down
        self.name = name


def _create_artifacts(conn: sqlite3.Connection) -> None:
    conn.execute(
        """
        CREATE TABLE IF NOT EXISTS artifacts (
            key TEXT PRIMARY KEY,
            kind TEXT NOT NULL,
            schema TEXT NOT NULL,
            checksum TEXT NOT NULL,
            size INTEGER NOT NULL,
            payload BLOB NOT NULL,
            created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
        )
        """
    )


def _drop_artifacts(conn: sqlite3.Connection) -> None:
    conn.execute("DROP TABLE IF EXISTS artifacts")


def _create_kind_index(conn: sqlite3.Connection) -> None:
    conn.execute("CREATE INDEX IF NOT EXISTS idx_artifacts_kind ON artifacts(kind)")


def _drop_kind_index(conn: sqlite3.Connection) -> None:
    conn.execute("DROP INDEX IF EXISTS idx_artifacts_kind")


SCHEMA_MIGRATIONS = [
    Migration("001", _create_artifacts, _drop_artifacts, "create artifacts"),
    Migration("002", _create_kind_index, _drop_kind_index, "index artifacts by kind"),
]


class MigrationManager:
    """Applies and reverts cache schema migrations."""

    def __init__(self, pool: ConnectionPool, migrations: Optional[List[Migration]] = None):
        self.pool = pool
        self.migrations: List[Migration] = []
        for migration in migrations if migrations is not None else SCHEMA_MIGRATIONS:
            self.register_migration(migration)
        self._init_migrations_table()

    def _init_migrations_table(self):
        with self.pool.get_connection() as conn:
            conn.execute(
                """
                CREATE TABLE IF NOT EXISTS migrations (
                    version TEXT PRIMARY KEY,
                    applied_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
                )
                """
            )
            conn.commit()

    def register_migration(self, migration: Migration):
        """
        Register a migration, keeping the list ordered by version.

        Raises:
            ValueError: If the version is already registered
        """
        if any(m.version == migration.version for m in self.migrations):
            raise ValueError(f"Migration version {migration.version} already exists")
        self.migrations.append(migration)
        self.migrations.sort(key=lambda m: m.version)

    def get_current_version(self) -> str:
        """Highest applied version, or '0' on a fresh cache."""
        with self.pool.get_connection() as conn:
            row = conn.execute(
                "SELECT version FROM migrations ORDER BY version DESC LIMIT 1"
            ).fetchone()
            return row[0] if row else "0"

    def _run(self, migration: Migration, forward: bool):
        with self.pool.get_connection() as conn:
            try:
                conn.execute("BEGIN")
                if forward:
                    migration.up(conn)
                    conn.execute("INSERT INTO migrations (version) VALUES (?)", (migration.version,))
                else:
                    migration.down(conn)
                    conn.execute("DELETE FROM migrations WHERE version = ?", (migration.version,))
                conn.commit()
            except sqlite3.Error as e:
                conn.rollback()
                direction = "apply" if forward else "revert"
                logger.error(f"Failed to {direction} migration {migration.version}: {e}")
                raise RuntimeError(f"Failed to {direction} migration {migration.version}: {e}")

    def migrate_up(self, target_version: Optional[str] = None):
        """Apply pending migrations up to target_version (default: all)."""
        current = self.get_current_version()
        for migration in self.migrations:
            if migration.version <= current:
                continue
            if target_version and migration.version > target_version:
                break
            self._run(migration, forward=True)
            logger.debug(f"Applied cache migration {migration.version} ({migration.name})")

    def migrate_down(self, target_version: str):
        """Revert applied migrations above target_version."""
        current = self.get_current_version()
        for migration in reversed(self.migrations):
            if migration.version > current or migration.version <= target_version:
                continue
            self._run(migration, forward=False)
            logger.debug(f"Reverted cache migration {migration.version}")

    def get_applied_migrations(self) -> List[Dict[str, str]]:
        with self.pool.get_connection() as conn:
            cursor = conn.execute("SELECT version, applied_at FROM migrations ORDER BY version")
            return [dict(row) for row in cursor.fetchall()]
