import sqlite3

import pytest

from glrank.core.connection_pool import ConnectionPool
from glrank.core.store import ArtifactStore
from glrank.migrations import SCHEMA_MIGRATIONS, Migration, MigrationManager


@pytest.fixture
def pool(tmp_path):
    """Create a pool on an empty database."""
    pool = ConnectionPool(str(tmp_path / "migrations.db"))
    yield pool
    pool.close_all()


def _tables(pool):
    with pool.get_connection() as conn:
        rows = conn.execute("SELECT name FROM sqlite_master WHERE type = 'table'").fetchall()
    return {row[0] for row in rows}


def test_store_applies_schema(tmp_path):
    """Test that opening a store brings the schema up to date."""
    with ArtifactStore(tmp_path / "cache") as store:
        manager = MigrationManager(store.pool)
        applied = manager.get_applied_migrations()
        assert [m["version"] for m in applied] == ["001", "002"]
        assert manager.get_current_version() == "002"
    with ArtifactStore(tmp_path / "cache") as store:
        assert len(MigrationManager(store.pool).get_applied_migrations()) == 2


def test_migrate_up_and_down(pool):
    """Test applying to a target version and rolling back."""
    manager = MigrationManager(pool)
    assert manager.get_current_version() == "0"
    assert manager.get_applied_migrations() == []

    manager.migrate_up("001")
    assert manager.get_current_version() == "001"
    assert "artifacts" in _tables(pool)

    manager.migrate_up()
    assert manager.get_current_version() == "002"

    manager.migrate_down("0")
    assert manager.get_applied_migrations() == []
    assert "artifacts" not in _tables(pool)


def test_migration_errors(pool):
    """Test duplicate versions and failing migrations."""
    manager = MigrationManager(pool)
    with pytest.raises(ValueError, match="already exists"):
        manager.register_migration(SCHEMA_MIGRATIONS[0])

    def broken(conn: sqlite3.Connection) -> None:
        conn.execute("CREATE TABLE artifacts_broken (")

    manager = MigrationManager(pool, [Migration("001", broken, lambda conn: None, "broken")])
    with pytest.raises(RuntimeError, match="Failed to apply migration 001"):
        manager.migrate_up()
    assert manager.get_applied_migrations() == []


def test_migrations_sorted_by_version(pool):
    """Test that registration keeps migrations ordered."""
    calls = []
    steps = [
        Migration("002", lambda conn: calls.append("002"), lambda conn: None),
        Migration("001", lambda conn: calls.append("001"), lambda conn: None),
    ]
    manager = MigrationManager(pool, steps)
    manager.migrate_up()
    assert calls == ["001", "002"]
