"""Checksummed sqlite cache for group tables, character tables and reports."""

import hashlib
import json
import logging
import sqlite3
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Dict, Iterator, List, Optional, Union

from ..migrations.manager import MigrationManager
from .connection_pool import ConnectionPool

if TYPE_CHECKING:
    from ..operations import ArtifactBatch

logger = logging.getLogger(__name__)

ARTIFACT_SCHEMA = "1"
DB_NAME = "cache.db"


class ArtifactKind(str, Enum):
    GROUP = "group"
    CHARTAB = "chartab"
    CHARTAB_JSON = "chartab-json"
    REPORT = "report"


@dataclass(frozen=True)
class ArtifactInfo:
    key: str
    kind: str
    size: int
    created_at: str
    checksum: str

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "kind": self.kind,
            "size": self.size,
            "created_at": self.created_at,
            "checksum": self.checksum,
        }


def checksum(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def encode_json(data: dict) -> bytes:
    return json.dumps(data, sort_keys=True).encode()


class ArtifactStore:
    """Key-value artifact cache on top of a pooled sqlite database."""

    def __init__(self, cache_dir: Union[str, Path], max_connections: int = 10):
        self.cache_dir = Path(cache_dir)
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise RuntimeError(f"Failed to create cache directory {self.cache_dir}: {e}")
        self.db_path = str(self.cache_dir / DB_NAME)
        try:
            self.pool = ConnectionPool(self.db_path, max_connections)
        except sqlite3.Error as e:
            raise RuntimeError(f"Failed to initialize cache connection pool: {e}")
        self._init_db()

    def _init_db(self) -> None:
        with self.pool.get_connection() as conn:
            try:
                conn.execute("PRAGMA journal_mode=WAL")
                conn.execute("PRAGMA synchronous=NORMAL")
            except sqlite3.Error as e:
                logger.error(f"Failed to configure cache database: {e}")
                raise RuntimeError(f"Failed to configure cache database: {e}")
        MigrationManager(self.pool).migrate_up()

    def close(self) -> None:
        self.pool.close_all()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def put(
        self,
        key: str,
        kind: Union[ArtifactKind, str],
        payload: bytes,
        schema: str = ARTIFACT_SCHEMA,
    ) -> str:
        """Store (or replace) one artifact and return its checksum."""
        kind = ArtifactKind(kind)
        digest = checksum(payload)
        with self.pool.get_connection() as conn:
            try:
                conn.execute(
                    "INSERT OR REPLACE INTO artifacts (key, kind, schema, checksum, size, payload) "
                    "VALUES (?, ?, ?, ?, ?, ?)",
                    (key, kind.value, schema, digest, len(payload), sqlite3.Binary(payload)),
                )
                conn.commit()
            except sqlite3.Error as e:
                conn.rollback()
                logger.error(f"Failed to store artifact {key}: {e}")
                raise RuntimeError(f"Failed to store artifact {key}: {e}")
        logger.debug(f"Cached {kind.value} artifact {key} ({len(payload)} bytes)")
        return digest

    def get(self, key: str) -> Optional[bytes]:
        """Payload for key, or None when missing or corrupted.

        A corrupted row is deleted so the caller recomputes it.
        """
        with self.pool.get_connection() as conn:
            try:
                row = conn.execute(
                    "SELECT payload, checksum FROM artifacts WHERE key = ?", (key,)
                ).fetchone()
            except sqlite3.Error as e:
                logger.error(f"Failed to read artifact {key}: {e}")
                raise RuntimeError(f"Failed to read artifact {key}: {e}")
        if row is None:
            return None
        payload = bytes(row["payload"])
        if checksum(payload) != row["checksum"]:
            logger.warning(f"Checksum mismatch for cached artifact {key}; discarding it")
            self.delete(key)
            return None
        return payload

    def put_json(self, key: str, kind: Union[ArtifactKind, str], data: dict) -> str:
        return self.put(key, kind, encode_json(data))

    def get_json(self, key: str) -> Optional[dict]:
        payload = self.get(key)
        return None if payload is None else json.loads(payload.decode())

    def delete(self, key: str) -> bool:
        with self.pool.get_connection() as conn:
            try:
                cursor = conn.execute("DELETE FROM artifacts WHERE key = ?", (key,))
                conn.commit()
            except sqlite3.Error as e:
                conn.rollback()
                logger.error(f"Failed to delete artifact {key}: {e}")
                raise RuntimeError(f"Failed to delete artifact {key}: {e}")
        return cursor.rowcount > 0

    def list(self, kind: Optional[Union[ArtifactKind, str]] = None) -> List[ArtifactInfo]:
        query = "SELECT key, kind, size, created_at, checksum FROM artifacts"
        params: tuple = ()
        if kind is not None:
            query += " WHERE kind = ?"
            params = (ArtifactKind(kind).value,)
        with self.pool.get_connection() as conn:
            rows = conn.execute(query + " ORDER BY key", params).fetchall()
        return [
            ArtifactInfo(r["key"], r["kind"], r["size"], str(r["created_at"]), r["checksum"])
            for r in rows
        ]

    def clear(self) -> int:
        """Remove every artifact; returns how many were removed."""
        with self.pool.get_connection() as conn:
            try:
                cursor = conn.execute("DELETE FROM artifacts")
                conn.commit()
            except sqlite3.Error as e:
                conn.rollback()
                logger.error(f"Failed to clear cache: {e}")
                raise RuntimeError(f"Failed to clear cache: {e}")
        return cursor.rowcount

    def verify(self) -> Dict[str, bool]:
        """Recheck every checksum, deleting the rows that fail."""
        with self.pool.get_connection() as conn:
            rows = conn.execute("SELECT key, payload, checksum FROM artifacts").fetchall()
        result = {}
        for row in rows:
            ok = checksum(bytes(row["payload"])) == row["checksum"]
            result[row["key"]] = ok
            if not ok:
                logger.warning(f"Corrupted artifact {row['key']} removed")
                self.delete(row["key"])
        return result

    @contextmanager
    def batch(self) -> Iterator["ArtifactBatch"]:
        """Batch writer holding this thread's connection for one transaction.

        Writes commit together when the block exits and roll back if it raises.
        """
        from ..operations import ArtifactBatch

        with self.pool.get_connection() as conn:
            batch = ArtifactBatch(conn)
            with batch.transaction():
                yield batch
