import logging
import sqlite3
import time
from contextlib import contextmanager
from typing import List, Sequence, Tuple, Union

from .core.store import ARTIFACT_SCHEMA, ArtifactKind, checksum

logger = logging.getLogger(__name__)

BATCH_SIZE = 1000
BATCH_BYTES = 16_000_000

ArtifactItem = Tuple[str, Union[ArtifactKind, str], bytes]


class ArtifactBatch:
    """Write many cache artifacts inside one sqlite transaction."""

    def __init__(self, connection: sqlite3.Connection):
        """Initialize with an open cache connection."""
        if not isinstance(connection, sqlite3.Connection):
            raise TypeError("Expected sqlite3.Connection object")
        self.connection = connection
        self._transaction_active = False
        self.retry_count = 3
        self.retry_delay = 0.1

    def _calculate_optimal_batch_size(self, payloads: Sequence[bytes]) -> int:
        """Rows per executemany, keeping each batch around BATCH_BYTES."""
        sample = payloads[:100]
        average = sum(len(p) for p in sample) / max(1, len(sample))
        return min(BATCH_SIZE, max(1, int(BATCH_BYTES / max(average, 1))))

    def __enter__(self):
        """Start an immediate transaction, retrying while the cache is locked."""
        if self._transaction_active:
            return self
        for attempt in range(self.retry_count):
            try:
                self.connection.execute("BEGIN IMMEDIATE")
                self._transaction_active = True
                return self
            except sqlite3.OperationalError as e:
                if "within a transaction" in str(e):
                    return self
                if "locked" not in str(e) or attempt == self.retry_count - 1:
                    logger.error(f"Failed to begin cache transaction: {e}")
                    raise
                time.sleep(self.retry_delay * (attempt + 1))
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Commit on success, roll back on error."""
        if exc_type is None and self._transaction_active:
            try:
                self.connection.commit()
            except sqlite3.Error:
                self.connection.rollback()
                raise
        elif self._transaction_active:
            try:
                self.connection.rollback()
            except sqlite3.Error:
                pass
        self._transaction_active = False

    @contextmanager
    def transaction(self):
        """
        Context manager for a batch transaction.

        Usage:
            with batch.transaction():
                batch.put_many(...)
                batch.delete_many(...)
        """
        self.__enter__()
        try:
            yield self
        except Exception as e:
            self.__exit__(type(e), e, None)
            raise
        else:
            self.__exit__(None, None, None)

    def put_many(self, items: Sequence[ArtifactItem]) -> List[str]:
        """Insert or replace artifacts; returns their checksums in order."""
        if not items:
            return []
        rows = []
        for key, kind, payload in items:
            rows.append(
                (
                    key,
                    ArtifactKind(kind).value,
                    ARTIFACT_SCHEMA,
                    checksum(payload),
                    len(payload),
                    sqlite3.Binary(payload),
                )
            )
        batch_size = self._calculate_optimal_batch_size([item[2] for item in items])
        total = len(rows)
        try:
            for i in range(0, total, batch_size):
                self.connection.executemany(
                    "INSERT OR REPLACE INTO artifacts (key, kind, schema, checksum, size, payload) "
                    "VALUES (?, ?, ?, ?, ?, ?)",
                    rows[i : i + batch_size],
                )
            if not self._transaction_active:
                self.connection.commit()
        except sqlite3.Error as e:
            if not self._transaction_active:
                self.connection.rollback()
            logger.error(f"Failed to write artifact batch: {e}")
            raise RuntimeError(f"Failed to write artifact batch: {e}")
        return [row[3] for row in rows]

    def delete_many(self, keys: Sequence[str]) -> int:
        if not keys:
            return 0
        removed = 0
        try:
            for i in range(0, len(keys), BATCH_SIZE):
                batch = list(keys[i : i + BATCH_SIZE])
                placeholders = ",".join("?" for _ in batch)
                cursor = self.connection.execute(
                    f"DELETE FROM artifacts WHERE key IN ({placeholders})", batch
                )
                removed += cursor.rowcount
            if not self._transaction_active:
                self.connection.commit()
        except sqlite3.Error as e:
            if not self._transaction_active:
                self.connection.rollback()
            logger.error(f"Failed to delete artifact batch: {e}")
            raise RuntimeError(f"Failed to delete artifact batch: {e}")
        return removed
