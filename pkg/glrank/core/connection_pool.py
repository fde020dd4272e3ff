import sqlite3
import threading
import time
from contextlib import contextmanager
from typing import Dict, Generator, Set


class ConnectionPool:
    """Per-thread sqlite connections to the artifact cache."""

    def __init__(self, db_path: str, max_connections: int = 10):
        """
        Initialize a new connection pool.

        Args:
            db_path: Path to the cache database file
            max_connections: Maximum number of concurrent checkouts
        """
        self.db_path = db_path
        self.max_connections = max_connections
        self.connection_timeout = 30  # seconds
        self.max_connection_age = 3600
        self._connections: Dict[int, sqlite3.Connection] = {}
        self._timestamps: Dict[int, float] = {}
        self._checked_out: Set[int] = set()
        self._next_checkout = 0
        self._lock = threading.Lock()

    def _open(self) -> sqlite3.Connection:
        conn = sqlite3.connect(
            self.db_path, timeout=self.connection_timeout, check_same_thread=False
        )
        conn.row_factory = sqlite3.Row
        return conn

    @contextmanager
    def get_connection(self) -> Generator[sqlite3.Connection, None, None]:
        """
        Check out the calling thread's connection.

        Raises:
            RuntimeError: If max_connections checkouts are already active
        """
        thread_id = threading.get_ident()
        with self._lock:
            if len(self._checked_out) >= self.max_connections:
                raise RuntimeError("Connection pool exhausted")
            checkout = self._next_checkout
            self._next_checkout += 1
            conn = self._connections.get(thread_id)
            if conn is None or not self._check_connection_health(conn):
                conn = self._open()
                self._connections[thread_id] = conn
                self._timestamps[thread_id] = time.time()
            self._checked_out.add(checkout)

        try:
            yield conn
        finally:
            with self._lock:
                self._checked_out.discard(checkout)
                now = time.time()
                if now - self._timestamps.get(thread_id, now) > self.max_connection_age:
                    conn.close()
                    self._connections[thread_id] = self._open()
                    self._timestamps[thread_id] = now

    @property
    def active(self) -> int:
        return len(self._checked_out)

    def close_all(self):
        """Close all connections in the pool."""
        with self._lock:
            for conn in self._connections.values():
                try:
                    conn.close()
                except sqlite3.Error:
                    pass
            self._connections.clear()
            self._timestamps.clear()
            self._checked_out.clear()

    def _check_connection_health(self, conn: sqlite3.Connection) -> bool:
        try:
            conn.execute("SELECT 1").fetchone()
            return True
        except sqlite3.Error:
            return False

    def cleanup_dead_connections(self):
        """Close connections owned by threads that have exited."""
        alive = {t.ident for t in threading.enumerate() if t.ident is not None}
        with self._lock:
            for thread_id in [t for t in self._connections if t not in alive]:
                try:
                    self._connections[thread_id].close()
                except sqlite3.Error:
                    pass
                del self._connections[thread_id]
                self._timestamps.pop(thread_id, None)
