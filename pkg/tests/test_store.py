import hashlib
import logging

import pytest

from glrank.core.store import ArtifactKind, ArtifactStore, checksum
from glrank.operations import ArtifactBatch


@pytest.fixture
def store(tmp_path):
    """Create a scratch artifact cache."""
    store = ArtifactStore(tmp_path / "cache")
    yield store
    store.close()


def test_put_and_get(store):
    """Test storing and reading artifacts."""
    digest = store.put("group-a", ArtifactKind.GROUP, b"payload")
    assert digest == hashlib.sha256(b"payload").hexdigest()
    assert store.get("group-a") == b"payload"
    assert store.get("missing") is None

    store.put("group-a", "group", b"replaced")
    assert store.get("group-a") == b"replaced"

    with pytest.raises(ValueError):
        store.put("x", "bogus", b"")


def test_json_artifacts(store):
    """Test JSON payloads."""
    store.put_json("report-1", ArtifactKind.REPORT, {"b": 1, "a": [1, 2]})
    assert store.get_json("report-1") == {"a": [1, 2], "b": 1}
    assert store.get_json("report-2") is None


def test_list_and_delete(store):
    """Test listing by kind and deleting."""
    store.put("g", ArtifactKind.GROUP, b"1")
    store.put("c", ArtifactKind.CHARTAB, b"22")
    store.put("r", ArtifactKind.REPORT, b"333")
    assert [info.key for info in store.list()] == ["c", "g", "r"]
    groups = store.list(ArtifactKind.GROUP)
    assert len(groups) == 1
    info = groups[0].to_json()
    assert info["key"] == "g"
    assert info["size"] == 1
    assert info["checksum"] == checksum(b"1")

    assert store.delete("g") is True
    assert store.delete("g") is False
    assert store.clear() == 2
    assert store.list() == []


def test_corruption_detected(store, caplog):
    """Test that tampered payloads are discarded."""
    store.put("good", ArtifactKind.GROUP, b"fine")
    store.put("bad", ArtifactKind.GROUP, b"original")
    with store.pool.get_connection() as conn:
        conn.execute("UPDATE artifacts SET payload = ? WHERE key = ?", (b"tampered", "bad"))
        conn.commit()

    assert store.verify() == {"good": True, "bad": False}
    assert store.get("bad") is None

    store.put("bad", ArtifactKind.GROUP, b"original")
    with store.pool.get_connection() as conn:
        conn.execute("UPDATE artifacts SET payload = ? WHERE key = ?", (b"tampered", "bad"))
        conn.commit()
    with caplog.at_level(logging.WARNING):
        assert store.get("bad") is None
    assert "Checksum mismatch" in caplog.text
    assert [info.key for info in store.list()] == ["good"]


def test_reopen_keeps_artifacts(tmp_path):
    """Test that a cache survives reopening."""
    with ArtifactStore(tmp_path / "cache") as store:
        store.put("k", ArtifactKind.REPORT, b"v")
    with ArtifactStore(tmp_path / "cache") as store:
        assert store.get("k") == b"v"


def test_unusable_cache_dir(tmp_path):
    """Test the error for a cache path under a regular file."""
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(RuntimeError, match="Failed to create cache directory"):
        ArtifactStore(blocker / "cache")


def test_batch_helper(store):
    """Test that a store batch keeps its connection checked out until it commits."""
    with store.batch() as batch:
        assert isinstance(batch, ArtifactBatch)
        assert store.pool.active == 1
        batch.put_many([("a", ArtifactKind.REPORT, b"1"), ("b", ArtifactKind.REPORT, b"2")])
    assert store.pool.active == 0
    assert store.get("b") == b"2"


def test_batch_helper_rolls_back(store):
    """Test that an error inside a store batch discards every write in it."""
    with pytest.raises(ValueError, match="abort"):
        with store.batch() as batch:
            batch.put_many([("a", ArtifactKind.REPORT, b"1"), ("b", ArtifactKind.REPORT, b"2")])
            raise ValueError("abort")
    assert store.get("a") is None
    assert store.pool.active == 0
