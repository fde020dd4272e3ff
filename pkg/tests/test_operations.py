import pytest

from glrank.core.store import ArtifactKind, ArtifactStore
from glrank.operations import ArtifactBatch


@pytest.fixture
def store(tmp_path):
    """Create a scratch artifact cache."""
    store = ArtifactStore(tmp_path / "cache")
    yield store
    store.close()


@pytest.fixture
def connection(store):
    with store.pool.get_connection() as conn:
        yield conn


def test_batch_init(connection):
    """Test batch writer initialization."""
    batch = ArtifactBatch(connection)
    assert batch.retry_count == 3

    with pytest.raises(TypeError):
        ArtifactBatch("not a connection")


def test_batch_transaction(store, connection):
    """Test commit and rollback."""
    batch = ArtifactBatch(connection)

    with batch:
        batch.put_many([("k1", ArtifactKind.REPORT, b"one")])
        assert connection.in_transaction
    assert not connection.in_transaction
    assert store.get("k1") == b"one"

    with pytest.raises(Exception, match="Test error"):
        with batch:
            batch.put_many([("k2", ArtifactKind.REPORT, b"two")])
            raise Exception("Test error")
    assert not connection.in_transaction
    assert store.get("k2") is None


def test_transaction_context(store, connection):
    """Test the transaction() helper."""
    batch = ArtifactBatch(connection)
    with batch.transaction():
        checksums = batch.put_many(
            [(f"r{i}", ArtifactKind.REPORT, str(i).encode()) for i in range(5)]
        )
        assert batch.delete_many(["r0", "r1", "missing"]) == 2
    assert len(checksums) == 5
    assert [info.key for info in store.list()] == ["r2", "r3", "r4"]

    with pytest.raises(ValueError):
        with batch.transaction():
            batch.put_many([("r5", ArtifactKind.REPORT, b"5")])
            raise ValueError("abort")
    assert store.get("r5") is None


def test_batch_many_rows(store, connection):
    """Test a write larger than one executemany chunk."""
    batch = ArtifactBatch(connection)
    batch._calculate_optimal_batch_size = lambda payloads: 7
    digests = batch.put_many([(f"k{i}", ArtifactKind.GROUP, b"x") for i in range(100)])

    assert len(digests) == 100
    assert len(store.list(ArtifactKind.GROUP)) == 100


def test_empty_batches(connection):
    """Test that empty inputs are no-ops."""
    batch = ArtifactBatch(connection)
    assert batch.put_many([]) == []
    assert batch.delete_many([]) == 0


def test_batch_size_optimization(connection):
    """Test batch size optimization."""
    batch = ArtifactBatch(connection)

    small = [b"small"] * 1000
    assert batch._calculate_optimal_batch_size(small) == 1000

    large = [b"x" * 100000] * 1000
    assert batch._calculate_optimal_batch_size(large) < 1000
