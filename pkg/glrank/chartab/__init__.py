"""Exact character-table oracle for small GL_n, SL_n and S_n.

``load_character_table`` is the usual entry point: it enumerates the group,
runs Dixon-Schneider and caches both tables when a store is given.
"""

import logging
from typing import Optional, Tuple

from ..core.config import Caps
from ..core.store import ArtifactKind, ArtifactStore, encode_json
from ..errors import InvalidInputError
from ..matgroup import GroupKind, GroupTable, enumerate_group, get_field, group_key
from .cyclotomic import CyclotomicField, get_cyclotomic_field
from .dixon import CharacterTable, character_table, linear_characters, twist_index
from .ranks import (
    FiltrationReport,
    HkVariant,
    RankReport,
    filtration_check,
    omega_tensor_character,
    rank,
    rank_report,
    rank_via_Hk,
    strict_rank,
)
from .restriction import RestrictionReport, restrict_to_sl
from .symmetric import identify_irreps, pieri_from_oracle

logger = logging.getLogger(__name__)


def load_group(
    kind: GroupKind,
    n: int,
    q_value: int,
    caps: Optional[Caps] = None,
    store: Optional[ArtifactStore] = None,
    progress: bool = False,
) -> GroupTable:
    """Enumerated group, read from the cache when present."""
    caps = caps or Caps()
    kind = GroupKind(kind)
    if kind == GroupKind.SYM:
        q_value = 2
    field = get_field(q_value, caps.field_order)
    key = group_key(kind, n, field)
    if store is not None:
        payload = store.get(key)
        if payload is not None:
            try:
                return GroupTable.from_bytes(payload)
            except InvalidInputError as e:
                logger.warning(f"Discarding unreadable cached group {key}: {e}")
                store.delete(key)
    table = enumerate_group(kind, n, field, caps.group_order, progress)
    if store is not None:
        store.put(key, ArtifactKind.GROUP, table.to_bytes())
    return table


def load_character_table(
    kind: GroupKind,
    n: int,
    q_value: int,
    caps: Optional[Caps] = None,
    store: Optional[ArtifactStore] = None,
    progress: bool = False,
    workers: int = 1,
) -> Tuple[GroupTable, CharacterTable]:
    """Group and character table, both cached; fresh tables are checked first.

    Raises:
        ResourceLimitError: If the group order or class count exceeds its cap
        VerificationError: If a fresh table fails orthogonality
    """
    caps = caps or Caps()
    table = load_group(kind, n, q_value, caps, store, progress)
    key = f"chartab-{table.cache_key}"
    if store is not None:
        payload = store.get(key)
        if payload is not None:
            try:
                return table, CharacterTable.from_bytes(payload, table)
            except InvalidInputError as e:
                logger.warning(f"Discarding unreadable cached table {key}: {e}")
                store.delete(key)
    ct = character_table(table, caps.class_count, progress, workers)
    ct.check_orthogonality()
    if store is not None:
        with store.batch() as batch:
            batch.put_many(
                [
                    (key, ArtifactKind.CHARTAB, ct.to_bytes()),
                    (f"{key}.json", ArtifactKind.CHARTAB_JSON, encode_json(ct.to_json())),
                ]
            )
    return table, ct


__all__ = [
    "CharacterTable",
    "CyclotomicField",
    "FiltrationReport",
    "HkVariant",
    "RankReport",
    "RestrictionReport",
    "character_table",
    "filtration_check",
    "get_cyclotomic_field",
    "identify_irreps",
    "linear_characters",
    "load_character_table",
    "load_group",
    "omega_tensor_character",
    "pieri_from_oracle",
    "rank",
    "rank_report",
    "rank_via_Hk",
    "restrict_to_sl",
    "strict_rank",
    "twist_index",
]
