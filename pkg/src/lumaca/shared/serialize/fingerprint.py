from __future__ import annotations

import hashlib
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Iterable


def digest(data: bytes, *, person: bytes = b"") -> bytes:
    """
    Digest of a single artifact.

    Returns 32-byte (256-bit) hash - same security level as SHA256.
    """
    h = hashlib.blake2b(digest_size=32, person=b"lm:one:" + person[:9])
    h.update(len(data).to_bytes(8, "big"))
    h.update(data)
    return h.digest()


def combine_ordered(parts: Iterable[bytes], *, person: bytes = b"") -> bytes:
    """
    Combine digests where order matters (use for the manifest total).

    Returns 32-byte (256-bit) hash - same security level as SHA256.
    """
    h = hashlib.blake2b(
        digest_size=32,
        person=b"lm:ord:" + person[:9],
    )
    parts = list(parts)
    h.update(len(parts).to_bytes(8, "big"))
    for d in parts:
        h.update(len(d).to_bytes(4, "big"))
        h.update(d)
    return h.digest()
