from __future__ import annotations

import datetime
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

from lumaca.shared.serialize.encoder import dumps
from lumaca.shared.serialize.fingerprint import combine_ordered, digest

if TYPE_CHECKING:
    import polars as pl

logger = logging.getLogger(__name__)

__all__ = [
    "ArtifactWriter",
    "atomic_write",
    "frame_to_csv",
]


def atomic_write(path: Path | str, data: bytes) -> Path:
    """
    Write ``data`` to ``path`` through a temporary file and a rename.

    Readers never observe a partially written artifact.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(
        prefix=f".{path.name}.", suffix=".tmp", dir=path.parent
    )
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def frame_to_csv(frame: pl.DataFrame) -> bytes:
    """Comma separated, '.' decimal, header row, LF line endings."""
    text = frame.write_csv(
        None,
        separator=",",
        include_header=True,
        line_terminator="\n",
    )
    return text.encode("utf-8")


@dataclass
class ArtifactWriter:
    """
    Writes the artifacts of one run below ``root`` and records them.

    Every artifact is hashed as it is written; ``write_manifest`` lists them
    in write order together with an ordered digest over all of them.
    """

    root: Path
    command: str
    config_digest: str = ""
    _records: list[dict[str, Any]] = field(default_factory=list)
    _digests: list[bytes] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.root = Path(self.root)

    @property
    def artifacts(self) -> list[dict[str, Any]]:
        return list(self._records)

    def write_bytes(self, relpath: str, data: bytes) -> Path:
        path = atomic_write(self.root / relpath, data)
        d = digest(data, person=b"artifact")
        self._digests.append(d)
        self._records.append(
            {"path": relpath, "blake2b": d.hex(), "bytes": len(data)}
        )
        logger.debug("wrote %s (%d bytes)", path, len(data))
        return path

    def write_json(self, relpath: str, obj: Any) -> Path:
        return self.write_bytes(relpath, dumps(obj).encode("utf-8"))

    def write_csv(self, relpath: str, frame: pl.DataFrame) -> Path:
        return self.write_bytes(relpath, frame_to_csv(frame))

    def manifest(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "config_digest": self.config_digest,
            "artifacts": self.artifacts,
            "digest": combine_ordered(self._digests, person=b"manifest").hex(),
            "created_at": datetime.datetime.now(datetime.timezone.utc)
            .replace(microsecond=0)
            .isoformat(),
        }

    def write_manifest(self) -> Path:
        path = atomic_write(
            self.root / "manifest.json",
            dumps(self.manifest()).encode("utf-8"),
        )
        logger.info("manifest written to %s", path)
        return path
