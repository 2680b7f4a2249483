#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Append-only response cache with a request hash index """

import json
import logging
import os
import threading
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Iterator, Optional, Set, Tuple

from utils import sha256Hex

from .prompts import PromptRecord

RECORD_FILE = "responses.jsonl"
INDEX_FILE = "responses.index"


def requestHash(modelName: str, prompt: PromptRecord) -> str:
    """
    Cache key of a request: digest of the model, the template version and the rendered text.
    """
    return sha256Hex(modelName, prompt.templateVersion, prompt.renderedText)


@dataclass(frozen=True)
class CacheEntry:
    """
    One cached model answer.

    Attributes:
        requestHash: str
        kind: str
            Prompt kind.
        node: int
            Central node of the prompt.
        model: str
        templateVersion: str
        rawResponse: str
        parsed: Optional[Dict[str, Any]]
            Parsed fragment, None until the answer has been parsed successfully.
        exposedNodes: Tuple[int, ...]
            Nodes whose texts the prompt carried.
        promptTokens: int
        responseTokens: int
        estimated: bool
        timestamp: float
    """
    requestHash: str
    kind: str
    node: int
    model: str
    templateVersion: str
    rawResponse: str
    parsed: Optional[Dict[str, Any]] = None
    exposedNodes: Tuple[int, ...] = ()
    promptTokens: int = 0
    responseTokens: int = 0
    estimated: bool = True
    timestamp: float = field(default_factory=time.time)

    def withParsed(self, parsed: Dict[str, Any]) -> 'CacheEntry':
        return replace(self, parsed=parsed, timestamp=time.time())

    def toRecord(self) -> Dict[str, Any]:
        record = asdict(self)
        record["exposedNodes"] = list(self.exposedNodes)
        return record

    @staticmethod
    def fromRecord(record: Dict[str, Any]) -> 'CacheEntry':
        record = dict(record)
        record["exposedNodes"] = tuple(int(n) for n in record.get("exposedNodes", ()))
        return CacheEntry(**record)


class ResponseCache:
    """
    This class implements a replayable store of model answers.

    Entries are appended to a line-delimited JSON file; an index file maps each
    request hash to the byte offset of its latest record. Writes are serialized,
    so the cache can be shared by concurrent annotation workers.

    Attributes:
        directory: str
            Directory holding the record and index files.
    """
    def __init__(self, directory: str) -> None:
        """
        The constructor for ResponseCache class. Creates the directory if needed
        and loads the index, rebuilding it from the records when it is missing.

        Parameters:
            directory: str
                Cache directory.
        """
        os.makedirs(directory, exist_ok=True)
        self.directory = directory
        self.recordPath = os.path.join(directory, RECORD_FILE)
        self.indexPath = os.path.join(directory, INDEX_FILE)
        self._lock = threading.Lock()
        self._offsets: Dict[str, int] = {}
        if os.path.isfile(self.recordPath) and not os.path.isfile(self.indexPath):
            self._rebuildIndex()
        elif os.path.isfile(self.indexPath):
            self._loadIndex()
        logging.debug(f"Response cache at {directory} holds {len(self._offsets)} requests.")

    def _loadIndex(self) -> None:
        with open(self.indexPath, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    digest, offset = line.rstrip("\n").split("\t")
                    self._offsets[digest] = int(offset)

    def _rebuildIndex(self) -> None:
        logging.info(f"Rebuilding response cache index from {self.recordPath}.")
        with open(self.recordPath, "rb") as fh:
            offset = 0
            for line in fh:
                if line.strip():
                    self._offsets[json.loads(line)["requestHash"]] = offset
                offset += len(line)
        with open(self.indexPath, "w", encoding="utf-8") as fh:
            for digest, offset in self._offsets.items():
                fh.write(f"{digest}\t{offset}\n")

    def __len__(self) -> int:
        return len(self._offsets)

    def __contains__(self, digest: str) -> bool:
        return digest in self._offsets

    def get(self, digest: str) -> Optional[CacheEntry]:
        """
        Latest entry stored under digest, None on a miss.
        """
        offset = self._offsets.get(digest)
        if offset is None:
            return None
        with self._lock, open(self.recordPath, "rb") as fh:
            fh.seek(offset)
            return CacheEntry.fromRecord(json.loads(fh.readline()))

    def put(self, entry: CacheEntry) -> None:
        """
        Appends entry; it supersedes any earlier entry with the same request hash.
        """
        line = (json.dumps(entry.toRecord(), ensure_ascii=False, sort_keys=True) + "\n").encode("utf-8")
        with self._lock:
            with open(self.recordPath, "ab") as fh:
                fh.seek(0, os.SEEK_END)
                offset = fh.tell()
                fh.write(line)
            with open(self.indexPath, "a", encoding="utf-8") as fh:
                fh.write(f"{entry.requestHash}\t{offset}\n")
            self._offsets[entry.requestHash] = offset

    def entries(self) -> Iterator[CacheEntry]:
        """
        Latest entry of every cached request.
        """
        for digest in list(self._offsets):
            entry = self.get(digest)
            if entry is not None:
                yield entry

    def exposedNodes(self) -> Set[int]:
        """
        Every node whose text appears in a cached request, for exposure audits.
        """
        exposed: Set[int] = set()
        for entry in self.entries():
            exposed.update(entry.exposedNodes)
        return exposed
