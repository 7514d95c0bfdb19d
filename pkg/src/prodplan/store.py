"""Append-oriented plan persistence.

One JSON-lines log per store directory: `put` appends a record carrying the
denormalized summary plus the full plan, `delete` appends a tombstone. A
record is durable (flushed and fsynced) before `put` returns. On open, only
summaries and byte offsets are indexed; full plan bodies are parsed lazily
on `get`, so listing never loads production matrices. A truncated final
line (crash mid-append) is ignored; corruption elsewhere is an error.

The writer is serialized by an in-process lock; readers see committed state
only. Layout and record format are documented in docs/storage.md. The store
directory defaults to the PRODPLAN_STORE environment variable.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .model import Plan
from .serialize import dumps_plan, plan_from_dict, plan_summary
from .dataset_io import canonical_dumps

LOG_NAME = "plans.log"
ENV_STORE_PATH = "PRODPLAN_STORE"


class StoreError(Exception):
    pass


class UnknownPlanError(KeyError):
    pass


@dataclass
class _Entry:
    summary: dict[str, Any]
    offset: int
    length: int
    deleted: bool = False


def default_store_path() -> Path:
    return Path(os.environ.get(ENV_STORE_PATH, "./plan-store"))


class PlanStore:
    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory is not None else default_store_path()
        self.directory.mkdir(parents=True, exist_ok=True)
        self.log_path = self.directory / LOG_NAME
        self._lock = threading.RLock()
        self._entries: dict[str, _Entry] = {}
        self._order: list[str] = []
        self.full_loads = 0  # diagnostic: number of full plan parses
        self._replay()

    def _replay(self) -> None:
        if not self.log_path.exists():
            self.log_path.touch()
            return
        offset = 0
        valid_end = 0
        with self.log_path.open("rb") as fh:
            for raw in fh:
                line_len = len(raw)
                if not raw.endswith(b"\n"):
                    break  # torn tail from a crash; ignore
                try:
                    record = json.loads(raw)
                except json.JSONDecodeError:
                    if offset + line_len >= self.log_path.stat().st_size:
                        break
                    raise StoreError(f"corrupt record at offset {offset}")
                self._apply(record, offset, line_len)
                offset += line_len
                valid_end = offset
        self._truncate_to(valid_end)

    def _truncate_to(self, size: int) -> None:
        if self.log_path.stat().st_size != size:
            with self.log_path.open("rb+") as fh:
                fh.truncate(size)

    def _apply(self, record: dict[str, Any], offset: int, length: int) -> None:
        op = record.get("op")
        if op == "put":
            pid = record["summary"]["id"]
            self._entries[pid] = _Entry(summary=record["summary"], offset=offset, length=length)
            self._order.append(pid)
        elif op == "delete":
            pid = record["id"]
            entry = self._entries.get(pid)
            if entry is not None:
                entry.deleted = True
        else:
            raise StoreError(f"unknown record op {op!r}")

    def put(self, plan: Plan) -> str:
        """Durably append a plan; returns its id once the bytes are on disk."""
        record = {
            "op": "put",
            "summary": plan_summary(plan),
            "plan": json.loads(dumps_plan(plan)),
        }
        line = canonical_dumps(record) + "\n"
        data = line.encode("utf-8")
        with self._lock:
            if plan.id in self._entries:
                raise StoreError(f"plan id {plan.id!r} already stored")
            with self.log_path.open("ab") as fh:
                offset = fh.tell()
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            self._apply(record, offset, len(data))
        return plan.id

    def get(self, plan_id: str) -> Plan:
        with self._lock:
            entry = self._entries.get(plan_id)
            if entry is None or entry.deleted:
                raise UnknownPlanError(plan_id)
            offset, length = entry.offset, entry.length
        with self.log_path.open("rb") as fh:
            fh.seek(offset)
            raw = fh.read(length)
        record = json.loads(raw)
        self.full_loads += 1
        return plan_from_dict(record["plan"])

    def exists(self, plan_id: str) -> bool:
        with self._lock:
            entry = self._entries.get(plan_id)
            return entry is not None and not entry.deleted

    def list(self) -> list[dict[str, Any]]:
        """Creation-ordered summaries of live plans.

        A plan whose parent was tombstoned keeps its parent_id and gets
        dangling_parent=True so callers can render a gap link.
        """
        with self._lock:
            out = []
            for pid in self._order:
                entry = self._entries[pid]
                if entry.deleted:
                    continue
                summary = dict(entry.summary)
                parent = summary.get("parent_id")
                summary["dangling_parent"] = bool(
                    parent is not None
                    and (parent not in self._entries or self._entries[parent].deleted)
                )
                out.append(summary)
            return out

    def delete(self, plan_id: str) -> None:
        with self._lock:
            entry = self._entries.get(plan_id)
            if entry is None or entry.deleted:
                raise UnknownPlanError(plan_id)
            line = canonical_dumps({"op": "delete", "id": plan_id}) + "\n"
            with self.log_path.open("ab") as fh:
                fh.write(line.encode("utf-8"))
                fh.flush()
                os.fsync(fh.fileno())
            entry.deleted = True

    def compact(self) -> None:
        """Rewrite the log without tombstoned records (atomic replace)."""
        with self._lock:
            tmp = self.log_path.with_suffix(".tmp")
            entries: dict[str, _Entry] = {}
            order: list[str] = []
            with self.log_path.open("rb") as src, tmp.open("wb") as dst:
                offset = 0
                for pid in self._order:
                    entry = self._entries[pid]
                    if entry.deleted:
                        continue
                    src.seek(entry.offset)
                    raw = src.read(entry.length)
                    dst.write(raw)
                    entries[pid] = _Entry(summary=entry.summary, offset=offset, length=len(raw))
                    order.append(pid)
                    offset += len(raw)
                dst.flush()
                os.fsync(dst.fileno())
            os.replace(tmp, self.log_path)
            self._entries = entries
            self._order = order
