"""Second-chance (clock) memo table whose writes can be rolled back."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable

__all__ = ["ExpansionCache", "DEFAULT_CAPACITY"]

DEFAULT_CAPACITY = 1024


@dataclass
class _Slot:
    key: Hashable
    value: Any
    ref: bool = True


@dataclass
class ExpansionCache:
    capacity: int = DEFAULT_CAPACITY
    slots: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    hand: int = 0
    hits: int = 0
    misses: int = 0

    def __post_init__(self):
        if self.capacity < 0:
            raise ValueError("cache capacity must be non-negative")

    def __len__(self):
        return len(self.index)

    def __contains__(self, key):
        return key in self.index

    def get(self, key, default=None):
        pos = self.index.get(key)
        if pos is None:
            self.misses += 1
            return default
        slot = self.slots[pos]
        slot.ref = True
        self.hits += 1
        return slot.value

    def put(self, key, value):
        """Insert or overwrite; returns an undo record (or None when nothing changed)."""
        if self.capacity == 0:
            return None
        pos = self.index.get(key)
        if pos is not None:
            slot = self.slots[pos]
            rec = ("set", pos, slot.value, slot.ref, self.hand)
            slot.value, slot.ref = value, True
            return rec
        if len(self.slots) < self.capacity:
            self.slots.append(_Slot(key, value))
            self.index[key] = len(self.slots) - 1
            return ("append", key, self.hand)
        start, cleared = self.hand, []
        while True:
            slot = self.slots[self.hand]
            if slot.ref:
                slot.ref = False
                cleared.append(self.hand)
                self.hand = (self.hand + 1) % self.capacity
                continue
            pos = self.hand
            rec = ("evict", pos, slot.key, slot.value, slot.ref, start, tuple(cleared))
            del self.index[slot.key]
            self.slots[pos] = _Slot(key, value)
            self.index[key] = pos
            self.hand = (self.hand + 1) % self.capacity
            return rec

    def undo(self, rec):
        tag = rec[0]
        if tag == "append":
            _, key, hand = rec
            self.slots.pop()
            del self.index[key]
            self.hand = hand
        elif tag == "set":
            _, pos, value, ref, hand = rec
            slot = self.slots[pos]
            slot.value, slot.ref = value, ref
            self.hand = hand
        else:
            _, pos, key, value, ref, hand, cleared = rec
            del self.index[self.slots[pos].key]
            self.slots[pos] = _Slot(key, value, ref)
            self.index[key] = pos
            for i in cleared:
                self.slots[i].ref = True
            self.hand = hand

    def clear(self):
        self.slots.clear()
        self.index.clear()
        self.hand = 0
