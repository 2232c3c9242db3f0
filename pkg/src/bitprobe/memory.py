"""
Bit memory with probe accounting.

A :class:`BitStore` is a set of named bit regions laid out back to back.
It is writable until :meth:`BitStore.freeze` is called and readable only
afterwards.  Every read made through :func:`read_bit` or :func:`read_xor`
is appended to a :class:`ProbeTranscript`; a parity read touches two
addresses but is a single (quantum) probe.

Queries are written against a *prober* (anything with ``read(addr)`` and
``xor(a1, a2)``) so that :func:`audit_transcript` can replay them with
injected probe results and detect adaptivity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import AddressError, PhaseError

__all__ = [
    "ADAPTIVE",
    "NON_ADAPTIVE",
    "CLASSICAL_READ",
    "QUANTUM_XOR",
    "BitStore",
    "ProbeEntry",
    "ProbeTranscript",
    "StoreProber",
    "ReplayProber",
    "AuditVerdict",
    "read_bit",
    "read_xor",
    "audit_transcript",
]

ADAPTIVE = "adaptive"
NON_ADAPTIVE = "non-adaptive"
CLASSICAL_READ = "classical"
QUANTUM_XOR = "quantum-xor"

Address = tuple[str, int]


class BitStore:
    """Named bit regions flattened into one vector."""

    def __init__(self, regions: Iterable[tuple[str, int]]):
        self.layout: list[tuple[str, int]] = []
        self._offset: dict[str, int] = {}
        total = 0
        for name, length in regions:
            if name in self._offset:
                raise ValueError(f"duplicate region {name!r}")
            if length < 0:
                raise ValueError(f"negative region length for {name!r}")
            self.layout.append((name, int(length)))
            self._offset[name] = total
            total += int(length)
        self.bits = np.zeros(total, dtype=np.uint8)
        self.frozen = False

    @property
    def total_bits(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.total_bits

    def region_length(self, name: str) -> int:
        return dict(self.layout)[name]

    def region(self, name: str) -> np.ndarray:
        """View of one region; writable only before :meth:`freeze`."""
        start = self._offset[name]
        return self.bits[start : start + self.region_length(name)]

    def flat_index(self, addr: Address) -> int:
        name, off = addr
        if name not in self._offset:
            raise AddressError(f"unknown region {name!r}")
        length = self.region_length(name)
        if not 0 <= off < length:
            raise AddressError(f"offset {off} out of range for region {name!r} of {length} bits")
        return self._offset[name] + off

    def write(self, addr: Address, bit: int) -> None:
        if self.frozen:
            raise PhaseError("store is frozen; writes are only allowed while storing")
        self.bits[self.flat_index(addr)] = bit & 1

    def freeze(self) -> "BitStore":
        self.frozen = True
        self.bits.flags.writeable = False
        return self

    def _get(self, addr: Address) -> int:
        if not self.frozen:
            raise PhaseError("store is still being written; freeze() before querying")
        return int(self.bits[self.flat_index(addr)])

    # -- serialisation: little-endian bit order within bytes ---------------

    def to_bytes(self) -> bytes:
        return np.packbits(self.bits, bitorder="little").tobytes()

    @classmethod
    def from_bytes(cls, layout: Sequence[tuple[str, int]], payload: bytes) -> "BitStore":
        store = cls(layout)
        raw = np.frombuffer(payload, dtype=np.uint8)
        need = (store.total_bits + 7) // 8
        if raw.size != need:
            raise ValueError(f"payload has {raw.size} bytes, layout needs {need}")
        store.bits[:] = np.unpackbits(raw, bitorder="little")[: store.total_bits]
        return store.freeze()


@dataclass(frozen=True)
class ProbeEntry:
    kind: str
    addresses: tuple[Address, ...]
    result: int

    def to_json(self) -> str:
        return json.dumps(
            {"kind": self.kind, "addresses": [list(a) for a in self.addresses], "result": self.result}
        )


@dataclass
class ProbeTranscript:
    declared_class: str = ADAPTIVE
    entries: list[ProbeEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def probe_count(self) -> int:
        return len(self.entries)

    @property
    def kinds(self) -> list[str]:
        return [e.kind for e in self.entries]

    def address_sequence(self) -> list[tuple[str, tuple[Address, ...]]]:
        return [(e.kind, e.addresses) for e in self.entries]

    def append(self, kind: str, addresses: Sequence[Address], result: int) -> None:
        if kind == CLASSICAL_READ and len(addresses) != 1:
            raise ValueError("a classical read has exactly one address")
        if kind == QUANTUM_XOR and len(addresses) != 2:
            raise ValueError("a parity probe has exactly two addresses")
        self.entries.append(ProbeEntry(kind, tuple(tuple(a) for a in addresses), int(result)))

    def to_jsonl(self) -> str:
        return "".join(e.to_json() + "\n" for e in self.entries)

    @classmethod
    def from_jsonl(cls, text: str, declared_class: str = ADAPTIVE) -> "ProbeTranscript":
        t = cls(declared_class)
        for line in text.splitlines():
            if line.strip():
                obj = json.loads(line)
                t.append(obj["kind"], [tuple(a) for a in obj["addresses"]], obj["result"])
        return t


def read_bit(store: BitStore, addr: Address, t: ProbeTranscript | None = None) -> int:
    bit = store._get(addr)
    if t is not None:
        t.append(CLASSICAL_READ, [addr], bit)
    return bit


def read_xor(
    store: BitStore, a1: Address, a2: Address, t: ProbeTranscript | None = None
) -> int:
    """Parity of two stored bits, accounted as one probe."""
    bit = store._get(a1) ^ store._get(a2)
    if t is not None:
        t.append(QUANTUM_XOR, [a1, a2], bit)
    return bit


class StoreProber:
    def __init__(self, store: BitStore, transcript: ProbeTranscript | None = None):
        self.store = store
        self.transcript = transcript

    def read(self, addr: Address) -> int:
        return read_bit(self.store, addr, self.transcript)

    def xor(self, a1: Address, a2: Address) -> int:
        return read_xor(self.store, a1, a2, self.transcript)


class ReplayProber:
    """Answers probes from a fixed list of injected results (0 once exhausted)."""

    def __init__(self, results: Sequence[int], declared_class: str = ADAPTIVE):
        self.results = list(results)
        self.transcript = ProbeTranscript(declared_class)

    def _next(self) -> int:
        k = len(self.transcript)
        return self.results[k] if k < len(self.results) else 0

    def read(self, addr: Address) -> int:
        bit = self._next()
        self.transcript.append(CLASSICAL_READ, [addr], bit)
        return bit

    def xor(self, a1: Address, a2: Address) -> int:
        bit = self._next()
        self.transcript.append(QUANTUM_XOR, [a1, a2], bit)
        return bit


@dataclass(frozen=True)
class AuditVerdict:
    passed: bool
    probes: int
    adaptive_detected: bool = False
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def audit_transcript(
    t: ProbeTranscript,
    max_probes: int,
    required_class: str,
    replayer: Callable[[Sequence[int]], ProbeTranscript] | None = None,
) -> AuditVerdict:
    """Check the probe budget and, by result-injection replay, adaptivity.

    ``replayer(results)`` must rerun the same query with the given probe
    results injected and return the resulting transcript.  Every one of the
    ``2^k`` result patterns (``k`` = probes in ``t``) is replayed; the query
    is non-adaptive iff all replays probe the same addresses as ``t``.
    """
    k = len(t)
    if k > max_probes:
        return AuditVerdict(False, k, detail=f"{k} probes exceed budget {max_probes}")
    if replayer is None:
        if required_class == NON_ADAPTIVE:
            return AuditVerdict(False, k, detail="non-adaptivity needs a replayer")
        return AuditVerdict(True, k)
    reference = t.address_sequence()
    adaptive = False
    for pattern in product((0, 1), repeat=k):
        replay = replayer(pattern)
        if len(replay) > max_probes:
            return AuditVerdict(
                False, k, detail=f"replay {pattern} used {len(replay)} probes"
            )
        if replay.address_sequence() != reference:
            adaptive = True
            if required_class == NON_ADAPTIVE:
                return AuditVerdict(
                    False, k, True, f"probe addresses change under injected results {pattern}"
                )
    return AuditVerdict(True, k, adaptive)
