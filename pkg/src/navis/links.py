"""Datagram transports for the session engine.

Three flavors share one small interface (send / poll / flush plus sent and
dropped counters): an in-process loopback, a seeded impairment link that
drops, duplicates and reorders deterministically, and a real UDP socket pair
for realtime runs.
"""

from __future__ import annotations

import random
import select
import socket


class LoopbackLink:
    """Lossless in-order delivery within the same simulated instant."""

    def __init__(self) -> None:
        self.sent = 0
        self.dropped = 0
        self._queue: list[tuple[int, bytes]] = []

    def send(self, payload: bytes, t_us: int) -> None:
        self.sent += 1
        self._queue.append((t_us, payload))

    def poll(self, now_us: int) -> list[tuple[int, bytes]]:
        ready = [d for d in self._queue if d[0] <= now_us]
        self._queue = [d for d in self._queue if d[0] > now_us]
        return ready

    def flush(self, now_us: int) -> None:
        pass

    def close(self) -> None:
        pass


class ScriptedLink:
    """Deterministic impairment link.

    Per datagram, three seeded draws decide (in this fixed order) loss,
    duplication and reordering. A reordered datagram is withheld until the
    next send and released after it (a pairwise swap), arriving with the
    later timestamp. The hold slot fits one datagram and a release always
    precedes a new hold, so consecutive reorder draws swap disjoint pairs;
    flush() releases a leftover so sent - dropped equals delivered by the
    end of a session.
    """

    def __init__(self, loss_pct: float, reorder_pct: float, duplicate_pct: float, seed: int):
        for name, pct in (("loss", loss_pct), ("reorder", reorder_pct), ("duplicate", duplicate_pct)):
            if not 0.0 <= pct <= 100.0:
                raise ValueError(f"{name}_pct must lie in [0, 100], got {pct}")
        self._loss = loss_pct
        self._reorder = reorder_pct
        self._duplicate = duplicate_pct
        self._rng = random.Random(seed)
        self.sent = 0
        self.dropped = 0
        self._queue: list[tuple[int, bytes]] = []
        self._held: bytes | None = None

    def send(self, payload: bytes, t_us: int) -> None:
        self.sent += 1
        # Draw all three fates every time so the stream stays aligned.
        lost = self._rng.random() * 100.0 < self._loss
        duplicated = self._rng.random() * 100.0 < self._duplicate
        reordered = self._rng.random() * 100.0 < self._reorder

        held, self._held = self._held, None
        if lost:
            self.dropped += 1
        else:
            copies = 2 if duplicated else 1
            if reordered and held is None:
                self._held = payload
                copies -= 1
            for _ in range(copies):
                self._queue.append((t_us, payload))
        if held is not None:
            self._queue.append((t_us, held))

    def poll(self, now_us: int) -> list[tuple[int, bytes]]:
        ready = [d for d in self._queue if d[0] <= now_us]
        self._queue = [d for d in self._queue if d[0] > now_us]
        return ready

    def flush(self, now_us: int) -> None:
        """Release a withheld datagram at session end so none goes missing."""
        if self._held is not None:
            self._queue.append((now_us, self._held))
            self._held = None

    def close(self) -> None:
        pass


class UdpLink:
    """Real UDP socket pair on one host; arrival timestamps come from the caller's clock."""

    def __init__(self, address: str = "127.0.0.1", port: int = 47157):
        self.sent = 0
        self.dropped = 0  # kernel drops are invisible; receiver counters tell the truth
        self._target = (address, port)
        self._rx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._rx.bind((address, port))
        self._rx.setblocking(False)
        self._tx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    def send(self, payload: bytes, t_us: int) -> None:
        self.sent += 1
        self._tx.sendto(payload, self._target)

    def poll(self, now_us: int) -> list[tuple[int, bytes]]:
        ready: list[tuple[int, bytes]] = []
        while True:
            r, _, _ = select.select([self._rx], [], [], 0)
            if not r:
                return ready
            try:
                data, _ = self._rx.recvfrom(4096)
            except BlockingIOError:
                return ready
            ready.append((now_us, data))

    def flush(self, now_us: int) -> None:
        pass

    def close(self) -> None:
        self._rx.close()
        self._tx.close()
