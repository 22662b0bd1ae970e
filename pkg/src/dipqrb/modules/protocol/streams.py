"""Seeded randomness streams with draw accounting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def session_seed(seed: int, session_id: int) -> np.random.SeedSequence:
    """Seed sequence of one session, derived from a base seed."""
    return np.random.SeedSequence([seed, session_id])


class CountedStream:
    """Uniform draws from a numpy Generator, counted.

    Exposes ``random()`` so it can stand in for a Generator in the
    photonic samplers.
    """

    def __init__(self, name: str, seed: np.random.SeedSequence):
        self.name = name
        self._rng = np.random.default_rng(seed)
        self.draws = 0

    def random(self, size=None):
        self.draws += 1 if size is None else int(np.prod(size))
        return self._rng.random(size)

    def bit(self, p_one: float) -> int:
        """1 with probability ``p_one``."""
        return int(self.random() < p_one)


@dataclass
class ServerStreams:
    """Switch, server-input and server-optics streams."""

    switch: CountedStream
    inputs: CountedStream
    optics: CountedStream

    @classmethod
    def create(cls, seed_server: int, seed_switch: int, session_id: int = 0) -> ServerStreams:
        inputs, optics = session_seed(seed_server, session_id).spawn(2)
        return cls(
            switch=CountedStream("switch", session_seed(seed_switch, session_id)),
            inputs=CountedStream("server_inputs", inputs),
            optics=CountedStream("server_optics", optics),
        )


@dataclass
class ClientStreams:
    """Client-input (Z, T) and client-optics (C) streams."""

    inputs: CountedStream
    optics: CountedStream

    @classmethod
    def create(cls, seed_client: int, session_id: int = 0) -> ClientStreams:
        inputs, optics = session_seed(seed_client, session_id).spawn(2)
        return cls(
            inputs=CountedStream("client_inputs", inputs),
            optics=CountedStream("client_optics", optics),
        )
