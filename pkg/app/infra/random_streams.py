"""
Fluxos aleatórios independentes derivados de uma única semente mestre.

Cada finalidade (bases, ruído de Eve, permutação...) tem um rótulo fixo;
o gerador de uma sessão é SeedSequence(entropy=seed, spawn_key=(sessão, rótulo)).
Acrescentar um novo rótulo não desloca os fluxos existentes.
"""
from enum import Enum

import numpy as np


class StreamLabel(int, Enum):
    BASES = 0
    EVE_NOISE = 1
    PERMUTATION = 2
    CODE_CHOICE = 3
    PAYLOAD = 4
    SAMPLING = 5


class RandomStreams:
    def __init__(self, seed: int, session: int = 0) -> None:
        if seed < 0 or session < 0:
            raise ValueError(f"Semente e sessão precisam ser não negativas (seed={seed}, session={session})")
        self.seed = seed
        self.session = session

    def generator(self, label: StreamLabel) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.session, int(label)))
        return np.random.default_rng(seq)

    def for_session(self, session: int) -> "RandomStreams":
        return RandomStreams(self.seed, session)
