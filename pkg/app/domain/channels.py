"""
Canais de ataque pré-definidos.

Todos são canais de Pauli de um dígito; a distribuição P_A é sempre obtida
pela fórmula do traço (channel_to_dist) a partir dos operadores de Kraus.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from ..core.errors import UsageError
from ..core.normalizers import split_attack_spec
from ..core.qudit import KrausChannel, channel_to_dist
from ..core.typesys import JointDist, as_joint
from ..storage.files import load_dist_file, load_kraus_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttackModel:
    """
    Ataque individual i.i.d.: distribuição P_A sobre pares (s, t) e, quando
    conhecido, o canal de Kraus que a originou.
    """
    dist: JointDist
    label: str
    channel: Optional[KrausChannel] = None

    @property
    def d(self) -> int:
        return int(self.dist.shape[0])

    @classmethod
    def from_channel(cls, channel: KrausChannel, label: str) -> "AttackModel":
        return cls(dist=channel_to_dist(channel), label=label, channel=channel)

    @classmethod
    def from_dist(cls, dist: JointDist, label: str) -> "AttackModel":
        return cls(dist=as_joint(dist), label=label)


def _check_q(q: float) -> None:
    if not 0.0 <= q <= 1.0:
        raise UsageError(f"Parâmetro do canal q={q} fora de [0, 1]")


def identity_dist(d: int, q: float = 0.0) -> JointDist:
    """δ_{00}. `q` é ignorado; existe só para a assinatura comum de PRESETS."""
    dist = np.zeros((d, d))
    dist[0, 0] = 1.0
    return dist


def dephasing_dist(d: int, q: float) -> JointDist:
    """(1−q)δ_{00} + q/(d−1) Σ_{t≠0} δ_{(0,t)}."""
    dist = np.zeros((d, d))
    dist[0, 0] = 1.0 - q
    dist[0, 1:] = q / (d - 1)
    return dist


def flip_dist(d: int, q: float) -> JointDist:
    """Análogo com deslocamentos X^s."""
    return dephasing_dist(d, q).T.copy()


def depolarizing_dist(d: int, q: float) -> JointDist:
    """q/(d²−1) em cada par diferente de (0, 0)."""
    dist = np.full((d, d), q / (d * d - 1))
    dist[0, 0] = 1.0 - q
    return dist


def symmetric_dist(d: int, q: float) -> JointDist:
    """Erros X e Z independentes, cada um com marginal (1−q, q/(d−1), ...)."""
    w = np.full(d, q / (d - 1))
    w[0] = 1.0 - q
    return np.outer(w, w)


PRESETS: Dict[str, Callable[[int, float], JointDist]] = {
    "identity": identity_dist,
    "dephasing": dephasing_dist,
    "flip": flip_dist,
    "depolarizing": depolarizing_dist,
    "symmetric": symmetric_dist,
}


def preset_attack(name: str, d: int, q: float = 0.0) -> AttackModel:
    builder = PRESETS.get(name)
    if builder is None:
        raise UsageError(f"Canal desconhecido: {name!r} (opções: {', '.join(sorted(PRESETS))})")
    _check_q(q)
    channel = KrausChannel.pauli(builder(d, q))
    label = name if name == "identity" else f"{name}:{q:g}"
    logger.debug(f"Canal pré-definido: name={name}, d={d}, q={q}")
    return AttackModel.from_channel(channel, label)


def resolve_attack(text: str, d: int) -> AttackModel:
    """
    Gramática: identity | dephasing:q | flip:q | depolarizing:q | symmetric:q
    | dist:ARQUIVO | kraus:ARQUIVO.
    """
    name, arg = split_attack_spec(text)
    if name == "dist":
        return AttackModel.from_dist(load_dist_file(arg, d), f"dist:{arg}")
    if name == "kraus":
        channel = load_kraus_file(arg)
        if channel.d != d:
            raise UsageError(f"Canal de Kraus com d={channel.d}, esperado d={d}")
        return AttackModel.from_channel(channel, f"kraus:{arg}")
    if name == "identity":
        return preset_attack(name, d)
    if not arg:
        raise UsageError(f"O canal {name!r} exige um parâmetro (ex.: {name}:0.03)")
    try:
        q = float(arg)
    except ValueError:
        raise UsageError(f"Parâmetro inválido em {text!r}")
    return preset_attack(name, d, q)
