"""Pollution detection for inter-session network coding."""

import json

from ._ncguard import (
    BenalohKeyPair,
    Field,
    NcguardError,
    benaloh_add,
    benaloh_encrypt,
    benaloh_keygen,
    compute_mults,
    curve,
    decode,
    fixture_json,
    game,
    hdl_hash,
    offline_bits,
)
from ._ncguard import simulate as _simulate

__all__ = [
    "BenalohKeyPair",
    "Field",
    "NcguardError",
    "benaloh_add",
    "benaloh_encrypt",
    "benaloh_keygen",
    "compute_mults",
    "curve",
    "decode",
    "fixture_json",
    "game",
    "hdl_hash",
    "offline_bits",
    "simulate",
]


def simulate(topology, scheme, adversary="fixture", seed=1, hop_verification=False, n=8, g=1, q=0):
    """Run one generation and return (run record, {node name: node record}, violations)."""
    text, violations = _simulate(topology, scheme, adversary, seed, hop_verification, n, g, q)
    records = [json.loads(line) for line in text.splitlines()]
    nodes = {r["name"]: r for r in records[1:]}
    return records[0], nodes, violations
