"""Deterministic seed derivation.

All randomness in the harnesses flows from a single root seed. Components
derive their own streams by hashing the root together with a label path, so
adding a new harness never perturbs the streams of existing ones.
"""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *labels) -> int:
    """Derive a child seed from ``root`` and a label path.

    Stable across platforms and process runs (SHA-256 based, not ``hash()``).
    """
    h = hashlib.sha256()
    h.update(str(int(root)).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:8], "little")
