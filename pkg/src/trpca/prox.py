"""Proximal operators: tensor singular value thresholding and soft thresholding.

The singular value threshold is applied at level ``tau`` to the
transform-domain singular values themselves. The ``1/ell`` factor of the
nuclear norm multiplies the whole slice-wise objective and cancels, so the
per-slice threshold is ``tau`` for every ``ell`` (the most error-prone
constant in this package; the perturbation tests exist to pin it).
"""

from __future__ import annotations

import numpy as np

from .tensor3 import Tensor3
from .transform import Transform


def soft_threshold(y: Tensor3, tau: float) -> Tensor3:
    """Entrywise shrinkage ``sign(y) * max(|y| - tau, 0)``.

    The minimizer of ``tau*||x||_1 + 0.5*||x - y||_F^2``.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return Tensor3(soft_threshold_array(y.data, tau))


def soft_threshold_array(y: np.ndarray, tau: float) -> np.ndarray:
    return np.sign(y) * np.maximum(np.abs(y) - tau, 0.0)


def tsvt(y: Tensor3, tau: float, t: Transform) -> Tensor3:
    """Tensor singular value thresholding.

    Shrinks the transform-domain singular values of every frontal slice by
    ``tau`` and reconstructs; the unique minimizer of
    ``tau*nuclear_norm(x) + 0.5*||x - y||_F^2``.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if y.n3 != t.size:
        raise ValueError(f"tensor n3={y.n3} does not match transform size {t.size}")
    out, _ = tsvt_array(y.data, tau, t)
    return Tensor3(out)


def tsvt_array(y: np.ndarray, tau: float, t: Transform) -> tuple[np.ndarray, float]:
    """Array-level T-SVT returning ``(result, nuclear_norm(result))``.

    The nuclear norm of the output comes for free from the shrunk singular
    values; the solver uses it for its objective trace.
    """
    bar = np.moveaxis(t.apply_array(y), 2, 0)
    u, s, vh = np.linalg.svd(bar, full_matrices=False)
    s_shrunk = np.maximum(s - tau, 0.0)
    # skinny reconstruction: columns past the largest surviving value are dead
    k = int(np.count_nonzero(s_shrunk.max(axis=0) > 0))
    if k == 0:
        return np.zeros_like(y), 0.0
    out_bar = (u[:, :, :k] * s_shrunk[:, None, :k]) @ vh[:, :k, :]
    out = t.apply_inverse_array(np.moveaxis(out_bar, 0, 2))
    return out, float(s_shrunk.sum()) / t.ell
