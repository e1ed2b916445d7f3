"""Synthetic point clouds used by the experiments and tests."""

from __future__ import annotations

import numpy as np


def _rng(seed):
    return np.random.default_rng(seed)


def circle(n: int = 200, radius: float = 1.0, noise: float = 0.01, seed: int = 0) -> np.ndarray:
    """Uniform angles on a circle, radial jitter with standard deviation ``noise * radius``."""
    rng = _rng(seed)
    t = rng.uniform(0, 2 * np.pi, n)
    r = radius * (1 + noise * rng.standard_normal(n))
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def annulus(n: int = 400, r_in: float = 1.0, r_out: float = 1.2, noise: float = 0.0, seed: int = 0) -> np.ndarray:
    """Area-uniform samples of a planar annulus, plus optional isotropic Gaussian jitter."""
    rng = _rng(seed)
    t = rng.uniform(0, 2 * np.pi, n)
    r = np.sqrt(rng.uniform(r_in ** 2, r_out ** 2, n))
    X = np.column_stack([r * np.cos(t), r * np.sin(t)])
    if noise > 0:
        X = X + noise * rng.standard_normal(X.shape)
    return X


def sphere(n: int = 2000, radius: float = 1.0, seed: int = 0) -> np.ndarray:
    rng = _rng(seed)
    x = rng.standard_normal((n, 3))
    return radius * x / np.linalg.norm(x, axis=1, keepdims=True)


def torus(n: int = 3000, R: float = 1.0, r: float = 0.4, seed: int = 0) -> np.ndarray:
    """Area-uniform samples of a torus of revolution about the z axis (rejection on the tube angle)."""
    rng = _rng(seed)
    out = []
    while sum(len(o) for o in out) < n:
        m = 2 * n
        u = rng.uniform(0, 2 * np.pi, m)
        v = rng.uniform(0, 2 * np.pi, m)
        keep = rng.uniform(0, R + r, m) < R + r * np.cos(v)
        u, v = u[keep], v[keep]
        w = R + r * np.cos(v)
        out.append(np.column_stack([w * np.cos(u), w * np.sin(u), r * np.sin(v)]))
    return np.vstack(out)[:n]


def klein_bottle(n: int = 5000, R: float = 0.2, r: float = 0.1, seed: int = 0) -> np.ndarray:
    """Klein bottle embedded in R^4, area-uniform by rejection.

    (u, v) -> ((R + r cos v) cos u, (R + r cos v) sin u, r sin v cos(u/2), r sin v sin(u/2)),
    u, v in [0, 2 pi). The default size gives about 50 neighbors per point at
    radius 0.05 with 5000 points.
    """
    rng = _rng(seed)

    def embed(u, v):
        w = R + r * np.cos(v)
        return np.column_stack([w * np.cos(u), w * np.sin(u),
                                r * np.sin(v) * np.cos(u / 2), r * np.sin(v) * np.sin(u / 2)])

    def area_element(u, v):
        h = 1e-6
        du = (embed(u + h, v) - embed(u - h, v)) / (2 * h)
        dv = (embed(u, v + h) - embed(u, v - h)) / (2 * h)
        E = (du * du).sum(1)
        F = (du * dv).sum(1)
        G = (dv * dv).sum(1)
        return np.sqrt(np.maximum(E * G - F * F, 0))

    gu, gv = np.meshgrid(np.linspace(0, 2 * np.pi, 64), np.linspace(0, 2 * np.pi, 64))
    bound = 1.05 * area_element(gu.ravel(), gv.ravel()).max()
    out = []
    while sum(len(o) for o in out) < n:
        m = 2 * n
        u = rng.uniform(0, 2 * np.pi, m)
        v = rng.uniform(0, 2 * np.pi, m)
        keep = rng.uniform(0, bound, m) < area_element(u, v)
        out.append(embed(u[keep], v[keep]))
    return np.vstack(out)[:n]


DATASETS = {
    "circle": circle,
    "annulus": annulus,
    "sphere": sphere,
    "torus": torus,
    "klein": klein_bottle,
}
