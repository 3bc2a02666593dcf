"""Clustered geometric model on the unit k-torus.

Nodes live in [0,1)^k with wrap-around distances. An edge between nodes at
distance d exists with probability K * f(d), where f(d) = min{1, (C/d)^beta}:
constant inside the plateau radius C, power-law decay outside. K in (0,1]
sets the short-range density (and hence the clustering coefficient), C sets
the cluster length scale, and the pair can be calibrated against a target
mean degree through the exact expectation integral over the torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from .errors import CalibrationConflict, DimensionMismatch, InfeasibleDegree

__all__ = [
    "ModelParams",
    "torus_distance",
    "edge_probability",
    "plateau_inverse",
    "degree_integral",
    "calibrate_density",
    "calibrate_scale",
    "unit_ball_volume",
]

# Sobol sample count for the k >= 3 quadrature fallback (2**QMC_LOG2_SAMPLES).
QMC_LOG2_SAMPLES = 21


def unit_ball_volume(k: int) -> float:
    """Volume of the k-dimensional unit ball."""
    return math.pi ** (k / 2.0) / math.gamma(k / 2.0 + 1.0)


def torus_distance(a, b) -> float:
    """Euclidean distance under the minimum-image convention.

    Each coordinate difference is wrapped into [-0.5, 0.5] before the norm,
    which is the shortest displacement on the unit torus.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"positions have shapes {a.shape} vs {b.shape}")
    diff = np.abs(a - b)
    diff = np.minimum(diff, 1.0 - diff)
    return float(np.sqrt(np.sum(diff * diff, axis=-1)))


def torus_distance_many(points: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Vectorized torus distance from each row of ``points`` to ``ref``."""
    diff = np.abs(points - ref)
    diff = np.minimum(diff, 1.0 - diff)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def profile(d, C: float, beta: float):
    """Distance profile f(d) = min{1, (C/d)^beta}; f(0) = 1.

    Supports beta = inf (hard ball of radius C). Accepts scalars or arrays.
    """
    d = np.asarray(d, dtype=np.float64)
    if math.isinf(beta):
        out = np.where(d <= C, 1.0, 0.0)
    else:
        with np.errstate(divide="ignore"):
            out = np.where(d <= C, 1.0, np.power(C / np.maximum(d, 1e-300), beta))
    return out if out.ndim else float(out)


def edge_probability(d: float, params: "ModelParams") -> float:
    """Edge probability K * f(d) for a node pair at torus distance d."""
    if d < 0:
        raise ValueError("distance must be non-negative")
    return params.K * float(profile(d, params.C, params.beta))


def plateau_inverse(y: float, C: float, beta: float) -> float:
    """Inverse of the distance profile: the d with f(d) = y, for y in (0, 1].

    f is flat at 1 on [0, C], so y = 1 maps to the plateau edge C.
    """
    if not 0.0 < y <= 1.0:
        raise ValueError(f"profile value {y} outside (0, 1]")
    if y == 1.0 or math.isinf(beta):
        return C
    return C * y ** (-1.0 / beta)


def _arc_length_in_cell(rho: float) -> float:
    """Length of the circle of radius rho (centred at 0) inside [-1/2,1/2]^2."""
    if rho <= 0.5:
        return 2.0 * math.pi * rho
    if rho >= math.sqrt(0.5):
        return 0.0
    return rho * (2.0 * math.pi - 8.0 * math.acos(0.5 / rho))


def degree_integral(k: int, beta: float, C: float) -> float:
    """Exact torus integral of the profile, I = int_{cell} f(|x|) dx.

    The expected degree is (n-1) * K * I. Evaluated analytically for
    beta = inf, by 1-D adaptive quadrature after radial reduction for
    k <= 2, and by fixed-seed Sobol quadrature (2**21 points) for k >= 3.
    """
    if k < 1:
        raise ValueError("dimension must be >= 1")
    if C <= 0:
        raise ValueError("plateau radius must be positive")
    d_max = 0.5 * math.sqrt(k)
    if C >= d_max:
        return 1.0
    if math.isinf(beta):
        if k == 1:
            return min(1.0, 2.0 * C)
        if k == 2:
            # C < sqrt(2)/2 here; disc area clipped to the cell.
            if C <= 0.5:
                return math.pi * C * C
            val, _ = integrate.quad(_arc_length_in_cell, 0.0, C, limit=200)
            return val
        return _degree_integral_qmc(k, beta, C)
    if k == 1:
        plateau = 2.0 * C
        tail, _ = integrate.quad(
            lambda d: 2.0 * (C / d) ** beta, C, 0.5, limit=200
        )
        return min(1.0, plateau + tail)
    if k == 2:
        val, _ = integrate.quad(
            lambda rho: float(profile(rho, C, beta)) * _arc_length_in_cell(rho),
            0.0,
            d_max,
            limit=400,
            points=[C, 0.5],
        )
        return min(1.0, val)
    return _degree_integral_qmc(k, beta, C)


def _degree_integral_qmc(k: int, beta: float, C: float) -> float:
    sampler = qmc.Sobol(d=k, scramble=True, seed=1234)
    pts = sampler.random_base2(m=QMC_LOG2_SAMPLES) - 0.5
    d = np.sqrt(np.sum(pts * pts, axis=1))
    return float(np.mean(profile(d, C, beta)))


def calibrate_density(n: int, k: int, beta: float, C: float, target_degree: float) -> float:
    """K such that the exact expected degree (n-1)*K*I(C) equals the target.

    Raises InfeasibleDegree when the target needs K > 1.
    """
    if not beta > k:
        raise ValueError(f"clustered regime needs beta > k (got beta={beta}, k={k})")
    if target_degree <= 0:
        raise ValueError("target degree must be positive")
    K = target_degree / ((n - 1) * degree_integral(k, beta, C))
    if K > 1.0 + 1e-12:
        raise InfeasibleDegree(
            f"target degree {target_degree} needs K = {K:.4g} > 1 at C = {C}"
        )
    return min(K, 1.0)


def calibrate_scale(n: int, k: int, beta: float, K: float, target_degree: float) -> float:
    """C such that the exact expected degree (n-1)*K*I(C) equals the target.

    Solved by bisection; I(C) is strictly increasing in C until it saturates.
    """
    if not beta > k:
        raise ValueError(f"clustered regime needs beta > k (got beta={beta}, k={k})")
    if not 0.0 < K <= 1.0:
        raise ValueError("K must be in (0, 1]")
    if target_degree <= 0:
        raise ValueError("target degree must be positive")
    if target_degree > (n - 1) * K:
        raise InfeasibleDegree(
            f"target degree {target_degree} exceeds (n-1)K = {(n - 1) * K:.4g}"
        )

    def excess(C):
        return (n - 1) * K * degree_integral(k, beta, C) - target_degree

    lo, hi = 1e-6, 0.5 * math.sqrt(k)
    if excess(lo) > 0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-12:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ModelParams:
    """Full parameterization of the clustered geometric graph model.

    Exactly two of {cluster_scale, cluster_density, target_degree} determine
    the third; supplying all three is a conflict, not a silent preference.
    Use ``resolved()`` to obtain params with concrete K and C.
    """

    n: int
    k: int = 2
    beta: float = 3.0
    cluster_scale: float | None = None     # C, plateau radius (torus units)
    cluster_density: float | None = None   # K in (0, 1]
    target_degree: float | None = None     # D, desired mean degree
    sample_prob: float = 1.0               # s, edge sampling probability

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        if not (self.k > 0 and self.beta > self.k):
            raise ValueError(
                f"clustered regime needs beta > k > 0 (got beta={self.beta}, k={self.k})"
            )
        if not 0.0 <= self.sample_prob <= 1.0:
            raise ValueError("sample probability must lie in [0, 1]")
        if self.cluster_scale is not None and not 0.0 < self.cluster_scale <= 0.5:
            raise ValueError("cluster scale C must lie in (0, 0.5]")
        if self.cluster_density is not None and not 0.0 < self.cluster_density <= 1.0:
            raise ValueError("cluster density K must lie in (0, 1]")
        given = sum(
            x is not None
            for x in (self.cluster_scale, self.cluster_density, self.target_degree)
        )
        if given < 2:
            raise CalibrationConflict(
                "need two of cluster_scale, cluster_density, target_degree"
            )
        if given == 3:
            raise CalibrationConflict(
                "cluster_scale, cluster_density and target_degree are "
                "over-determined; give exactly two"
            )

    @property
    def C(self) -> float:
        if self.cluster_scale is None:
            raise CalibrationConflict("cluster scale not resolved; call resolved()")
        return self.cluster_scale

    @property
    def K(self) -> float:
        if self.cluster_density is None:
            raise CalibrationConflict("cluster density not resolved; call resolved()")
        return self.cluster_density

    @property
    def s(self) -> float:
        return self.sample_prob

    def resolved(self) -> "ModelParams":
        """Params with concrete C and K, calibrating from target_degree if set.

        The calibrated value replaces target_degree, which is dropped (it is
        implied by C and K afterwards).
        """
        if self.cluster_scale is not None and self.cluster_density is not None:
            return self
        if self.cluster_scale is not None:
            K = calibrate_density(self.n, self.k, self.beta, self.cluster_scale,
                                  self.target_degree)
            return replace(self, cluster_density=K, target_degree=None)
        C = calibrate_scale(self.n, self.k, self.beta, self.cluster_density,
                            self.target_degree)
        return replace(self, cluster_scale=C, target_degree=None)

    def expected_degree(self) -> float:
        p = self.resolved()
        return (p.n - 1) * p.K * degree_integral(p.k, p.beta, p.C)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "beta": self.beta,
            "C": self.cluster_scale,
            "K": self.cluster_density,
            "target_degree": self.target_degree,
            "s": self.sample_prob,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(
            n=int(d["n"]),
            k=int(d.get("k", 2)),
            beta=float(d["beta"]),
            cluster_scale=None if d.get("C") is None else float(d["C"]),
            cluster_density=None if d.get("K") is None else float(d["K"]),
            target_degree=(None if d.get("target_degree") is None
                           else float(d["target_degree"])),
            sample_prob=float(d.get("s", 1.0)),
        )
