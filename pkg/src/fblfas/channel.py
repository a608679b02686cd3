"""Spatially correlated channel model for a linear fluid antenna.

N ports share one RF chain on a segment of length W (in wavelengths), so
adjacent ports sit W/(N-1) apart and the field correlation between ports a
distance of n spacings apart is the unnormalized sinc

    a(n) = sin(z)/z,    z = 2 pi n W / (N - 1),

which stacks into a symmetric Toeplitz correlation matrix. Channels are
drawn through the eigenvalue factorization g = Q Lambda^(1/2) g0 with g0
i.i.d. circular complex Gaussian, and the correlation structure is
condensed into a small block model (per-block size L_b, shared intra-block
correlation mu^2) for the analytical distribution work.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import parallel
from .errors import NumericError

__all__ = [
    "SystemConfig",
    "ToeplitzCorrelation",
    "EigenFactor",
    "BlockModel",
    "build_correlation",
    "eigen_factor",
    "sample_channels",
    "fit_block_model",
    "save_correlation",
    "load_correlation",
    "save_block_model",
    "load_block_model",
]

# Eigenvalues below this fraction of the largest are treated as numerical
# zeros of the rank-deficient sinc kernel.
EIGENVALUE_CLIP = 1e-12

# Block fitting: an eigenvalue is significant when it reaches both this
# fraction of the largest eigenvalue and the spectrum's average (trace/N).
# A mode below the average of a trace-N spectrum carries no block's worth
# of ports.
BLOCK_SIGNIFICANCE = 1e-2


@dataclass(frozen=True)
class SystemConfig:
    """Operating point of one finite-blocklength transmission setup.

    Parameters
    ----------
    ports : int
        Number of selectable ports N. N = 1 is accepted as a degenerate
        single-antenna case for benchmark and validation paths; the spatial
        correlation model itself needs N >= 2.
    antenna_length : float
        Aperture length W in wavelengths.
    users : int
        Number of active codewords U.
    blocklength : int
        Finite blocklength M; the codeword variance is pinned to 1/M.
    channel_variance : float
        Per-port complex channel variance sigma^2 (default 2, the scale at
        which the gain distribution takes its reference form).
    noise_variance : float
        Noise variance sigma_eta^2; the SNR is channel_variance / noise_variance.
    outage_threshold : float
        SINR threshold gamma_th of the outage event.
    """

    ports: int
    antenna_length: float
    users: int
    blocklength: int
    channel_variance: float = 2.0
    noise_variance: float = 1.0
    outage_threshold: float = 1e-3

    def __post_init__(self):
        if not isinstance(self.ports, (int, np.integer)) or self.ports < 1:
            raise ValueError("ports must be a positive integer")
        if not (self.antenna_length > 0.0 and math.isfinite(self.antenna_length)):
            raise ValueError("antenna_length must be positive and finite")
        if not isinstance(self.users, (int, np.integer)) or self.users < 1:
            raise ValueError("users must be a positive integer")
        if not isinstance(self.blocklength, (int, np.integer)) or self.blocklength < 1:
            raise ValueError("blocklength must be a positive integer")
        for name in ("channel_variance", "noise_variance", "outage_threshold"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite")

    @property
    def codeword_variance(self) -> float:
        return 1.0 / self.blocklength

    @property
    def snr(self) -> float:
        return self.channel_variance / self.noise_variance

    @classmethod
    def from_snr_db(cls, ports, antenna_length, users, blocklength, snr_db,
                    channel_variance=2.0, outage_threshold=1e-3):
        """Build a config with the noise variance set from an SNR in dB."""
        noise = channel_variance / 10.0 ** (float(snr_db) / 10.0)
        return cls(
            ports=ports,
            antenna_length=antenna_length,
            users=users,
            blocklength=blocklength,
            channel_variance=channel_variance,
            noise_variance=noise,
            outage_threshold=outage_threshold,
        )


@dataclass(frozen=True)
class ToeplitzCorrelation:
    """Port correlation matrix and its generating first row."""

    size: int
    first_row: np.ndarray
    matrix: np.ndarray


@dataclass(frozen=True)
class EigenFactor:
    """Eigendecomposition of a correlation matrix, eigenvalues descending."""

    eigenvectors: np.ndarray
    eigenvalues: np.ndarray

    @property
    def factor(self) -> np.ndarray:
        """Q Lambda^(1/2), the sampling matrix."""
        return self.eigenvectors * np.sqrt(self.eigenvalues)[None, :]


@dataclass(frozen=True)
class BlockModel:
    """Block-diagonal stand-in for the full correlation structure."""

    block_count: int
    block_sizes: tuple
    mu2: float

    def __post_init__(self):
        if self.block_count < 1 or len(self.block_sizes) != self.block_count:
            raise ValueError("block_sizes must list one size per block")
        if any(s < 1 for s in self.block_sizes):
            raise ValueError("every block size must be >= 1")
        if not (0.0 < self.mu2 < 1.0):
            raise ValueError("mu2 must lie strictly inside (0, 1)")

    @property
    def ports(self) -> int:
        return int(sum(self.block_sizes))


def build_correlation(ports: int, width: float) -> ToeplitzCorrelation:
    """Toeplitz correlation of N uniformly spaced ports on a length-W segment.

    Requires ports >= 2 (the spacing W/(N-1) is undefined otherwise).
    """
    if not isinstance(ports, (int, np.integer)) or ports < 2:
        raise ValueError("ports must be an integer >= 2")
    if not (width > 0.0 and math.isfinite(width)):
        raise ValueError("width must be positive and finite")
    n = np.arange(ports)
    z = 2.0 * np.pi * n * width / (ports - 1)
    row = np.ones(ports)
    row[1:] = np.sin(z[1:]) / z[1:]
    matrix = row[np.abs(n[:, None] - n[None, :])]
    return ToeplitzCorrelation(size=int(ports), first_row=row, matrix=matrix)


def eigen_factor(corr: ToeplitzCorrelation) -> EigenFactor:
    """Eigendecomposition with round-off eigenvalues clipped to zero.

    The sinc kernel is numerically rank deficient, so the bottom of the
    spectrum comes out as tiny values of either sign; everything below
    1e-12 of the largest eigenvalue is set to 0 so Lambda^(1/2) stays real.
    """
    vals, vecs = np.linalg.eigh(corr.matrix)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    floor = EIGENVALUE_CLIP * float(vals[0])
    if not (vals[0] > 0.0):
        raise NumericError("correlation matrix has no positive eigenvalue")
    vals[vals < floor] = 0.0
    return EigenFactor(eigenvectors=vecs, eigenvalues=vals)


def _identity_factor(ports: int) -> EigenFactor:
    return EigenFactor(eigenvectors=np.eye(ports), eigenvalues=np.ones(ports))


def _draw_g0(rng: np.random.Generator, count: int, ports: int, sigma2: float):
    z = rng.standard_normal((2, count, ports))
    scale = math.sqrt(0.5 * sigma2)
    return scale * (z[0] + 1j * z[1])


def sample_channels(factor: EigenFactor, sigma2: float, count: int, seed: int,
                    workers=None) -> np.ndarray:
    """Draw correlated channel vectors g = Q Lambda^(1/2) g0.

    g0 has i.i.d. circular complex Gaussian entries of variance sigma2
    (split evenly between real and imaginary parts), so each port's |g_k|^2
    is exponential with mean sigma2.

    Returns a (count, N) complex array. Draws are organized in fixed-size
    chunks keyed by (seed, chunk index), so the output is bit-identical for
    any worker count.
    """
    if not (sigma2 > 0.0 and math.isfinite(sigma2)):
        raise ValueError("sigma2 must be positive and finite")
    if count < 1:
        raise ValueError("count must be >= 1")
    A_t = factor.factor.T
    ports = A_t.shape[0]

    def task(index, size):
        g0 = _draw_g0(parallel.chunk_rng(seed, index), size, ports, sigma2)
        return g0 @ A_t

    blocks = parallel.run_chunks(task, count, workers)
    return np.concatenate(blocks, axis=0)


def fit_block_model(corr: ToeplitzCorrelation, mu2: float) -> BlockModel:
    """Condense a correlation matrix into a block model.

    The number of blocks B is the count of significant eigenvalues: those
    reaching both 1e-2 of the largest eigenvalue and the spectral average
    trace/N. For the sinc kernel this recovers the familiar 2W+1 dominant
    mode count (and B = N for an identity correlation). Sizes follow a
    dominant-first allocation: L_1 = N - B + 1 and every other block keeps a
    single port, so sum(L_b) = N exactly.

    The allocation is deliberately not eigenvalue-proportional. Near mu2 = 1
    each block is close to rank one, so B alone sets the effective diversity
    order while the sizes only modulate the within-block selection boost.
    Concentrating that boost in one large block reproduces the max-gain
    distribution of the exact Toeplitz channel markedly better than
    proportional splits (sup-norm CDF error around 0.01 versus 0.03 to 0.08
    on the N=10, W=0.5 and N=50, W=1 reference setups at mu2 = 0.97).

    mu2 is the shared intra-block correlation, valid in (0, 1); values in
    (0.95, 0.99) are the regime this model is meant for.
    """
    if not (0.0 < mu2 < 1.0):
        raise ValueError("mu2 must lie strictly inside (0, 1)")
    n = corr.size
    vals = np.linalg.eigvalsh(corr.matrix)[::-1]
    total = float(vals.sum())
    if not (vals[0] > 0.0) or not (total > 0.0):
        warnings.warn("degenerate correlation spectrum; falling back to one block")
        return BlockModel(block_count=1, block_sizes=(n,), mu2=float(mu2))

    threshold = max(BLOCK_SIGNIFICANCE * float(vals[0]), total / n)
    # the relative slack keeps eigenvalues that sit on the threshold up to
    # round-off (an identity-like spectrum has all of them at the mean)
    b = int(np.sum(vals >= threshold * (1.0 - 1e-9)))
    if b < 1:  # pragma: no cover - max >= mean makes this unreachable
        warnings.warn("degenerate correlation spectrum; falling back to one block")
        return BlockModel(block_count=1, block_sizes=(n,), mu2=float(mu2))
    sizes = (n - b + 1,) + (1,) * (b - 1)
    return BlockModel(block_count=int(b), block_sizes=sizes, mu2=float(mu2))


# ============================================================================
# Plain-text serialization
# ============================================================================

# Layout: `key=value` lines, then for the correlation matrix a `matrix:`
# marker followed by one CSV row per matrix row. Floats are written with
# repr(), which round-trips binary doubles exactly.


def save_correlation(corr: ToeplitzCorrelation, path) -> None:
    lines = [f"size={corr.size}",
             "first_row=" + ",".join(repr(float(v)) for v in corr.first_row),
             "matrix:"]
    for row in corr.matrix:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_correlation(path) -> ToeplitzCorrelation:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = {}
    rows = []
    in_matrix = False
    for ln in lines:
        if in_matrix:
            rows.append([float(v) for v in ln.split(",")])
        elif ln.strip() == "matrix:":
            in_matrix = True
        else:
            key, _, val = ln.partition("=")
            header[key.strip()] = val
    size = int(header["size"])
    first_row = np.array([float(v) for v in header["first_row"].split(",")])
    matrix = np.array(rows)
    if matrix.shape != (size, size) or first_row.shape != (size,):
        raise ValueError("correlation file is inconsistent with its declared size")
    return ToeplitzCorrelation(size=size, first_row=first_row, matrix=matrix)


def save_block_model(model: BlockModel, path) -> None:
    lines = [f"block_count={model.block_count}",
             "block_sizes=" + ",".join(str(s) for s in model.block_sizes),
             f"mu2={model.mu2!r}"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_block_model(path) -> BlockModel:
    header = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln in fh:
            if ln.strip():
                key, _, val = ln.partition("=")
                header[key.strip()] = val.strip()
    return BlockModel(
        block_count=int(header["block_count"]),
        block_sizes=tuple(int(s) for s in header["block_sizes"].split(",")),
        mu2=float(header["mu2"]),
    )
