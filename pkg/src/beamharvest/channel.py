"""One coherence-time channel draw: Rayleigh sensor vector, isotropic
orthonormal beam set, and per-beam projection powers.

Beams are the rows of a unitary matrix drawn from the rotation-invariant
distribution (QR of a complex Gaussian matrix with the phase convention that
makes the triangular factor's diagonal real positive, which both enforces the
invariant distribution and keeps draws seed-deterministic).  For a
unit-variance circularly-symmetric channel vector the projections onto any
orthonormal set are i.i.d. unit exponentials.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .model import SystemParams

__all__ = [
    "ChannelRealization",
    "draw_realization",
    "ordered_projections",
    "haar_unitary",
    "sample_gaussian_vectors",
    "realization_to_csv",
    "realization_from_csv",
]


@dataclass
class ChannelRealization:
    sensor_channel: np.ndarray        # h_e, shape (M,), CN(0,1) entries
    beams: np.ndarray                 # W, shape (M,M), rows orthonormal
    projections: np.ndarray           # alpha_m = |<h_e, w_m>|^2, shape (M,)
    user_channels: np.ndarray | None = None  # shape (K,M), sum-rate runs only


def sample_gaussian_vectors(rng: np.random.Generator, *shape) -> np.ndarray:
    """i.i.d. circularly-symmetric complex Gaussian entries, unit variance."""
    parts = rng.normal(0.0, np.sqrt(0.5), size=(*shape, 2))
    return parts.view(np.complex128)[..., 0]


def haar_unitary(rng: np.random.Generator, m: int, count: int | None = None) -> np.ndarray:
    """Rotation-invariant random unitary matrices, shape (m,m) or (count,m,m).

    QR of a complex Gaussian matrix; the phase of each column is fixed so the
    triangular factor has a real positive diagonal, which removes the gauge
    freedom that would otherwise bias the distribution.
    """
    squeeze = count is None
    n = 1 if squeeze else count
    g = sample_gaussian_vectors(rng, n, m, m)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (d.conj() / np.abs(d))[:, None, :]
    return q[0] if squeeze else q


def _projections(h: np.ndarray, w: np.ndarray) -> np.ndarray:
    # rows of w are the beams; batched over a leading axis when present
    if h.ndim == 1:
        return np.abs(w @ h.conj()) ** 2
    return np.abs(np.einsum("nij,nj->ni", w, h.conj())) ** 2


def draw_realization(params: SystemParams, rng_seed: int,
                     with_users: bool = False) -> ChannelRealization:
    """Draw one coherence-time realization, deterministic in (seed, params).

    Draw order is fixed (sensor vector, beams, then user matrix) so a given
    seed always reproduces the same realization bit for bit.
    """
    rng = np.random.default_rng(rng_seed)
    m = params.antennas
    h = sample_gaussian_vectors(rng, m)
    w = haar_unitary(rng, m)
    users = sample_gaussian_vectors(rng, params.users, m) if with_users else None
    return ChannelRealization(
        sensor_channel=h,
        beams=w,
        projections=_projections(h, w),
        user_channels=users,
    )


def ordered_projections(real: ChannelRealization):
    """Descending projection powers and their partial sums z_1..z_M."""
    alpha = np.sort(real.projections)[::-1]
    return alpha, np.cumsum(alpha)


# --- text dump for golden-file tests: one row per complex entry ------------

_PARTS = ("sensor_channel", "beams", "projections", "user_channels")


def realization_to_csv(real: ChannelRealization, path_or_file) -> None:
    """Dump a realization as CSV rows `part,row,col,re,im` (17 sig digits).

    Projections are real; their rows carry im = 0.
    """
    def emit(fh):
        fh.write("part,row,col,re,im\n")
        for name in _PARTS:
            arr = getattr(real, name)
            if arr is None:
                continue
            mat = np.atleast_2d(arr)
            for i in range(mat.shape[0]):
                for j in range(mat.shape[1]):
                    v = complex(mat[i, j])
                    fh.write(f"{name},{i},{j},{v.real:.17g},{v.imag:.17g}\n")

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
    else:
        emit(path_or_file)


def realization_from_csv(path_or_file) -> ChannelRealization:
    """Inverse of realization_to_csv."""
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file) as fh:
            text = fh.read()
    else:
        text = path_or_file.read()
    cells: dict[str, dict[tuple[int, int], complex]] = {}
    reader = io.StringIO(text)
    header = reader.readline().strip()
    if header != "part,row,col,re,im":
        raise ValueError(f"unexpected header {header!r}")
    for line in reader:
        line = line.strip()
        if not line:
            continue
        name, i, j, re_, im_ = line.split(",")
        cells.setdefault(name, {})[(int(i), int(j))] = float(re_) + 1j * float(im_)

    def build(name, dtype):
        if name not in cells:
            return None
        d = cells[name]
        rows = 1 + max(k[0] for k in d)
        cols = 1 + max(k[1] for k in d)
        out = np.zeros((rows, cols), dtype=complex)
        for (i, j), v in d.items():
            out[i, j] = v
        out = out.astype(dtype) if dtype is not complex else out
        return out

    h = build("sensor_channel", complex)[0]
    w = build("beams", complex)
    alpha = build("projections", complex)[0].real
    users = build("user_channels", complex)
    return ChannelRealization(sensor_channel=h, beams=w,
                              projections=alpha, user_channels=users)
