"""Binary field snapshots.

Layout, all little-endian: magic ``MNLS``, version u32, cutoff_degree u32,
N_z u32, L_z f64, t f64, then mode-space coefficients as f64 (re, im) pairs.
Mode order is degree-major with k1 ascending inside a degree (the basis
order); per mode the axial coefficients run over ascending wavenumber.
"""

import struct

import numpy as np

from .axial import build_axial_grid
from .field import field_from_modes, mode_data
from .hermite import build_hermite_basis, build_joint_eigenstructure

MAGIC = b"MNLS"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdd")


class SnapshotFormatError(ValueError):
    """Bad magic, unsupported version, or truncated payload."""


def write_snapshot(field, path):
    c = mode_data(field)
    ordered = np.fft.fftshift(c, axes=1)  # wavenumber ascending: -N/2 .. N/2-1
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        field.basis.cutoff_degree,
        field.grid.point_count,
        field.grid.domain_length,
        field.time,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(ordered, dtype="<c16").tobytes())


def read_snapshot(path, joint=None, grid=None):
    """Bit-exact inverse of write_snapshot.

    When `joint`/`grid` are omitted a fresh discretization is built with the
    default node count and a zero potential; pass the originals to restore a
    field into an existing workspace (shapes are validated).
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, cutoff, n_z, l_z, t = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"{path}: unsupported version {version}")
    n_modes = (cutoff + 1) * (cutoff + 2) // 2
    expected = _HEADER.size + 16 * n_modes * n_z
    if len(raw) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(raw) - _HEADER.size} bytes, "
            f"expected {expected - _HEADER.size} (= {n_modes} modes x {n_z} wavenumbers)"
        )
    flat = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    ordered = flat.reshape(n_modes, n_z)
    coeffs = np.fft.ifftshift(ordered, axes=1)
    if joint is None:
        basis = build_hermite_basis(cutoff, max(2 * cutoff, cutoff + 2, 8))
        joint = build_joint_eigenstructure(basis)
    elif joint.basis.cutoff_degree != cutoff:
        raise SnapshotFormatError(
            f"{path}: snapshot cutoff {cutoff} != workspace cutoff "
            f"{joint.basis.cutoff_degree}"
        )
    if grid is None:
        grid = build_axial_grid(l_z, n_z)
    elif grid.point_count != n_z or grid.domain_length != l_z:
        raise SnapshotFormatError(
            f"{path}: snapshot grid ({n_z}, {l_z}) != workspace grid "
            f"({grid.point_count}, {grid.domain_length})"
        )
    return field_from_modes(joint, grid, coeffs.copy(), time=t)
