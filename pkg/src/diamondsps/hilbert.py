"""Composite Hilbert space of one vibronic center, a cavity mode and a waveguide mode."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Atomic basis ordering: excited, ground (zero-phonon), ground (sideband), shelf.
EXCITED, GROUND0, GROUND1, SHELF = 0, 1, 2, 3
ATOM_DIM = 4
ATOM_LABELS = ("e", "g0", "g1", "h")


@dataclass(frozen=True)
class HilbertSpace:
    """Tensor space atom (dim 4) x cavity Fock x waveguide Fock."""

    fock_cavity_dim: int = 3
    fock_waveguide_dim: int = 3

    def __post_init__(self):
        if self.fock_cavity_dim < 2 or self.fock_waveguide_dim < 2:
            raise ValueError("Fock spaces must admit at least one photon (dim >= 2)")

    @property
    def atomic_dim(self) -> int:
        return ATOM_DIM

    @property
    def dims(self) -> tuple[int, int, int]:
        return (ATOM_DIM, self.fock_cavity_dim, self.fock_waveguide_dim)

    @property
    def total_dim(self) -> int:
        return ATOM_DIM * self.fock_cavity_dim * self.fock_waveguide_dim

    def index(self, atom: int, n_cavity: int, n_waveguide: int) -> int:
        """Flat basis index of |atom, n_c, n_w>."""
        da, dc, dw = self.dims
        if not (0 <= atom < da and 0 <= n_cavity < dc and 0 <= n_waveguide < dw):
            raise ValueError(f"state ({atom},{n_cavity},{n_waveguide}) outside {self.dims}")
        return (atom * dc + n_cavity) * dw + n_waveguide

    def labels(self) -> list[str]:
        da, dc, dw = self.dims
        return [
            f"|{ATOM_LABELS[a]},{nc}c,{nw}w>"
            for a in range(da)
            for nc in range(dc)
            for nw in range(dw)
        ]

    def basis_state(self, atom: int, n_cavity: int, n_waveguide: int) -> np.ndarray:
        psi = np.zeros(self.total_dim, dtype=complex)
        psi[self.index(atom, n_cavity, n_waveguide)] = 1.0
        return psi


def annihilation(dim: int) -> np.ndarray:
    """Truncated bosonic annihilation operator, a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def atomic_projector(bra: int, ket: int) -> np.ndarray:
    """sigma_{bra,ket} = |bra><ket| on the four-level atomic factor."""
    op = np.zeros((ATOM_DIM, ATOM_DIM), dtype=complex)
    op[bra, ket] = 1.0
    return op


def embed(op: np.ndarray, factor_index: int, space: HilbertSpace) -> np.ndarray:
    """Lift a single-factor operator to the full space: I x ... x op x ... x I."""
    dims = space.dims
    if factor_index not in (0, 1, 2):
        raise ValueError("factor_index must be 0 (atom), 1 (cavity) or 2 (waveguide)")
    d = dims[factor_index]
    op = np.asarray(op, dtype=complex)
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match factor dim {d}")
    out = np.array([[1.0 + 0j]])
    for i, di in enumerate(dims):
        out = np.kron(out, op if i == factor_index else np.eye(di, dtype=complex))
    return out
