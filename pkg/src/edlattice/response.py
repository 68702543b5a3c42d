"""Steady-state frequency response through the lattice Green's function.

The response to a harmonic point source at frequency f is the source column
of the resolvent (f - h)^-1.  For an unbroken one-way coupling the operator
is block-triangular and the column is solved block by block, which is better
conditioned and keeps the structurally forbidden block exactly zero: in an
A-to-B coupled lattice a chain-B source produces *no* response on chain-A.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .lattice import (
    DisorderSpec,
    ModelSpec,
    SYSTEM_I,
    build_realspace,
    chain_blocks,
    chain_sites,
    physical_permutation,
)

RESIDUAL_TOL = 1e-10


class SingularResponseError(ValueError):
    """Raised when the drive frequency hits the lossless spectrum exactly."""


@dataclass
class ResponseField:
    """Per-site response amplitude in physical (left-to-right) site order."""

    site_response: np.ndarray
    frequency: float | tuple[float, float]
    source_site: int
    loss: float
    skipped: list[float] | None = None

    def share(self, sl: slice) -> float:
        """Fraction of the response energy carried by a site slice.

        Mono-frequency profiles store |G| and are squared; band-integrated
        profiles already store the integrated |G|^2 density.
        """
        weight = (self.site_response if isinstance(self.frequency, tuple)
                  else self.site_response ** 2)
        total = float(np.sum(weight))
        if total == 0.0:
            return 0.0
        return float(np.sum(weight[sl]) / total)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["site", "amplitude"])
            for site, amp in enumerate(self.site_response):
                writer.writerow([site, f"{amp:.17g}"])


def _source_vector(spec: ModelSpec, source: int) -> np.ndarray:
    n = 2 * chain_sites(spec)
    if not 0 <= source < n:
        raise ValueError(f"source site {source} outside the {n}-site lattice")
    perm = physical_permutation(spec)
    e = np.zeros(n, dtype=complex)
    e[perm[source]] = 1.0
    return e


def _resolvent_column(spec: ModelSpec, f: float, rhs: np.ndarray,
                      disorder: DisorderSpec | None) -> np.ndarray:
    """Solve (f - h) x = rhs, block-wise when h is block-triangular."""
    n = chain_sites(spec)
    if spec.reverse_coupling == 0.0:
        h_a, h_b = chain_blocks(spec, disorder)
        eye = np.eye(n)
        x = np.zeros(2 * n, dtype=complex)
        if spec.direction == SYSTEM_I:
            # rows: (f - h_A) x_A - kappa x_B = rhs_A ; (f - h_B) x_B = rhs_B
            x[n:] = _solve(f * eye - h_b, rhs[n:], f)
            x[:n] = _solve(f * eye - h_a, rhs[:n] + spec.coupling * x[n:], f)
        else:
            x[:n] = _solve(f * eye - h_a, rhs[:n], f)
            x[n:] = _solve(f * eye - h_b, rhs[n:] + spec.coupling * x[:n], f)
        h = None
    else:
        h = build_realspace(spec, disorder)
        x = _solve(f * np.eye(2 * n) - h, rhs, f)
    if h is None:
        h = build_realspace(spec, disorder)
    residual = np.linalg.norm((f * np.eye(2 * n) - h) @ x - rhs)
    if residual > RESIDUAL_TOL * max(1.0, float(np.linalg.norm(x))):
        raise SingularResponseError(
            f"resolvent solve at f = {f} left residual {residual:.2e}; "
            "the drive frequency sits on the lossless spectrum")
    return x


def _solve(mat: np.ndarray, rhs: np.ndarray, f: float) -> np.ndarray:
    try:
        return sla.solve(mat, rhs)
    except sla.LinAlgError as exc:
        raise SingularResponseError(
            f"(f - h) is singular at f = {f}: add loss or detune") from exc


def greens_response(spec: ModelSpec, f: float, source: int,
                    disorder: DisorderSpec | None = None) -> ResponseField:
    """Mono-frequency response |G(site, source)| to a unit point source.

    ``source`` is a physical (left-to-right, interleaved) site index; the
    returned profile uses the same ordering.
    """
    rhs = _source_vector(spec, source)
    x = _resolvent_column(spec, f, rhs, disorder)
    perm = physical_permutation(spec)
    loss = -float(np.imag(complex(getattr(spec.chainA, "onsite", 0.0))))
    return ResponseField(site_response=np.abs(x[perm]), frequency=float(f),
                         source_site=source, loss=loss)


def integrated_response(spec: ModelSpec, f1: float, f2: float, num_f: int,
                        source: int,
                        disorder: DisorderSpec | None = None) -> ResponseField:
    """Band-integrated response int_{f1}^{f2} |G(site, source)|^2 df.

    Trapezoidal quadrature on a uniform ``num_f``-point grid; frequencies at
    which the resolvent is singular are skipped and reported.
    """
    if not f1 < f2:
        raise ValueError("integrated_response requires f1 < f2")
    if num_f < 16:
        raise ValueError("num_f must be at least 16")
    rhs = _source_vector(spec, source)
    grid = np.linspace(f1, f2, num_f)
    profiles, kept, skipped = [], [], []
    for f in grid:
        try:
            x = _resolvent_column(spec, float(f), rhs, disorder)
        except SingularResponseError:
            skipped.append(float(f))
            continue
        profiles.append(np.abs(x) ** 2)
        kept.append(float(f))
    if len(kept) < 2:
        raise SingularResponseError(
            "fewer than two usable frequencies in the integration band")
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    integrated = trapezoid(np.array(profiles), np.array(kept), axis=0)
    perm = physical_permutation(spec)
    loss = -float(np.imag(complex(getattr(spec.chainA, "onsite", 0.0))))
    return ResponseField(site_response=integrated[perm],
                         frequency=(float(f1), float(f2)), source_site=source,
                         loss=loss, skipped=skipped or None)
