"""Dense eigen-decomposition, boundary spectra, winding numbers and the GBZ.

Open-boundary spectra of the coupled lattice are computed block-wise by
default: with strictly one-way coupling the operator is block-triangular, so
its spectrum is exactly the union of the chain spectra, and the chain blocks
stay well conditioned even where the coupled eigenproblem is maximally
ill-conditioned (extensively defective).  The full-operator path is kept as a
fallback and cross-check.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .lattice import (
    BetaRoot,
    ModelSpec,
    DisorderSpec,
    bloch_blocks,
    build_realspace,
    chain_blocks,
    edge_indices,
    factor_polynomial,
    factor_residual,
)

EIG_RESIDUAL_TOL = 1e-10      # relative to the operator norm
DEGENERACY_TOL = 1e-8         # eigenvalues closer than this form a cluster
SPECTRUM_MATCH_TOL = 1e-6     # finite-size band-edge mismatch allowance
GBZ_RESIDUAL_TOL = 1e-8


class EigenConvergenceError(RuntimeError):
    """The QR iteration failed to converge; carries the solver message."""


class EigenAccuracyError(RuntimeError):
    """An eigenpair residual exceeded the contract tolerance."""


class WindingError(ValueError):
    """Reference energy too close to the spectrum, or grid too coarse."""


@dataclass
class EigenResult:
    """Right eigenpairs with per-pair residuals and conditioning.

    ``conditioning[i]`` is the reciprocal eigenvalue condition number
    ``|<left_i|right_i>|`` (unit-norm vectors); values near zero flag
    (near-)defective pairs.  Eigenvalues closer than ``DEGENERACY_TOL`` are
    grouped into clusters that share the minimum conditioning of the group.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    residuals: np.ndarray
    conditioning: np.ndarray
    clusters: list[list[int]]


def eig(op: np.ndarray) -> EigenResult:
    """Eigen-decomposition contract for dense complex non-symmetric operators.

    Eigenvectors are unit 2-norm columns; every pair satisfies
    ``|op v - E v| <= EIG_RESIDUAL_TOL * |op|``, otherwise an explicit error
    is raised instead of returning a silently wrong answer.
    """
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError("eig expects a square operator")
    try:
        w, vl, vr = sla.eig(op, left=True, right=True)
    except sla.LinAlgError as exc:  # pragma: no cover - hard to trigger
        raise EigenConvergenceError(str(exc)) from exc
    vr = vr / np.linalg.norm(vr, axis=0)
    vl = vl / np.linalg.norm(vl, axis=0)
    residuals = np.linalg.norm(op @ vr - vr * w, axis=0)
    norm = np.linalg.norm(op, 2) if op.size else 0.0
    if norm > 0 and residuals.max() > EIG_RESIDUAL_TOL * norm:
        raise EigenAccuracyError(
            f"eigenpair residual {residuals.max():.3e} exceeds "
            f"{EIG_RESIDUAL_TOL:.0e} * |op| = {EIG_RESIDUAL_TOL * norm:.3e}")
    conditioning = np.abs(np.sum(vl.conj() * vr, axis=0))
    clusters = _degenerate_clusters(w)
    for members in clusters:
        if len(members) > 1:
            conditioning[members] = conditioning[members].min()
    return EigenResult(eigenvalues=w, right=vr, residuals=residuals,
                       conditioning=conditioning, clusters=clusters)


def _degenerate_clusters(w: np.ndarray) -> list[list[int]]:
    order = np.lexsort((w.imag, w.real))
    clusters: list[list[int]] = []
    for idx in order:
        if clusters and abs(w[idx] - w[clusters[-1][-1]]) < DEGENERACY_TOL:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])
    return clusters


def sort_complex(values: np.ndarray) -> np.ndarray:
    """Indices sorting complex values by (real, imaginary) part."""
    return np.lexsort((np.imag(values), np.real(values)))


# ---------------------------------------------------------------------------
# spectrum containers

@dataclass
class SpectrumSet:
    """Eigenvalues with block provenance and conditioning metadata."""

    eigenvalues: np.ndarray
    block_label: list[str]
    boundary: str
    conditioning: np.ndarray
    k_values: np.ndarray | None = None

    def select(self, label: str) -> np.ndarray:
        mask = np.array([lab == label for lab in self.block_label])
        return self.eigenvalues[mask]

    def rows(self):
        for ev, lab, cond in zip(self.eigenvalues, self.block_label, self.conditioning):
            yield {"re": ev.real, "im": ev.imag, "label": lab, "conditioning": cond}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re", "im", "label", "conditioning"])
            for row in self.rows():
                writer.writerow([f"{row['re']:.17g}", f"{row['im']:.17g}",
                                 row["label"], f"{row['conditioning']:.17g}"])

    def to_json(self, path) -> None:
        payload = {"boundary": self.boundary, "eigenvalues": list(self.rows())}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)


@dataclass
class GBZPortrait:
    """(E, beta) pairs per characteristic factor plus |beta| cluster centers."""

    entries: list[tuple[complex, complex, str]]
    radius_clusters: list[float]
    failures: list[dict]

    def radii(self, factor: str | None = None) -> np.ndarray:
        return np.array([abs(b) for (_, b, f) in self.entries
                         if factor is None or f == factor])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re_E", "im_E", "re_beta", "im_beta", "factor"])
            for e, b, f in self.entries:
                writer.writerow([f"{e.real:.17g}", f"{e.imag:.17g}",
                                 f"{b.real:.17g}", f"{b.imag:.17g}", f])

    def to_json(self, path) -> None:
        payload = {
            "radius_clusters": self.radius_clusters,
            "entries": [{"re_E": e.real, "im_E": e.imag, "re_beta": b.real,
                         "im_beta": b.imag, "factor": f}
                        for e, b, f in self.entries],
            "failures": self.failures,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)


# ---------------------------------------------------------------------------
# boundary spectra

def pbc_spectrum(spec: ModelSpec, num_k: int = 512) -> SpectrumSet:
    """Bloch spectrum sampled on a uniform k grid.

    Each diagonal block is solved separately, which labels every eigenvalue
    exactly and is valid because the coupled spectrum is the plain union of
    the chain spectra for any one-way coupling strength.
    """
    if num_k < 16:
        raise ValueError("num_k must be at least 16")
    eigenvalues, labels, conds, ks = [], [], [], []
    for j in range(num_k):
        k = 2.0 * np.pi * j / num_k
        h_a, h_b = bloch_blocks(spec, k)
        for label, block in (("A", h_a), ("B", h_b)):
            res = eig(block)
            order = sort_complex(res.eigenvalues)
            eigenvalues.extend(res.eigenvalues[order])
            conds.extend(res.conditioning[order])
            labels.extend([label] * block.shape[0])
            ks.extend([k] * block.shape[0])
    return SpectrumSet(eigenvalues=np.array(eigenvalues), block_label=labels,
                       boundary="PBC", conditioning=np.array(conds),
                       k_values=np.array(ks))


def obc_spectrum(spec: ModelSpec, disorder: DisorderSpec | None = None) -> SpectrumSet:
    """Open-boundary spectrum, block-wise (exact) for one-way coupling.

    With a nonzero reverse coupling the block structure is broken and the
    full operator is diagonalized instead, with all labels ``mixed``.
    """
    if spec.boundary != "OBC":
        raise ValueError("obc_spectrum requires boundary = 'OBC'")
    if spec.reverse_coupling != 0.0:
        res = eig(build_realspace(spec, disorder))
        order = sort_complex(res.eigenvalues)
        return SpectrumSet(eigenvalues=res.eigenvalues[order],
                           block_label=["mixed"] * len(order),
                           boundary="OBC",
                           conditioning=res.conditioning[order])
    h_a, h_b = chain_blocks(spec, disorder)
    eigenvalues, labels, conds = [], [], []
    for label, block in (("A", h_a), ("B", h_b)):
        res = eig(block)
        order = sort_complex(res.eigenvalues)
        eigenvalues.extend(res.eigenvalues[order])
        conds.extend(res.conditioning[order])
        labels.extend([label] * block.shape[0])
    return SpectrumSet(eigenvalues=np.array(eigenvalues), block_label=labels,
                       boundary="OBC", conditioning=np.array(conds))


# ---------------------------------------------------------------------------
# winding number

def winding_number(spec: ModelSpec, E0: complex, num_k: int = 512,
                   block: str = "full") -> int:
    """Spectral winding of ``det[H(k) - E0]`` around zero.

    Orientation is counterclockwise-positive with the Bloch convention of
    this package; a single-band chain whose skin modes sit at the left edge
    (``delta > 0``) winds ``+1`` around energies inside its spectral loop.
    The phase of the determinant is accumulated increment by increment over
    the k grid and the total must land on an integer within 0.1.
    """
    if block not in ("full", "A", "B"):
        raise ValueError("block must be 'full', 'A' or 'B'")
    dets = np.empty(num_k, dtype=complex)
    min_dist = math.inf
    for j in range(num_k):
        k = 2.0 * np.pi * j / num_k
        h_a, h_b = bloch_blocks(spec, k)
        blocks = {"A": (h_a,), "B": (h_b,), "full": (h_a, h_b)}[block]
        det = 1.0 + 0.0j
        for b in blocks:
            det *= np.linalg.det(b - E0 * np.eye(b.shape[0]))
            min_dist = min(min_dist, float(np.min(np.abs(np.linalg.eigvals(b) - E0))))
        dets[j] = det
    if min_dist < 1e-8:
        raise WindingError(
            f"E0 = {E0} is within {min_dist:.2e} of the sampled spectrum")
    increments = np.angle(np.roll(dets, -1) / dets)
    total = float(np.sum(increments)) / (2.0 * np.pi)
    nearest = round(total)
    if abs(total - nearest) > 0.1:
        raise WindingError(
            f"phase accumulation drift {abs(total - nearest):.3f} exceeds 0.1; "
            "increase num_k")
    return int(nearest)


# ---------------------------------------------------------------------------
# generalized Brillouin zone

def gbz_portrait(spec: ModelSpec, disorder: DisorderSpec | None = None,
                 include_edge_modes: bool = False) -> GBZPortrait:
    """Skin-depth portrait: per OBC eigenvalue, the mid-modulus root pair.

    For every bulk open-boundary eigenvalue ``E`` carrying block label ``X``
    the characteristic factor ``f_X(beta, E) = 0`` is solved and the two
    middle roots by modulus (the pair that sets the decay rate of the
    boundary-compatible solution) are retained.  In-gap edge modes are
    excluded unless requested.  ``beta`` is counted per unit cell.
    """
    ss = obc_spectrum(spec, disorder)
    if "mixed" in ss.block_label:
        raise ValueError("gbz_portrait requires an unbroken one-way coupling")
    entries: list[tuple[complex, complex, str]] = []
    failures: list[dict] = []
    for label, chain in (("A", spec.chainA), ("B", spec.chainB)):
        evs = ss.select(label)
        if not include_edge_modes:
            offset = spec.offsetB if label == "B" else 0.0
            skip = set(edge_indices(evs, chain, offset).tolist())
        else:
            skip = set()
        for i, e in enumerate(evs):
            if i in skip:
                continue
            coeffs = factor_polynomial(spec, label, e)
            if len(coeffs) < 2:
                failures.append({"re_E": e.real, "im_E": e.imag, "factor": label,
                                 "reason": "degenerate polynomial"})
                continue
            roots = np.roots(coeffs)
            roots = roots[np.argsort(np.abs(roots))]
            d = len(roots)
            pair = roots[d // 2 - 1: d // 2 + 1] if d >= 2 else roots
            for b in pair:
                resid = factor_residual(spec, label, e, complex(b))
                if resid > GBZ_RESIDUAL_TOL:
                    failures.append({"re_E": e.real, "im_E": e.imag,
                                     "factor": label, "reason": f"residual {resid:.2e}"})
                    continue
                entries.append((complex(e), complex(b), label))
    radii = np.sort(np.array([abs(b) for (_, b, _) in entries]))
    return GBZPortrait(entries=entries, radius_clusters=_cluster_radii(radii),
                       failures=failures)


def _cluster_radii(radii: np.ndarray, gap: float = 0.05) -> list[float]:
    if len(radii) == 0:
        return []
    centers: list[float] = []
    start = 0
    for i in range(1, len(radii) + 1):
        if i == len(radii) or radii[i] - radii[i - 1] > gap:
            centers.append(float(np.mean(radii[start:i])))
            start = i
    return centers


# ---------------------------------------------------------------------------
# resolvent norm (pseudospectrum proxy)

def resolvent_norm(op: np.ndarray, E: complex) -> float:
    """Largest singular value of ``(op - E)^-1`` without forming the inverse.

    Computed as the reciprocal of the smallest singular value of the shifted
    operator.  A numerically singular shift returns ``inf`` (with a runtime
    warning) rather than failing.
    """
    op = np.asarray(op, dtype=complex)
    shifted = op - complex(E) * np.eye(op.shape[0])
    smin = float(sla.svdvals(shifted)[-1])
    if smin == 0.0 or not np.isfinite(1.0 / smin):
        warnings.warn(f"shifted operator is numerically singular at E = {E}",
                      RuntimeWarning, stacklevel=2)
        return math.inf
    return 1.0 / smin
