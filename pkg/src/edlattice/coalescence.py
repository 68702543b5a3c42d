"""Eigenspace extraction, cosine similarity, localization gauge and the
coalescence criterion for one-way-coupled double chains.

The central diagnostic is the pairwise alignment of the two eigenvector
families E(h_A) and E(h_B) of the coupled open-boundary operator, where a
family collects the full-operator eigenvectors whose eigenvalues belong to
one chain's spectrum.  When the chain spectra coincide and the inter-chain
matrix elements do not vanish, the two families coalesce pairwise and the
operator acquires an extensive number of size-2 Jordan cells.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment

from .lattice import (
    DisorderSpec,
    ModelSpec,
    SYSTEM_I,
    build_realspace,
    chain_blocks,
    chain_center,
    edge_indices,
    expected_edge_modes,
    physical_permutation,
)
from .spectra import eig, sort_complex

PAIRING_RULES = ("ascending-real", "nearest-eigenvalue")
STRUCTURED_RESIDUAL_TOL = 1e-8
AMBIGUITY_TOL = 1e-12


class SingularResolventError(ValueError):
    """Raised when a structured eigenvector is requested in the coalescence
    regime, where the target-block resolvent does not exist."""


class EmptyEigenspaceError(ValueError):
    """Raised when a similarity is requested for an empty eigenspace pair."""


@dataclass
class EigenspacePair:
    """Matched bulk eigenvector families of the coupled operator.

    ``vecs_A[:, i]`` and ``vecs_B[:, pairing[i]]`` are partner states, both
    unit-norm columns over the full (2-chain) lattice in chain-major storage
    order.  In-gap edge modes are excluded from both families and listed in
    ``excluded``.
    """

    evals_A: np.ndarray
    vecs_A: np.ndarray
    evals_B: np.ndarray
    vecs_B: np.ndarray
    pairing: np.ndarray
    excluded: list[dict]
    spec: ModelSpec
    pairing_rule: str = "ascending-real"
    ambiguous: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.vecs_A.shape[1]


@dataclass
class EDReport:
    """Coalescence diagnostics of one model configuration."""

    similarity: float
    mean_G_A: float
    mean_G_B: float
    min_singular_of_eigenbasis: float
    matrix_elements: list[dict]
    verdict: str
    thresholds: dict
    matched_pairs: int
    spectra_match: bool
    notes: list[str]

    def to_json(self, path) -> None:
        payload = {
            "similarity": self.similarity,
            "mean_G_A": self.mean_G_A,
            "mean_G_B": self.mean_G_B,
            "min_singular_of_eigenbasis": self.min_singular_of_eigenbasis,
            "verdict": self.verdict,
            "thresholds": self.thresholds,
            "matched_pairs": self.matched_pairs,
            "spectra_match": self.spectra_match,
            "matrix_elements": self.matrix_elements,
            "notes": self.notes,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)


# ---------------------------------------------------------------------------
# eigenspace extraction

def _block_eigensystem(spec: ModelSpec, disorder):
    h_a, h_b = chain_blocks(spec, disorder)
    res_a, res_b = eig(h_a), eig(h_b)
    oa, ob = sort_complex(res_a.eigenvalues), sort_complex(res_b.eigenvalues)
    evs_a, evs_b = res_a.eigenvalues[oa], res_b.eigenvalues[ob]
    vec_a, vec_b = res_a.right[:, oa], res_b.right[:, ob]
    edge_a = set(edge_indices(evs_a, spec.chainA).tolist())
    edge_b = set(edge_indices(evs_b, spec.chainB, spec.offsetB).tolist())
    return (h_a, h_b), (evs_a, vec_a, edge_a), (evs_b, vec_b, edge_b)


def extract_eigenspaces(spec: ModelSpec, disorder: DisorderSpec | None = None,
                        pairing_rule: str = "ascending-real") -> EigenspacePair:
    """Partition the coupled operator's eigenvectors into the two families.

    Full-operator eigenvectors are labeled by bijective nearest-eigenvalue
    matching against the block-wise spectra.  With zero inter-chain coupling
    the operator is block-diagonal and the (then exactly known) block
    eigenvectors are used directly, which keeps degenerate cross-chain
    subspaces from being mixed arbitrarily by the dense solver.  States
    matched to in-gap edge eigenvalues are excluded from both families.
    """
    if spec.boundary != "OBC":
        raise ValueError("extract_eigenspaces requires boundary = 'OBC'")
    if spec.reverse_coupling != 0.0:
        raise ValueError("extract_eigenspaces requires reverse_coupling = 0")
    if pairing_rule not in PAIRING_RULES:
        raise ValueError(f"pairing_rule must be one of {PAIRING_RULES}")
    (h_a, h_b), (evs_a, vec_a, edge_a), (evs_b, vec_b, edge_b) = \
        _block_eigensystem(spec, disorder)
    n = h_a.shape[0]
    ambiguous: list[int] = []

    if spec.coupling == 0.0:
        full_evs = np.concatenate([evs_a, evs_b])
        full_vecs = np.zeros((2 * n, 2 * n), dtype=complex)
        full_vecs[:n, :n] = vec_a
        full_vecs[n:, n:] = vec_b
        labels = np.array(["A"] * n + ["B"] * n)
        matched_block_index = np.concatenate([np.arange(n), np.arange(n)])
    else:
        res = eig(build_realspace(spec, disorder))
        full_evs, full_vecs = res.eigenvalues, res.right
        union = np.concatenate([evs_a, evs_b])
        cost = np.abs(full_evs[:, None] - union[None, :])
        rows, cols = linear_sum_assignment(cost)
        order = np.argsort(rows)
        cols = cols[order]
        labels = np.where(cols < n, "A", "B")
        matched_block_index = np.where(cols < n, cols, cols - n)
        ambiguous = _resolve_ambiguous(full_evs, full_vecs, cost, cols, labels,
                                       matched_block_index, n)

    excluded: list[dict] = []
    keep = np.ones(len(full_evs), dtype=bool)
    for i in range(len(full_evs)):
        eset = edge_a if labels[i] == "A" else edge_b
        if int(matched_block_index[i]) in eset:
            keep[i] = False
            excluded.append({"re": full_evs[i].real, "im": full_evs[i].imag,
                             "label": str(labels[i])})

    sel_a = np.where(keep & (labels == "A"))[0]
    sel_b = np.where(keep & (labels == "B"))[0]
    sel_a = sel_a[sort_complex(full_evs[sel_a])]
    sel_b = sel_b[sort_complex(full_evs[sel_b])]
    evals_A, vecs_A = full_evs[sel_a], full_vecs[:, sel_a]
    evals_B, vecs_B = full_evs[sel_b], full_vecs[:, sel_b]

    m = min(len(sel_a), len(sel_b))
    if pairing_rule == "ascending-real":
        pairing = np.arange(m)
    else:
        cost = np.abs(evals_A[:m, None] - evals_B[None, :m])
        rows, cols = linear_sum_assignment(cost)
        pairing = cols[np.argsort(rows)]
    return EigenspacePair(evals_A=evals_A, vecs_A=vecs_A, evals_B=evals_B,
                          vecs_B=vecs_B, pairing=pairing, excluded=excluded,
                          spec=spec, pairing_rule=pairing_rule,
                          ambiguous=ambiguous)


def _resolve_ambiguous(full_evs, full_vecs, cost, cols, labels,
                       matched_block_index, n) -> list[int]:
    """Break label ties inside degenerate clusters by chain support.

    When a full eigenvalue sits (within tolerance) equally close to a chain-A
    and a chain-B eigenvalue, the bijective assignment is kept but the slots
    inside the cluster are reordered so that states with dominant chain-A
    weight take the A labels.  All such states are flagged.
    """
    flagged: list[int] = []
    order = np.lexsort((full_evs.imag, full_evs.real))
    cluster: list[int] = []

    def flush(cluster):
        if len(cluster) < 2:
            return
        labs = {labels[i] for i in cluster}
        if labs != {"A", "B"}:
            return
        dists = [abs(cost[i, :n].min() - cost[i, n:].min()) for i in cluster]
        if max(dists) > AMBIGUITY_TOL:
            return
        support = []
        for i in cluster:
            v = full_vecs[:, i]
            support.append(float(np.sum(np.abs(v[:n]) ** 2)))
        slots = sorted(cluster, key=lambda i: (labels[i] != "A"))
        by_support = [cluster[j] for j in np.argsort(support)[::-1]]
        new_labels = [labels[s] for s in slots]
        new_blocks = [matched_block_index[s] for s in slots]
        for state, lab, blk in zip(by_support, new_labels, new_blocks):
            labels[state] = lab
            matched_block_index[state] = blk
            flagged.append(int(state))

    for idx in order:
        if cluster and abs(full_evs[idx] - full_evs[cluster[-1]]) > AMBIGUITY_TOL:
            flush(cluster)
            cluster = []
        cluster.append(int(idx))
    flush(cluster)
    return flagged


# ---------------------------------------------------------------------------
# similarity and localization

def cosine_similarity(pair: EigenspacePair) -> float:
    """Frobenius-normalized sum of paired eigenvector overlaps, in [0, 1].

    Each term enters as a modulus, so the result is invariant under a global
    phase rotation of any participating eigenvector.
    """
    m = min(pair.vecs_A.shape[1], pair.vecs_B.shape[1])
    if m == 0:
        raise EmptyEigenspaceError("cannot compute similarity of empty eigenspaces")
    overlaps = np.abs(np.sum(pair.vecs_A[:, :m].conj()
                             * pair.vecs_B[:, pair.pairing], axis=0))
    denom = np.sqrt(float(pair.vecs_A.shape[1]) * float(pair.vecs_B.shape[1]))
    return float(min(1.0, np.sum(overlaps) / denom))


def localization_gauge(state: np.ndarray, permutation: np.ndarray | None = None) -> float:
    """Amplitude-weighted mean site position, normalized by the lattice size.

    ``G ~ 1/2`` flags an extended state, small values a left-localized skin
    mode.  Site positions are counted 1..n in physical left-to-right order;
    pass ``permutation`` (see :func:`edlattice.lattice.physical_permutation`)
    when the state is stored chain-major.
    """
    amps = np.abs(np.asarray(state))
    if permutation is not None:
        amps = amps[permutation]
    total = float(np.sum(amps))
    if total == 0.0:
        raise ValueError("localization gauge of a zero vector is undefined")
    n = len(amps)
    positions = np.arange(1, n + 1)
    return float(np.sum(positions * amps) / (n * total))


def pair_gauges(pair: EigenspacePair) -> tuple[np.ndarray, np.ndarray]:
    """Localization gauge of every bulk state, per family."""
    perm = physical_permutation(pair.spec)
    g_a = np.array([localization_gauge(pair.vecs_A[:, i], perm)
                    for i in range(pair.vecs_A.shape[1])])
    g_b = np.array([localization_gauge(pair.vecs_B[:, i], perm)
                    for i in range(pair.vecs_B.shape[1])])
    return g_a, g_b


def state_gauges(spec: ModelSpec, disorder: DisorderSpec | None = None,
                 exclude_edge: bool = True) -> list[dict]:
    """(eigenvalue, G) rows for every open-boundary eigenstate.

    Works for any reverse coupling: the full operator is diagonalized and
    edge states are identified by proximity to the spectral gap centers of
    the two chains (counted from the chain parameters).
    """
    res = eig(build_realspace(spec, disorder))
    perm = physical_permutation(spec)
    order = sort_complex(res.eigenvalues)
    evs = res.eigenvalues[order]
    vecs = res.right[:, order]
    skip: set[int] = set()
    if exclude_edge:
        n_edge = expected_edge_modes(spec.chainA) + expected_edge_modes(spec.chainB)
        if n_edge:
            centers = [chain_center(spec.chainA), chain_center(spec.chainB, spec.offsetB)]
            dist = np.min(np.abs(evs[:, None] - np.array(centers)[None, :]), axis=1)
            skip = set(np.argsort(dist)[:n_edge].tolist())
    rows = []
    for i in range(len(evs)):
        if i in skip:
            continue
        rows.append({"re": evs[i].real, "im": evs[i].imag,
                     "G": localization_gauge(vecs[:, i], perm)})
    return rows


# ---------------------------------------------------------------------------
# structured eigenvectors

def structured_eigenvector(spec: ModelSpec, E: complex, u_src: np.ndarray,
                           disorder: DisorderSpec | None = None,
                           singular_tol: float = 1e-6) -> np.ndarray:
    """Eigenvector of the coupled operator built from a source-chain state.

    For an eigenvalue ``E`` of the source chain (the chain the one-way
    coupling leaves) that stays away from the target-chain spectrum, the full
    eigenvector is the source eigenvector dressed with the target-block
    resolvent driven through the coupling.  The result is normalized and
    verified to satisfy the eigenvalue equation to ``1e-8``.
    """
    h_a, h_b = chain_blocks(spec, disorder)
    if spec.direction == SYSTEM_I:
        h_target, h_source = h_a, h_b
    else:
        h_target, h_source = h_b, h_a
    target_evs = np.linalg.eigvals(h_target)
    dist = float(np.min(np.abs(target_evs - E)))
    if dist < singular_tol:
        raise SingularResolventError(
            f"E = {E} lies within {dist:.2e} of the target-chain spectrum: "
            "resolvent singular (coalescence regime); use defectiveness "
            "analysis instead")
    u_src = np.asarray(u_src, dtype=complex)
    n = h_target.shape[0]
    driven = -sla.solve(h_target - E * np.eye(n), spec.coupling * u_src)
    if spec.direction == SYSTEM_I:
        phi = np.concatenate([driven, u_src])
    else:
        phi = np.concatenate([u_src, driven])
    phi = phi / np.linalg.norm(phi)
    h = build_realspace(spec, disorder)
    residual = float(np.linalg.norm(h @ phi - E * phi))
    if residual > STRUCTURED_RESIDUAL_TOL * max(1.0, float(np.linalg.norm(h, 2))):
        raise ValueError(
            f"structured eigenvector residual {residual:.3e} exceeds tolerance; "
            "E is probably not an eigenvalue of the source chain")
    return phi


# ---------------------------------------------------------------------------
# coalescence criterion

def ed_condition_from_blocks(h_target: np.ndarray, h_source: np.ndarray,
                             coupling_block: np.ndarray,
                             full_op: np.ndarray | None = None,
                             match_tol: float = 1e-6,
                             element_tol_scale: float = 1e-8) -> dict:
    """Inter-chain matrix elements and spectra matching for raw blocks.

    Computes |<left(target, E)| coupling |right(source, E)>| for every
    degenerate pair E shared by the two blocks (left eigenvectors are
    bi-orthonormalized against the right ones via the inverse eigenvector
    matrix).  The coalescence criterion: the coupled operator is defective at
    E exactly when such an element is nonzero.
    """
    res_t = eig(np.asarray(h_target, dtype=complex))
    res_s = eig(np.asarray(h_source, dtype=complex))
    eigenvalues = {"target": res_t.eigenvalues, "source": res_s.eigenvalues}
    notes: list[str] = []
    elements: list[dict] = []
    u_t = res_t.right
    try:
        v_t = np.linalg.inv(u_t)  # rows are bi-orthonormal left eigenvectors
        basis_cond = 1.0 / np.linalg.cond(u_t)
    except np.linalg.LinAlgError:
        v_t = None
        basis_cond = 0.0
    if v_t is None or basis_cond < 1e-13:
        notes.append("target block is (near-)defective: left eigenvectors "
                     "unavailable, matrix elements skipped")
        v_t = None

    evs_t, evs_s = res_t.eigenvalues, res_s.eigenvalues
    cost = np.abs(evs_t[:, None] - evs_s[None, :])
    rows, cols = linear_sum_assignment(cost)
    matched = [(int(i), int(j)) for i, j in zip(rows, cols) if cost[i, j] < match_tol]
    spectra_match = (len(matched) == len(evs_t) == len(evs_s))

    kappa_norm = float(np.linalg.norm(coupling_block, 2)) if coupling_block.size else 0.0
    element_tol = element_tol_scale * kappa_norm
    max_element = 0.0
    if v_t is not None:
        for i, j in matched:
            val = abs(v_t[i] @ (coupling_block @ res_s.right[:, j]))
            elements.append({"re_E": evs_t[i].real, "im_E": evs_t[i].imag,
                             "target_index": i, "source_index": j,
                             "magnitude": float(val)})
            max_element = max(max_element, float(val))

    min_singular = None
    if full_op is not None:
        full_res = eig(np.asarray(full_op, dtype=complex))
        min_singular = float(sla.svdvals(full_res.right)[-1])
    return {
        "matched": matched,
        "spectra_match": spectra_match,
        "elements": elements,
        "max_element": max_element,
        "element_tol": element_tol,
        "min_singular": min_singular,
        "eigenvalues": eigenvalues,
        "notes": notes,
    }


def ed_condition_check(spec: ModelSpec, disorder: DisorderSpec | None = None,
                       match_tol: float = 1e-6, element_tol_scale: float = 1e-8,
                       near_similarity: float = 0.9) -> EDReport:
    """Full coalescence verdict for one open-boundary model.

    Verdict ``ED`` requires the bulk spectra of the two chains to match
    pairwise within ``match_tol`` *and* at least one inter-chain matrix
    element above threshold; ``near-ED`` is declared when the eigenspaces are
    strongly aligned (similarity above ``near_similarity``) without an exact
    spectral match; otherwise ``no-ED``.  All thresholds are echoed into the
    report.
    """
    if spec.boundary != "OBC":
        raise ValueError("ed_condition_check requires boundary = 'OBC'")
    if spec.reverse_coupling != 0.0:
        raise ValueError("ed_condition_check requires reverse_coupling = 0")
    (h_a, h_b), (evs_a, _, edge_a), (evs_b, _, edge_b) = \
        _block_eigensystem(spec, disorder)
    bulk_a = np.delete(np.arange(len(evs_a)), sorted(edge_a))
    bulk_b = np.delete(np.arange(len(evs_b)), sorted(edge_b))
    n = h_a.shape[0]
    kappa_block = spec.coupling * np.eye(n)
    if spec.direction == SYSTEM_I:
        blk = ed_condition_from_blocks(h_a, h_b, kappa_block,
                                       match_tol=match_tol,
                                       element_tol_scale=element_tol_scale)
        bulk_t, bulk_s = set(bulk_a), set(bulk_b)
    else:
        blk = ed_condition_from_blocks(h_b, h_a, kappa_block,
                                       match_tol=match_tol,
                                       element_tol_scale=element_tol_scale)
        bulk_t, bulk_s = set(bulk_b), set(bulk_a)

    order_t = sort_complex(blk["eigenvalues"]["target"])
    order_s = sort_complex(blk["eigenvalues"]["source"])
    pos_t = {int(orig): rank for rank, orig in enumerate(order_t)}
    pos_s = {int(orig): rank for rank, orig in enumerate(order_s)}
    bulk_matched = [(i, j) for i, j in blk["matched"]
                    if pos_t[i] in bulk_t and pos_s[j] in bulk_s]
    bulk_elements = [e for e in blk["elements"]
                     if pos_t[e["target_index"]] in bulk_t
                     and pos_s[e["source_index"]] in bulk_s]
    sorted_a = np.sort(np.real(evs_a[bulk_a]))
    sorted_b = np.sort(np.real(evs_b[bulk_b]))
    spectra_match = (len(sorted_a) == len(sorted_b)
                     and len(bulk_matched) == len(sorted_a))

    pair = extract_eigenspaces(spec, disorder)
    similarity = cosine_similarity(pair)
    g_a, g_b = pair_gauges(pair)
    full_res = eig(build_realspace(spec, disorder))
    min_singular = float(sla.svdvals(full_res.right)[-1])

    max_element = max((e["magnitude"] for e in bulk_elements), default=0.0)
    if spectra_match:
        verdict = "ED" if max_element > blk["element_tol"] else "no-ED"
    elif similarity > near_similarity:
        verdict = "near-ED"
    else:
        verdict = "no-ED"
    thresholds = {"match_tol": match_tol, "element_tol": blk["element_tol"],
                  "near_similarity": near_similarity,
                  "pairing_rule": pair.pairing_rule}
    return EDReport(similarity=similarity,
                    mean_G_A=float(np.mean(g_a)) if len(g_a) else float("nan"),
                    mean_G_B=float(np.mean(g_b)) if len(g_b) else float("nan"),
                    min_singular_of_eigenbasis=min_singular,
                    matrix_elements=bulk_elements,
                    verdict=verdict,
                    thresholds=thresholds,
                    matched_pairs=len(bulk_matched),
                    spectra_match=spectra_match,
                    notes=blk["notes"])
