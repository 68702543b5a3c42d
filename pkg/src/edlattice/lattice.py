"""Builders for one-way-coupled non-Hermitian tight-binding chains.

Two parallel chains (A and B) are coupled by a strictly unidirectional
inter-chain hopping, so every real-space Hamiltonian is block-triangular in
the chain-major ordering used for storage: all chain-A sites first, then all
chain-B sites, each chain stored left to right.  The physical (plotting)
order interleaves the two chains cell by cell, see
:func:`physical_permutation`.

Sign conventions used throughout:

* ``h[i, j]`` is the hopping amplitude from site ``j`` into site ``i``.
* Bloch blocks follow ``H(k) = sum_R T_R exp(i k R)`` where ``T_R`` collects
  hoppings from cell ``n + R`` into cell ``n``.  Replacing ``exp(i k)`` by a
  complex number ``beta`` gives the analytic continuation used for
  open-boundary (non-Bloch) analysis.
* A one-site-per-cell asymmetric chain stores the superdiagonal hopping as
  ``t + delta`` and the subdiagonal as ``t - delta``; ``delta > 0`` therefore
  produces skin modes at the *left* edge with skin depth
  ``sqrt((t - delta)/(t + delta))``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace

import numpy as np
import yaml

BOUNDARIES = ("PBC", "OBC")
SYSTEM_I = "B-to-A"
SYSTEM_II = "A-to-B"
DIRECTIONS = (SYSTEM_I, SYSTEM_II)
DISORDER_TARGETS = ("onsite", "in-chain-hopping")


class ConfigError(ValueError):
    """Raised when a model/scenario configuration is malformed."""


@dataclass(frozen=True)
class SSHChainParams:
    """Two-site-per-cell chain with alternating hoppings.

    ``v`` is the intra-cell hopping, ``w`` the inter-cell hopping and
    ``delta`` the non-Hermitian intra-cell asymmetry: the forward (b -> a)
    amplitude is ``v + delta`` and the backward one ``v - delta``.  With
    ``delta = 0`` and real ``onsite`` the chain is Hermitian.
    """

    v: float
    w: float
    delta: float = 0.0
    onsite: complex = 0.0


@dataclass(frozen=True)
class HNChainParams:
    """Single-band chain with asymmetric left/right hoppings.

    Superdiagonal (right of the diagonal) entries are ``t + delta``,
    subdiagonal entries ``t - delta``; ``delta = 0`` gives a Hermitian chain.
    """

    t: float
    delta: float = 0.0
    onsite: complex = 0.0


@dataclass(frozen=True)
class ExactChainParams:
    """Parameters of the analytically solvable double chain.

    The first chain has complex onsite ``V`` and sub-diagonal hopping ``J``
    only; the second chain has superdiagonal ``t*r`` and subdiagonal ``t/r``.
    ``L`` is the number of sites per chain.
    """

    V: complex
    J: float
    t: float
    r: float
    L: int

    def __post_init__(self):
        if self.L < 2:
            raise ConfigError("ExactChainParams.L: expected integer >= 2")
        if not self.r > 0:
            raise ConfigError("ExactChainParams.r: expected real > 0")


ChainParams = SSHChainParams | HNChainParams | ExactChainParams


@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of a coupled double-chain lattice."""

    chainA: ChainParams
    chainB: ChainParams
    coupling: float
    direction: str = SYSTEM_I
    reverse_coupling: float = 0.0
    offsetB: complex = 0.0
    cells: int = 8
    boundary: str = "OBC"

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ConfigError(
                f"ModelSpec.direction: expected one of {DIRECTIONS}, got {self.direction!r}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(
                f"ModelSpec.boundary: expected one of {BOUNDARIES}, got {self.boundary!r}")
        if self.cells < 2:
            raise ConfigError("ModelSpec.cells: expected integer >= 2")
        a_exact = isinstance(self.chainA, ExactChainParams)
        b_exact = isinstance(self.chainB, ExactChainParams)
        if a_exact != b_exact:
            raise ConfigError("ModelSpec: exact-chain parameters must be used for both chains")
        if a_exact:
            if self.chainA.L != self.chainB.L:
                raise ConfigError("ModelSpec: both exact chains must share the same length L")
            if self.cells != self.chainA.L:
                raise ConfigError("ModelSpec.cells must equal ExactChainParams.L")


@dataclass(frozen=True)
class DisorderSpec:
    """Seeded random perturbation of a fraction of the lattice sites.

    Values are drawn uniformly from ``[-amplitude, amplitude]`` and added to
    the chosen target entries at a without-replacement random sample of
    ``fraction * n_sites`` sites (both chains counted).  The same seed and
    spec always reproduce the same perturbed operator bit for bit.
    """

    amplitude: float
    fraction: float
    seed: int
    target: str = "onsite"

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ConfigError("DisorderSpec.fraction: expected real in [0, 1]")
        if self.target not in DISORDER_TARGETS:
            raise ConfigError(
                f"DisorderSpec.target: expected one of {DISORDER_TARGETS}, got {self.target!r}")


def exact_model(params: ExactChainParams, kappa: float, direction: str = SYSTEM_I,
                boundary: str = "OBC") -> ModelSpec:
    """Convenience constructor for the analytically solvable double chain."""
    return ModelSpec(chainA=params, chainB=params, coupling=kappa,
                     direction=direction, cells=params.L, boundary=boundary)


# ---------------------------------------------------------------------------
# geometry helpers

def sites_per_cell(spec: ModelSpec) -> int:
    """Number of sites per unit cell on each chain (equal for both chains).

    A single-band chain paired with a two-band chain is folded into a
    two-site cell with identical alternating hoppings so that the inter-chain
    coupling stays a multiple of the identity.
    """
    a, b = spec.chainA, spec.chainB
    if isinstance(a, ExactChainParams):
        return 1
    if isinstance(a, SSHChainParams) or isinstance(b, SSHChainParams):
        return 2
    return 1


def chain_sites(spec: ModelSpec) -> int:
    """Number of sites on one chain."""
    if isinstance(spec.chainA, ExactChainParams):
        return spec.chainA.L
    return sites_per_cell(spec) * spec.cells


def total_sites(spec: ModelSpec) -> int:
    return 2 * chain_sites(spec)


def physical_permutation(spec: ModelSpec) -> np.ndarray:
    """Storage index for each physical (left-to-right, interleaved) position.

    Physical position runs cell by cell, chain-A sites of a cell first, then
    the chain-B sites of the same cell.  ``state[physical_permutation(spec)]``
    reorders a chain-major vector into physical order.
    """
    m = sites_per_cell(spec)
    cells = chain_sites(spec) // m
    ns = chain_sites(spec)
    perm = np.empty(2 * ns, dtype=int)
    pos = 0
    for c in range(cells):
        for s in range(m):
            perm[pos] = m * c + s
            pos += 1
        for s in range(m):
            perm[pos] = ns + m * c + s
            pos += 1
    return perm


# ---------------------------------------------------------------------------
# real-space chain blocks

def _ssh_chain(p: SSHChainParams, cells: int, pbc: bool) -> np.ndarray:
    n = 2 * cells
    h = np.zeros((n, n), dtype=complex)
    np.fill_diagonal(h, complex(p.onsite))
    for c in range(cells):
        a, b = 2 * c, 2 * c + 1
        h[a, b] += p.v + p.delta
        h[b, a] += p.v - p.delta
        nxt = (2 * c + 2) % n
        if c + 1 < cells or pbc:
            h[b, nxt] += p.w
            h[nxt, b] += p.w
    return h


def _hn_chain(p: HNChainParams, n_sites: int, pbc: bool) -> np.ndarray:
    h = np.zeros((n_sites, n_sites), dtype=complex)
    np.fill_diagonal(h, complex(p.onsite))
    up, dn = p.t + p.delta, p.t - p.delta
    for i in range(n_sites - 1):
        h[i, i + 1] += up
        h[i + 1, i] += dn
    if pbc:
        h[n_sites - 1, 0] += up
        h[0, n_sites - 1] += dn
    return h


def _exact_chain_a(p: ExactChainParams, pbc: bool) -> np.ndarray:
    h = np.zeros((p.L, p.L), dtype=complex)
    np.fill_diagonal(h, complex(p.V))
    for i in range(p.L - 1):
        h[i + 1, i] += p.J
    if pbc:
        h[0, p.L - 1] += p.J
    return h


def _exact_chain_b(p: ExactChainParams, pbc: bool) -> np.ndarray:
    h = np.zeros((p.L, p.L), dtype=complex)
    up, dn = p.t * p.r, p.t / p.r
    for i in range(p.L - 1):
        h[i, i + 1] += up
        h[i + 1, i] += dn
    if pbc:
        h[p.L - 1, 0] += up
        h[0, p.L - 1] += dn
    return h


def _chain_matrix(p: ChainParams, which: str, spec: ModelSpec) -> np.ndarray:
    pbc = spec.boundary == "PBC"
    if isinstance(p, SSHChainParams):
        return _ssh_chain(p, spec.cells, pbc)
    if isinstance(p, HNChainParams):
        return _hn_chain(p, chain_sites(spec), pbc)
    return _exact_chain_a(p, pbc) if which == "A" else _exact_chain_b(p, pbc)


def _apply_disorder(h_a: np.ndarray, h_b: np.ndarray, disorder: DisorderSpec) -> None:
    rng = np.random.default_rng(disorder.seed)
    na, nb = h_a.shape[0], h_b.shape[0]
    n = na + nb
    n_pick = int(round(disorder.fraction * n))
    if n_pick == 0:
        return
    picked = np.sort(rng.choice(n, size=n_pick, replace=False))
    values = rng.uniform(-disorder.amplitude, disorder.amplitude, size=n_pick)
    for site, u in zip(picked, values):
        block, i = (h_a, site) if site < na else (h_b, site - na)
        if disorder.target == "onsite":
            block[i, i] += u
        else:
            j = i + 1
            if j < block.shape[0] and (block[i, j] != 0 or block[j, i] != 0):
                block[i, j] += u
                block[j, i] += u


def chain_blocks(spec: ModelSpec, disorder: DisorderSpec | None = None
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal blocks (h_A, h_B) of the double-chain operator.

    ``offsetB`` is already added to the chain-B diagonal and disorder, if
    given, is applied consistently to the pair (so that block-wise spectra
    and the assembled operator describe the same disordered lattice).
    """
    h_a = _chain_matrix(spec.chainA, "A", spec)
    h_b = _chain_matrix(spec.chainB, "B", spec)
    h_b += complex(spec.offsetB) * np.eye(h_b.shape[0])
    if disorder is not None:
        _apply_disorder(h_a, h_b, disorder)
    return h_a, h_b


def build_realspace(spec: ModelSpec, disorder: DisorderSpec | None = None) -> np.ndarray:
    """Assemble the full double-chain operator in chain-major ordering.

    The inter-chain hopping couples same-cell partner sites (a multiple of
    the identity), so it is unaffected by the boundary condition.  With
    ``reverse_coupling = 0`` the result is exactly block-triangular.
    """
    h_a, h_b = chain_blocks(spec, disorder)
    n = h_a.shape[0]
    h = np.zeros((2 * n, 2 * n), dtype=complex)
    h[:n, :n] = h_a
    h[n:, n:] = h_b
    eye = np.eye(n)
    if spec.direction == SYSTEM_I:
        h[:n, n:] = spec.coupling * eye
        h[n:, :n] = spec.reverse_coupling * eye
    else:
        h[n:, :n] = spec.coupling * eye
        h[:n, n:] = spec.reverse_coupling * eye
    return h


# ---------------------------------------------------------------------------
# Bloch blocks and the characteristic polynomial

def _bloch_block(p: ChainParams, spc: int, z) -> np.ndarray:
    """Bloch block evaluated at ``z = exp(i k)`` (or complex ``beta``)."""
    if isinstance(p, SSHChainParams):
        on = complex(p.onsite)
        return np.array([[on, p.v + p.delta + p.w / z],
                         [p.v - p.delta + p.w * z, on]])
    on = complex(p.onsite)
    up, dn = p.t + p.delta, p.t - p.delta
    if spc == 1:
        return np.array([[on + up * z + dn / z]])
    return np.array([[on, up + dn / z],
                     [dn + up * z, on]])


def bloch_blocks(spec: ModelSpec, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal Bloch blocks (H_A(k), H_B(k)) including the chain-B offset."""
    if isinstance(spec.chainA, ExactChainParams):
        raise ConfigError("exact-chain parameters define a real-space model only")
    if not 0.0 <= k < 2.0 * np.pi:
        raise ValueError(f"momentum k must lie in [0, 2*pi), got {k}")
    spc = sites_per_cell(spec)
    z = np.exp(1j * k)
    h_a = _bloch_block(spec.chainA, spc, z)
    h_b = _bloch_block(spec.chainB, spc, z)
    h_b += complex(spec.offsetB) * np.eye(spc)
    return h_a, h_b


def build_bloch(spec: ModelSpec, k: float) -> np.ndarray:
    """Bloch Hamiltonian H(k): 4x4 for two-band chains, 2x2 for single-band.

    The unidirectional coupling enters as ``coupling * identity`` in the
    upper-right (B-to-A) or lower-left (A-to-B) block.
    """
    if spec.boundary != "PBC":
        raise ConfigError("build_bloch requires boundary = 'PBC'")
    h_a, h_b = bloch_blocks(spec, k)
    m = h_a.shape[0]
    h = np.zeros((2 * m, 2 * m), dtype=complex)
    h[:m, :m] = h_a
    h[m:, m:] = h_b
    eye = np.eye(m)
    if spec.direction == SYSTEM_I:
        h[:m, m:] = spec.coupling * eye
        h[m:, :m] = spec.reverse_coupling * eye
    else:
        h[m:, :m] = spec.coupling * eye
        h[:m, m:] = spec.reverse_coupling * eye
    return h


def _laurent_triple(p: ChainParams, spc: int, offset: complex):
    """(T_-1, T_0, T_+1) of one chain's Bloch block as a Laurent polynomial."""
    if isinstance(p, SSHChainParams):
        on = complex(p.onsite) + offset
        t_m = np.array([[0.0, p.w], [0.0, 0.0]], dtype=complex)
        t_0 = np.array([[on, p.v + p.delta], [p.v - p.delta, on]], dtype=complex)
        t_p = np.array([[0.0, 0.0], [p.w, 0.0]], dtype=complex)
        return t_m, t_0, t_p
    on = complex(p.onsite) + offset
    up, dn = p.t + p.delta, p.t - p.delta
    if spc == 1:
        return (np.array([[dn]], dtype=complex),
                np.array([[on]], dtype=complex),
                np.array([[up]], dtype=complex))
    t_m = np.array([[0.0, dn], [0.0, 0.0]], dtype=complex)
    t_0 = np.array([[on, up], [dn, on]], dtype=complex)
    t_p = np.array([[0.0, 0.0], [up, 0.0]], dtype=complex)
    return t_m, t_0, t_p


@dataclass(frozen=True)
class BetaRoot:
    """One solution beta of the characteristic factor it is tagged with."""

    beta: complex
    factor: str


def factor_polynomial(spec: ModelSpec, factor: str, E: complex) -> np.ndarray:
    """Coefficients (descending) of ``beta**p * det[H_X(beta) - E]``.

    ``p`` is the lowest Laurent power, so the returned ordinary polynomial
    has the same nonzero roots as the characteristic factor.  Leading or
    trailing coefficients below ``1e-12`` of the largest one are trimmed and
    reduce the reported degree.
    """
    if isinstance(spec.chainA, ExactChainParams):
        raise ConfigError("exact-chain parameters define a real-space model only")
    p = spec.chainA if factor == "A" else spec.chainB
    offset = complex(spec.offsetB) if factor == "B" else 0.0
    spc = sites_per_cell(spec)
    t_m, t_0, t_p = _laurent_triple(p, spc, offset)
    if spc == 1:
        asc = np.array([t_m[0, 0], t_0[0, 0] - E, t_p[0, 0]], dtype=complex)
    else:
        def entry(i, j):
            c = np.array([t_m[i, j], t_0[i, j], t_p[i, j]], dtype=complex)
            if i == j:
                c[1] -= E
            return c
        asc = np.convolve(entry(0, 0), entry(1, 1)) - np.convolve(entry(0, 1), entry(1, 0))
    scale = np.max(np.abs(asc))
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.abs(asc) > 1e-12 * scale
    lo, hi = np.argmax(keep), len(asc) - np.argmax(keep[::-1])
    return asc[lo:hi][::-1]


def characteristic_roots(spec: ModelSpec, E: complex) -> list[BetaRoot]:
    """All beta with ``det[H_X(beta) - E] = 0``, tagged by factor of origin.

    The characteristic polynomial of the coupled lattice factorizes into the
    two chain factors, so the root set never depends on the inter-chain
    coupling.  Roots are found as companion-matrix eigenvalues.
    """
    roots: list[BetaRoot] = []
    for factor in ("A", "B"):
        coeffs = factor_polynomial(spec, factor, E)
        if len(coeffs) > 1:
            for b in np.roots(coeffs):
                roots.append(BetaRoot(beta=complex(b), factor=factor))
    return roots


def factor_residual(spec: ModelSpec, factor: str, E: complex, beta: complex) -> float:
    """Relative residual of the characteristic factor at (beta, E)."""
    coeffs = factor_polynomial(spec, factor, E)[::-1]  # ascending
    powers = np.abs(beta) ** np.arange(len(coeffs))
    scale = float(np.sum(np.abs(coeffs) * powers))
    if scale == 0.0:
        return 0.0
    value = np.polyval(coeffs[::-1], beta)
    return abs(value) / scale


# ---------------------------------------------------------------------------
# edge-mode bookkeeping

def expected_edge_modes(p: ChainParams) -> int:
    """Number of in-gap boundary modes of one open chain.

    Two-band chains host a pair of mid-gap modes when the effective
    (asymmetry-reduced) intra-cell hopping is weaker than the inter-cell one;
    single-band chains have none.
    """
    if isinstance(p, SSHChainParams):
        veff2 = (p.v - p.delta) * (p.v + p.delta)
        if 0.0 <= veff2 < p.w * p.w:
            return 2
    return 0


def chain_center(p: ChainParams, offset: complex = 0.0) -> complex:
    """Spectral center (onsite level) of one chain."""
    if isinstance(p, ExactChainParams):
        return complex(offset)
    return complex(p.onsite) + complex(offset)


def edge_indices(eigenvalues: np.ndarray, p: ChainParams, offset: complex = 0.0) -> np.ndarray:
    """Indices of the expected in-gap edge eigenvalues of one chain block."""
    n_edge = expected_edge_modes(p)
    if n_edge == 0:
        return np.array([], dtype=int)
    center = chain_center(p, offset)
    order = np.argsort(np.abs(eigenvalues - center))
    return np.sort(order[:n_edge])


# ---------------------------------------------------------------------------
# configuration round trip

def _format_complex(c: complex) -> float | str:
    c = complex(c)
    if c.imag == 0.0:
        return float(c.real)
    return f"{c.real:.17g}{c.imag:+.17g}j"


def _parse_complex(value, path: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, complex):
        return value
    if isinstance(value, str):
        try:
            return complex(value.replace("i", "j").replace(" ", ""))
        except ValueError:
            pass
    raise ConfigError(f"{path}: expected real or complex number, got {value!r}")


def _parse_real(value, path: str) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise ConfigError(f"{path}: expected real number, got {value!r}")


def _parse_int(value, path: str) -> int:
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise ConfigError(f"{path}: expected integer, got {value!r}")


def chain_to_dict(p: ChainParams) -> dict:
    if isinstance(p, SSHChainParams):
        return {"type": "ssh", "v": p.v, "w": p.w, "delta": p.delta,
                "onsite": _format_complex(p.onsite)}
    if isinstance(p, HNChainParams):
        return {"type": "hn", "t": p.t, "delta": p.delta,
                "onsite": _format_complex(p.onsite)}
    return {"type": "exact", "V": _format_complex(p.V), "J": p.J,
            "t": p.t, "r": p.r, "L": p.L}


def chain_from_dict(d: dict, path: str) -> ChainParams:
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected a mapping, got {d!r}")
    kind = d.get("type")
    if kind == "ssh":
        return SSHChainParams(v=_parse_real(d.get("v"), f"{path}.v"),
                              w=_parse_real(d.get("w"), f"{path}.w"),
                              delta=_parse_real(d.get("delta", 0.0), f"{path}.delta"),
                              onsite=_parse_complex(d.get("onsite", 0.0), f"{path}.onsite"))
    if kind == "hn":
        return HNChainParams(t=_parse_real(d.get("t"), f"{path}.t"),
                             delta=_parse_real(d.get("delta", 0.0), f"{path}.delta"),
                             onsite=_parse_complex(d.get("onsite", 0.0), f"{path}.onsite"))
    if kind == "exact":
        return ExactChainParams(V=_parse_complex(d.get("V"), f"{path}.V"),
                                J=_parse_real(d.get("J"), f"{path}.J"),
                                t=_parse_real(d.get("t"), f"{path}.t"),
                                r=_parse_real(d.get("r"), f"{path}.r"),
                                L=_parse_int(d.get("L"), f"{path}.L"))
    raise ConfigError(f"{path}.type: expected one of ('ssh', 'hn', 'exact'), got {kind!r}")


def spec_to_dict(spec: ModelSpec) -> dict:
    return {
        "chainA": chain_to_dict(spec.chainA),
        "chainB": chain_to_dict(spec.chainB),
        "coupling": spec.coupling,
        "direction": spec.direction,
        "reverse_coupling": spec.reverse_coupling,
        "offsetB": _format_complex(spec.offsetB),
        "cells": spec.cells,
        "boundary": spec.boundary,
    }


def spec_from_dict(d: dict, path: str = "model") -> ModelSpec:
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected a mapping, got {d!r}")
    required = ("chainA", "chainB", "coupling")
    for key in required:
        if key not in d:
            raise ConfigError(f"{path}.{key}: required key is missing")
    known = {"chainA", "chainB", "coupling", "direction", "reverse_coupling",
             "offsetB", "cells", "boundary"}
    for key in d:
        if key not in known:
            raise ConfigError(f"{path}.{key}: unknown key")
    return ModelSpec(
        chainA=chain_from_dict(d["chainA"], f"{path}.chainA"),
        chainB=chain_from_dict(d["chainB"], f"{path}.chainB"),
        coupling=_parse_real(d["coupling"], f"{path}.coupling"),
        direction=d.get("direction", SYSTEM_I),
        reverse_coupling=_parse_real(d.get("reverse_coupling", 0.0),
                                     f"{path}.reverse_coupling"),
        offsetB=_parse_complex(d.get("offsetB", 0.0), f"{path}.offsetB"),
        cells=_parse_int(d.get("cells", 8), f"{path}.cells"),
        boundary=d.get("boundary", "OBC"),
    )


def save_spec(spec: ModelSpec, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump({"model": spec_to_dict(spec)}, fh, sort_keys=False)


def load_spec(path) -> ModelSpec:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict) or "model" not in data:
        raise ConfigError("model: top-level 'model' section is missing")
    return spec_from_dict(data["model"])


def spec_to_yaml(spec: ModelSpec) -> str:
    buf = io.StringIO()
    yaml.safe_dump({"model": spec_to_dict(spec)}, buf, sort_keys=False)
    return buf.getvalue()


def with_field(spec: ModelSpec, dotted: str, value) -> ModelSpec:
    """Return a copy of ``spec`` with one (possibly nested) field replaced.

    ``dotted`` is e.g. ``"coupling"`` or ``"chainA.v"``; used by parameter
    sweeps.
    """
    if "." not in dotted:
        if dotted not in spec.__dataclass_fields__:
            raise ConfigError(f"sweep axis {dotted!r}: unknown ModelSpec field")
        return replace(spec, **{dotted: value})
    head, tail = dotted.split(".", 1)
    if head not in ("chainA", "chainB"):
        raise ConfigError(f"sweep axis {dotted!r}: unknown ModelSpec field")
    chain = getattr(spec, head)
    if tail not in chain.__dataclass_fields__:
        raise ConfigError(f"sweep axis {dotted!r}: unknown chain field")
    return replace(spec, **{head: replace(chain, **{tail: value})})
