"""Polynomial matrix maps between Shilov boundaries and their verification.

Carriers are polynomial maps C^{p x q} -> C^{p' x q'} stored as per-entry
term tables (coefficient, holomorphic powers, optional antiholomorphic
powers).  Verification covers boundary preservation, the CR property of the
differential, and the immersion condition, all by seeded sampling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .hermitian import SignatureForm
from .geometry import sample_boundary
from .jets import Jet, JetContext

SCHEMA_VERSION = 1


def _conj(x):
    return x.conjugate() if isinstance(x, Jet) else np.conj(x)


@dataclass
class Term:
    coeff: complex
    powers: dict = field(default_factory=dict)  # (i, j) -> exponent
    conj_powers: dict = field(default_factory=dict)


@dataclass
class PolyMatrixMap:
    """Entrywise polynomial map; entries[(I, a)] is a list of Terms."""

    source: tuple  # (p, q)
    target: tuple  # (p', q')
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        p, q = self.source
        p2, q2 = self.target
        if not (p > q >= 1 and p2 > q2 >= 1):
            raise ValueError("source and target shapes must satisfy p > q >= 1")

    @property
    def degree(self) -> int:
        deg = 0
        for terms in self.entries.values():
            for t in terms:
                deg = max(deg, sum(t.powers.values()) + sum(t.conj_powers.values()))
        return deg

    @property
    def is_holomorphic(self) -> bool:
        return all(not t.conj_powers
                   for terms in self.entries.values() for t in terms)

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """Evaluate at a point; entries may be complex numbers or jets."""
        z = np.asarray(z)
        generic = z.dtype == object
        p2, q2 = self.target
        if generic:
            out = np.full((p2, q2), 0j, dtype=object)
        else:
            out = np.zeros((p2, q2), dtype=complex)
        for (I, a), terms in self.entries.items():
            acc = 0j
            for t in terms:
                val = t.coeff
                for (i, j), k in t.powers.items():
                    val = val * z[i, j] ** k
                for (i, j), k in t.conj_powers.items():
                    val = val * _conj(z[i, j]) ** k
                acc = acc + val
            out[I, a] = acc
        return out

    def evaluate_batch(self, zs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on a stack of points, shape (S, p, q)."""
        zs = np.asarray(zs, dtype=complex)
        S = zs.shape[0]
        p2, q2 = self.target
        out = np.zeros((S, p2, q2), dtype=complex)
        for (I, a), terms in self.entries.items():
            for t in terms:
                val = np.full(S, t.coeff, dtype=complex)
                for (i, j), k in t.powers.items():
                    val *= zs[:, i, j] ** k
                for (i, j), k in t.conj_powers.items():
                    val *= np.conj(zs[:, i, j]) ** k
                out[:, I, a] += val
        return out


# ---------------------------------------------------------------------------
# constructors

def standard_embedding(p: int, q: int, p2: int, q2: int) -> PolyMatrixMap:
    """Block-linear embedding z -> [[z, 0], [0, I_{q2-q}], [0, 0]]."""
    if q2 < q or p2 < p + (q2 - q):
        raise ValueError("target shape cannot host the block-linear embedding")
    f = PolyMatrixMap((p, q), (p2, q2))
    for i in range(p):
        for a in range(q):
            f.entries[(i, a)] = [Term(1.0 + 0j, {(i, a): 1})]
    for s in range(q2 - q):
        f.entries[(p + s, q + s)] = [Term(1.0 + 0j)]
    return f


def whitney_map(p: int, q: int, q2: int, m: int) -> PolyMatrixMap:
    """Degree-2 generalized Whitney map S_{p,q} -> S_{2p-1+m, q2+m}.

    Top p-1 rows copy z_{i,a}; the next p rows carry the products
    z_{i,0} z_{p-1,a}; an identity block I_m sits in the lower right.  For
    q = q2 = 1, m = 0, p = 2 this is the classical (z1, z1 z2, z2^2).
    """
    if not (1 <= q2 <= q) or m < 0 or p < 2:
        raise ValueError("require 1 <= q2 <= q, m >= 0, p >= 2")
    f = PolyMatrixMap((p, q), (2 * p - 1 + m, q2 + m))
    for i in range(p - 1):
        for a in range(q2):
            f.entries[(i, a)] = [Term(1.0 + 0j, {(i, a): 1})]
    for i in range(p):
        for a in range(q2):
            pw = {(i, 0): 1}
            key = (p - 1, a)
            pw[key] = pw.get(key, 0) + 1
            f.entries[(p - 1 + i, a)] = [Term(1.0 + 0j, dict(pw))]
    for s in range(m):
        f.entries[(2 * p - 1 + s, q2 + s)] = [Term(1.0 + 0j)]
    return f


def block_diagonal_map(p: int, q: int, sphere_maps: list[PolyMatrixMap],
                       column_choices: list[int], check_samples: int = 50,
                       seed: int = 0) -> PolyMatrixMap:
    """Block-diagonal assembly of proper ball maps applied to chosen columns.

    sphere_maps[a] must send the unit sphere of C^p (as a (p,1) column) to
    the unit sphere of C^{m_a}; block a of the output applies it to source
    column column_choices[a].
    """
    q2 = len(sphere_maps)
    if len(column_choices) != q2 or not all(0 <= j < q for j in column_choices):
        raise ValueError("need one valid source-column index per sphere map")
    sizes = []
    rng = np.random.default_rng(seed)
    for a, g in enumerate(sphere_maps):
        if g.source != (p, 1):
            raise ValueError("sphere maps must have source shape (p, 1)")
        sizes.append(g.target[0])
        for _ in range(check_samples):
            v = rng.standard_normal((p, 1)) + 1j * rng.standard_normal((p, 1))
            v /= np.linalg.norm(v)
            w = g.evaluate(v)
            if abs(np.linalg.norm(w) - 1.0) > 1e-10:
                raise ValueError(f"sphere map {a} is not sphere-to-sphere")
    f = PolyMatrixMap((p, q), (sum(sizes), q2))
    row0 = 0
    for a, g in enumerate(sphere_maps):
        ja = column_choices[a]
        for (r, _), terms in g.entries.items():
            new_terms = []
            for t in terms:
                pw = {(i, ja): k for (i, _), k in t.powers.items()}
                cpw = {(i, ja): k for (i, _), k in t.conj_powers.items()}
                new_terms.append(Term(t.coeff, pw, cpw))
            f.entries[(row0 + r, a)] = new_terms
        row0 += sizes[a]
    return f


def scaled_map(f: PolyMatrixMap, factor: complex) -> PolyMatrixMap:
    """Entrywise scaling (useful as a failing control)."""
    g = PolyMatrixMap(f.source, f.target)
    for key, terms in f.entries.items():
        g.entries[key] = [Term(t.coeff * factor, dict(t.powers), dict(t.conj_powers))
                          for t in terms]
    return g


# ---------------------------------------------------------------------------
# derivatives (generic over map carriers exposing .evaluate)

def directional_derivative(f, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """d/ds f(z + s w) at s = 0 via one-variable first-order jets (exact)."""
    ctx = JetContext(1, 1)
    z = np.asarray(z, dtype=complex)
    zj = np.empty(z.shape, dtype=object)
    for idx in np.ndindex(z.shape):
        zj[idx] = Jet(ctx, [z[idx], w[idx]])
    out = f.evaluate(zj)
    res = np.empty(out.shape, dtype=complex)
    for idx in np.ndindex(out.shape):
        v = out[idx]
        res[idx] = v.coeffs[1] if isinstance(v, Jet) else 0.0
    return res


def holomorphic_pushforward(f, z, w):
    """f_z applied to w (Wirtinger decomposition of the real differential)."""
    return 0.5 * (directional_derivative(f, z, w)
                  - 1j * directional_derivative(f, z, 1j * w))


def antiholomorphic_pushforward(f, z, w):
    """f_zbar applied to conj(w)."""
    return 0.5 * (directional_derivative(f, z, w)
                  + 1j * directional_derivative(f, z, 1j * w))


# ---------------------------------------------------------------------------
# verification

def _resolve_samples(F, samples, seed, count):
    if samples is not None:
        return [np.asarray(s.z if hasattr(s, "z") else s, dtype=complex)
                for s in samples]
    return [bp.z for bp in sample_boundary(F, seed, count)]


def verify_boundary_preserving(f, samples=None, tol: float = 1e-10,
                               seed: int = 0, count: int = 1000) -> dict:
    """Max over samples of ||I_{q'} - f(z)* f(z)||; pass iff <= tol."""
    p, q = f.source
    F = SignatureForm(p, q)
    pts = _resolve_samples(F, samples, seed, count)
    q2 = f.target[1]
    eye = np.eye(q2)
    worst = 0.0
    if isinstance(f, PolyMatrixMap):
        ws = f.evaluate_batch(np.stack(pts))
        res = np.einsum("sia,sib->sab", np.conj(ws), ws) - eye
        worst = float(np.max(np.abs(res)))
    else:
        for z in pts:
            w = f.evaluate(z)
            worst = max(worst, float(np.max(np.abs(w.conj().T @ w - eye))))
    return {"residual": worst, "samples": len(pts), "pass": worst <= tol}


def cr_vector_basis(z: np.ndarray) -> list[np.ndarray]:
    """Basis of T^{1,0} S_{p,q} at z: matrices w with z* w = 0."""
    z = np.asarray(z, dtype=complex)
    p, q = z.shape
    null = scipy.linalg.null_space(z.conj().T)  # (p, n)
    basis = []
    for j in range(null.shape[1]):
        for b in range(q):
            w = np.zeros((p, q), dtype=complex)
            w[:, b] = null[:, j]
            basis.append(w)
    return basis


def verify_cr(f, samples=None, tol: float = 1e-9, immersion_tol: float = 1e-8,
              seed: int = 0, count: int = 20, require_immersion: bool = True) -> dict:
    """CR and immersion check at sampled boundary points.

    The CR residual combines the antiholomorphic defect of the differential
    with the failure of pushed-forward (1,0) vectors to annihilate the target
    contact forms (whose value on an ambient variation v at z' is z'* v).
    With ``require_immersion`` unset, rank collapse of the differential on the
    CR space is reported in the result instead of raising; this admits CR maps
    that genuinely drop source directions.
    """
    p, q = f.source
    F = SignatureForm(p, q)
    pts = _resolve_samples(F, samples, seed, count)
    worst = 0.0
    min_sv = np.inf
    for z in pts:
        basis = cr_vector_basis(z)
        w_img = f.evaluate(z)
        cols = []
        for w in basis:
            anti = antiholomorphic_pushforward(f, z, w)
            push = holomorphic_pushforward(f, z, w)
            contact = w_img.conj().T @ push
            worst = max(worst, float(np.max(np.abs(anti))),
                        float(np.max(np.abs(contact))))
            cols.append(push.ravel())
        sv = np.linalg.svd(np.stack(cols, axis=1), compute_uv=False)
        min_sv = min(min_sv, float(sv[-1]))
    if require_immersion and min_sv < immersion_tol:
        raise np.linalg.LinAlgError(
            f"differential rank collapse on the CR space (sigma_min = {min_sv:.3g})")
    return {"cr_residual": worst, "min_singular_value": min_sv,
            "samples": len(pts), "pass": worst <= tol}


# ---------------------------------------------------------------------------
# JSON interchange

def map_to_json(f: PolyMatrixMap) -> dict:
    entries = []
    for (I, a), terms in sorted(f.entries.items()):
        tl = []
        for t in terms:
            d = {"coeff": [float(t.coeff.real), float(t.coeff.imag)],
                 "powers": {f"{i},{j}": int(k) for (i, j), k in sorted(t.powers.items())}}
            if t.conj_powers:
                d["conj_powers"] = {f"{i},{j}": int(k)
                                    for (i, j), k in sorted(t.conj_powers.items())}
            tl.append(d)
        entries.append({"row": I, "col": a, "terms": tl})
    return {"schema_version": SCHEMA_VERSION, "source": list(f.source),
            "target": list(f.target), "entries": entries}


def map_from_json(data) -> PolyMatrixMap:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {data.get('schema_version')!r}")
        p, q = data["source"]

        def parse_powers(d):
            out = {}
            for k, v in d.items():
                i, j = (int(x) for x in k.split(","))
                if not (0 <= i < p and 0 <= j < q) or int(v) < 1:
                    raise ValueError(f"bad power entry {k!r}: {v!r}")
                out[(i, j)] = int(v)
            return out

        f = PolyMatrixMap(tuple(data["source"]), tuple(data["target"]))
        for e in data["entries"]:
            terms = []
            for t in e["terms"]:
                coeff = complex(t["coeff"][0], t["coeff"][1])
                terms.append(Term(coeff, parse_powers(t.get("powers", {})),
                                  parse_powers(t.get("conj_powers", {}))))
            f.entries[(e["row"], e["col"])] = terms
    except (KeyError, TypeError, IndexError, AttributeError) as exc:
        raise ValueError(f"malformed map description: {exc}") from exc
    return f
