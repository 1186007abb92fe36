"""Delassus-matrix (inverse operational-space inertia) algorithms.

Three producers and one consumer:

* ``pv_osim`` — runs the tau-independent half of the exact constrained
  sweep (articulated inertias plus the K/L coupling blocks) and reads
  the Delassus matrix off the base: crossing the base joint supplies
  the floating-base rank-6 correction automatically, a fixed base adds
  nothing.
* ``pv_osimr`` — same matrix assembled from extended propagators: each
  reduced-tree edge is walked once, junction kernels are memoized, and
  blocks couple only through nearest common ancestors, removing the
  per-joint m-row propagation cost on shared paths.
* ``caba_osim`` — damped inverse (Lambda + mu I)^-1 built on the same
  machinery and factored at the constraint dimension.  Well-defined for
  rank-deficient rows since the damping keeps the system PD.
* ``delassus_apply`` / ``delassus_factor_solve`` — map constraint-space
  right-hand sides to multipliers: explicit operators factorize once
  and cache, damped operators multiply directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import flops, linalg
from .constrained import (PvWorkspace, SolverSettings, _reg_articulated_pass)
from .errors import (NotPositiveDefinite, SingularBaseInertia,
                     SingularJointInertia)
from .kinematics import forward_kinematics
from .model import ConstraintSet, Model, State
from .spatial import xft6, xi6


@dataclass
class DelassusOperator:
    """Either an explicit Delassus matrix or its damped inverse.

    kind "explicit" holds Lambda = J M^-1 J'; kind "damped_inverse"
    holds X ~= (Lambda + mu I)^-1.  `factorizations` counts how many
    times a factor was actually computed (it is cached after the first
    solve).
    """

    kind: str
    matrix: np.ndarray
    mu: float | None = None
    offsets: tuple = ()
    factorizations: int = 0
    _chol: np.ndarray | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]


def delassus_factor_solve(op: DelassusOperator, rhs: np.ndarray) -> np.ndarray:
    """Solve Lambda x = rhs for an explicit operator (factor cached)."""
    if op.kind != "explicit":
        raise ValueError("factor_solve applies to explicit operators only")
    if op._chol is None:
        op._chol = linalg.chol_factor(op.matrix)   # NotPositiveDefinite if singular
        op.factorizations += 1
    return linalg.chol_solve(op._chol, rhs)


def delassus_apply(op: DelassusOperator, rhs: np.ndarray) -> np.ndarray:
    """Map a constraint-space right-hand side to multipliers."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != op.m:
        raise ValueError(f"rhs length {rhs.shape[0]} != operator dim {op.m}")
    if op.kind == "damped_inverse":
        flops.add(flops.gemm(op.m, op.m, 1))
        return op.matrix @ rhs
    return delassus_factor_solve(op, rhs)


# ---------------------------------------------------------------------------
# shared tau-independent coupling sweep


def _kl_delassus(model: Model, cache, cs: ConstraintSet, ws: PvWorkspace,
                 reg: dict[int, np.ndarray] | None = None) -> np.ndarray:
    """Backward sweep accumulating only the coupling blocks; returns Lambda."""
    m = cs.m
    if m == 0:
        return np.zeros((0, 0))
    ia = ws.IA
    np.copyto(ia, model.inertia66)
    work = 0
    if reg:
        for link, extra in reg.items():
            ia[link] += extra
            work += 36
    lam_mat = ws.L
    lam_mat[:] = 0.0
    for i in range(model.n_links - 1, -1, -1):
        rows_i = ws.rows[i]
        for ci, pos in ws.own[i]:
            ws.K[i][pos] = cs.constraints[ci].K
        nv = model.joints[i].nv
        p = model.parent[i]
        if nv:
            s = model.S[i]
            uu = ia[i] @ s
            d = s.T @ uu
            try:
                dfac = linalg.SmallPD(d)
            except NotPositiveDefinite:
                if i == 0:
                    raise SingularBaseInertia(
                        "floating-base articulated inertia is singular") from None
                raise SingularJointInertia(f"joint {i} inertia is singular") from None
            du = dfac.solve(uu.T)
            work += flops.gemm(6, 6, nv) + flops.gemm(nv, 6, nv) \
                + flops.cholesky(nv) + flops.chol_solve(nv, 6)
            if rows_i.size:
                ka = ws.K[i]
                ks = ka @ s
                w = dfac.solve(ks.T).T
                lam_mat[np.ix_(rows_i, rows_i)] += w @ ks.T
                k_new = ka - w @ uu.T
                work += flops.gemm(rows_i.size, 6, nv) + flops.chol_solve(nv, rows_i.size) \
                    + flops.gemm(rows_i.size, nv, rows_i.size) + flops.gemm(rows_i.size, nv, 6)
            else:
                k_new = ws.K[i][:0]
            ia_proj = ia[i] - uu @ du
            work += flops.gemm(6, nv, 6)
        else:
            k_new = ws.K[i] if rows_i.size else ws.K[i][:0]
            ia_proj = ia[i]
        if p >= 0:
            ia[p] += xi6(cache.rot[i], cache.trans[i], ia_proj)
            work += flops.XINERTIA + 36
            if rows_i.size:
                ws.K[p][ws.pos_in_parent[i]] = xft6(cache.rot[i], cache.trans[i],
                                                    k_new.T).T
                work += flops.XFORCE_T * rows_i.size
    flops.add(work)
    out = lam_mat.copy()
    return 0.5 * (out + out.T)


def pv_osim(model: Model, state: State, cs: ConstraintSet,
            ws: PvWorkspace | None = None) -> DelassusOperator:
    """Delassus matrix as the base-level coupling block of the exact sweep."""
    ws = PvWorkspace.ensure(model, cs, ws)
    cache = forward_kinematics(model, state)
    lam = _kl_delassus(model, cache, cs, ws)
    return DelassusOperator("explicit", lam, offsets=tuple(cs.offsets))


# ---------------------------------------------------------------------------
# propagator-composition variant


def _push_block(model: Model, ws: PvWorkspace, cache, i: int,
                block: np.ndarray) -> np.ndarray:
    """Apply the joint-i force propagator and frame change to a 6 x k block."""
    nv = model.joints[i].nv
    if nv:
        s = model.S[i]
        reduced = block - ws.uu[i] @ ws.dfac[i].solve(s.T @ block)
        flops.add(flops.gemm(model.joints[i].nv, 6, block.shape[1])
                  + flops.chol_solve(nv, block.shape[1])
                  + flops.gemm(6, nv, block.shape[1]))
    else:
        reduced = block
    flops.add(flops.XFORCE_T * block.shape[1])
    return xft6(cache.rot[i], cache.trans[i], reduced)


def extended_force_propagator(model: Model, state: State, link: int,
                              ancestor: int,
                              ws: PvWorkspace | None = None) -> np.ndarray:
    """6x6 force propagator from `link` up to `ancestor` (or -1, the world).

    The propagator of an empty path (link to itself) is the identity, and
    propagators compose over concatenated path segments:
    P(link -> g2) == P(g1 -> g2) @ P(link -> g1) for g1 on the path.
    """
    if ws is None:
        ws = PvWorkspace(model, ConstraintSet.empty())
    cache = forward_kinematics(model, state)
    _reg_articulated_pass(model, cache, ws, None)
    prop = np.eye(6)
    j = link
    while j != ancestor:
        if j < 0:
            raise ValueError(f"link {ancestor} is not an ancestor of {link}")
        prop = _push_block(model, ws, cache, j, prop)
        j = model.parent[j]
    return prop


def pv_osimr(model: Model, state: State, cs: ConstraintSet,
             ws: PvWorkspace | None = None) -> DelassusOperator:
    """Delassus matrix by composing extended propagators at tree junctions."""
    ws = PvWorkspace.ensure(model, cs, ws)
    cache = forward_kinematics(model, state)
    m = cs.m
    if m == 0:
        return DelassusOperator("explicit", np.zeros((0, 0)), offsets=())
    try:
        _reg_articulated_pass(model, cache, ws, None)
    except SingularJointInertia:
        if model.base_kind == "floating":
            raise SingularBaseInertia(
                "floating-base articulated inertia is singular") from None
        raise

    # group constraint rows by link
    rows_by_link: dict[int, np.ndarray] = {}
    k_by_link: dict[int, np.ndarray] = {}
    for ci, con in enumerate(cs):
        e = con.link
        if e in rows_by_link:
            rows_by_link[e] = np.concatenate((rows_by_link[e], cs.rows(ci)))
            k_by_link[e] = np.vstack((k_by_link[e], con.K))
        else:
            rows_by_link[e] = cs.rows(ci)
            k_by_link[e] = con.K.copy()
    e_links = sorted(rows_by_link)

    # reduced tree: constrained links, their pairwise nearest common
    # ancestors, and the world anchor (-1)
    chains = {e: [e] + model.ancestors(e) + [-1] for e in e_links}
    nodes = set(e_links) | {-1}
    for a in e_links:
        for b in e_links:
            if a < b:
                in_b = set(chains[b])
                nodes.add(next(x for x in chains[a] if x in in_b))
    reduced_parent: dict[int, int] = {}
    for node in nodes - {-1}:
        chain = [node] + model.ancestors(node) + [-1]
        reduced_parent[node] = next(x for x in chain[1:] if x in nodes)

    # walk each reduced edge once: propagator transpose and kernel sum
    edge_t: dict[int, np.ndarray] = {}
    edge_sigma: dict[int, np.ndarray] = {}
    for node in reduced_parent:
        t = np.eye(6)
        sigma = np.zeros((6, 6))
        j = node
        while j != reduced_parent[node]:
            nv = model.joints[j].nv
            if nv:
                phi = t @ model.S[j]
                sigma += phi @ ws.dfac[j].solve(phi.T)
                flops.add(flops.gemm(6, 6, nv) + flops.chol_solve(nv, 6)
                          + flops.gemm(6, nv, 6))
            t = _push_block(model, ws, cache, j, t.T).T
            j = model.parent[j]
        edge_t[node] = t
        edge_sigma[node] = sigma

    # junction kernels from the world down
    omega: dict[int, np.ndarray] = {-1: np.zeros((6, 6))}

    def omega_of(node: int) -> np.ndarray:
        if node not in omega:
            up = omega_of(reduced_parent[node])
            omega[node] = edge_sigma[node] + edge_t[node] @ up @ edge_t[node].T
            flops.add(2 * flops.gemm(6, 6, 6))
        return omega[node]

    # constraint blocks pushed to every reduced ancestor
    pushed: dict[int, dict[int, np.ndarray]] = {}
    red_chain: dict[int, list[int]] = {}
    for e in e_links:
        blocks = {e: k_by_link[e]}
        chain = [e]
        node = e
        while node != -1:
            nxt = reduced_parent[node]
            blocks[nxt] = blocks[node] @ edge_t[node]
            flops.add(flops.gemm(blocks[node].shape[0], 6, 6))
            chain.append(nxt)
            node = nxt
        pushed[e] = blocks
        red_chain[e] = chain

    lam = np.zeros((m, m))
    for ai, e in enumerate(e_links):
        for f in e_links[ai:]:
            common = next(x for x in red_chain[e] if x in set(red_chain[f]))
            block = pushed[e][common] @ omega_of(common) @ pushed[f][common].T
            flops.add(flops.gemm(pushed[e][common].shape[0], 6, 6)
                      + flops.gemm(pushed[e][common].shape[0], 6,
                                   pushed[f][common].shape[0]))
            lam[np.ix_(rows_by_link[e], rows_by_link[f])] = block
            if e != f:
                lam[np.ix_(rows_by_link[f], rows_by_link[e])] = block.T
    return DelassusOperator("explicit", 0.5 * (lam + lam.T),
                            offsets=tuple(cs.offsets))


def caba_osim(model: Model, state: State, cs: ConstraintSet,
              settings: SolverSettings | None = None,
              ws: PvWorkspace | None = None) -> DelassusOperator:
    """Damped Delassus inverse (Lambda + mu I)^-1.

    Assembles the coupling blocks with the exact tau-independent sweep
    and factors the mu-shifted matrix at the constraint dimension, which
    keeps the grading identity X (Lambda + mu I) = I at full double
    precision even for mu far below the norm of Lambda, and stays
    well-defined for rank-deficient constraint rows.
    """
    settings = settings or SolverSettings()
    ws = PvWorkspace.ensure(model, cs, ws)
    cache = forward_kinematics(model, state)
    m = cs.m
    if m == 0:
        return DelassusOperator("damped_inverse", np.zeros((0, 0)), mu=settings.mu)
    lam = _kl_delassus(model, cache, cs, ws)
    shifted = lam + settings.mu * np.eye(m)
    x = linalg.chol_inverse(linalg.chol_factor(shifted))
    return DelassusOperator("damped_inverse", x, mu=settings.mu,
                            offsets=tuple(cs.offsets))
