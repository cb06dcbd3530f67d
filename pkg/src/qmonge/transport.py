"""Discrete optimal transport between Husimi grids.

The continuum problem is approximated by collapsing every grid cell to a
point mass at its center and solving the resulting balanced transportation
problem exactly: build a basic feasible start (northwest corner sweep or
Vogel's approximation), then run the transportation simplex (MODI / u-v
method), entering the most negative reduced cost and leaving by the minimum
ratio, until every reduced cost is nonnegative up to tolerance.

Basis cells are encoded as flat integers i*M + j; a basis always holds
exactly N + M - 1 cells forming a spanning tree of the bipartite
supply/demand graph, with zero-mass cells kept under degeneracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analytic import DistanceResult
from .states import HusimiField, StateSpec, husimi_grid, shared_window

__all__ = [
    "TransportProblem",
    "TransportPlan",
    "SolverError",
    "discretize",
    "northwest_corner",
    "vogel",
    "optimize",
    "monge_numeric",
    "COST_ENTRY_CAP",
]

# refuse dense cost matrices beyond this many entries
COST_ENTRY_CAP = 16_000_000
BALANCE_TOL = 1e-9


class SolverError(RuntimeError):
    """The transportation solver hit an inconsistent or unusable basis."""


class TransportProblem:
    """Balanced transportation instance with Euclidean^p ground cost.

    Demands are rescaled on construction so both sides carry exactly the
    same total mass; the applied factor is kept in demand_scale.
    """

    def __init__(self, supplies, demands, src_pts, dst_pts, p: float = 1.0,
                 cost_cap: int = COST_ENTRY_CAP):
        supplies = np.ascontiguousarray(supplies, dtype=float)
        demands = np.ascontiguousarray(demands, dtype=float)
        src_pts = np.ascontiguousarray(src_pts, dtype=float)
        dst_pts = np.ascontiguousarray(dst_pts, dtype=float)
        if supplies.ndim != 1 or demands.ndim != 1 or supplies.size == 0 or demands.size == 0:
            raise ValueError("supplies and demands must be nonempty 1-d arrays")
        if np.any(supplies <= 0) or np.any(demands <= 0):
            raise ValueError("all masses must be strictly positive")
        if src_pts.shape != (supplies.size, 2) or dst_pts.shape != (demands.size, 2):
            raise ValueError("points must be (N, 2) and (M, 2) arrays matching the masses")
        p = float(p)
        if math.isnan(p) or p < 1.0 or math.isinf(p):
            raise ValueError(f"cost exponent p must be finite and >= 1, got {p}")
        total = float(supplies.sum())
        self.demand_scale = total / float(demands.sum())
        self.supplies = supplies
        self.demands = demands * self.demand_scale
        self.src_pts = src_pts
        self.dst_pts = dst_pts
        self.p = p
        self.cost_cap = int(cost_cap)
        self._costs: Optional[np.ndarray] = None
        if abs(self.supplies.sum() - self.demands.sum()) > BALANCE_TOL * max(1.0, total):
            raise ValueError("supply and demand totals differ beyond tolerance")

    @property
    def n(self) -> int:
        return self.supplies.size

    @property
    def m(self) -> int:
        return self.demands.size

    @property
    def costs(self) -> np.ndarray:
        """Dense cost matrix c_ij = |x_i - y_j|^p, built once on first use."""
        if self._costs is None:
            entries = self.n * self.m
            if entries > self.cost_cap:
                raise ValueError(
                    f"cost matrix needs {entries} entries, above the cap of "
                    f"{self.cost_cap}; coarsen the grid or raise the threshold"
                )
            d1 = self.src_pts[:, 0:1] - self.dst_pts[:, 0][None, :]
            d2 = self.src_pts[:, 1:2] - self.dst_pts[:, 1][None, :]
            sq = d1 * d1 + d2 * d2
            if self.p == 2.0:
                self._costs = sq
            elif self.p == 1.0:
                self._costs = np.sqrt(sq)
            else:
                self._costs = np.sqrt(sq) ** self.p
        return self._costs


@dataclass
class TransportPlan:
    """Basic feasible plan: basis cells (rows, cols), masses, and certificates.

    Zero-mass basis cells are legitimate (degenerate bases); shipments()
    returns only the cells that actually carry mass.  After optimization u
    and v hold the dual potentials and optimal records the certificate.
    """

    rows: np.ndarray
    cols: np.ndarray
    mass: np.ndarray
    total_cost: float
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    optimal: Optional[bool] = None
    diagnostics: dict = field(default_factory=dict)

    def shipments(self):
        """List of (i, j, mass) basis cells with positive mass."""
        keep = self.mass > 0.0
        return list(zip(self.rows[keep].tolist(), self.cols[keep].tolist(), self.mass[keep].tolist()))

    def basis_cells(self):
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    def feasibility_residual(self, problem: TransportProblem):
        """Largest row/column mass mismatch of the plan against the instance."""
        row_sum = np.bincount(self.rows, weights=self.mass, minlength=problem.n)
        col_sum = np.bincount(self.cols, weights=self.mass, minlength=problem.m)
        return float(
            max(
                np.abs(row_sum - problem.supplies).max(),
                np.abs(col_sum - problem.demands).max(),
            )
        )

    def to_json_obj(self, problem: Optional[TransportProblem] = None) -> dict:
        obj = {
            "shipments": [{"i": i, "j": j, "mass": m} for i, j, m in self.shipments()],
            "basis": [[int(i), int(j)] for i, j in self.basis_cells()],
            "total_cost": float(self.total_cost),
            "optimal": self.optimal,
            "diagnostics": dict(self.diagnostics),
        }
        if self.u is not None and self.v is not None:
            obj["duals"] = {"u": [float(x) for x in self.u], "v": [float(x) for x in self.v]}
        return obj

    def csv_rows(self, problem: TransportProblem):
        """Yield (i, j, mass, unit_cost) for every shipment."""
        C = problem.costs
        for i, j, m in self.shipments():
            yield i, j, m, float(C[i, j])


def discretize(field: HusimiField, threshold: Optional[float] = None,
               max_peaks: Optional[int] = None):
    """Collapse a Husimi grid to point masses at cell centers.

    Cells with mass value*dx^2 above the threshold survive (default
    threshold: 1e-12 times the largest cell mass).  max_peaks optionally
    keeps only the heaviest cells.  Surviving masses are renormalized to
    total 1; returns (points (K, 2), masses (K,)).
    """
    dx = field.grid.dx
    flat = (field.values * dx * dx).ravel()
    if threshold is None:
        threshold = 1e-12 * float(flat.max())
    if not math.isfinite(threshold) or threshold < 0:
        raise ValueError("threshold must be a finite value >= 0")
    idx = np.flatnonzero(flat > threshold)
    if idx.size == 0:
        raise ValueError("threshold removed every cell; nothing left to transport")
    if max_peaks is not None and idx.size > max_peaks:
        order = np.argsort(-flat[idx], kind="stable")[: int(max_peaks)]
        idx = np.sort(idx[order])
    ny = field.grid.ny
    i = idx // ny
    j = idx - i * ny
    x1s = field.grid.x1_coords()
    x2s = field.grid.x2_coords()
    pts = np.column_stack([x1s[i], x2s[j]])
    masses = flat[idx].copy()
    masses /= masses.sum()
    return pts, masses


def _finalize_cells(problem: TransportProblem, cells: dict, diagnostics: dict,
                    u=None, v=None, optimal=None) -> TransportPlan:
    m_cols = problem.m
    cids = np.array(sorted(cells), dtype=np.int64)
    mass = np.array([cells[c] for c in sorted(cells)], dtype=float)
    rows = cids // m_cols
    cols = cids - rows * m_cols
    total = float(np.dot(problem.costs[rows, cols], mass))
    return TransportPlan(rows, cols, mass, total, u=u, v=v, optimal=optimal,
                         diagnostics=diagnostics)


def northwest_corner(problem: TransportProblem) -> TransportPlan:
    """Cost-blind staircase start: sweep cells from the top-left corner.

    Exactly one of row/column advances per step, so the visited cells
    always form a spanning-tree basis of N + M - 1 entries, padding with
    zero-mass cells when a supply and a demand close simultaneously.
    """
    n, m = problem.n, problem.m
    rem_a = problem.supplies.copy()
    rem_b = problem.demands.copy()
    eps = 1e-15 * float(problem.supplies.sum())
    cells = {}
    i = j = 0
    while True:
        q = min(rem_a[i], rem_b[j])
        cells[i * m + j] = float(q)
        rem_a[i] -= q
        rem_b[j] -= q
        if rem_a[i] <= eps:
            rem_a[i] = 0.0
        if rem_b[j] <= eps:
            rem_b[j] = 0.0
        if i == n - 1 and j == m - 1:
            break
        if rem_a[i] == 0.0 and i < n - 1:
            i += 1
        elif j < m - 1:
            j += 1
        else:
            i += 1
    if len(cells) != n + m - 1:
        raise SolverError("northwest sweep built a defective basis")
    return _finalize_cells(problem, cells, {"start": "northwest"})


def _two_smallest(vals: np.ndarray, ids: np.ndarray):
    """Ids and values of the two smallest entries, ties to the lowest id.

    vals must be a scratch copy; it is clobbered.
    """
    best = int(np.argmin(vals))
    v1 = float(vals[best])
    if vals.size == 1:
        return ids[best], -1, v1, math.inf
    vals[best] = np.inf
    second = int(np.argmin(vals))
    return ids[best], ids[second], v1, float(vals[second])


def vogel(problem: TransportProblem) -> TransportPlan:
    """Vogel approximation start: allocate along the largest regret first.

    Each active row/column carries a penalty (second-smallest minus
    smallest active cost); the line with the largest penalty allocates at
    its cheapest cell.  Ties pick rows before columns and then the lowest
    index.  Exactly one line closes per allocation, so the result is a
    spanning-tree basis like the northwest start, usually far cheaper.
    """
    n, m = problem.n, problem.m
    C = problem.costs
    rem_a = problem.supplies.copy()
    rem_b = problem.demands.copy()
    eps = 1e-15 * float(problem.supplies.sum())
    row_active = np.ones(n, dtype=bool)
    col_active = np.ones(m, dtype=bool)
    n_rows, n_cols = n, m
    cells = {}

    # cached cheapest / second-cheapest active cost per line
    row_min = np.full((n, 2), np.inf)
    row_arg = np.full(n, -1, dtype=np.int64)
    col_min = np.full((m, 2), np.inf)
    col_arg = np.full(m, -1, dtype=np.int64)

    def refresh_row(i):
        ids = np.flatnonzero(col_active)
        a1, _, v1, v2 = _two_smallest(C[i, ids], ids)
        row_arg[i] = a1
        row_min[i, 0] = v1
        row_min[i, 1] = v2

    def refresh_col(j):
        ids = np.flatnonzero(row_active)
        a1, _, v1, v2 = _two_smallest(C[ids, j], ids)
        col_arg[j] = a1
        col_min[j, 0] = v1
        col_min[j, 1] = v2

    def close_row(i):
        nonlocal n_rows
        row_active[i] = False
        n_rows -= 1
        ids = np.flatnonzero(col_active)
        stale = ids[(col_arg[ids] == i) | (col_min[ids, 1] == C[i, ids])]
        for jj in stale:
            refresh_col(int(jj))

    def close_col(j):
        nonlocal n_cols
        col_active[j] = False
        n_cols -= 1
        ids = np.flatnonzero(row_active)
        stale = ids[(row_arg[ids] == j) | (row_min[ids, 1] == C[ids, j])]
        for ii in stale:
            refresh_row(int(ii))

    def allocate(i, j, close):
        """Ship min(remaining) at (i, j) and close exactly one line ('final': both)."""
        nonlocal n_rows, n_cols
        q = min(rem_a[i], rem_b[j])
        cells[i * m + j] = float(q)
        rem_a[i] -= q
        rem_b[j] -= q
        if rem_a[i] <= eps:
            rem_a[i] = 0.0
        if rem_b[j] <= eps:
            rem_b[j] = 0.0
        if close == "final":
            row_active[i] = False
            col_active[j] = False
            n_rows -= 1
            n_cols -= 1
        elif close == "row":
            close_row(i)
        elif close == "col":
            close_col(j)
        elif rem_a[i] == 0.0:
            # both exhausted closes only the row, leaving a degenerate column
            close_row(i)
        else:
            close_col(j)

    for i in range(n):
        refresh_row(i)
    for j in range(m):
        refresh_col(j)

    while n_rows > 1 and n_cols > 1:
        pen = np.full(n + m, -np.inf)
        pen[:n][row_active] = row_min[row_active, 1] - row_min[row_active, 0]
        pen[n:][col_active] = col_min[col_active, 1] - col_min[col_active, 0]
        k = int(np.argmax(pen))
        if k < n:
            allocate(k, int(row_arg[k]), "auto")
        else:
            allocate(int(col_arg[k - n]), k - n, "auto")

    if n_rows == 1:
        i = int(np.flatnonzero(row_active)[0])
        remaining = [int(j) for j in np.flatnonzero(col_active)]
        for j in remaining[:-1]:
            allocate(i, j, "col")
        allocate(i, remaining[-1], "final")
    elif n_cols == 1:
        j = int(np.flatnonzero(col_active)[0])
        remaining = [int(i) for i in np.flatnonzero(row_active)]
        for i in remaining[:-1]:
            allocate(i, j, "row")
        allocate(remaining[-1], j, "final")

    if len(cells) != n + m - 1:
        raise SolverError("Vogel start built a defective basis")
    return _finalize_cells(problem, cells, {"start": "vogel"})


def _build_adjacency(n, m, cids):
    adj = [[] for _ in range(n + m)]
    for cid in cids:
        i = cid // m
        j = cid - i * m
        adj[i].append(cid)
        adj[n + j].append(cid)
    return adj


def _other_end(cid, node, n, m):
    i = cid // m
    return (n + cid - i * m) if node < n else i


def _root_subtree(adj, c_flat, n, m, parent, parent_cell, depth, pot, root):
    """(Re)orient the component holding root away from it, filling duals.

    parent[root], depth[root] and pot[root] must already be set; every
    reached node gets its parent pointer, depth and dual potential from
    the arc that discovered it.  Returns the number of nodes visited.
    """
    stack = [root]
    count = 0
    while stack:
        node = stack.pop()
        count += 1
        base = pot[node]
        d = depth[node] + 1
        skip = parent[node]
        for cid in adj[node]:
            other = _other_end(cid, node, n, m)
            if other == skip:
                continue
            parent[other] = node
            parent_cell[other] = cid
            depth[other] = d
            pot[other] = c_flat[cid] - base
            stack.append(other)
    return count


def optimize(problem: TransportProblem, initial: TransportPlan, *,
             tol: float = 1e-10, max_iter: Optional[int] = None) -> TransportPlan:
    """Drive a basic feasible plan to optimality with MODI pivots.

    Entering cell: most negative reduced cost (switching to Bland's
    lowest-index rule after a long run of degenerate pivots to rule out
    cycling); leaving cell: minimum mass on the alternating cycle, ties to
    the lowest flat index.  The basis tree is kept rooted at node 0 with
    parent/depth/potential arrays so each pivot only rewires the subtree
    cut loose by the leaving cell.  Returns a new plan carrying duals, the
    optimality certificate and pivot diagnostics; the input is untouched.
    """
    n, m = problem.n, problem.m
    C = problem.costs
    c_flat = C.ravel()
    cells = {int(i) * m + int(j): float(x)
             for i, j, x in zip(initial.rows, initial.cols, initial.mass)}
    if len(cells) != n + m - 1:
        raise ValueError(f"initial basis has {len(cells)} cells, needs {n + m - 1}")
    if initial.feasibility_residual(problem) > BALANCE_TOL * max(1.0, float(problem.supplies.sum())):
        raise ValueError("initial plan does not meet the supplies/demands")
    if max_iter is None:
        max_iter = 100 * (n + m) + 1000

    adj = _build_adjacency(n, m, cells)
    size = n + m
    parent = [-1] * size
    parent_cell = [-1] * size
    depth = [0] * size
    pot = np.zeros(size)  # u_i at i < n, v_j at n + j
    if _root_subtree(adj, c_flat, n, m, parent, parent_cell, depth, pot, 0) != size:
        raise SolverError("basis does not span every supply and demand node")

    R = np.empty_like(C)
    flat_r = R.ravel()
    u = pot[:n]
    v = pot[n:]
    pivots = 0
    degenerate = 0
    degen_run = 0
    bland = False
    optimal = False
    pool = np.empty(0, dtype=np.int64)
    block = 8192  # cap on candidate cells harvested per full pricing scan

    def _pivot(entering: int) -> None:
        nonlocal pivots, degenerate, degen_run, bland
        ei = entering // m
        ej = entering - ei * m
        a, b = ei, n + ej

        # alternating cycle: walk both endpoints up to their lowest
        # common ancestor; cells_path[k] joins nodes_path[k], nodes_path[k+1]
        x, y = a, b
        nodes_a, nodes_b = [a], [b]
        cells_a, cells_b = [], []
        while depth[x] > depth[y]:
            cells_a.append(parent_cell[x])
            x = parent[x]
            nodes_a.append(x)
        while depth[y] > depth[x]:
            cells_b.append(parent_cell[y])
            y = parent[y]
            nodes_b.append(y)
        while x != y:
            cells_a.append(parent_cell[x])
            x = parent[x]
            nodes_a.append(x)
            cells_b.append(parent_cell[y])
            y = parent[y]
            nodes_b.append(y)
        cells_path = cells_a + cells_b[::-1]
        nodes_path = nodes_a + nodes_b[::-1][1:]

        minus = cells_path[0::2]
        theta = min(cells[cid] for cid in minus)
        leaving = min(cid for cid in minus if cells[cid] == theta)
        at = cells_path.index(leaving)

        cells[entering] = theta
        adj[ei].append(entering)
        adj[n + ej].append(entering)
        for k, cid in enumerate(cells_path):
            if k % 2 == 0:
                cells[cid] = max(cells[cid] - theta, 0.0)
            else:
                cells[cid] += theta
        del cells[leaving]
        li = leaving // m
        lj = leaving - li * m
        adj[li].remove(leaving)
        adj[n + lj].remove(leaving)

        # the leaving cell cuts off the subtree under its deeper endpoint;
        # reattach it through the entering cell and repair only its nodes
        px, py = nodes_path[at], nodes_path[at + 1]
        child = px if depth[px] > depth[py] else py
        if child == nodes_path[at]:
            new_root, anchor = a, b
        else:
            new_root, anchor = b, a
        parent[new_root] = anchor
        parent_cell[new_root] = entering
        depth[new_root] = depth[anchor] + 1
        pot[new_root] = c_flat[entering] - pot[anchor]
        _root_subtree(adj, c_flat, n, m, parent, parent_cell, depth, pot, new_root)

        pivots += 1
        if theta <= 0.0:
            degenerate += 1
            degen_run += 1
            if degen_run > n + m:
                bland = True
        else:
            degen_run = 0
            bland = False

    while True:
        # minor pivots: re-price only the pooled candidates (exact, since
        # the potentials are always current) and enter the most negative
        while pool.size and not bland and pivots < max_iter:
            pool_i = pool // m
            rc = c_flat[pool] - pot[pool_i] - pot[n + pool - pool_i * m]
            keep = rc < -tol
            if not keep.any():
                pool = pool[:0]
                break
            pool = pool[keep]
            _pivot(int(pool[int(np.argmin(rc[keep]))]))

        # full pricing scan: optimality test plus candidate harvest
        np.subtract(C, u[:, None], out=R)
        np.subtract(R, v[None, :], out=R)
        rmin_at = int(np.argmin(flat_r))
        rmin = float(flat_r[rmin_at])
        if rmin >= -tol:
            optimal = True
            break
        if pivots >= max_iter:
            break
        if bland:
            _pivot(int(np.flatnonzero(flat_r < -tol)[0]))
            continue
        # harvest arcs at least a quarter as deep as the best one
        cand = np.flatnonzero(flat_r < min(0.25 * rmin, -tol))
        if cand.size > block:
            sel = np.argpartition(flat_r[cand], block - 1)[:block]
            cand = cand[sel]
        pool = np.sort(cand)

    diagnostics = dict(initial.diagnostics)
    diagnostics.update(
        pivots=pivots,
        degenerate_pivots=degenerate,
        min_reduced_cost=rmin,
    )
    return _finalize_cells(problem, cells, diagnostics, u=u.copy(), v=v.copy(),
                           optimal=optimal)


def monge_numeric(state1: StateSpec, state2: StateSpec, p: float = 1.0, *,
                  dx: float = 0.25, radius: Optional[float] = None,
                  threshold: Optional[float] = None,
                  max_peaks: Optional[int] = None,
                  tol: float = 1e-10) -> DistanceResult:
    """Order-p Monge distance between two states by discrete transport.

    Both Husimi densities are sampled on one shared window (auto-sized
    unless radius is given), collapsed to point masses, and the resulting
    transportation problem is solved exactly from a Vogel start.  Returns
    the p-th root of the optimal cost with solver diagnostics.
    """
    grid = shared_window([state1, state2], dx, radius)
    f1 = husimi_grid(state1, grid)
    f2 = husimi_grid(state2, grid)
    pts1, m1 = discretize(f1, threshold, max_peaks)
    pts2, m2 = discretize(f2, threshold, max_peaks)
    problem = TransportProblem(m1, m2, pts1, pts2, p=p)
    plan = optimize(problem, vogel(problem), tol=tol)
    value = plan.total_cost ** (1.0 / problem.p) if problem.p != 1.0 else plan.total_cost
    diag = {
        "n_source": int(problem.n),
        "n_sink": int(problem.m),
        "grid_dx": grid.dx,
        "grid_nx": grid.nx,
        "grid_ny": grid.ny,
        "raw_mass_source": f1.raw_mass,
        "raw_mass_sink": f2.raw_mass,
        "optimal": plan.optimal,
    }
    diag.update({k: plan.diagnostics[k] for k in ("pivots", "min_reduced_cost", "start")})
    return DistanceResult(float(value), "transport", problem.p, diag)
