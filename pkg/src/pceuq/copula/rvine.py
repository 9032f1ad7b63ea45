"""General regular-vine specifications (density evaluation and sampling only)
and D-vine ordering.

An R-vine is stored as a list of trees; every edge carries its conditioned
pair ``(j, k)``, its conditioning set ``D`` and a pair copula whose first
argument is ``u_{j|D}`` and second is ``u_{k|D}``. Conditional margins
``F(u_j | u_S)`` are computed recursively from the edges, which works for any
valid structure without the matrix encoding.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .families import DEFAULT_FAMILIES, EPS, PairCopula, fit_pair
from .vine import CvineModel, tau_matrix

BRUTE_FORCE_MAX_D = 8


def _clip(u):
    return np.clip(u, EPS, 1.0 - EPS)


@dataclass(frozen=True, eq=False)
class VineEdge:
    j: int
    k: int
    given: frozenset
    copula: PairCopula

    @property
    def conditioned(self) -> frozenset:
        return frozenset((self.j, self.k))

    @property
    def constraint(self) -> frozenset:
        return self.conditioned | self.given


@dataclass(frozen=True, eq=False)
class RvineSpec:
    d: int
    trees: tuple  # trees[t] is a tuple of VineEdge with |given| = t

    def __post_init__(self):
        trees = tuple(tuple(tr) for tr in self.trees)
        object.__setattr__(self, "trees", trees)
        self.validate()

    # ------------------------------------------------------------ structure
    def validate(self) -> None:
        d = self.d
        if len(self.trees) != d - 1:
            raise InputError(f"an R-vine on {d} variables has {d - 1} trees, got {len(self.trees)}")
        for t, tree in enumerate(self.trees):
            if len(tree) != d - 1 - t:
                raise InputError(f"tree {t + 1} must have {d - 1 - t} edges")
            for e in tree:
                if e.j == e.k or len(e.given) != t or e.conditioned & e.given:
                    raise InputError(f"malformed edge {e.j},{e.k}|{sorted(e.given)} in tree {t + 1}")
                if not e.constraint <= set(range(d)):
                    raise InputError("edge refers to a variable outside 0..d-1")
        # tree 1 must be a spanning tree on the variables
        self._check_spanning([e.conditioned for e in self.trees[0]], list(range(d)), 1)
        # deeper trees: spanning trees on the previous edges + proximity condition
        for t in range(1, d - 1):
            prev = [e.constraint for e in self.trees[t - 1]]
            links = []
            for e in self.trees[t]:
                match = [(a, b) for a, b in itertools.combinations(range(len(prev)), 2)
                         if prev[a] | prev[b] == e.constraint and prev[a] & prev[b] == e.given]
                if not match:
                    raise InputError(f"proximity condition fails for edge {e.j},{e.k}|{sorted(e.given)}")
                links.append(frozenset(match[0]))
            self._check_spanning(links, list(range(len(prev))), t + 1)

    @staticmethod
    def _check_spanning(edges, nodes, tree_no) -> None:
        parent = {v: v for v in nodes}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for e in edges:
            a, b = tuple(e)
            ra, rb = find(a), find(b)
            if ra == rb:
                raise InputError(f"tree {tree_no} contains a cycle")
            parent[ra] = rb

    def _edge_for(self, var: int, cond: frozenset) -> tuple[VineEdge, int]:
        """Edge giving F(var | cond): conditioned {var, m}, given cond minus m."""
        t = len(cond) - 1
        for e in self.trees[t]:
            if var in e.conditioned and e.constraint == cond | {var}:
                return e, (e.k if e.j == var else e.j)
        raise InputError(f"no edge yields F({var} | {sorted(cond)})")

    # ------------------------------------------------------------- numerics
    def _conditional(self, u: np.ndarray, var: int, cond: frozenset, memo: dict) -> np.ndarray:
        key = (var, cond)
        if key in memo:
            return memo[key]
        if not cond:
            val = _clip(u[:, var])
        else:
            e, other = self._edge_for(var, cond)
            rest = cond - {other}
            a = self._conditional(u, var, rest, memo)
            b = self._conditional(u, other, rest, memo)
            val = _clip(e.copula.h(a, b) if e.j == var else e.copula.hu(b, a))
        memo[key] = val
        return val

    def logpdf(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        memo: dict = {}
        ll = np.zeros(u.shape[0])
        for tree in self.trees:
            for e in tree:
                a = self._conditional(u, e.j, e.given, memo)
                b = self._conditional(u, e.k, e.given, memo)
                ll += e.copula.logpdf(a, b)
        return ll

    def sampling_order(self) -> list[int]:
        """Order in which variables can be drawn by sequential inversion.

        Built by repeatedly peeling a variable that appears as conditioned
        in exactly one edge per remaining tree and in no conditioning set.
        """
        trees = [list(tr) for tr in self.trees]
        alive = set(range(self.d))
        peeled = []
        while len(alive) > 1:
            for v in sorted(alive):
                ok = all(sum(v in e.conditioned for e in tr) == 1 and all(v not in e.given for e in tr)
                         for tr in trees if tr)
                if ok:
                    break
            else:
                raise InputError("vine structure admits no sequential sampling order")
            peeled.append(v)
            alive.remove(v)
            trees = [[e for e in tr if v not in e.conditioned] for tr in trees]
        peeled.append(alive.pop())
        return peeled[::-1]

    def _chain(self, var: int, earlier: list[int]) -> list[tuple[VineEdge, int, frozenset]]:
        """Edges linking ``var`` to the earlier variables, shallowest tree first."""
        chain = []
        cond = frozenset(earlier)
        while cond:
            e, other = self._edge_for(var, cond)
            chain.append((e, other, cond - {other}))
            cond = cond - {other}
        return chain[::-1]

    def inverse_rosenblatt(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        order = self.sampling_order()
        u = np.empty_like(z)
        memo: dict = {}
        for pos, var in enumerate(order):
            x = _clip(z[:, var])
            for e, other, rest in reversed(self._chain(var, order[:pos])):
                b = self._conditional(u, other, rest, memo)
                x = _clip(e.copula.h_inv(x, b) if e.j == var else e.copula.hu_inv(x, b))
            u[:, var] = x
        return u

    def rosenblatt(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        order = self.sampling_order()
        z = np.empty_like(u)
        memo: dict = {}
        for pos, var in enumerate(order):
            z[:, var] = self._conditional(u, var, frozenset(order[:pos]), memo)
        return z

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.inverse_rosenblatt(rng.random((n, self.d)))

    # --------------------------------------------------------- constructors
    @classmethod
    def from_cvine(cls, c: CvineModel) -> "RvineSpec":
        o = c.order
        trees = []
        for t, row in enumerate(c.pairs):
            given = frozenset(o[:t])
            trees.append(tuple(VineEdge(o[t], o[t + 1 + i], given, pc) for i, pc in enumerate(row)))
        return cls(c.d, tuple(trees))

    @classmethod
    def from_dvine(cls, order, pairs) -> "RvineSpec":
        """``pairs[t][i]`` couples ``order[i]`` (first argument) with ``order[i + t + 1]``
        given the variables strictly between them in the path."""
        order = [int(v) for v in order]
        d = len(order)
        trees = []
        for t in range(d - 1):
            trees.append(tuple(VineEdge(order[i], order[i + t + 1], frozenset(order[i + 1:i + t + 1]), pairs[t][i])
                               for i in range(d - 1 - t)))
        return cls(d, tuple(trees))


def _path_score(T: np.ndarray, path) -> float:
    return float(sum(T[a, b] for a, b in zip(path[:-1], path[1:])))


def select_dvine_order(pseudo_obs) -> tuple:
    """Path through the variables maximising the summed |tau| of neighbours.

    Exhaustive for d <= 8 (paths and their reversals counted once, first
    endpoint smaller), greedy nearest-neighbour from every start beyond.
    """
    T = np.abs(tau_matrix(pseudo_obs))
    d = T.shape[0]
    if d <= 2:
        return tuple(range(d))
    best, best_path = -np.inf, None
    if d <= BRUTE_FORCE_MAX_D:
        for perm in itertools.permutations(range(d)):
            if perm[0] > perm[-1]:
                continue
            s = _path_score(T, perm)
            if s > best + 1e-12:
                best, best_path = s, perm
        return tuple(best_path)
    for start in range(d):
        path = [start]
        left = set(range(d)) - {start}
        while left:
            nxt = max(sorted(left), key=lambda v: T[path[-1], v])
            path.append(nxt)
            left.remove(nxt)
        if path[0] > path[-1]:
            path = path[::-1]
        s = _path_score(T, path)
        if s > best + 1e-12:
            best, best_path = s, tuple(path)
    return best_path


def fit_dvine(pseudo_obs, families=DEFAULT_FAMILIES, order=None) -> RvineSpec:
    """Sequential AIC fit of a D-vine along ``order`` (selected if omitted)."""
    u = _clip(np.asarray(pseudo_obs, dtype=float))
    order = select_dvine_order(u) if order is None else tuple(order)
    d = len(order)
    trees: list[tuple] = []
    memo: dict = {}
    for t in range(d - 1):
        partial = RvineSpec.__new__(RvineSpec)
        object.__setattr__(partial, "d", d)
        object.__setattr__(partial, "trees", tuple(trees))
        edges = []
        for i in range(d - 1 - t):
            j, k = order[i], order[i + t + 1]
            given = frozenset(order[i + 1:i + t + 1])
            a = partial._conditional(u, j, given, memo)
            b = partial._conditional(u, k, given, memo)
            edges.append(VineEdge(j, k, given, fit_pair(np.column_stack([a, b]), families).copula))
        trees.append(tuple(edges))
    return RvineSpec(d, tuple(trees))
