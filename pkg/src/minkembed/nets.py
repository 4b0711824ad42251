"""Per-level maximal nets and their greedy colorings."""
import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BudgetExceeded, SupportOverlap, ValidationError

SCHEMA = 1
NET_ORDERS = ("input", "farthest")


@dataclass
class Net:
    level: int
    radius: float
    members: tuple  # point indices, in enumeration order (this is J_k)


@dataclass
class Coloring:
    colors: tuple  # colors[t] is the color of net.members[t], starting at 1
    budget: int
    separation: float
    budget_grown: bool = False

    @property
    def max_color(self):
        return max(self.colors, default=0)

    def fiber(self, color):
        """Positions t (into net.members) with the given color, in enumeration order."""
        return tuple(t for t, c in enumerate(self.colors) if c == color)


@dataclass
class NetHierarchy:
    order: str
    levels: dict = field(default_factory=dict)  # k -> (Net, Coloring)
    overlaps: dict = field(default_factory=dict)  # k -> bool, see support_overlaps

    def net(self, k):
        return self.levels[k][0]

    def coloring(self, k):
        return self.levels[k][1]

    @property
    def colors_used(self):
        return max((c.max_color for _, c in self.levels.values()), default=0)

    def to_json(self):
        return {"schema": SCHEMA, "order": self.order, "levels": [
            {"k": k, "r_k": net.radius, "separation": col.separation,
             "members": [int(m) for m in net.members], "colors": [int(c) for c in col.colors]}
            for k, (net, col) in sorted(self.levels.items())]}

    @classmethod
    def from_json(cls, obj, budget=None):
        h = cls(obj["order"])
        for lv in obj["levels"]:
            cols = tuple(lv["colors"])
            h.levels[lv["k"]] = (
                Net(lv["k"], lv["r_k"], tuple(lv["members"])),
                Coloring(cols, budget or max(cols, default=1), lv["separation"]))
        return h


def enumeration(space, order="input"):
    if order == "input":
        return np.arange(len(space))
    if order == "farthest":
        return kernels.farthest_order(space.dist, 0)
    raise ValidationError(f"unknown net order {order!r}; choose from {NET_ORDERS}")


def build_net(space, r, order=None, level=0):
    """Greedy maximal net: admit a point iff it is >= r from every admitted point."""
    if r <= 0:
        raise ValidationError("net radius must be positive")
    if order is None:
        order = np.arange(len(space))
    members = kernels.greedy_net(space.dist, order, r)
    return Net(level, float(r), tuple(int(m) for m in members))


def color_net(space, net, sep, budget, strict=True):
    """Greedy coloring: each member takes the smallest color unused by earlier members within sep.

    Exceeding ``budget`` raises :class:`BudgetExceeded` in strict mode;
    otherwise the budget grows to the count used and the coloring is flagged.
    """
    if budget < 1:
        raise ValidationError("color budget must be >= 1")
    colors = kernels.greedy_coloring(space.dist, net.members, sep)
    grown = False
    if colors.size and colors.max() > budget:
        if strict:
            t = int(np.argmax(colors > budget))
            raise BudgetExceeded(net.level, net.members[t], int(colors[t]), budget)
        budget, grown = int(colors.max()), True
    return Coloring(tuple(int(c) for c in colors), int(budget), float(sep), grown)


def neighbor_count(space, net, x, radius):
    """Number of net members within ``radius`` of point x."""
    return int(np.count_nonzero(space.dist[x, list(net.members)] <= radius))


def support_overlaps(space, net, coloring):
    """True if some point lies in B_j and in the support of another same-color bump.

    The vector selection relies on phi_j = 1 and phi_i = 0 (i != j, same
    color) on B_j; this checks that directly on the finite space.
    """
    D = space.dist
    r = net.radius
    mem = np.asarray(net.members, dtype=np.int64)
    if mem.size < 2:
        return False
    cols = np.asarray(coloring.colors)
    for t, j in enumerate(mem):
        same = mem[(cols == cols[t]) & (mem != j)]
        same = same[D[j, same] < 3 * r]
        if same.size == 0:
            continue
        ball = np.flatnonzero(D[j] <= r)
        for i in same:
            Bi = np.flatnonzero(D[i] <= r)
            # phi_i(x) > 0  <=>  dist(x, B_i) < r
            if np.any(D[np.ix_(ball, Bi)].min(axis=1) < r):
                return True
    return False


def build_hierarchy(space, params, order="input", strict=None):
    """Nets and colorings for levels n0..n under the given parameters.

    The color budget is ``params.N_colors``; a value of 0 means "whatever
    the greedy coloring needs" (practical mode only).
    """
    if strict is None:
        strict = params.mode == "strict"
    enum = enumeration(space, order)
    h = NetHierarchy(order)
    for k in params.levels:
        r = params.radius(k)
        sep = r ** params.theta
        net = build_net(space, r, enum, level=k)
        budget = params.N_colors if params.N_colors > 0 else max(len(net.members), 1)
        col = color_net(space, net, sep, budget, strict=strict)
        h.overlaps[k] = support_overlaps(space, net, col)
        if strict and h.overlaps[k]:
            raise SupportOverlap(f"level {k}: same-color bump supports meet a ball B_j")
        h.levels[k] = (net, col)
    return h


def write_hierarchy(h, path):
    with open(path, "w") as fh:
        json.dump(h.to_json(), fh)
        fh.write("\n")
