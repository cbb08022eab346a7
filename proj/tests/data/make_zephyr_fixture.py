#!/usr/bin/env python3
"""Regenerate the Z(m,t) reference edge list from dwave-networkx.

Usage: make_zephyr_fixture.py M T > zephyr_M_T.edges

Coupler classes are not labelled by dwave-networkx itself; they are assigned
by reproducing its three edge generators (external, odd, internal) and the
union is checked against the graph it returns.
"""
import sys
from itertools import product

import dwave_networkx as dnx


def classified_edges(m, t):
    M = 2 * m + 1

    def label(u, w, k, j, z):
        return (((u * M + w) * t + k) * 2 + j) * m + z

    out = {}
    for u, w, k, j, z in product((0, 1), range(M), range(t), (0, 1), range(m - 1)):
        out[frozenset((label(u, w, k, j, z), label(u, w, k, j, z + 1)))] = "external"
    for u, w, k, a in product((0, 1), range(M), range(t), (0, 1)):
        for z in range(a, m):
            out[frozenset((label(u, w, k, 0, z), label(u, w, k, 1, z - a)))] = "odd"
    for w, z, h, k, i, j, a, b in product(range(m), range(m), range(t), range(t),
                                          (0, 1), (0, 1), (0, 1), (0, 1)):
        e = frozenset((label(0, 2 * w + 1 + a * (2 * i - 1), k, j, z),
                       label(1, 2 * z + 1 + b * (2 * j - 1), h, i, w)))
        out[e] = "internal"
    return out


def main():
    m, t = int(sys.argv[1]), int(sys.argv[2])
    g = dnx.zephyr_graph(m, t)
    cls = classified_edges(m, t)
    ref = {frozenset(e) for e in g.edges()}
    assert ref == set(cls), "edge classification disagrees with dwave-networkx"
    assert g.number_of_nodes() == 8 * t * m * m + 4 * t * m
    rows = sorted((min(e), max(e), c) for e, c in cls.items())
    for a, b, c in rows:
        print(f"{a} {b} {c}")


if __name__ == "__main__":
    main()
