"""Independent checks for the graph fixtures.

Writes tests/data/random100.txt (100 random directed edges) and prints the
values frozen in test_graph.cpp: weight per unordered pair counted directly
from the edge set, degree per vertex and total weight.
"""
import random
from collections import Counter
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    rng = random.Random(20240611)
    edges = set()
    while len(edges) < 100:
        u, v = rng.randrange(40), rng.randrange(40)
        if u != v:
            edges.add((u * 7 + 3, v * 7 + 3))
    ordered = sorted(edges, key=lambda e: rng.random())
    (DATA / "random100.txt").write_text("".join(f"{u} {v}\n" for u, v in ordered))

    pair = Counter()
    for u, v in edges:
        pair[frozenset((u, v))] += 1
    degree = Counter()
    for p, w in pair.items():
        for x in p:
            degree[x] += w
    print("pairs", len(pair))
    print("weight2", sum(1 for w in pair.values() if w == 2))
    print("total_weight", sum(pair.values()))
    print("vertices", len(degree))
    print("degrees", [degree[x] for x in sorted(degree)])


if __name__ == "__main__":
    main()
