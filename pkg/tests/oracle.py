"""Brute-force lattice oracle: enumerate every subset, search for bounds.

Deliberately shares nothing with lattc.lattice beyond the raw config data.
"""

from itertools import chain, combinations


def powerset(items):
    items = list(items)
    return [frozenset(c) for c in chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))]


class Oracle:
    def __init__(self, extensions, implies, forbidden):
        self.extensions = list(extensions)
        self.implies = [tuple(p) for p in implies]
        self.forbidden = [frozenset(p) for p in forbidden]

    def closed(self, s):
        return all(b in s for a, b in self.implies if a in s)

    def legal(self, s):
        return not any(p <= s for p in self.forbidden)

    def closure(self, s):
        # smallest closed superset, by exhaustive search
        supers = [t for t in powerset(self.extensions) if s <= t and self.closed(t)]
        return min(supers, key=len)

    def levels(self):
        return [s for s in powerset(self.extensions) if self.closed(s) and self.legal(s)]

    def leq(self, a, b):
        return all(x in b for x in a)

    def meet(self, a, b):
        lower = [c for c in self.levels() if self.leq(c, a) and self.leq(c, b)]
        greatest = [c for c in lower if all(self.leq(d, c) for d in lower)]
        assert len(greatest) == 1
        return greatest[0]

    def join(self, a, b):
        upper = [c for c in self.levels() if self.leq(a, c) and self.leq(b, c)]
        least = [c for c in upper if all(self.leq(c, d) for d in upper)]
        return least[0] if least else None
