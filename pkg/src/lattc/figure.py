"""Hasse diagram of a lattice config, drawn with matplotlib."""

from __future__ import annotations

from itertools import combinations

from lattc.lattice import LatticeConfig, format_level


def covering_pairs(cfg: LatticeConfig):
    """(lower, upper) pairs with nothing legal strictly between them."""
    levels = cfg.levels()
    out = []
    for lo, hi in combinations(levels, 2):
        if lo < hi and not any(lo < mid < hi for mid in levels):
            out.append((lo, hi))
    return out


def layout(cfg: LatticeConfig) -> dict:
    """Rank by size, spread each rank evenly around x = 0."""
    ranks: dict[int, list] = {}
    for level in cfg.levels():
        ranks.setdefault(len(level), []).append(level)
    pos = {}
    for size, row in ranks.items():
        for i, level in enumerate(row):
            pos[level] = (i - (len(row) - 1) / 2, size)
    return pos


def hasse_figure(cfg: LatticeConfig, path: str, title: str | None = None):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    pos = layout(cfg)
    width = max(4.0, 1.6 * max(sum(1 for p in pos.values() if p[1] == y) for y in {p[1] for p in pos.values()}))
    fig, ax = plt.subplots(figsize=(width, 1.2 * (max(p[1] for p in pos.values()) + 2)))
    for lo, hi in covering_pairs(cfg):
        (x0, y0), (x1, y1) = pos[lo], pos[hi]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="->", color="0.4", shrinkA=14, shrinkB=14))
    for level, (x, y) in pos.items():
        label = format_level(level)
        alias = cfg.alias_for(level)
        if alias:
            label += f"\n{alias}"
        ax.text(x, y, label, ha="center", va="center", fontsize=9,
                bbox=dict(boxstyle="round", fc="white", ec="0.2"))
    xs = [p[0] for p in pos.values()]
    ax.set_xlim(min(xs) - 1, max(xs) + 1)
    ax.set_ylim(-0.7, max(p[1] for p in pos.values()) + 0.7)
    ax.axis("off")
    ax.set_title(title or f"{len(pos)} legal levels; arrows point to the stronger theory")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
