import logging
from dataclasses import dataclass
from typing import Dict, List, Set, Tuple

import numpy as np

from ..pencil.spec import PencilSpec
from .section import SectionSpec
from .voronoi import voronoi_adjacency

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Coloring:
    """Partition of the net indices into groups I_1..I_N of non-adjacent points."""

    colors: Tuple[int, ...]
    adjacency: Tuple[Tuple[int, int], ...]

    @property
    def N(self) -> int:
        return max(self.colors, default=-1) + 1

    @property
    def groups(self) -> List[List[int]]:
        groups: List[List[int]] = [[] for _ in range(self.N)]
        for index, color in enumerate(self.colors):
            groups[color].append(index)
        return groups

    def proper(self) -> bool:
        return all(self.colors[i] != self.colors[j] for i, j in self.adjacency)

    @property
    def max_degree(self) -> int:
        degree = np.zeros(len(self.colors), dtype=int)
        for i, j in self.adjacency:
            degree[i] += 1
            degree[j] += 1
        return int(degree.max(initial=0))


def greedy_coloring(size: int, pairs: Set[Tuple[int, int]]) -> Tuple[int, ...]:
    """Color vertices by decreasing degree, each with the smallest free color."""
    neighbours: Dict[int, Set[int]] = {i: set() for i in range(size)}
    for i, j in pairs:
        neighbours[i].add(j)
        neighbours[j].add(i)
    order = sorted(range(size), key=lambda i: (-len(neighbours[i]), i))
    colors = [-1] * size
    for i in order:
        taken = {colors[j] for j in neighbours[i] if colors[j] >= 0}
        colors[i] = next(c for c in range(size + 1) if c not in taken)
    return tuple(colors)


def color_and_pencil(spec: SectionSpec) -> Tuple[Coloring, PencilSpec]:
    """
    Color the Voronoi adjacency graph of the net and build the section pencil.

    Net point i of color j gets a_{∞,i} = a_i and a_{0,i} = −a_i·ζ_j with
    ζ_j = e^{2πij/N}, on the exponents of the global sum; lattice translates
    inherit the color of their source point.
    """
    pairs = voronoi_adjacency(spec.centers, spec.sources)
    colors = greedy_coloring(spec.net.size, pairs)
    coloring = Coloring(colors, tuple(sorted(pairs)))
    N = max(coloring.N, 1)

    term_colors = np.asarray(colors)[spec.sources]
    alphainf = np.asarray(spec.global_sum.alphas)
    alpha0 = alphainf + 1j * (np.pi + 2 * np.pi * term_colors / N)
    pencil = PencilSpec.build(spec.global_sum.exponents, alpha0, alphainf, section=True, N=N)
    logger.info(f"Colored {spec.net.size} net points with N = {N} colors (max degree {coloring.max_degree})")
    return coloring, pencil
