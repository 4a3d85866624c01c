#!/usr/bin/env python3
"""
Example Input Generator

Writes small JSON inputs for every command of the command line:
sums for certify/skeleton/roots, a pencil and a generic net.
"""

import sys
from pathlib import Path

import numpy as np

# Add repo root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.api.schemas import ExpSumModel, NetModel, PencilInput, emit, to_pair
from src.core.expsum import ExpSum
from src.section.net import generic_net


def main():
    target = Path(sys.argv[1] if len(sys.argv) > 1 else 'examples_out')
    target.mkdir(parents=True, exist_ok=True)
    print(f"=== Writing example inputs to {target} ===\n")

    documents = {
        # 1 + e^z: one vertical skeleton edge, zeros at iπ(2j+1)
        'two_terms.json': ExpSumModel.from_sum(ExpSum([0, 0], [0, 1])),
        # exponents 0, 1, i: strongly basic with delta_set 0.5
        'triangle.json': ExpSumModel.from_sum(ExpSum([0, 0, 0], [0, 1, 1j])),
        'quartic.json': ExpSumModel.from_sum(ExpSum([0, 0.3j, 0.5, 0.1], [0, 1, 1j, 1.5 + 0.7j])),
    }

    phases = 2 * np.pi * np.arange(3) / 3
    documents['pencil.json'] = PencilInput(
        exponents=[[to_pair(m)] for m in (0, 1, 2j)],
        alpha0=[to_pair(1j * p) for p in phases],
        alphainf=[to_pair(0)] * 3,
    )

    net = generic_net((0, 0, 1, 1), 0.3, periodic=True, seed=0)
    documents['net.json'] = NetModel.from_net(net)

    for name, document in documents.items():
        (target / name).write_text(emit(document) + '\n', encoding='utf-8')
        print(f"  {name}")

    print("\nDone.")


if __name__ == "__main__":
    main()
