#!/usr/bin/env python3
"""
Convergence Study

Prints the pairing table of the current limit study: zero-set pairings
of sections against the β_Γ pairing (fixed ε) or against ∫ψ (shrinking ε).
"""

import argparse
import logging
import sys
from pathlib import Path

import yaml

# Add repo root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.box import Box
from src.currents.study import limit_study


def main():
    parser = argparse.ArgumentParser(description='Current limit study')
    parser.add_argument('--window', default='0,0,1,1')
    parser.add_argument('--k-list', dest='k_list', default=None, help='Comma separated tensor powers')
    parser.add_argument('--epsilon', type=float, default=None)
    parser.add_argument('--schedule', type=float, default=None, help='Use ε_k = k^(-schedule)')
    parser.add_argument('--open', dest='periodic', action='store_false', help='Planar domain instead of the torus')
    parser.add_argument('--seed', type=int, default=0)
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    # Load config
    config_path = Path(__file__).parent.parent / 'config' / 'settings.yaml'
    with open(config_path, 'r') as f:
        config = yaml.safe_load(f)
    current = config.get('current') or {}

    k_list = [float(v) for v in args.k_list.split(',')] if args.k_list else current.get('k_list', [100, 200, 400])
    schedule = args.schedule if args.schedule is not None else current.get('schedule')
    epsilon = args.epsilon if args.epsilon is not None else current.get('epsilon', 0.3)

    print("=== Exponential Skeletons - Convergence Study ===\n")
    print(f"Window: {args.window}")
    print(f"k: {k_list}")
    print(f"Mode: {'schedule eps_k = k^-' + str(schedule) if schedule is not None else f'fixed eps = {epsilon}'}\n")

    table = limit_study(
        Box.from_string(args.window),
        k_list,
        epsilon=None if schedule is not None else epsilon,
        schedule=schedule,
        periodic=args.periodic,
        seed=args.seed,
    )
    print(table.to_csv())

    for name in table.psi_names:
        ratios = table.consecutive_ratios(name, omega=schedule is not None)
        print(f"{name:>14}: consecutive gap ratios {', '.join(f'{r:.3f}' for r in ratios)}")


if __name__ == "__main__":
    main()
