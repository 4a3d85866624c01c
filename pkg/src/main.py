#!/usr/bin/env python3
"""
Exponential Skeletons - Command Line Entry Point

Certifies genericity of exponential sums, builds their planar skeletons,
locates zeros, checks pencils and peak sections over nets, and studies the
current limit of section zero sets. JSON goes to stdout (or --output),
logs to stderr.

Usage:
    python -m src.main certify --input sum.json
    python -m src.main skeleton --input sum.json --window -2,-2,2,2 --svg out.svg
    python -m src.main roots --input sum.json --window -1,-7,1,7
    python -m src.main net --window 0,0,1,1 --epsilon 0.3 --periodic
    python -m src.main section --input net.json --k 100 --svg section.svg
    python -m src.main current --window 0,0,1,1 --k-list 100,200,400 --format csv
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import yaml

from .api.schemas import COMMANDS, RunConfig, emit
from .core.errors import VerificationError
from .core.orchestrator import CommandResult, Orchestrator

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / 'config' / 'settings.yaml'

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFICATION = 2


class _Parser(argparse.ArgumentParser):
    """Argument errors are input errors (exit 1), not argparse's exit 2."""

    def error(self, message):
        raise ValueError(f"{self.prog}: {message}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid list of numbers: {text}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='expskel', description='Skeletons and zero sets of exponential sums')
    parser.add_argument('--config', default=None, help='Path to settings.yaml')
    parser.add_argument('--verbose', action='store_true', help='DEBUG logging')
    commands = parser.add_subparsers(dest='command', parser_class=_Parser)

    def common(sub, window: bool = True, input_: bool = True):
        if input_:
            sub.add_argument('--input', help='Input JSON file')
        if window:
            sub.add_argument('--window', help='Planar window x0,y0,x1,y1')
        sub.add_argument('--output', help='Write JSON here instead of stdout')
        sub.add_argument('--seed', type=int, default=0)
        sub.add_argument('--grid-density', dest='grid_density', type=int)

    certify = commands.add_parser('certify', help='Genericity report of the exponent set')
    common(certify)

    skeleton = commands.add_parser('skeleton', help='Planar skeleton Γ')
    common(skeleton)
    skeleton.add_argument('--svg', help='Write an SVG drawing here')

    roots = commands.add_parser('roots', help='Zeros or critical points')
    common(roots)
    roots.add_argument('--mode', default='zeros', choices=['zeros', 'critical', 'critical_zeros'])
    roots.add_argument('--c', type=float, help='Also check zero containment in U_c(Γ)')
    roots.add_argument('--svg')

    pencil = commands.add_parser('pencil', help='Pencil singular set and verification')
    common(pencil)
    pencil.add_argument('--c', type=float, help='Fiber containment width')

    net = commands.add_parser('net', help='Generic ε-net')
    common(net, input_=False)
    net.add_argument('--epsilon', type=float)
    net.add_argument('--periodic', action='store_true')
    net.add_argument('--k', type=float, help='Power used for the SVG skeleton')
    net.add_argument('--svg')

    section = commands.add_parser('section', help='Peak section of a net')
    common(section)
    section.add_argument('--k', type=float)
    section.add_argument('--C3', type=float)
    section.add_argument('--R1', type=float)
    section.add_argument('--apply-shift', dest='apply_shift', action='store_true', help='Shift local models to strictly basic form')
    section.add_argument('--svg')

    current = commands.add_parser('current', help='Current limit study')
    common(current, input_=False)
    current.add_argument('--k-list', dest='k_list', type=_float_list)
    current.add_argument('--epsilon', type=float)
    current.add_argument('--schedule', type=float, help='Use ε_k = k^(-schedule)')
    current.add_argument('--periodic', action='store_true')
    current.add_argument('--format', default='json', choices=['json', 'csv'])
    return parser


class ExpSkelApp:
    """Main application class."""

    def __init__(self, config_path: Optional[str] = None, verbose: bool = False):
        """
        Initialize the application.

        Args:
            config_path: Path to configuration YAML file (default: config/settings.yaml)
            verbose: Force DEBUG logging
        """
        self.config = self._load_config(config_path or DEFAULT_CONFIG)
        self._setup_logging(verbose)
        self.orchestrator = Orchestrator(self.config)

    def _load_config(self, config_path) -> dict:
        """Load configuration from YAML file."""
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")

        with open(path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f) or {}

        logger.info(f"Configuration loaded from {config_path}")
        return config

    def _setup_logging(self, verbose: bool):
        log_config = self.config.get('logging') or {}
        level = logging.DEBUG if verbose else getattr(logging, str(log_config.get('level', 'INFO')).upper(), logging.INFO)
        handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
        if log_config.get('file'):
            handlers.append(logging.FileHandler(log_config['file']))
        logging.basicConfig(
            level=level,
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            handlers=handlers,
        )

    def execute(self, run: RunConfig) -> int:
        """Run one command and write its outputs; returns the exit code."""
        try:
            result = self.orchestrator.run(run)
        except VerificationError as e:
            logger.error(f"Verification failed: {e}")
            if e.report is not None:
                self._write(run, CommandResult(e.report))
            return EXIT_VERIFICATION
        self._write(run, result)
        return EXIT_OK

    def _write(self, run: RunConfig, result: CommandResult):
        text = result.csv if result.csv is not None else emit(result.document) + '\n'
        if run.output:
            Path(run.output).write_text(text, encoding='utf-8')
            logger.info(f"Output written to {run.output}")
        else:
            sys.stdout.write(text)
        if result.svg is not None and run.svg:
            Path(run.svg).write_text(result.svg, encoding='utf-8')
            logger.info(f"SVG written to {run.svg}")


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and run one command.

    Returns:
        0 on success, 1 on input errors, 2 on failed verification
    """
    try:
        args = build_parser().parse_args(argv)
        if args.command not in COMMANDS:
            raise ValueError(f"Choose a command: {', '.join(COMMANDS)}")
        options = {k: v for k, v in vars(args).items() if k not in ('config', 'verbose') and v is not None}
        config = RunConfig(**options)
        app = ExpSkelApp(args.config, args.verbose)
        return app.execute(config)
    except Exception as e:
        logger.error(f"Error running command: {e}")
        if not logging.getLogger().handlers:
            sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


def main():
    """Main entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
