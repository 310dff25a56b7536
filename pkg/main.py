#!/usr/bin/env python3
"""
STURMLAB - Main entry point
One-dimensional bound-state solver and Sturm oscillation laboratory
"""

import sys
import logging
import signal
from pathlib import Path

# Add the sturmlab package to Python path
sys.path.insert(0, str(Path(__file__).parent))

from sturmlab.cli.main import main as cli_main


def signal_handler(signum, frame):
    """Stop on SIGINT/SIGTERM without a traceback"""
    logging.getLogger("sturmlab").warning(f"Received signal {signum}, stopping")
    sys.exit(130 if signum == signal.SIGINT else 1)


def main():
    """Main application entry point"""
    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)

    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
