#!/usr/bin/env python
"""
Circulant Spectra - CLI Entry Point

Run this script directly to use the command-line interface from a source
checkout without installing the package.

Usage:
    python scripts/circ_cli.py spectrum --n 5 --a 1,2 --symmetric-lengths 1,1.05 --kmax 200
    python scripts/circ_cli.py stats nnsd --n 49 --a 3,4,9 --random-lengths 1,1.5 --kmax 500
    python scripts/circ_cli.py det --n 5 --a 1,2 --symmetric-lengths 1,1 --verify
    python scripts/circ_cli.py random-graph --n 101 --p 0.2 --seed 3 --output spec.json
"""

import sys
from pathlib import Path

# Add src to path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from circulant_spectra.cli import main

if __name__ == "__main__":
    main()
