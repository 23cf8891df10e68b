"""
dualhaze - command-line entry point.

Equivalent to the installed `dualhaze` console script:
    python backend/main.py enhance --method dehret:msr in.png out.png
"""

import sys

from dualhaze.adapters.cli import main

if __name__ == "__main__":
    sys.exit(main())
