#!/usr/bin/env python3
"""Run the locpoly-lab command line from a source checkout."""

from __future__ import annotations

import sys

from locpoly_lab.cli import main

if __name__ == "__main__":
    sys.exit(main())
