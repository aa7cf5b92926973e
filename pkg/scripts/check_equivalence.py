#!/usr/bin/env python3
"""Sweep seeded architectures and report cross-implementation deviations.

Thin wrapper over `streamconv verify --random-grid`; exits nonzero if any
teacher-forced or free-run comparison deviates beyond --tol (default exact).
"""

import sys

from streamconv.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", "--random-grid", *sys.argv[1:]]))
