#!/usr/bin/env python3
"""Run all Monte-Carlo consistency suites at full budgets and exit nonzero
if any fails. Equivalent to `uncoupled check` with default settings."""

import sys

from uncoupled.cli import main

if __name__ == "__main__":
    sys.exit(main(["check"]))
