#!/usr/bin/env python3
"""Tabulate suppression beampatterns for several AP placements."""

import os
import sys

from risloc.cli import main

HERE = os.path.dirname(os.path.abspath(__file__))

if __name__ == "__main__":
    argv = list(sys.argv[1:])
    if "--config" not in argv:
        argv = ["--config", os.path.join(HERE, "configs", "beampattern.yaml")] + argv
    raise SystemExit(main(["beampattern"] + argv))
