#!/usr/bin/env python3
"""Run the Monte-Carlo MSE-vs-SNR sweep with the shipped config.

Pass --parallel N to fan trials out over N processes.
"""

import os
import sys

from risloc.cli import main

HERE = os.path.dirname(os.path.abspath(__file__))

if __name__ == "__main__":
    argv = list(sys.argv[1:])
    if "--config" not in argv:
        argv = ["--config", os.path.join(HERE, "configs", "mse_sweep.yaml")] + argv
    raise SystemExit(main(["mse-sweep"] + argv))
