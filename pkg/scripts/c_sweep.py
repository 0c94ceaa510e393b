"""Count interior equilibria and check iterate uniqueness across a range of c.

Usage: python scripts/c_sweep.py [--config configs/holling2.ini] [--out sweep.csv]
"""

import argparse
import os

import numpy as np

from predprey_lab.config import load_config, model_from_config
from predprey_lab.harness import parameter_sweep, write_sweep_csv

HERE = os.path.dirname(os.path.abspath(__file__))


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--config", default=os.path.join(HERE, "..", "configs", "holling2.ini"))
    p.add_argument("--out", default="c_sweep.csv")
    p.add_argument("--n", type=int, default=25)
    args = p.parse_args()
    model = model_from_config(load_config(args.config))
    rows = parameter_sweep(model, "c", np.logspace(-2, 2, args.n), "equilibria")
    write_sweep_csv(args.out, rows)
    for r in rows:
        print(", ".join(f"{k}={v}" for k, v in r.items()))


if __name__ == "__main__":
    main()
