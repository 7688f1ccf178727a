"""Growth steps per second of the compiled runner (target: >= 1e6 for d <= 4)."""

import argparse
import time

from choicetree.tree_model import ModelConfig, run_growth


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=10**7)
    args = parser.parse_args()
    run_growth(ModelConfig(), 1000)  # compile / load cache
    for d in (1, 2, 3, 4):
        for attachment in ("preferential", "uniform"):
            t0 = time.perf_counter()
            run_growth(ModelConfig(d=d, attachment=attachment, seed=1), args.steps)
            rate = args.steps / (time.perf_counter() - t0)
            print(f"d={d} {attachment:>12}: {rate / 1e6:.2f}M steps/s")


if __name__ == "__main__":
    main()
