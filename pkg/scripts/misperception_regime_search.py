#!/usr/bin/env python3
"""
Script to locate the regimes of the misperception iteration

Runs both planner modes over a grid of open-loop persistences and loss
ratios R/Q and prints how often each verdict occurs.
"""
import os
import sys

import click

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from stabilab.schemas.model import Transmission
from stabilab.services.policy_games import misperception_regime_search


def _floats(text: str):
    return [float(v) for v in text.split(',')]


@click.command()
@click.option("--a-values", default="0.5,0.8,0.95,1.2", help="Open-loop persistences, comma separated")
@click.option("--b", default=-0.5, help="Instrument effect")
@click.option("--ratios", default="0.01,0.1,1,10,100", help="Loss ratios R/Q, comma separated")
@click.option("--n-iter", default=10, help="Iterations per run")
@click.option("--beta", default=1.0, help="Discount factor")
@click.option("--output", "-o", default=None, type=str, help="CSV file for the full grid (default: none)")
def main(a_values, b, ratios, n_iter, beta, output):
    transmissions = [Transmission(a=a, b=b) for a in _floats(a_values)]
    df = misperception_regime_search(transmissions, _floats(ratios), n_iter=n_iter, beta=beta)

    print(df.groupby(["mode", "verdict"]).size().to_string())
    if output:
        df.to_csv(output, index=False)
        print(f"\n✅ Wrote {len(df)} runs to {output}")


if __name__ == "__main__":
    main()
