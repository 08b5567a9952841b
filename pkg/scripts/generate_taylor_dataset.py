#!/usr/bin/env python3
"""
Script to (re)generate the bundled Taylor-rule dataset

Default output reproduces data/taylor_synthetic.csv: rule deviations are
orthogonal to the regressors, so a Taylor fit returns (1.5, 0.5, 1) exactly.
``--noisy`` draws a seeded sample from a Taylor or inertial rule instead.
"""
import os
import sys

import click

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from stabilab.schemas.estimation import RuleSpec
from stabilab.services.estimation import orthogonal_taylor_dataset, synthetic_policy_data

DEFAULT_OUTPUT = os.path.join(os.path.dirname(__file__), '..', 'data', 'taylor_synthetic.csv')


@click.command()
@click.option("--output", "-o", default=DEFAULT_OUTPUT, help="Output file, '-' for stdout")
@click.option("--noisy", is_flag=True, help="Draw a noisy sample instead of the orthogonal design")
@click.option("--spec", type=click.Choice([s.value for s in RuleSpec]), default=RuleSpec.TAYLOR.value,
              help="Rule generating the noisy sample")
@click.option("--count", "-c", default=200, help="Quarters in the noisy sample")
@click.option("--seed", "-s", default=0, help="Generator seed for the noisy sample")
@click.option("--noise", default=0.25, help="Rule noise standard deviation")
def main(output, noisy, spec, count, seed, noise):
    if noisy:
        df = synthetic_policy_data(RuleSpec(spec), count, seed=seed, noise_std=noise)
    else:
        df = orthogonal_taylor_dataset()

    if output == '-':
        print(df.to_csv(index=False, lineterminator="\n"), end='')
    else:
        df.to_csv(output, index=False, lineterminator="\n")
        print(f"✅ Wrote {len(df)} quarters to {output}")


if __name__ == "__main__":
    main()
