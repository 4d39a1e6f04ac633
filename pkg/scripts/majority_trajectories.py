"""Zero-cost paths of the 3-ball majority urn for a few terminal fractions.

Prints tau and the running fraction u(tau) for each target as CSV, together
with the rate functional of each path (should be ~0).
"""

import argparse

import numpy as np

from urnldp import urn as U
from urnldp.contacts import find_contacts
from urnldp.rate import rate_I
from urnldp.trajectories import zero_cost_interior


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--targets", default="0.1,0.2,0.8,0.9")
    parser.add_argument("--nodes", type=int, default=2001)
    parser.add_argument("--samples", type=int, default=21, help="rows printed per path")
    args = parser.parse_args()

    u = U.majority(3)
    analysis = find_contacts(u)
    print("s,tau,u")
    for s in (float(x) for x in args.targets.split(",")):
        path = zero_cost_interior(u, analysis, s, nodes=args.nodes)
        for tau in np.linspace(0, 1, args.samples):
            print(f"{s},{tau:.4f},{np.interp(tau, path.grid, path.u):.10f}")
        print(f"# s={s}: I = {rate_I(u, path.curve):.2e}")


if __name__ == "__main__":
    main()
