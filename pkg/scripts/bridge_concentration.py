"""Exact bridge means of the majority urn against the zero-cost path, for growing n."""

import argparse

import numpy as np

from urnldp import urn as U
from urnldp.contacts import find_contacts
from urnldp.exact import conditional_marginals
from urnldp.trajectories import zero_cost_interior


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--s", type=float, default=0.8)
    parser.add_argument("--sizes", default="100,200,400,800")
    args = parser.parse_args()

    u = U.majority(3)
    path = zero_cost_interior(u, find_contacts(u), args.s, nodes=4001)
    taus = np.linspace(0.1, 1.0, 91)
    target = np.interp(taus, path.grid, path.u)
    print("n,sup_gap")
    for n in (int(x) for x in args.sizes.split(",")):
        # the uniform start is absorbing for this urn, so start from two balls, one black
        means = conditional_marginals(u, n, int(args.s * n), taus, init=(2, 1))
        print(f"{n},{np.max(np.abs(means - target)):.3e}")


if __name__ == "__main__":
    main()
