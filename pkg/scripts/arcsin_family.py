"""Arcsin urn: exit times over the interval (1/4, 1/2) and the family of paths reaching 1/2."""

import argparse
import math

import numpy as np

from urnldp import urn as U
from urnldp.contacts import find_contacts
from urnldp.trajectories import tau_star, theta_star, zero_cost_boundary


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--hits", default="0.2,0.6,1.0", help="hitting times of the boundary family")
    args = parser.parse_args()

    u = U.arcsin_urn()
    analysis = find_contacts(u)
    i = analysis.interval_index(0.375)
    print("s,tau_star,exact")
    for s in np.linspace(0.26, 0.49, 12):
        exact = math.exp(-2 * math.asin(math.sqrt(4 * s - 1)))
        print(f"{s:.4f},{tau_star(u, analysis, i, s):.12f},{exact:.12f}")
    print(f"# theta* = {theta_star(u, analysis, i):.12f} (e^-pi = {math.exp(-math.pi):.12f})")
    print("t,tau,u")
    for t in (float(x) for x in args.hits.split(",")):
        path = zero_cost_boundary(u, analysis, i, t, nodes=2001)
        for tau in np.linspace(0, 1, 11):
            print(f"{t},{tau:.2f},{np.interp(tau, path.grid, path.u):.10f}")


if __name__ == "__main__":
    main()
