"""Closed-form CGF of linear urns next to the ODE solution and the n = 4000 DP."""

import argparse

import numpy as np

from urnldp import urn as U
from urnldp.cgf import linear_cgf_closed_form, solve_cgf
from urnldp.exact import psi_n, terminal_distribution


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", default="0.3:0.2,0.3:-0.5,0.2:0.75", help="a:b pairs")
    parser.add_argument("--lambdas", default="-2,-1,-0.5,0.5,1,2")
    parser.add_argument("--n", type=int, default=4000)
    args = parser.parse_args()

    lam = np.array([float(x) for x in args.lambdas.split(",")])
    print("a,b,lambda,closed,ode,dp")
    for case in args.cases.split(","):
        a, b = (float(x) for x in case.split(":"))
        u = U.linear(a, b)
        eps = 1e-8 if b > 0.5 else 1e-4
        ode = {}
        for side in (1, -1):
            picked = lam[lam * side > 0]
            if picked.size:
                curve = solve_cgf(u, side=side, eps=eps, lambdas=picked)
                ode.update(zip(curve.lambdas, curve.psi))
        dp = psi_n(terminal_distribution(u, args.n), lam)
        for x, closed, finite in zip(lam, linear_cgf_closed_form(a, b, lam), dp):
            print(f"{a},{b},{x},{closed:.12f},{ode[x]:.12f},{finite:.12f}")


if __name__ == "__main__":
    main()
