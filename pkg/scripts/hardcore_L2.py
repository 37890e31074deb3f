"""Hard-core (x=1) L1, L2 on Z_m^n, cross-checked against brute cluster sums on real tori."""

import argparse

from torushom.cluster_engine import L_k
from torushom.exp_poly import render
from torushom.formulas import hardcore_L_forms
from torushom.graph_model import dominant_patterns, hardcore_graph
from torushom.torus_oracle import TorusSpec, brute_cluster_sum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mmax", type=int, default=16)
    ap.add_argument("--check-size", type=int, default=300,
                    help="largest torus used for the brute-force cross-check")
    args = ap.parse_args()
    G = hardcore_graph(1)
    P = dominant_patterns(G).patterns[0]
    for m in range(2, args.mmax + 1, 2):
        L1, L2 = L_k(G, P, m, 1), L_k(G, P, m, 2)
        print(f"m={m}: L1 = {render(L1)}")
        print(f"      L2 = {render(L2)}")
        if m > 2:
            print(f"      displayed L2 leading: {render(hardcore_L_forms(m)[1])}")
        for n in (1, 2, 3):
            if m ** n <= args.check_size:
                brute = brute_cluster_sum(TorusSpec(m, n), G, P, 2)
                print(f"      n={n}: engine {L2(n)}, brute {brute}, agree={L2(n) == brute}")


if __name__ == "__main__":
    main()
