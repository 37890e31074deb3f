"""Engine L1, L2 for K_q on Q_n beside the closed forms; settles the q=5 exponent."""

import argparse
from fractions import Fraction

from torushom.cluster_engine import L_k
from torushom.exp_poly import render
from torushom.formulas import qcolor_f, qcolor_L2
from torushom.graph_model import complete_graph, dominant_patterns


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qmax", type=int, default=8)
    args = ap.parse_args()
    for q in range(3, args.qmax + 1):
        G = complete_graph(q)
        P = dominant_patterns(G).patterns[0]
        L1 = L_k(G, P, 2, 1)
        print(f"q={q}")
        print(f"  L1 = {render(L1)}   [f(n) match: {L1 == qcolor_f(q)}]")
        if q >= 4:
            L2 = L_k(G, P, 2, 2)
            print(f"  L2 = {render(L2)}   [closed form match: {L2 == qcolor_L2(q)}]")
        if q == 5:
            c = L1.coeff(0, Fraction(4, 3))
            print(f"  coefficient of (4/3)^n is {c}: exponent is (4/3)^(n-1) + 1/3")


if __name__ == "__main__":
    main()
