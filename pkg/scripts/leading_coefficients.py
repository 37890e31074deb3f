"""Ratio of the closed-form leading coefficient c_k to the engine's, for K_q."""

import argparse

from torushom.cluster_engine import L_k
from torushom.formulas import qcolor_ck, qcolor_leading_base
from torushom.graph_model import complete_graph, dominant_patterns


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=3)
    ap.add_argument("--m", type=int, nargs="+", default=[2, 4])
    ap.add_argument("--q", type=int, nargs="+", default=[4, 5, 6, 7, 8])
    args = ap.parse_args()
    print("q  m  k  engine        c_k          ratio   (ceil(q/2)-1)^(2(k-1))")
    for q in args.q:
        G = complete_graph(q)
        P = dominant_patterns(G).patterns[0]
        a = (q + 1) // 2
        for m in args.m:
            for k in range(1, args.kmax + 1):
                got = L_k(G, P, m, k).coeff(2 * k - 2, qcolor_leading_base(q, m, k))
                want = qcolor_ck(q, m, k)
                print(f"{q}  {m}  {k}  {str(got):12}  {str(want):11}  {str(want / got):6}  {(a - 1) ** (2 * (k - 1))}")


if __name__ == "__main__":
    main()
