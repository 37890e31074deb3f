"""|B_k(n)| by enumeration and by homomorphism count, beside the asymptotic form."""

import argparse
import math

from torushom.formulas import kbounded_asymptotic
from torushom.kbounded import count_via_hom, enumerate_bk


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=3)
    ap.add_argument("--kmax", type=int, default=4)
    args = ap.parse_args()
    print("k  n  |B_k(n)|   via hom   log count   asymptotic log")
    for k in range(1, args.kmax + 1):
        asy = kbounded_asymptotic(k)
        for n in range(1, args.nmax + 1):
            c = enumerate_bk(n, k)
            h = count_via_hom(n, k)
            print(f"{k}  {n}  {c:9}  {h:8}  {math.log(c):10.4f}  {float(asy.log_value(n)):10.4f}")


if __name__ == "__main__":
    main()
