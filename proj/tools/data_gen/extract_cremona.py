#!/usr/bin/env python3
"""Convert PARI's elldata tables (Cremona's curves) into Cremona allcurves lines.

Only conductors <= MAX_CONDUCTOR whose prime factors lie in PRIMES are kept;
that is the coverage the index pipeline needs (conductors dividing
N_max = prod p^{e_p} for every level N it meets). Ranks are the number of
Mordell-Weil generators stored in elldata; torsion orders come from PARI.

usage: extract_cremona.py ELLDATA_DIR OUT_DIR
"""
import hashlib
import os
import re
import sys

from cypari import pari

MAX_CONDUCTOR = 62208
PRIMES = [2, 3, 5, 7, 11, 13, 17, 19]


def smooth(n):
    for p in PRIMES:
        while n % p == 0:
            n //= p
    return n == 1


def main():
    src, out_dir = sys.argv[1], sys.argv[2]
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for k in range(MAX_CONDUCTOR // 1000 + 1):
        table = pari(open(os.path.join(src, "ell%d" % k)).read())
        for entry in table:
            conductor = int(entry[0])
            if conductor > MAX_CONDUCTOR or not smooth(conductor):
                continue
            for curve in list(entry)[1:]:
                label = str(curve[0])
                m = re.fullmatch(r"(\d+)([a-z]+)(\d+)", label)
                ainvs = [int(a) for a in curve[1]]
                rank = len(curve[2])
                torsion = int(pari.elltors(pari.ellinit(ainvs))[0])
                rows.append((conductor, m.group(2), int(m.group(3)), ainvs, rank, torsion))
    rows.sort(key=lambda r: (r[0], len(r[1]), r[1], r[2]))
    path = os.path.join(out_dir, "allcurves.txt")
    with open(path, "w") as f:
        for c, cls, num, a, rank, tors in rows:
            f.write("%d %s %d [%s] %d %d\n" % (c, cls, num, ",".join(map(str, a)), rank, tors))
    digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
    with open(os.path.join(out_dir, "manifest.txt"), "w") as f:
        f.write("max_conductor %d\n" % MAX_CONDUCTOR)
        f.write("primes %s\n" % " ".join(map(str, PRIMES)))
        f.write("sha256 allcurves.txt %s\n" % digest)
    print(len(rows), "curves")


if __name__ == "__main__":
    main()
