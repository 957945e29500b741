"""Regenerate the bundled generating-data text files.

Direction numbers come from the Joe-Kuo new-joe-kuo-6.21201 table as shipped
inside scipy; the lattice vector is Kuo's lattice-33002-1024-1048576.9125
(extensible, CBC, order-2 weights), supplied as a .npy dump.
"""
import os
import sys

import numpy as np
import scipy

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "src", "qmckit", "data")


def write_joe_kuo(path):
    z = np.load(os.path.join(os.path.dirname(scipy.__file__), "stats", "_sobol_direction_numbers.npz"))
    poly, vinit = z["poly"], z["vinit"]
    with open(path, "w") as fh:
        fh.write("d       s       a       m_i\n")
        for k in range(1, len(poly)):
            p = int(poly[k])
            s = p.bit_length() - 1
            a = (p >> 1) & ((1 << (s - 1)) - 1)
            m = " ".join(str(int(v)) for v in vinit[k, :s])
            fh.write(f"{k + 1} {s} {a} {m}\n")


def write_lattice(npy_path, path):
    v = np.load(npy_path)
    with open(path, "w") as fh:
        fh.write("# m_max=20\n")
        fh.write("# Kuo, lattice-33002-1024-1048576.9125: extensible rank-1 lattice, CBC, order-2 weights\n")
        for h in v:
            fh.write(f"{int(h)}\n")


if __name__ == "__main__":
    write_joe_kuo(os.path.join(DATA, "new-joe-kuo-6.21201.txt"))
    if len(sys.argv) > 1:
        write_lattice(sys.argv[1], os.path.join(DATA, "lattice-33002-1024-1048576.9125.txt"))
