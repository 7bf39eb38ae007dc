"""Regenerate the bundled zeta-zero ordinate tables.

The tables under ``src/tropos/data`` were produced with this script, which
calls :func:`mpmath.zetazero` at 30 significant digits and writes one ordinate
per line (ascending, 25 significant digits), Odlyzko-style.

    python3 tools/make_zero_table.py 1000 src/tropos/data/zeros_1000.txt
    python3 tools/make_zero_table.py 100 src/tropos/data/sample100.txt
"""
import sys

import mpmath


def main(count, path):
    mpmath.mp.dps = 30
    with open(path, "w") as fh:
        for n in range(1, count + 1):
            fh.write(mpmath.nstr(mpmath.zetazero(n).imag, 25, strip_zeros=False) + "\n")
            fh.flush()


if __name__ == "__main__":
    main(int(sys.argv[1]), sys.argv[2])
