"""SAT-competition style front end over the builtin solver.

    python3 -m cardsat.solve formula.cnf

Prints ``s SATISFIABLE`` with a ``v`` line, or ``s UNSATISFIABLE``, and
exits 10 or 20.  Handy as a stand-in external solver command.
"""

import sys

from .formats import FormatError, read_dimacs
from .sat import BuiltinOracle


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python3 -m cardsat.solve FILE.cnf", file=sys.stderr)
        return 2
    try:
        with open(argv[0]) as fh:
            f = read_dimacs(fh)
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    res = BuiltinOracle().solve(f)
    if not res.satisfiable:
        print("s UNSATISFIABLE")
        return 20
    print("s SATISFIABLE")
    vals = [v if v in res.witness else -v for v in range(1, f.universe_size + 1)]
    print("v " + " ".join(map(str, vals + [0])))
    return 10


if __name__ == "__main__":
    sys.exit(main())
