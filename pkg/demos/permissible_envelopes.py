"""Emit the permissible-change envelopes and the log-odds surface as CSV.

Writes three files next to this script (or to a directory given as the
first argument):

  envelope_q90.csv   deltas keeping a query at .90 inside [.85, .95]
  envelope_q60.csv   deltas keeping a query at .60 inside [.55, .65]
  log_odds_surface.csv   |log-odds difference| over (p, p') pairs

Feed them to any plotting tool; the q60 curves sit strictly inside the
q90 ones, which is the whole point: less extreme queries tolerate less.
"""

import sys
from pathlib import Path

from belief_tuner import envelope, log_odds_distance

GRID = [k / 100 for k in range(1, 100)]


def write_envelope(path: Path, q0: float, lo: float, hi: float) -> None:
    points = envelope(q0, lo, hi, GRID)
    with path.open("w") as fh:
        fh.write("p,delta_plus_outer,delta_plus_inner,"
                 "delta_minus_outer,delta_minus_inner\n")
        for pt in points:
            fh.write(f"{pt.p:.6f},{pt.delta_plus_outer:.6f},"
                     f"{pt.delta_plus_inner:.6f},{pt.delta_minus_outer:.6f},"
                     f"{pt.delta_minus_inner:.6f}\n")
    widest = max(points, key=lambda pt: pt.delta_plus_outer)
    print(f"{path.name}: query {q0} in [{lo}, {hi}];"
          f" largest permissible increase {widest.delta_plus_outer:.4f}"
          f" at p={widest.p:.2f}")


def write_surface(path: Path) -> None:
    with path.open("w") as fh:
        fh.write("p,p_new,log_odds_distance\n")
        for p in GRID:
            for p_new in GRID:
                fh.write(f"{p:.2f},{p_new:.2f},"
                         f"{log_odds_distance(p, p_new):.6f}\n")
    print(f"{path.name}: {len(GRID) ** 2} surface samples")


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    write_envelope(out_dir / "envelope_q90.csv", 0.90, 0.85, 0.95)
    write_envelope(out_dir / "envelope_q60.csv", 0.60, 0.55, 0.65)
    write_surface(out_dir / "log_odds_surface.csv")
    print("note how both envelopes pinch to zero at p near 0 and 1:")
    print("extreme parameters admit almost no safe absolute change.")


if __name__ == "__main__":
    main()
