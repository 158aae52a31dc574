#!/usr/bin/env python3
"""Tabulate membership of (1-z)^{-alpha} in the Bergman space A^p.

For every (alpha, p) on the grid this prints the rule-based classification
(p*alpha vs 2) next to the numerical growth diagnostic obtained from
truncated integrals over disks of radius 1 - 2^-k.  Exit status is 0 when
the diagnostic agrees with the classifier at every non-Boundary point,
1 otherwise.
"""
import argparse
import dataclasses
import json
import sys

from disknorms.bergman import membership_evidence


def _floats(text):
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _agrees(classification, diagnostic):
    if classification == "Member":
        return diagnostic == "Convergent"
    if classification == "NonMember":
        return diagnostic.startswith("Divergent")
    return True  # Boundary points carry no convergence claim


def main(argv=None):
    ap = argparse.ArgumentParser(
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--alphas", type=_floats, default=[0.5, 1.0, 2.0, 4.0],
                    help="comma-separated alpha values")
    ap.add_argument("--ps", type=_floats, default=[0.25, 0.5, 0.9, 1.5],
                    help="comma-separated p values")
    ap.add_argument("--json", action="store_true",
                    help="emit the full evidence records as JSON")
    args = ap.parse_args(argv)

    verdicts = [membership_evidence(alpha, p)
                for alpha in args.alphas for p in args.ps]

    if args.json:
        print(json.dumps([dataclasses.asdict(v) for v in verdicts],
                         indent=2))
    else:
        print(f"{'alpha':>7} {'p':>6} {'p*alpha':>8}  "
              f"{'classification':<14} {'diagnostic':<14} {'I(R_max)':>12}")
        for v in verdicts:
            last = v.evidence[-1][1]
            print(f"{v.alpha:7.3g} {v.p:6.3g} {v.product:8.4g}  "
                  f"{v.classification:<14} {v.diagnostic:<14} {last:12.6g}")

    disagreements = [v for v in verdicts
                     if not _agrees(v.classification, v.diagnostic)]
    print(f"# {len(verdicts)} points, "
          f"{len(disagreements)} classifier/evidence disagreements")
    return 1 if disagreements else 0


if __name__ == "__main__":
    sys.exit(main())
