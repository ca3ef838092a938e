"""Run one or more numeric suites and print their summaries.

    python scripts/run_suite.py restoring maximal
    python scripts/run_suite.py --all
"""
import argparse
import sys

from carleson.suites import SUITES, run_suite


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", help=f"suite names: {', '.join(SUITES)}")
    ap.add_argument("--all", action="store_true")
    a = ap.parse_args(argv)
    names = list(SUITES) if a.all else a.names
    if not names:
        ap.error("give suite names or --all")
    ok = True
    for name in names:
        res = run_suite(name)
        print(res.summary())
        ok &= res.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
