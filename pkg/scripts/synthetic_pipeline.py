"""End-to-end run on synthetic tick files: generate, fit at two bin widths, simulate.

    python3 scripts/synthetic_pipeline.py --days 1800 --workdir runs/synth
"""
import argparse
import json
from pathlib import Path

from tclevy.cli import main as cli
from tclevy.copula import ClaytonCopula
from tclevy.series import BivModelParams
from tclevy.subordinator import ExpCppParams
from tclevy.synthetic import SessionLayout, write_synthetic_pair


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--days", type=int, default=1800)
    ap.add_argument("--workdir", default="runs/synthetic")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--lam", type=float, nargs=2, default=(0.06, 0.04), help="jumps per 30-min bin")
    ap.add_argument("--theta", type=float, nargs=2, default=(0.05, 0.08))
    ap.add_argument("--delta", type=float, default=2.2)
    ap.add_argument("--replications", type=int, default=4)
    args = ap.parse_args(argv)

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)
    truth = BivModelParams(ExpCppParams(args.lam[0], args.theta[0]),
                           ExpCppParams(args.lam[1], args.theta[1]),
                           ClaytonCopula(args.delta), 1e-4, 5e-5, 2e-3, 3e-3)
    a, b = work / "asset1.csv", work / "asset2.csv"
    write_synthetic_pair(a, b, truth, SessionLayout(args.days), args.seed)

    fitted = {}
    for minutes in (30, 10):
        out = work / f"params_{minutes}min.json"
        rc = cli(["fit", "--input1", str(a), "--input2", str(b), "--bin-minutes", str(minutes),
                  "--threshold", "0.5", "--output", str(out)])
        if rc:
            raise SystemExit(rc)
        fitted[minutes] = json.loads(out.read_text())

    print(f"\n{'':>8} {'truth':>10} {'30 min':>10} {'10 min':>10} {'ratio':>7}")
    rows = [("lambda1", args.lam[0]), ("lambda2", args.lam[1]), ("theta1", args.theta[0]),
            ("theta2", args.theta[1]), ("delta", args.delta)]
    for key, value in rows:
        f30, f10 = fitted[30][key], fitted[10][key]
        print(f"{key:>8} {value:10.4g} {f30:10.4g} {f10:10.4g} {f30 / f10:7.2f}")

    rc = cli(["pipeline", "--params", str(work / "params_30min.json"), "--seed", str(args.seed),
              "--replications", str(args.replications), "--output-dir", str(work / "sim")])
    raise SystemExit(rc)


if __name__ == "__main__":
    main()
