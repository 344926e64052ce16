"""Command-line front end.

Exit codes: 0 success, 1 computation or acceptance failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ANALYSES, UNITS_CONVENTION, from_mapping
from .errors import ConfigError, DomainError, QdynError
from .models import MODEL_TYPES
from .runner import default_jobs, run, write_json
from .table1 import Table1Tolerances, table1_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _range(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(":")
        return float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdyn", description="Qubit open-system dynamics: speed, backflow, divisibility.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, with_model=True):
        p.add_argument("--config", type=Path, help="JSON run configuration")
        if with_model:
            p.add_argument("--model", help="model family (overrides the config)")
            p.add_argument(
                "--param",
                action="append",
                default=[],
                metavar="KEY=VALUE",
                help="model parameter override, repeatable; for 'sweep' a bare NAME selects the swept parameter",
            )
            p.add_argument("--theta", type=float, help="polar angle of the initial pure state")
            p.add_argument("--h", type=float, help="finite-difference step")
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int, help="parallel workers (default: $QDYN_JOBS or 1)")

    common(sub.add_parser("simulate", help="trajectory, speed and non-Markovianity for one model"))
    sw = sub.add_parser("sweep", help="scan one model parameter")
    common(sw)
    sw.add_argument("--range", type=_range, help="sweep range a:b:n")
    common(sub.add_parser("nonmarkov", help="BLP measure and CP-divisibility report"))
    t1 = sub.add_parser("table1", help="reproduce the six-row summary table")
    common(t1, with_model=False)
    t1.add_argument("--fd-rtol", type=float, default=Table1Tolerances.fd_rtol, help="relative tolerance of FD checks")
    return parser


def _number(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", f"--param {key}") from None


def _document(args) -> dict:
    doc: dict = {}
    if args.config is not None:
        try:
            doc = json.loads(args.config.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", str(args.config)) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc.msg} at line {exc.lineno}", str(args.config)) from exc
        if not isinstance(doc, dict):
            raise ConfigError("top level must be an object", "$")
    if args.model:
        doc["model"] = args.model
    sweep_param = None
    for item in args.param:
        if "=" in item:
            key, value = item.split("=", 1)
            doc[key.strip()] = _number(value, key)
        elif args.verb == "sweep":
            sweep_param = item
        else:
            raise ConfigError(f"expected KEY=VALUE, got {item!r}", "--param")
    if args.theta is not None:
        doc["theta"] = args.theta
    if args.h is not None:
        doc.setdefault("tolerances", {})["h"] = args.h
    if args.out:
        doc["out"] = args.out
    if args.verb == "sweep":
        sw = dict(doc.get("sweep") or {})
        if sweep_param:
            sw["parameter"] = sweep_param
        if getattr(args, "range", None):
            sw["start"], sw["stop"], sw["points"] = args.range
        if "parameter" not in sw and doc.get("model") in _drivers():
            sw["parameter"] = _drivers()[doc["model"]]
        doc["sweep"] = sw
        doc.setdefault("analysis", [])
    elif args.verb == "nonmarkov":
        doc.pop("sweep", None)
        doc["analysis"] = ["blp", "divisibility"]
    else:
        doc.pop("sweep", None)
        doc.setdefault("analysis", list(ANALYSES))
    return doc


def _drivers() -> dict:
    return {k: cls.driving for k, cls in MODEL_TYPES.items()}


def _jobs(args) -> int:
    if args.jobs is not None:
        if args.jobs < 1:
            raise ConfigError("must be >= 1", "--jobs")
        return args.jobs
    try:
        return default_jobs()
    except DomainError as exc:
        raise ConfigError(str(exc), "QDYN_JOBS") from exc


def _run_verb(args) -> int:
    cfg = from_mapping(_document(args))
    jobs = _jobs(args)
    print(f"# units: {UNITS_CONVENTION}")
    paths = run(cfg, jobs=jobs)
    for p in paths:
        print(f"wrote {p}")
    if args.verb == "nonmarkov":
        rep = json.loads((Path(cfg.out) / "report.json").read_text(encoding="utf-8"))["nonmarkov"]
        div = rep["divisibility"]
        print(f"blp_measure = {rep['blp_measure']:.6g}")
        print(f"cp-divisible = {div['divisible']}" + (f" (witness {div['witness']})" if div["witness"] else ""))
    return EXIT_OK


def _table1(args) -> int:
    if args.fd_rtol <= 0:
        raise ConfigError("must be > 0", "--fd-rtol")
    report = table1_report(Table1Tolerances(fd_rtol=args.fd_rtol))
    text = report.to_text()
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "table1.json", report.to_dict())
        with open(out / "table1.txt", "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "table1":
            return _table1(args)
        return _run_verb(args)
    except ConfigError as exc:
        print(f"qdyn: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QdynError, ArithmeticError) as exc:
        print(f"qdyn: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"qdyn: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
