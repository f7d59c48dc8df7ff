"""Command-line front end: a thin client over the service handlers.

Requests are executed in process by default; pass --server to send them to
a running service instead.  Every command is deterministic given its inputs
and --seed, and reports embed the seed, the tolerances, and the tool
version.

Exit codes
    replicate: 0 replicable target, 2 non-measurable target, 1 bad input
    price:     0 unique price, 3 non-unique, 4 free lunch, 1 bad input
    verify:    0 all properties hold, 5 a property failed, 1 bad input
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from ._version import __version__
from .errors import OptionSpanError

_ENDPOINTS = {}


def _endpoints():
    # Imported lazily so --help stays fast.
    global _ENDPOINTS
    if not _ENDPOINTS:
        from .service import (
            NormRequest,
            PriceRequest,
            ReplicateRequest,
            VerifyRequest,
            run_norms,
            run_price,
            run_replicate,
            run_verify,
        )

        _ENDPOINTS = {
            "/replicate": (ReplicateRequest, run_replicate),
            "/price": (PriceRequest, run_price),
            "/verify": (VerifyRequest, run_verify),
            "/norms": (NormRequest, run_norms),
        }
    return _ENDPOINTS


class CliError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from exc


def _post(args, path: str, payload: dict) -> dict:
    if getattr(args, "server", None):
        import httpx

        url = args.server.rstrip("/") + path
        resp = httpx.post(url, json=payload, timeout=120.0)
        if resp.status_code >= 400:
            raise CliError(f"{url} returned {resp.status_code}: {resp.text}")
        return resp.json()
    request_model, runner = _endpoints()[path]
    request = request_model.model_validate(payload)
    return runner(request).model_dump()


def _write_json(directory: Path, name: str, data: dict) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _target_payload(raw: str):
    # Resolve @file references on the client side so remote servers never
    # need access to the local filesystem.
    if raw.startswith("@"):
        data = _load_json(raw[1:])
        if isinstance(data, dict):
            data = data["payoffs"]
        return [float(v) for v in data]
    return raw


def cmd_replicate(args) -> int:
    market = _load_json(args.market)
    payload = {
        "market": market,
        "target": _target_payload(args.target),
        "n_max": args.n_max,
        "norms": [s for s in args.norms.split(",") if s],
        "bank": args.bank,
        "seed": args.seed,
    }
    resp = _post(args, "/replicate", payload)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        report_path = out_dir / "replicate_report.csv"
        report_path.write_text(resp["report_csv"])
    else:
        report_path = _write_json(
            out_dir, "replicate_report.json", {"rows": resp["rows"], "converged": resp["converged"]}
        )
    result = {k: v for k, v in resp.items() if k not in ("report_csv", "rows")}
    result_path = _write_json(out_dir, "replicate_result.json", result)
    flag = "replicable" if resp["measurable"] else "non-measurable (projection reported)"
    print(f"target {args.target}: {flag}")
    print(f"wrote {report_path} and {result_path}")
    return 0 if resp["measurable"] else 2


def cmd_price(args) -> int:
    market = _load_json(args.market)
    pricing = _load_json(args.pricing)
    payload = {
        "market": market,
        "pricing": pricing,
        "claim": _target_payload(args.target),
    }
    if args.delta is not None:
        payload["delta"] = args.delta
    resp = _post(args, "/price", payload)
    print(json.dumps(resp, indent=2, sort_keys=True))
    if args.out_dir is not None:
        out_dir = Path(args.out_dir)
        _write_json(out_dir, "price_result.json", resp)
        if args.format == "csv":
            cols = ("status", "p_min", "p_max", "unique", "scale", "lp_status")
            lines = [
                ",".join(cols),
                ",".join(repr(resp.get(c)) for c in cols),
            ]
            (out_dir / "price_result.csv").write_text("\n".join(lines) + "\n")
    return {"unique": 0, "non_unique": 3, "free_lunch": 4}[resp["status"]]


def cmd_verify(args) -> int:
    market = _load_json(args.market)
    payload = {
        "market": market,
        "lemma": args.lemma,
        "seed": args.seed,
        "trials": args.trials,
        "mutate": args.mutate,
    }
    if args.strikes is not None:
        payload["strikes"] = [float(tok) for tok in args.strikes.split(",") if tok]
    resp = _post(args, "/verify", payload)
    print(json.dumps({k: resp[k] for k in ("lemma", "trials", "passed", "seed")}, indent=2))
    if resp.get("counterexample"):
        print(json.dumps({"counterexample": resp["counterexample"]}, indent=2))
    if args.out_dir is not None:
        out_dir = Path(args.out_dir)
        _write_json(out_dir, "verify_report.json", resp)
        if args.format == "csv":
            cols = ("lemma", "trials", "passed", "seed")
            lines = [
                ",".join(cols),
                ",".join(repr(resp.get(c)) for c in cols),
            ]
            (out_dir / "verify_report.csv").write_text("\n".join(lines) + "\n")
    return 0 if resp["passed"] else 5


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("optionspan.service:app", host=args.host, port=args.port)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optionspan",
        description="Option spanning experiments on finite markets",
    )
    parser.add_argument("--version", action="version", version=f"optionspan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("replicate", help="replicate a claim with call ladders")
    rep.add_argument("--market", required=True, help="market JSON file")
    rep.add_argument("--target", required=True, help="claim spec (square, identity, one, abs-dev:c, indicator:r, vector, @file)")
    rep.add_argument("--n-max", type=int, default=32, dest="n_max")
    rep.add_argument("--norms", default="Linf,L1,L2")
    rep.add_argument("--bank", default="default")
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--out-dir", default=".", dest="out_dir")
    rep.add_argument("--format", choices=("csv", "json"), default="csv")
    rep.add_argument("--server", default=None, help="base URL of a running service")
    rep.set_defaults(func=cmd_replicate)

    pri = sub.add_parser("price", help="arbitrage price bounds for a claim")
    pri.add_argument("--market", required=True)
    pri.add_argument("--pricing", required=True, help="pricing JSON file")
    pri.add_argument("--target", required=True, help="claim spec")
    pri.add_argument("--delta", type=float, default=None)
    pri.add_argument("--out-dir", default=None, dest="out_dir")
    pri.add_argument("--format", choices=("csv", "json"), default="json")
    pri.add_argument("--server", default=None)
    pri.set_defaults(func=cmd_price)

    ver = sub.add_parser("verify", help="run a lemma harness")
    ver.add_argument("--market", required=True)
    ver.add_argument(
        "--lemma",
        required=True,
        help="one of: o-closed, green-jarrow, z-identity, mode-agreement",
    )
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--trials", type=int, default=100)
    ver.add_argument(
        "--strikes",
        default=None,
        help="comma-separated strikes for z-identity; use --strikes=-1,0,1 for negative values",
    )
    ver.add_argument("--mutate", action="store_true", help="fault-injection self-test")
    ver.add_argument("--out-dir", default=None, dest="out_dir")
    ver.add_argument("--format", choices=("csv", "json"), default="json")
    ver.add_argument("--server", default=None)
    ver.set_defaults(func=cmd_verify)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        # pydantic messages name the offending field
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 1
    except (CliError, OptionSpanError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
