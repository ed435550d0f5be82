"""Single binary exposing the lab as subcommands.

The CLI is a thin client: every computation goes through the service
layer (in-process by default, or a remote instance via --server), and
the CLI itself only parses flags/config, writes JSONL/CSV, and maps
errors to exit codes:

    0  success
    1  invalid usage or config
    2  resource refusal (enumeration caps exceeded)
    3  internal invariant violation
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Optional

from .config import ExperimentConfig, load_config, parse_probability, parse_real
from .errors import InputError, InvariantViolation, ResourceRefusal
from .records import (
    CSV_COLUMNS,
    RunManifest,
    TOOL_VERSION,
    config_hash,
    parse_fraction,
    read_jsonl,
    reproducibility_hash,
    tag_records,
    write_bounds_csv,
    write_jsonl,
)

_STATUS_EXIT = {400: 1, 422: 1, 409: 2, 500: 3}


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the lab reserves 2
    # for resource refusals, so route usage errors to InputError -> 1
    def error(self, message):
        raise InputError(message)


class ServiceClient:
    def __init__(self, server: Optional[str] = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                # some starlette/httpx pairings warn on import only
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service.app import create_app

            self._client = TestClient(create_app())

    def post(self, path: str, payload: dict):
        resp = self._client.post(path, json=payload)
        try:
            body = resp.json()
        except ValueError:
            body = {"detail": resp.text}
        return resp.status_code, body

    def close(self):
        self._client.close()


def _merged(args, config_keys: dict) -> dict:
    """Start from the --config file, override with non-None flags."""
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    merged = {}
    for flag, cfg_key in config_keys.items():
        val = getattr(args, flag, None)
        if val is None:
            val = getattr(cfg, cfg_key, None)
        merged[flag] = val
    if getattr(args, "out", None) is None and cfg.out is not None:
        args.out = cfg.out
    return merged


def _require(merged: dict, *keys):
    for key in keys:
        if merged.get(key) is None:
            raise InputError(f"missing required value {key!r} (flag or config)")


def _read_weights(spec: str) -> list[float]:
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            text = fh.read()
        return [float(tok) for tok in text.replace(",", " ").split()]
    return [float(tok) for tok in spec.replace(",", " ").split() if tok]


def _read_real_matrix(path: str) -> list[list[float]]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.replace(",", " ").split()])
    if not rows:
        raise InputError(f"no rows in matrix file {path}")
    if len({len(r) for r in rows}) != 1:
        raise InputError("matrix rows have unequal lengths")
    return rows


def _parse_int_list(spec) -> list[int]:
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, list):
        return [int(v) for v in spec]
    out = []
    for tok in str(spec).replace(",", " ").split():
        if "-" in tok and not tok.startswith("-"):
            lo, hi = tok.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(tok))
    return out


def _emit(args, subcommand: str, payload: dict, records: list[dict], seed=None) -> None:
    manifest = RunManifest(subcommand, config_hash({**payload, "subcommand": subcommand}), seed)
    manifest.stamp_start()
    manifest.stamp_finish()
    tagged = tag_records(records, manifest)
    if getattr(args, "out", None):
        write_jsonl(args.out, tagged)


def _call(client: ServiceClient, path: str, payload: dict) -> dict:
    status, body = client.post(path, payload)
    if status != 200:
        detail = body.get("detail", body)
        print(f"error: {detail}", file=sys.stderr)
        raise _HttpFailure(_STATUS_EXIT.get(status, 3))
    return body


class _HttpFailure(Exception):
    def __init__(self, code: int):
        self.code = code


def _fmt(v) -> str:
    v = parse_fraction(v)
    if isinstance(v, Fraction):
        return f"{v} (= {float(v):.6g})"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


# ---------------------------------------------------------------- handlers


def _cmd_rank(args, client):
    merged = _merged(args, {"matrix": "matrix", "mode": "mode", "prime": "prime"})
    _require(merged, "matrix")
    with open(merged["matrix"], "r", encoding="utf-8") as fh:
        text = fh.read()
    method = merged["mode"] or "rational"
    payload = {"matrix": text, "method": method, "prime": merged["prime"]}
    body = _call(client, "/rank", payload)
    _emit(args, "rank", payload, [body])
    print(f"rank = {body['rank']}  corank = {body['corank']}  method = {body['method']}")
    return 0


def _cmd_levy(args, client):
    merged = _merged(args, {"weights": "weights", "p": "p", "r": "r"})
    _require(merged, "weights", "p", "r")
    weights = merged["weights"] if isinstance(merged["weights"], list) else _read_weights(merged["weights"])
    payload = {
        "weights": weights,
        "p": str(parse_probability(merged["p"])),
        "r": parse_real(merged["r"]),
    }
    body = _call(client, "/levy", payload)
    _emit(args, "levy", payload, [body])
    print(f"levy = {_fmt(body['value'])}  r = {body['r']}  method = {body['method']}")
    return 0


def _cmd_threshold(args, client):
    merged = _merged(args, {"weights": "weights", "p": "p", "L": "L"})
    _require(merged, "weights", "p", "L")
    weights = merged["weights"] if isinstance(merged["weights"], list) else _read_weights(merged["weights"])
    payload = {
        "weights": weights,
        "p": str(parse_probability(merged["p"])),
        "L": parse_real(merged["L"]),
    }
    body = _call(client, "/threshold", payload)
    _emit(args, "threshold", payload, [body])
    print(f"threshold = {_fmt(body['value'])}  L = {body['L']}  method = {body['method']}")
    return 0


def _cmd_theta(args, client):
    merged = _merged(args, {"matrix": "matrix", "p": "p", "C": "C", "verify": "verify"})
    _require(merged, "matrix", "p")
    payload = {
        "rows": _read_real_matrix(merged["matrix"]),
        "p": str(parse_probability(merged["p"])),
        "C": merged["C"] if merged["C"] is not None else 10.0,
        "verify": bool(merged["verify"]),
    }
    body = _call(client, "/theta", payload)
    _emit(args, "theta", payload, [body])
    line = f"case = {body['case']}  theta = {_fmt(body['theta'])}  C = {body['C']}"
    if body.get("verification"):
        ver = body["verification"]
        line += f"  upper = {_fmt(ver['upper'])}  target = {_fmt(ver['target'])}  ok = {ver['ok']}"
    print(line)
    return 0


def _cmd_rinv(args, client):
    merged = _merged(args, {"matrix": "matrix", "mode": "mode"})
    _require(merged, "matrix")
    payload = {
        "rows": _read_real_matrix(merged["matrix"]),
        "mode": merged["mode"] or "exhaustive",
    }
    body = _call(client, "/rinv", payload)
    _emit(args, "rinv", payload, [body])
    print(
        f"subset = {body['subset']}  hs_inv_sq = {_fmt(body['hs_inv_sq'])}"
        f"  bound = {_fmt(body['bound'])}  mode = {body['mode']}"
    )
    return 0


def _cmd_classify(args, client):
    merged = _merged(args, {"vector": "vector", "delta": "delta", "rho": "rho"})
    _require(merged, "vector", "delta", "rho")
    vec = merged["vector"] if isinstance(merged["vector"], list) else _read_weights(merged["vector"])
    payload = {"vector": vec, "delta": float(merged["delta"]), "rho": float(merged["rho"])}
    body = _call(client, "/classify", payload)
    _emit(args, "classify", payload, [body])
    print(f"label = {body['label']}  distance = {_fmt(body['distance'])}")
    return 0


def _cmd_enumerate(args, client):
    merged = _merged(args, {"n": "n", "p": "p"})
    _require(merged, "n", "p")
    n = int(merged["n"]) if not isinstance(merged["n"], list) else int(merged["n"][0])
    payload = {"n": n, "p": str(parse_probability(merged["p"]))}
    body = _call(client, "/enumerate", payload)
    _emit(args, "enumerate", payload, [body])
    for k in sorted(body["prob_at_least"], key=int):
        print(f"P[corank >= {k}] = {_fmt(body['prob_at_least'][k])}")
    return 0


def _cmd_mc(args, client):
    merged = _merged(
        args, {"n": "n", "k": "k", "p": "p", "trials": "trials", "seed": "seed"}
    )
    _require(merged, "n", "k", "p", "trials", "seed")
    payload = {
        "n": int(merged["n"]) if not isinstance(merged["n"], list) else int(merged["n"][0]),
        "k": int(merged["k"]),
        "p": str(parse_probability(merged["p"])),
        "trials": int(merged["trials"]),
        "seed": int(merged["seed"]),
    }
    body = _call(client, "/mc", payload)
    _emit(args, "mc", payload, [body], seed=payload["seed"])
    line = (
        f"estimate = {body['estimate']:.6g}  hits = {body['hits']}/{body['trials']}"
        f"  ci95 = [{body['ci_low']:.6g}, {body['ci_high']:.6g}]"
    )
    if body.get("rule_of_three") is not None:
        line += f"  below MC resolution (rule of three: {body['rule_of_three']:.3g})"
    print(line)
    return 0


def _cmd_bounds(args, client):
    merged = _merged(args, {"n": "n", "k": "k", "p": "p", "epsilon": "epsilon"})
    _require(merged, "n", "k", "p")
    eps = merged["epsilon"] if merged["epsilon"] is not None else 0
    payload = {
        "n_values": _parse_int_list(merged["n"]),
        "k": int(merged["k"]),
        "p": str(parse_probability(merged["p"])),
        "epsilon": str(parse_probability(eps)) if eps != 0 else 0,
    }
    body = _call(client, "/bounds", payload)
    rows = [{"record": "bound-row", **row} for row in body["rows"]]
    _emit(args, "bounds", payload, rows)
    for row in rows:
        print(
            f"n = {row['n']}  theorem_rate = {_fmt(row['theorem_rate'])}"
            f"  zero_rows_lower = {_fmt(row['zero_rows_lower'])}"
            f"  conjecture_rhs = {_fmt(row['conjecture_rhs'])}"
            f"  structured_lower = {_fmt(row['structured_lower'])}"
        )
    return 0


def _cmd_fixedvec(args, client):
    merged = _merged(
        args,
        {
            "n": "n",
            "p": "p",
            "c": "c",
            "trials": "trials",
            "seed": "seed",
            "basis": "basis",
            "matrix": "matrix",
        },
    )
    _require(merged, "p", "c", "trials", "seed")
    if merged["matrix"] is not None:
        v_rows = _read_real_matrix(merged["matrix"])
    else:
        _require(merged, "n")
        n = int(merged["n"]) if not isinstance(merged["n"], list) else int(merged["n"][0])
        j = int(merged["basis"]) if merged["basis"] is not None else 0
        if not 0 <= j < n:
            raise InputError("basis index out of range")
        v_rows = [[1.0 if i == j else 0.0] for i in range(n)]
    payload = {
        "v_columns": v_rows,
        "p": str(parse_probability(merged["p"])),
        "c": float(merged["c"]),
        "trials": int(merged["trials"]),
        "seed": int(merged["seed"]),
    }
    body = _call(client, "/fixed-vector", payload)
    _emit(args, "fixedvec", payload, [body], seed=payload["seed"])
    line = (
        f"estimate = {body['estimate']:.6g}  hits = {body['hits']}/{body['trials']}"
        f"  ci95 = [{body['ci_low']:.6g}, {body['ci_high']:.6g}]"
    )
    if body.get("rule_of_three") is not None:
        line += f"  below MC resolution (rule of three: {body['rule_of_three']:.3g})"
    print(line)
    return 0


def _cmd_report(args, client):
    records = []
    for path in args.inputs:
        records.extend(read_jsonl(path))
    bound_rows = [r for r in records if r.get("record") == "bound-row"]
    dists = [r for r in records if r.get("record") == "corank-distribution"]
    estimates = [
        r for r in records if r.get("record") == "estimate" and r.get("event") == "corank_at_least"
    ]
    csv_rows = []
    for row in bound_rows:
        joined = dict(row)
        exact = next(
            (d for d in dists if d["n"] == row["n"] and d["p"] == row["p"]), None
        )
        est = next(
            (
                e
                for e in estimates
                if e["n"] == row["n"] and e["k"] == row["k"] and e["p"] == row["p"]
            ),
            None,
        )
        if exact is not None:
            joined["exact_or_estimate"] = exact["prob_at_least"].get(str(row["k"]))
        elif est is not None:
            joined["exact_or_estimate"] = est["estimate"]
            joined["ci_low"] = est["ci_low"]
            joined["ci_high"] = est["ci_high"]
        csv_rows.append(joined)
        value = joined.get("exact_or_estimate")
        line = (
            f"n = {row['n']}  k = {row['k']}  p = {row['p']}"
            f"  zero_rows_lower = {_fmt(row['zero_rows_lower'])}"
            f"  structured_lower = {_fmt(row['structured_lower'])}"
        )
        if value is not None:
            line += f"  P[corank >= k] = {_fmt(value)}"
            sl = parse_fraction(row["structured_lower"])
            if float(sl) > 0:
                line += f"  ratio = {float(parse_fraction(value)) / float(sl):.4g}"
        print(line)
    if args.csv:
        write_bounds_csv(args.csv, csv_rows)
        print(f"wrote {len(csv_rows)} rows to {args.csv} (columns: {', '.join(CSV_COLUMNS)})")
    if args.hash:
        for path in args.inputs:
            print(f"reproducibility-hash {path} {reproducibility_hash(path)}")
    return 0


def _cmd_serve(args, client):
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


# ------------------------------------------------------------------ parser


def _build_parser() -> _Parser:
    parser = _Parser(prog="coranklab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"coranklab {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add(name, handler, help_, seeded=False):
        sp = sub.add_parser(name, help=help_, parents=[], add_help=True)
        sp.set_defaults(handler=handler)
        sp.add_argument("--out", help="write JSONL records to this path")
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--server", help="remote service URL (default: in-process)")
        return sp

    sp = add("rank", _cmd_rank, "exact or modular rank of a 0/1 matrix file")
    sp.add_argument("--matrix", help="matrix text file (rows cols header, 0/1 lines)")
    sp.add_argument("--mode", choices=["rational", "modular"])
    sp.add_argument("--prime", type=int)

    sp = add("levy", _cmd_levy, "Levy concentration of a weighted Bernoulli sum")
    sp.add_argument("--weights", help="inline floats '1,2,3' or a file path")
    sp.add_argument("--p")
    sp.add_argument("--r")

    sp = add("threshold", _cmd_threshold, "threshold function of a weight vector")
    sp.add_argument("--weights")
    sp.add_argument("--p")
    sp.add_argument("--L")

    sp = add("theta", _cmd_theta, "small-ball radius certificate for orthonormal rows")
    sp.add_argument("--matrix", help="whitespace-separated real matrix file")
    sp.add_argument("--p")
    sp.add_argument("--C", type=float)
    sp.add_argument("--verify", action="store_const", const=True)

    sp = add("rinv", _cmd_rinv, "restricted-invertibility column selection")
    sp.add_argument("--matrix")
    sp.add_argument("--mode", choices=["exhaustive", "greedy"])

    sp = add("classify", _cmd_classify, "compressible/incompressible classification")
    sp.add_argument("--vector", help="inline floats or a file path")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--rho", type=float)

    sp = add("enumerate", _cmd_enumerate, "exact corank distribution (n <= 5)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p")

    sp = add("mc", _cmd_mc, "Monte Carlo estimate of P[corank >= k]")
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--p")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)

    sp = add("bounds", _cmd_bounds, "closed-form bound comparison table")
    sp.add_argument("--n", help="list or range of n, e.g. '2,3,4' or '2-5'")
    sp.add_argument("--k", type=int)
    sp.add_argument("--p")
    sp.add_argument("--epsilon")

    sp = add("fixedvec", _cmd_fixedvec, "Monte Carlo for the fixed-subspace HS event")
    sp.add_argument("--n", type=int)
    sp.add_argument("--basis", type=int, help="V = e_j (default j = 0)")
    sp.add_argument("--matrix", help="n x k orthonormal-column matrix file")
    sp.add_argument("--p")
    sp.add_argument("--c", type=float)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)

    sp = add("report", _cmd_report, "join JSONL results into the CSV comparison table")
    sp.add_argument("inputs", nargs="+", help="JSONL files to join")
    sp.add_argument("--csv", help="write the comparison table here")
    sp.add_argument("--hash", action="store_true", help="print reproducibility hashes")

    sp = add("serve", _cmd_serve, "run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return int(exc.code or 0)
        if getattr(args, "subcommand", None) is None:
            parser.print_usage(sys.stderr)
            print("error: a subcommand is required", file=sys.stderr)
            return 1
        client = None
        if args.subcommand not in ("report", "serve"):
            client = ServiceClient(getattr(args, "server", None))
        try:
            return args.handler(args, client)
        finally:
            if client is not None:
                client.close()
    except _HttpFailure as exc:
        return exc.code
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
