"""Command-line front end.

Every subcommand is a thin client of the HTTP service: by default requests
run against an in-process instance of the app (no sockets, nothing to start),
and ``--server URL`` points the same requests at a remote instance instead.
``serve`` runs the service under uvicorn.

Exit codes: 0 success, 1 validation failure, 2 malformed input,
3 transport or server failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import httpx
import numpy as np

from . import __version__
from .stateio import parse_state

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MALFORMED = 2
EXIT_TRANSPORT = 3


class _InProcessTransport(httpx.BaseTransport):
    """Sync bridge to the ASGI app: each request runs on a private loop."""

    def __init__(self, app):
        self._asgi = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        import asyncio

        async def run():
            response = await self._asgi.handle_async_request(request)
            await response.aread()
            return response

        response = asyncio.run(run())
        return httpx.Response(status_code=response.status_code,
                              headers=response.headers,
                              content=response.content,
                              request=request)


def _client(args) -> httpx.Client:
    server = getattr(args, "server", None)
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=300.0)
    from .service import create_app
    return httpx.Client(transport=_InProcessTransport(create_app()),
                        base_url="http://hs2.local", timeout=300.0)


def _read_state(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        _fail(EXIT_MALFORMED, f"cannot read {path}: {exc.strerror or exc}")


def _write_output(text: str, path: str | None):
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _fail(code: int, message: str):
    print(f"error: {message}", file=sys.stderr)
    raise SystemExit(code)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    try:
        response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        _fail(EXIT_TRANSPORT, f"request failed: {exc}")
    if response.status_code == 200:
        return response.json()
    try:
        body = response.json()
    except ValueError:
        body = {"detail": response.text}
    detail = body.get("detail", "unknown error")
    for violation in body.get("violations", []):
        print(f"error: {violation['code']} at {violation['where']}: "
              f"{violation['detail']}", file=sys.stderr)
    if response.status_code == 422:
        _fail(EXIT_INVALID, str(detail))
    if response.status_code == 400:
        _fail(EXIT_MALFORMED, str(detail))
    _fail(EXIT_TRANSPORT, f"HTTP {response.status_code}: {detail}")


def _tol_payload(args) -> dict:
    tol = getattr(args, "tol", None)
    if tol is None:
        env = os.environ.get("HS2_TOL")
        tol = float(env) if env else None
    return {} if tol is None else {"tol": tol}


def _parse_time_list(text: str) -> list:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        _fail(EXIT_MALFORMED, f"bad time list {text!r}")


# ---------------------------------------------------------------------------
# subcommands

def cmd_evolve(args) -> int:
    text = _read_state(args.state)
    with _client(args) as client:
        payload = {"state": text, "t": args.t, **_tol_payload(args)}
        body = _post(client, "/evolve", payload)
        if args.plot:
            if body["kind"] != "eulerian":
                _fail(EXIT_MALFORMED, "plot export needs an Eulerian state")
            _export_plot(client, args, text)
    _write_output(body["state"], args.output)
    return EXIT_OK


def _export_plot(client: httpx.Client, args, initial_text: str):
    """Sample u, rho and the energy cdf on a (t, x) product grid."""
    n_t = max(args.plot_times, 2)
    n_x = max(args.plot_points, 2)
    times = np.linspace(0.0, args.t, n_t) if args.t > 0 else np.array([0.0])
    states = []
    for t in times:
        payload = {"state": initial_text, "t": float(t), **_tol_payload(args)}
        states.append(parse_state(_post(client, "/evolve", payload)["state"]))
    if args.plot_range:
        lo, hi = args.plot_range
    else:
        lo = min(float(s.vel.x[0]) for s in states)
        hi = max(float(s.vel.x[-1]) for s in states)
        pad = 0.05 * max(hi - lo, 1.0)
        lo, hi = lo - pad, hi + pad
    xs = np.linspace(lo, hi, n_x)
    with open(args.plot, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "u", "rho", "cdf"])
        for t, state in zip(times, states):
            u = state.vel(xs)
            rho = state.rho(xs)
            cdf = state.energy.cdf_right(xs)
            for j in range(xs.size):
                writer.writerow([f"{t:.17g}", f"{xs[j]:.17g}",
                                 f"{u[j]:.17g}", f"{rho[j]:.17g}",
                                 f"{cdf[j]:.17g}"])


def cmd_transform(args) -> int:
    text = _read_state(args.state)
    with _client(args) as client:
        payload = {"state": text, "direction": args.direction,
                   **_tol_payload(args)}
        body = _post(client, "/transform", payload)
    _write_output(body["state"], args.output)
    return EXIT_OK


def cmd_breaking(args) -> int:
    text = _read_state(args.state)
    with _client(args) as client:
        body = _post(client, "/breaking",
                     {"state": text, **_tol_payload(args)})
    if body["first_time"] is None:
        print("no future breaking")
    else:
        print(f"first_time {body['first_time']:.17g}")
        print(f"first_location {body['first_location']:.17g}")
    for cell in body["cells"]:
        if not cell["times"]:
            continue
        times = " ".join(f"{t:.17g}" for t in cell["times"])
        print(f"cell [{cell['lo']:.17g}, {cell['hi']:.17g}] times: {times}")
    return EXIT_OK


def cmd_metric(args) -> int:
    text_a = _read_state(args.state_a)
    text_b = _read_state(args.state_b)
    times = _parse_time_list(args.t) if args.t else []
    with _client(args) as client:
        payload = {"state_a": text_a, "state_b": text_b, "times": times,
                   "budget": args.budget, **_tol_payload(args)}
        body = _post(client, "/metric", payload)
    bracket = body["bracket"]
    print(f"lower {bracket['lower']:.12g}")
    print(f"upper {bracket['upper']:.12g}")
    print(f"width {bracket['width']:.12g}")
    if body["stability"]:
        print("t lower_after upper_before growth bound satisfied")
        for row in body["stability"]:
            print(f"{row['t']:g} {row['lower_after']:.12g} "
                  f"{row['upper_before']:.12g} {row['growth']:.12g} "
                  f"{row['bound']:.12g} {str(row['satisfied']).lower()}")
        if not all(row["satisfied"] for row in body["stability"]):
            _fail(EXIT_INVALID, "stability bound violated")
    return EXIT_OK


def cmd_example(args) -> int:
    with _client(args) as client:
        body = _post(client, "/example", {"name": args.name, "t": args.t})
    _write_output(body["state"], args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    text = _read_state(args.state)
    with _client(args) as client:
        body = _post(client, "/validate",
                     {"state": text, **_tol_payload(args)})
    print(f"kind {body['kind']}")
    if body.get("slope_floor") is not None:
        print(f"slope_floor {body['slope_floor']:.17g}")
    if body.get("normalized") is not None:
        print(f"normalized {str(body['normalized']).lower()}")
    if body["ok"]:
        print("ok")
        return EXIT_OK
    for violation in body["violations"]:
        print(f"error: {violation['code']} at {violation['where']}: "
              f"{violation['detail']}", file=sys.stderr)
    return EXIT_INVALID


def cmd_residual(args) -> int:
    text = _read_state(args.state)
    with _client(args) as client:
        payload = {"state": text, "t_max": args.t_max,
                   "time_nodes": args.nodes, **_tol_payload(args)}
        body = _post(client, "/residual", payload)
    print("name velocity density energy max_abs")
    for row in body["residuals"]:
        print(f"{row['name']} {row['velocity']:.6e} {row['density']:.6e} "
              f"{row['energy']:.6e} {row['max_abs']:.6e}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=args.host, port=args.port,
                log_level="info")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_server(parser):
    parser.add_argument("--server", metavar="URL", default=None,
                        help="use a running service instead of in-process")


def _add_tol(parser):
    parser.add_argument("--tol", type=float, default=None,
                        help="validation tolerance (default HS2_TOL or 1e-9)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hs2",
        description="Conservative solutions of the two-component "
                    "Hunter-Saxton system.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="advance a state in time")
    p.add_argument("state", help="state file ('-' for stdin)")
    p.add_argument("--t", type=float, required=True, help="evolution time")
    p.add_argument("-o", "--output", default=None, help="output file")
    p.add_argument("--plot", metavar="CSV", default=None,
                   help="also export t,x,u,rho,cdf samples")
    p.add_argument("--plot-points", type=int, default=201,
                   help="spatial samples per time (default 201)")
    p.add_argument("--plot-times", type=int, default=25,
                   help="time samples in [0, t] (default 25)")
    p.add_argument("--plot-range", type=float, nargs=2, default=None,
                   metavar=("LO", "HI"), help="spatial sampling window")
    _add_tol(p)
    _add_server(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("transform", help="switch coordinate systems")
    p.add_argument("direction", choices=("to-lagrangian", "to-eulerian"))
    p.add_argument("state", help="state file ('-' for stdin)")
    p.add_argument("-o", "--output", default=None, help="output file")
    _add_tol(p)
    _add_server(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("breaking", help="list future wave-breaking times")
    p.add_argument("state", help="state file ('-' for stdin)")
    _add_tol(p)
    _add_server(p)
    p.set_defaults(func=cmd_breaking)

    p = sub.add_parser("metric", help="distance bracket and stability check")
    p.add_argument("state_a", help="first state file")
    p.add_argument("state_b", help="second state file")
    p.add_argument("--t", default=None,
                   help="comma-separated stability check times")
    p.add_argument("--budget", type=int, default=200,
                   help="refinement budget for the upper bound")
    _add_tol(p)
    _add_server(p)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("example", help="write a built-in example state")
    p.add_argument("name", help="example id (see docs)")
    p.add_argument("--t", type=float, default=0.0,
                   help="trajectory time (squeeze width for ex47)")
    p.add_argument("-o", "--output", default=None, help="output file")
    _add_server(p)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("validate", help="check admissibility of a state")
    p.add_argument("state", help="state file ('-' for stdin)")
    _add_tol(p)
    _add_server(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("residual", help="weak-form defect along a trajectory")
    p.add_argument("state", help="state file ('-' for stdin)")
    p.add_argument("--t-max", type=float, required=True,
                   help="time horizon")
    p.add_argument("--nodes", type=int, default=64,
                   help="time quadrature nodes (default 64)")
    _add_tol(p)
    _add_server(p)
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_TRANSPORT


if __name__ == "__main__":
    raise SystemExit(main())
