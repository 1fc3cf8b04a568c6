"""Command-line client for the ofdkit service.

Each subcommand builds a request, posts it to the service, and writes the
results to files or stdout.  Without ``--server`` the app runs in-process
over an ASGI transport, so no daemon is needed for batch use.

Exit codes: 0 success, 1 input error, 2 infeasible repair (tau too small).
"""

from __future__ import annotations

import json
import os
import sys

import click
import httpx


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    # in-process fallback: drive the ASGI app through the sync test client
    # (the installed httpx ASGI transport is async-only); its import-time
    # housekeeping notice is not actionable for CLI users
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app(), base_url="http://ofdkit")


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    with _client(ctx.obj.get("server")) as client:
        resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        click.echo(f"error: {detail}", err=True)
        sys.exit(1)
    return resp.json()


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        click.echo(text, nl=not text.endswith("\n"))
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _threads(value: int | None) -> int:
    if value is not None:
        return value
    return int(os.environ.get("OFDKIT_THREADS", "1"))


@click.group()
@click.option("--server", default=None, help="Remote service URL (default: in-process)")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Ontology-aware dependency discovery, inference, and repair."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@click.option("--data", required=True, help="CSV file")
@click.option("--onto", required=True, help="Ontology JSON file")
@click.option("--kind", default="syn", help="Comma list of syn,inh,fd")
@click.option("--theta", default=2, show_default=True, help="Inheritance bound")
@click.option("--kappa", default=1.0, show_default=True, help="Minimum support")
@click.option("--opts", default="234", show_default=True, help="Enabled optimizations")
@click.option("--max-level", default=None, type=int, help="Lattice level cutoff")
@click.option("--exclude", default="", help="Comma list of attributes to skip")
@click.option("--no-header", is_flag=True, help="CSV has no header row")
@click.option("--threads", default=None, type=int, help="Verification workers")
@click.option("--verify-with-oracle", is_flag=True,
              help="Cross-check against brute-force enumeration (small inputs)")
@click.option("--out", default=None, help="Write dependencies here (default stdout)")
@click.option("--stats", "stats_path", default=None, help="Write stats JSON here")
@click.pass_context
def discover(ctx, data, onto, kind, theta, kappa, opts, max_level, exclude,
             no_header, threads, verify_with_oracle, out, stats_path):
    """Discover the minimal dependency set holding on the data."""
    body = _post(ctx, "/discover", {
        "data_csv": _read(data),
        "has_header": not no_header,
        "ontology": json.loads(_read(onto)),
        "kinds": [k.strip() for k in kind.split(",") if k.strip()],
        "theta": theta,
        "kappa": kappa,
        "opts": opts,
        "max_level": max_level,
        "exclude": [a.strip() for a in exclude.split(",") if a.strip()],
        "threads": _threads(threads),
        "verify_with_oracle": verify_with_oracle,
    })
    _write(out, "\n".join(body["ofds"]) + ("\n" if body["ofds"] else ""))
    if stats_path:
        _write(stats_path, json.dumps(body["stats"], indent=2) + "\n")
    click.echo(f"found {len(body['ofds'])} dependencies", err=True)
    if body.get("oracle_match") is not None:
        click.echo(f"oracle match: {body['oracle_match']}", err=True)
        if not body["oracle_match"]:
            sys.exit(1)


@main.command()
@click.option("--sigma", required=True, help="Dependency file (one per line)")
@click.option("--closure", "closure_of", default=None, help="Comma attribute list")
@click.option("--implies", "implies_line", default=None, help="Dependency to test")
@click.option("--minimal-cover", is_flag=True, help="Reduce to a minimal cover")
@click.option("--out", default=None)
@click.pass_context
def infer(ctx, sigma, closure_of, implies_line, minimal_cover, out):
    """Closure, implication, and minimal-cover queries over a dependency set."""
    lines = [l for l in _read(sigma).splitlines() if l.strip() and not l.startswith("#")]
    body = _post(ctx, "/infer", {
        "sigma": lines,
        "closure_of": [a.strip() for a in closure_of.split(",")] if closure_of else None,
        "implies_line": implies_line,
        "minimal_cover": minimal_cover,
    })
    chunks = []
    if body.get("closure") is not None:
        chunks.append("closure: " + ",".join(body["closure"]))
    if body.get("implies") is not None:
        chunks.append("implies: " + ("yes" if body["implies"] else "no"))
    if body.get("minimal_cover") is not None:
        chunks.append("\n".join(body["minimal_cover"]))
    _write(out, "\n".join(chunks) + "\n")


@main.command("assign-senses")
@click.option("--data", required=True)
@click.option("--onto", required=True)
@click.option("--ofds", required=True)
@click.option("--theta-emd", default=10.0, show_default=True)
@click.option("--no-header", is_flag=True)
@click.option("--out", default=None, help="Write assignment JSON here")
@click.pass_context
def assign_senses(ctx, data, onto, ofds, theta_emd, no_header, out):
    """Assign an interpretation sense to every equivalence class."""
    body = _post(ctx, "/assign-senses", {
        "data_csv": _read(data),
        "has_header": not no_header,
        "ontology": json.loads(_read(onto)),
        "ofds": _read(ofds).splitlines(),
        "theta_emd": theta_emd,
    })
    _write(out, json.dumps(body["assignments"], indent=2) + "\n")
    if body["literal_classes"]:
        click.echo(
            f"warning: {len(body['literal_classes'])} classes have no covering sense",
            err=True,
        )


@main.command()
@click.option("--data", required=True)
@click.option("--onto", required=True)
@click.option("--ofds", required=True)
@click.option("--senses", default=None, help="Precomputed assignment JSON")
@click.option("--theta-emd", default=10.0, show_default=True)
@click.option("--tau", default=None, type=float, help="Max data edits (fraction or count)")
@click.option("--beam", default=None, type=int, help="Beam width")
@click.option("--kmax", default=None, type=int, help="Max ontology insertions")
@click.option("--no-header", is_flag=True)
@click.option("--out", default=None, help="Write repair report JSON here")
@click.pass_context
def clean(ctx, data, onto, ofds, senses, theta_emd, tau, beam, kmax, no_header, out):
    """Compute Pareto-minimal joint data/ontology repairs."""
    body = _post(ctx, "/clean", {
        "data_csv": _read(data),
        "has_header": not no_header,
        "ontology": json.loads(_read(onto)),
        "ofds": _read(ofds).splitlines(),
        "senses": json.loads(_read(senses)) if senses else None,
        "theta_emd": theta_emd,
        "tau": tau,
        "beam": beam,
        "k_max": kmax,
    })
    _write(out, json.dumps(body, indent=2) + "\n")
    for pair in body["repairs"]:
        click.echo(
            f"repair: {pair['dist_s']} insertions, {pair['dist_i']} cell updates "
            f"(bound {pair['delta_p']})",
            err=True,
        )
    if not body["feasible"]:
        click.echo("no feasible repair within tau", err=True)
        sys.exit(2)


@main.command("inject-errors")
@click.option("--data", required=True)
@click.option("--onto", required=True)
@click.option("--ofds", required=True)
@click.option("--err", default=0.03, show_default=True)
@click.option("--inc", default=0.04, show_default=True)
@click.option("--mode", default="mixed", show_default=True,
              type=click.Choice(["new", "swap", "mixed"]))
@click.option("--seed", required=True, type=int)
@click.option("--no-header", is_flag=True)
@click.option("--out-data", required=True)
@click.option("--out-onto", required=True)
@click.option("--out-log", required=True)
@click.pass_context
def inject_errors(ctx, data, onto, ofds, err, inc, mode, seed, no_header,
                  out_data, out_onto, out_log):
    """Corrupt consequent cells and withhold ontology values (seeded)."""
    body = _post(ctx, "/inject-errors", {
        "data_csv": _read(data),
        "has_header": not no_header,
        "ontology": json.loads(_read(onto)),
        "ofds": _read(ofds).splitlines(),
        "err": err,
        "inc": inc,
        "mode": mode,
        "seed": seed,
    })
    _write(out_data, body["dirty_csv"])
    _write(out_onto, json.dumps(body["reduced_ontology"], indent=2) + "\n")
    _write(out_log, json.dumps(body["truth_log"], indent=2) + "\n")
    log = body["truth_log"]
    click.echo(
        f"injected {len(log['cell_errors'])} cell errors, "
        f"withheld {len(log['withheld'])} ontology entries",
        err=True,
    )


@main.command()
@click.option("--repairs", required=True, help="Repair report JSON from clean")
@click.option("--index", default=0, show_default=True, help="Pair to score")
@click.option("--log", "log_path", required=True, help="Truth log JSON")
@click.pass_context
def score(ctx, repairs, index, log_path):
    """Precision/recall of one repair pair against an injection log."""
    report = json.loads(_read(repairs))
    pairs = report["repairs"] if isinstance(report, dict) else report
    if not pairs:
        click.echo("error: no repair pairs in report", err=True)
        sys.exit(1)
    body = _post(ctx, "/score", {
        "repair": pairs[index],
        "truth_log": json.loads(_read(log_path)),
    })
    click.echo(json.dumps(body, indent=2))


@main.command()
@click.option("--ns", default="10000", show_default=True, help="Comma list of tuple counts")
@click.option("--arities", default="6", show_default=True, help="Comma list of arities")
@click.option("--seed", default=7, show_default=True, type=int)
@click.option("--kappa", default=1.0, show_default=True)
@click.option("--out", default=None, help="Write the CSV table here")
@click.pass_context
def bench(ctx, ns, arities, seed, kappa, out):
    """Time discovery over synthetic (n, arity) grids."""
    body = _post(ctx, "/bench", {
        "ns": [int(x) for x in ns.split(",") if x.strip()],
        "arities": [int(x) for x in arities.split(",") if x.strip()],
        "seed": seed,
        "kappa": kappa,
    })
    _write(out, body["csv"])
    for row in body["rows"]:
        click.echo(
            f"n={row['n']} arity={row['arity']} seconds={row['seconds']}",
            err=True,
        )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
