"""Command-line client for the conemetrics service.

Every subcommand builds a request, sends it to the HTTP service (an
in-process instance by default, or a remote one via --server), and
formats the response.  Numbers are printed with round-trip-exact decimal
formatting so reports can be diffed.
"""

from __future__ import annotations

import json
import sys

import click
import httpx


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _post(server: str | None, path: str, payload: dict) -> dict:
    with _client(server) as client:
        response = client.post(path, json=payload)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except Exception:
            detail = response.text
        raise click.ClickException(f"service error ({response.status_code}): {detail}")
    return response.json()


def _parse_cone(text: str) -> dict:
    try:
        kind, _, size = text.partition(":")
        return {"kind": kind.strip().lower(), "n": int(size)}
    except ValueError:
        raise click.BadParameter(
            f"expected KIND:N such as orthant:3, lorentz:2, or sympd:2; got {text!r}"
        )


def _parse_point(text: str) -> list[float]:
    try:
        coords = json.loads(text)
    except json.JSONDecodeError as exc:
        raise click.BadParameter(
            f"invalid point JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        )
    if not isinstance(coords, list):
        raise click.BadParameter("a point must be a JSON array of coordinates")
    return [float(c) for c in coords]


def _load_points(points: tuple[str, ...], points_file: str | None,
                 expected: int | None = None) -> list[list[float]]:
    if points_file is not None:
        try:
            with open(points_file) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise click.ClickException(
                f"{points_file}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            )
        if not isinstance(data, list):
            raise click.ClickException(f"{points_file}: expected a JSON array of points")
        coords = [[float(c) for c in row] for row in data]
    else:
        coords = [_parse_point(p) for p in points]
    if expected is not None and len(coords) != expected:
        raise click.ClickException(f"expected {expected} points, got {len(coords)}")
    return coords


def _emit(data: dict, fmt: str, out: str | None, csv_text: str | None = None):
    if fmt == "csv":
        if csv_text is None:
            raise click.ClickException("csv output is only available for campaign reports")
        text = csv_text
    else:
        text = json.dumps(data, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        click.echo(text)


_server_option = click.option("--server", default=None, metavar="URL",
                              help="Remote service URL; defaults to an in-process service.")
_format_option = click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                              default="json", show_default=True)
_out_option = click.option("--out", default=None, type=click.Path(dir_okay=False),
                           help="Write the report to a file instead of stdout.")


@click.group()
def main():
    """Distances, geodesics, and verification campaigns on convex cones."""


@main.command()
@click.option("--cone", required=True, callback=lambda _c, _p, v: _parse_cone(v))
@click.option("--point", "points", multiple=True, metavar="'[..]'",
              help="Point coordinates as a JSON array; give exactly two.")
@click.option("--points-file", default=None, type=click.Path(exists=True, dir_okay=False),
              help="JSON file with an array of two coordinate arrays.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
@_out_option
@_server_option
def distance(cone, points, points_file, fmt, out, server):
    """Both distances and order bounds between two points."""
    x, y = _load_points(points, points_file, expected=2)
    data = _post(server, "/distance", {"cone": cone, "x": x, "y": y})
    if fmt == "json" or out:
        _emit(data, "json", out)
        return
    if not data["same_part"]:
        click.echo("d_T = infinite (different parts)")
        click.echo("d_H = infinite (different parts)")
        return
    click.echo(f"d_T    = {data['thompson']!r}")
    click.echo(f"d_H    = {data['hilbert']!r}")
    click.echo(f"M(x/y) = {data['order_sup_xy']!r}")
    click.echo(f"M(y/x) = {data['order_sup_yx']!r}")


@main.command()
@click.option("--cone", required=True, callback=lambda _c, _p, v: _parse_cone(v))
@click.option("--point", "points", multiple=True, metavar="'[..]'")
@click.option("--points-file", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--s", "s_values", multiple=True, type=float,
              help="Geodesic parameter in [0,1]; repeatable.")
@click.option("--n-samples", default=None, type=int,
              help="Sample a uniform parameter grid of this size instead.")
@_format_option
@_out_option
@_server_option
def geodesic(cone, points, points_file, s_values, n_samples, fmt, out, server):
    """Sample the distinguished geodesic between two points."""
    x, y = _load_points(points, points_file, expected=2)
    if n_samples:
        if n_samples < 2:
            raise click.ClickException("--n-samples must be at least 2")
        values = [i / (n_samples - 1) for i in range(n_samples)]
    elif s_values:
        values = list(s_values)
    else:
        values = [0.0, 0.5, 1.0]
    data = _post(server, "/geodesic", {"cone": cone, "x": x, "y": y, "s_values": values})
    data["s_values"] = values
    _emit(data, "json", out)


@main.command()
@click.option("--kind", required=True,
              type=click.Choice(["theorem1", "theorem2", "busemann", "semihyperbolic",
                                 "opnorm-agreement", "embedding"]))
@click.option("--cone", required=True, callback=lambda _c, _p, v: _parse_cone(v))
@click.option("--metric", type=click.Choice(["thompson", "hilbert"]), default="thompson",
              show_default=True)
@click.option("--s", default=0.5, type=float, show_default=True)
@click.option("--R", "radius", default=1.0, type=float, show_default=True)
@click.option("--n-samples", default=1000, type=int, show_default=True)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--tol", default=None, type=float, help="Override the kind's tolerance.")
@click.option("--span-2d", is_flag=True, help="Sample triples with two-dimensional span.")
@click.option("--no-trials", is_flag=True, help="Drop per-trial records from the report.")
@_format_option
@_out_option
@_server_option
def campaign(kind, cone, metric, s, radius, n_samples, seed, tol, span_2d, no_trials,
             fmt, out, server):
    """Run a seeded verification campaign; proved inequalities fail the exit code."""
    payload = {
        "kind": kind,
        "cone": cone,
        "metric": metric,
        "s": s,
        "R": radius,
        "n_samples": n_samples,
        "seed": seed,
        "tol": tol,
        "span_2d": span_2d,
        "include_trials": not no_trials,
    }
    data = _post(server, "/campaign", payload)
    csv_text = None
    if fmt == "csv":
        from .campaigns import CampaignReport

        csv_text = CampaignReport(**data).to_csv()
    _emit(data, fmt, out, csv_text)
    violations = data["aggregate"]["violations"]
    click.echo(
        f"{kind}: {data['aggregate']['n_trials']} trials, {violations} violations",
        err=True,
    )
    if data["assertable"] and violations > 0:
        sys.exit(1)


@main.command()
@click.option("--metric", type=click.Choice(["thompson", "hilbert"]), required=True)
@click.option("--R", "radius", required=True, type=float)
@click.option("--s", required=True, type=float)
@click.option("--n-steps", default=7, type=int, show_default=True)
@_format_option
@_out_option
@_server_option
def tightness(metric, radius, s, n_steps, fmt, out, server):
    """How closely the extremal family approaches the supremum bound."""
    data = _post(server, "/tightness",
                 {"metric": metric, "R": radius, "s": s, "n_steps": n_steps})
    _emit(data, "json", out)


@main.command()
@click.option("--cone", required=True, callback=lambda _c, _p, v: _parse_cone(v))
@click.option("--point", "points", multiple=True, metavar="'[..]'")
@click.option("--points-file", default=None, type=click.Path(exists=True, dir_okay=False))
@_format_option
@_out_option
@_server_option
def embed(cone, points, points_file, fmt, out, server):
    """Embed a point set into an orthant, preserving all pairwise order bounds."""
    coords = _load_points(points, points_file)
    data = _post(server, "/embed", {"cone": cone, "points": coords})
    _emit(data, "json", out)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("conemetrics.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
