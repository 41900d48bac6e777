#!/usr/bin/env python

"""
bfmht: butterfly-compressed manifold harmonic transforms from the command line.
"""

import functools
import json
import logging
import sys
import time
import traceback
import tracemalloc
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Optional

import click
import numpy as np
from environs import Env
from pydantic import ValidationError

from bfmht.errors import BfmhtError, ConfigurationError
from bfmht.version import get_version, get_version_info

env = Env()

logger = logging.getLogger("bfmht")


class NumberList(click.ParamType):
    """Comma separated numbers, e.g. ``1,5,10``."""

    name = "list"

    def __init__(self, kind=float):
        self.kind = kind

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return list(value)
        try:
            return [self.kind(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma separated list of {self.kind.__name__} values", param, ctx)


FLOATS = NumberList(float)
INTS = NumberList(int)


def _validation_message(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        where = ".".join(str(x) for x in err["loc"]) or "config"
        parts.append(f"{where}: {err['msg']}")
    return "; ".join(parts)


def _failing_module(e: BaseException) -> str:
    """Dotted name of the innermost bfmht module on the traceback."""
    root = Path(__file__).resolve().parent
    name = "cli"
    for frame in traceback.extract_tb(e.__traceback__):
        path = Path(frame.filename).resolve()
        if root in path.parents:
            name = ".".join(path.relative_to(root).with_suffix("").parts)
    return name


def handle_errors(fn):
    """Map config problems to usage errors (exit 2) and compute failures to exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as e:
            raise click.UsageError(_validation_message(e))
        except BfmhtError as e:
            click.echo(f"error [{e.module}]: {e}", err=True)
            click.get_current_context().exit(1)
        except (OSError, ValueError, np.linalg.LinAlgError) as e:
            logger.debug("unhandled compute failure", exc_info=True)
            click.echo(f"error [{_failing_module(e)}]: {type(e).__name__}: {e}", err=True)
            click.get_current_context().exit(1)

    return wrapper


class RunLog:
    """Timings and traced peak memory of one command, written as a JSON sidecar."""

    def __init__(self, command: str):
        self.command = command
        self.timings: Dict[str, float] = {}
        self.payload: Dict = {}

    @contextmanager
    def step(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - start, 6)
            logger.debug(f"{self.command}: {name} took {self.timings[name]:.3f}s")

    def write(self, out: Optional[Path]) -> None:
        if out is None:
            return
        from bfmht.schemas import sanitize

        peak = tracemalloc.get_traced_memory()[1] if tracemalloc.is_tracing() else None
        report = {
            "command": self.command,
            "version": get_version_info(),
            "timings": self.timings,
            "peak_traced_bytes": peak,
            **self.payload,
        }
        path = Path(f"{out}.json")
        with open(path, "w") as fh:
            json.dump(sanitize(report), fh, indent=2, default=str)
        logger.info(f"wrote {path}")


@contextmanager
def traced():
    tracemalloc.start()
    try:
        yield
    finally:
        tracemalloc.stop()


def _settings():
    from bfmht.settings import get_settings

    return get_settings()


def _run_config(ctx, subcommand: str, **options):
    from bfmht.config import RunConfig

    settings = ctx.obj["settings"]
    defaults = {
        "eps": settings.EPS,
        "space_leaf_size": settings.SPACE_LEAF_SIZE,
        "freq_leaf_size": settings.FREQ_LEAF_SIZE,
        "seed": settings.SEED,
    }
    for key, value in defaults.items():
        if options.get(key) is None:
            options[key] = value
    options["threads"] = ctx.obj["threads"]
    return RunConfig(subcommand=subcommand, **{k: v for k, v in options.items() if v is not None})


def _factorization_payload(bf) -> Dict:
    from bfmht.butterfly import memory_report
    from bfmht.schemas import StreamStatsSchema

    payload = {"memory_report": memory_report(bf).to_dict()}
    if bf.stats is not None:
        payload["stream_stats"] = StreamStatsSchema().dump(bf.stats)
    return payload


def _tree_report(report) -> Dict:
    from bfmht.schemas import BuildReportSchema

    return BuildReportSchema().dump(report)


geometry_options = [
    click.option("--points", type=click.Path(path_type=Path), help="Point-cloud file, one point per line"),
    click.option("--m", "m", type=int, help="Number of eigenfunctions (columns)"),
    click.option("--m-ratio", type=float, help="Use m = ceil(n / RATIO) columns (default 25)"),
    click.option("--eps", type=float, help="Relative tolerance of every block compression"),
    click.option("--space-leaf-size", type=int, help="Largest space tree leaf"),
    click.option("--freq-leaf-size", type=int, help="Target frequency tree leaf size"),
    click.option("--seed", type=int, help="Seed of eigensolvers and tree builds"),
    click.option(
        "--out", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True, help="Output .bfc file"
    ),
]


def with_options(options):
    def decorator(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn

    return decorator


@click.group()
@click.option(
    "--config",
    "config_paths",
    multiple=True,
    type=click.Path(exists=True, dir_okay=False),
    help="YAML file overriding bfmht presets; may be repeated",
)
@click.option(
    "--threads",
    "-t",
    type=click.IntRange(min=1),
    default=None,
    help="Worker threads (default: $BFMHT_THREADS or the available parallelism)",
)
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.pass_context
def cli(ctx, config_paths, threads, verbose):
    """
    Welcome to the bfmht command line interface.

    \nSee below for the available commands - for example,
    to compress the torus transform on a 64 x 64 grid, use the command:
    bfmht factorize --grid 64 --m-ratio 25 --eps 1e-3 --out f.bfc
    """
    from bfmht.utils import presets

    settings = _settings()
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)-8s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    presets.load_userconfig(config_paths)
    ctx.ensure_object(dict)
    ctx.obj["settings"] = settings
    ctx.obj["threads"] = threads or settings.THREADS


@cli.command()
@click.option("--grid", type=int, help="Torus grid side; n = side^2")
@click.option("--matrix", type=click.Path(path_type=Path), help="Symmetric Matrix Market graph (weights)")
@with_options(geometry_options)
@click.option("--tree", type=click.Choice(["quadtree", "fiedler"]), help="Space tree (default by source)")
@click.option("--freq-arity", type=int, default=4, show_default=True, help="Frequency tree arity (torus)")
@click.option("--band-size", type=int, help="Eigenpairs per solve (graph sources)")
@click.option("--streaming/--no-streaming", default=True, show_default=True, help="Post-order streaming build")
@click.pass_context
@handle_errors
def factorize(ctx, **options):
    """Butterfly-compress a transform matrix and write it as .bfc."""
    from bfmht.butterfly import write_bfc
    from bfmht.config import GeometrySource

    cfg = _run_config(ctx, "factorize", **options)
    log = RunLog("factorize")
    with traced():
        with log.step("factorize"):
            if cfg.source is GeometrySource.MATRIX:
                from bfmht.eigenmaps import graph_factorization
                from bfmht.graph import read_matrix_market

                K = read_matrix_market(cfg.matrix)
                m = cfg.resolve_m(K.shape[0])
                if m > K.shape[0]:
                    raise ConfigurationError(f"m={m} exceeds the {K.shape[0]} graph vertices", module="cli")
                result = graph_factorization(
                    K,
                    m,
                    cfg.eps,
                    space_leaf_size=cfg.space_leaf_size,
                    freq_leaf_size=cfg.freq_leaf_size,
                    band_size=cfg.band_size,
                    seed=cfg.seed,
                    threads=cfg.threads,
                )
                bf = result.factorization
                log.payload["tree_report"] = _tree_report(result.tree_report)
                log.payload["orthonormality_error"] = result.orthonormality_error()
            else:
                from bfmht.torus import torus_factorization
                from bfmht.trees import PointCloud

                cloud = PointCloud.from_file(cfg.points) if cfg.source is GeometrySource.POINTS else None
                n = cloud.n if cloud is not None else cfg.grid**2
                bf, _, _ = torus_factorization(
                    cfg.grid or 0,
                    cfg.resolve_m(n),
                    cfg.eps,
                    freq_arity=cfg.freq_arity,
                    streaming=cfg.streaming,
                    threads=cfg.threads,
                    space_leaf_size=cfg.space_leaf_size,
                    freq_leaf_size=cfg.freq_leaf_size,
                    points=cloud,
                    tree=cfg.tree.value,
                    seed=cfg.seed,
                )
        with log.step("write"):
            log.payload["bytes_written"] = write_bfc(cfg.out, bf)
        log.payload.update(config=cfg.model_dump(mode="json"), **_factorization_payload(bf))
        log.write(cfg.out)
    click.echo(f"{cfg.out}: {bf.n} x {bf.m}, {bf.stored_entries} stored entries")


@cli.command()
@click.option("--factor", "-f", type=click.Path(exists=True, dir_okay=False), required=True, help=".bfc file")
@click.option("--coeffs", "-c", type=click.Path(exists=True, dir_okay=False), required=True, help="Input vector")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True, help="Output vector")
@click.option("--adjoint", is_flag=True, help="Apply the adjoint (input has n entries)")
@handle_errors
def apply(factor, coeffs, out, adjoint):
    """Apply a stored factorization (or its adjoint) to a vector."""
    from bfmht.butterfly import bf_apply, bf_apply_adjoint, read_bfc
    from bfmht.utils.tables import read_vector, write_vector

    log = RunLog("apply")
    with traced():
        with log.step("read"):
            bf = read_bfc(factor)
            x = read_vector(coeffs)
        with log.step("apply"):
            y = bf_apply_adjoint(bf, x) if adjoint else bf_apply(bf, x)
        write_vector(out, y)
        log.payload.update(factor=str(factor), adjoint=adjoint, **_factorization_payload(bf))
        log.write(out)


@cli.command()
@click.option("--grid", type=int, help="Torus grid side")
@click.option("--points", type=click.Path(exists=True, dir_okay=False), help="Torus point-cloud file")
@click.option("--coeffs", "-c", type=click.Path(exists=True, dir_okay=False), required=True, help="Coefficients")
@click.option("--rows", type=int, default=100, show_default=True, help="Number of random output rows")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed of the row choice")
@click.option("--compare", type=click.Path(exists=True, dir_okay=False), help="Full output of `apply` to check")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), help="CSV of row,re,im")
@handle_errors
def direct(grid, points, coeffs, rows, seed, compare, out):
    """Direct summation of the torus transform at random rows."""
    from bfmht.linalg import relative_error
    from bfmht.torus import direct_mht, torus_basis
    from bfmht.trees import PointCloud, torus_grid
    from bfmht.utils.tables import read_vector, write_csv

    if (grid is None) == (points is None):
        raise click.UsageError("give exactly one of --grid and --points")
    cloud = torus_grid(grid) if grid is not None else PointCloud.from_file(points)
    c = read_vector(coeffs)
    basis = torus_basis(c.size)
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(cloud.n, size=min(rows, cloud.n), replace=False))
    log = RunLog("direct")
    with log.step("direct"):
        y = direct_mht(basis, cloud, c, rows=idx)
    if out is not None:
        write_csv(out, [{"row": int(i), "re": repr(float(v.real)), "im": repr(float(v.imag))} for i, v in zip(idx, y)])
    if compare is not None:
        approx = read_vector(compare)
        if approx.size != cloud.n:
            raise click.UsageError(f"{compare} has {approx.size} entries, expected {cloud.n}")
        err = relative_error(approx[idx], y)
        log.payload["relative_error"] = err
        click.echo(f"relative error on {idx.size} rows: {err:.3e}")
    log.write(out)


@cli.command()
@click.option("--factor", "-f", type=click.Path(exists=True, dir_okay=False), required=True, help=".bfc file")
@click.option("--coords", type=click.Path(exists=True, dir_okay=False), help="Vertex coordinates (point-cloud format)")
@click.option("--values", type=click.Path(exists=True, dir_okay=False), help="A single function, one value per line")
@click.option("--filter", "density", help="Spectral filter F(λ), e.g. lowpass:cut=1000 or preset:enhance")
@click.option("--tol", type=float, default=1e-8, show_default=True, help="LSQR normal-equation tolerance")
@click.option("--max-iter", type=int, default=200, show_default=True, help="LSQR iteration limit")
@click.option("--coeffs-out", type=click.Path(dir_okay=False, path_type=Path), help="Write the solved coefficients")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True, help="Output file")
@handle_errors
def invert(factor, coords, values, density, tol, max_iter, coeffs_out, out):
    """
    Inverse transform by least squares.

    With --coords every coordinate column is solved, filtered by --filter and
    mapped back to coordinates. With --values the coefficients of one function
    are written (filtered when --filter is given).
    """
    from bfmht.applications import SpectralDensity, filter_coefficients, filter_geometry, lsqr_solve
    from bfmht.butterfly import read_bfc
    from bfmht.trees import PointCloud
    from bfmht.utils.tables import read_vector, write_vector

    if (coords is None) == (values is None):
        raise click.UsageError("give exactly one of --coords and --values")
    F = SpectralDensity.parse(density) if density else None
    log = RunLog("invert")
    with traced():
        bf = read_bfc(factor)
        if coords is not None:
            xyz = PointCloud.from_file(coords).points
            with log.step("solve"):
                new, coefficients, reports = filter_geometry(
                    bf, xyz, F or SpectralDensity.constant(1.0), tol=tol, max_iter=max_iter
                )
            PointCloud(new).to_file(out)
            if coeffs_out is not None:
                np.savetxt(coeffs_out, coefficients, fmt="%.17g")
        else:
            with log.step("solve"):
                c, report = lsqr_solve(bf, read_vector(values), tol=tol, max_iter=max_iter)
            reports = [report]
            if coeffs_out is not None:
                write_vector(coeffs_out, c)
            if F is not None:
                eigenvalues = bf.eigenvalues
                if eigenvalues is None:
                    raise ConfigurationError("the factorization carries no eigenvalues to filter by", module="cli")
                c = filter_coefficients(c, eigenvalues, F)
            write_vector(out, c)
        log.payload["lsqr"] = [r.to_dict() for r in reports]
        log.payload["filter"] = str(F) if F is not None else None
        log.write(out)
    unconverged = sum(not r.converged for r in reports)
    if unconverged:
        logger.warning(f"{unconverged} of {len(reports)} solves did not reach tol={tol:g}")
    click.echo(f"{out}: {len(reports)} solves, {max(r.iterations for r in reports)} iterations at most")


@cli.command("rank-study")
@click.option(
    "--kernel", type=click.Choice(["disk", "annulus", "circle", "bessel"]), required=True, help="Kernel family"
)
@click.option("--a", "a_values", type=FLOATS, default="0", show_default=True, help="Inner radii")
@click.option("--b", "b_values", type=FLOATS, required=True, help="Outer (frequency) radii")
@click.option("--R", "R_values", type=FLOATS, required=True, help="Space radii")
@click.option("--eps", "eps_values", type=FLOATS, default="1e-3", show_default=True, help="Tolerances")
@click.option("--order", "orders", type=INTS, default="0", show_default=True, help="Bessel orders k")
@click.option("--resolution", type=int, default=64, show_default=True, help="Angular samples per domain")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), help="CSV output (default stdout)")
@click.pass_context
@handle_errors
def rank_study_command(ctx, kernel, a_values, b_values, R_values, eps_values, orders, resolution, out):
    """Compare empirical ε-ranks with the analytic bounds over a parameter grid."""
    from bfmht.rank import rank_study
    from bfmht.utils import presets
    from bfmht.utils.tables import rows_to_csv

    log = RunLog("rank-study")
    with log.step("sweep"):
        reports = rank_study(
            kernel,
            a_values,
            b_values,
            R_values,
            eps_values,
            resolution=resolution,
            orders=orders,
            threads=ctx.obj["threads"],
            out=out,
        )
    if out is None:
        click.echo(rows_to_csv([r.as_row() for r in reports], presets.csv_columns["rank"]), nl=False)
    violations = sum(not r.passed for r in reports)
    log.payload.update(points=len(reports), violations=violations)
    log.write(out)
    click.echo(f"{len(reports)} points, {violations} bound violations", err=True)


@cli.command("grf-sample")
@click.option("--factor", "-f", type=click.Path(exists=True, dir_okay=False), required=True, help=".bfc file")
@click.option(
    "--density",
    default="preset:matern",
    show_default=True,
    help="Spectral density, e.g. matern:nu=3,ell=0.1,var=1 or bump:l0=400,eta=40",
)
@click.option("--seed", type=int, default=0, show_default=True, help="Random stream")
@click.option("--samples", type=click.IntRange(min=1), default=1, show_default=True, help="Number of fields")
@click.option("--start", type=click.IntRange(min=0), default=0, show_default=True, help="Index of the first field")
@click.option("--format", "fmt", type=click.Choice(["csv", "f64"]), default="csv", show_default=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True, help="Output file")
@handle_errors
def grf_sample_command(factor, density, seed, samples, start, fmt, out):
    """
    Gaussian random field samples, one field per line (real part).

    f64 output is a little-endian samples x n array in row-major order.
    """
    from bfmht.applications import GrfModel, SpectralDensity, grf_samples
    from bfmht.butterfly import read_bfc

    log = RunLog("grf-sample")
    with traced():
        bf = read_bfc(factor)
        model = GrfModel(bf, SpectralDensity.parse(density))
        with log.step("sample"):
            Y = np.real(grf_samples(model, seed, samples, start=start))
        if fmt == "f64":
            with open(out, "wb") as fh:
                fh.write(np.ascontiguousarray(Y, dtype="<f8").tobytes())
        else:
            np.savetxt(out, Y, fmt="%.17g", delimiter=",")
        log.payload.update(density=str(model.density), seed=seed, samples=samples, start=start)
        log.write(out)


@cli.command("eigenmaps")
@click.option("--sphere", type=int, help="Synthetic noisy sphere with this many points")
@click.option("--sigma", type=float, help="Sphere noise relative to the radius (default 0.01)")
@click.option("--radius", type=float, help="Sphere radius (default 1)")
@with_options(geometry_options)
@click.option("--t", "heat_scale", type=float, help="Heat-kernel scale (default calibrated, ~n^(-1/4))")
@click.option("--threshold", type=float, help="Drop kernel entries below this value")
@click.option("--band-size", type=int, help="Eigenpairs per solve")
@click.option("--bands-out", type=click.Path(dir_okay=False, path_type=Path), help="Dump the eigen bands")
@click.pass_context
@handle_errors
def eigenmaps_command(ctx, bands_out, **options):
    """Laplacian eigenmaps basis of a point cloud, butterfly-compressed."""
    from bfmht.butterfly import write_bfc
    from bfmht.eigenmaps import eigenmaps_factorization
    from bfmht.graph import write_eigenbands
    from bfmht.trees import PointCloud, noisy_sphere

    cfg = _run_config(ctx, "eigenmaps", **options)
    if cfg.points is not None:
        cloud = PointCloud.from_file(cfg.points)
    else:
        cloud = noisy_sphere(cfg.sphere, radius=cfg.radius, sigma=cfg.sigma * cfg.radius, seed=cfg.seed)
    m = cfg.resolve_m(cloud.n)
    if m > cloud.n:
        raise ConfigurationError(f"m={m} exceeds the {cloud.n} points", module="cli")
    log = RunLog("eigenmaps")
    with traced():
        with log.step("factorize"):
            result = eigenmaps_factorization(
                cloud,
                m,
                cfg.eps,
                t=cfg.heat_scale,
                threshold=cfg.threshold,
                space_leaf_size=cfg.space_leaf_size,
                freq_leaf_size=cfg.freq_leaf_size,
                band_size=cfg.band_size,
                seed=cfg.seed,
                threads=cfg.threads,
            )
        bf = result.factorization
        with log.step("write"):
            log.payload["bytes_written"] = write_bfc(cfg.out, bf)
            if bands_out is not None:
                write_eigenbands(bands_out, result.provider.bands)
        log.payload.update(
            config=cfg.model_dump(mode="json"),
            heat_scale=result.heat_scale,
            graph_nnz=int(result.graph.nnz),
            orthonormality_error=result.orthonormality_error(),
            eigenvalue_range=[float(result.eigenvalues[0]), float(result.eigenvalues[-1])],
            tree_report=_tree_report(result.tree_report),
            **_factorization_payload(bf),
        )
        log.write(cfg.out)
    click.echo(f"{cfg.out}: {bf.n} x {bf.m}, {bf.stored_entries} stored entries")


@cli.command()
@click.option("--sizes", type=INTS, required=True, help="Ascending perfect-square n, e.g. 4096,16384,65536")
@click.option("--m-ratio", type=float, default=25.0, show_default=True, help="m = ceil(n / RATIO)")
@click.option("--eps", type=float, default=1e-3, show_default=True, help="Compression tolerance")
@click.option("--freq-arity", type=click.Choice(["2", "4"]), default="4", show_default=True, help="Frequency tree arity")
@click.option("--streaming/--no-streaming", default=True, show_default=True, help="Post-order streaming build")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), help="CSV output (default stdout)")
@click.pass_context
@handle_errors
def bench(ctx, sizes, m_ratio, eps, freq_arity, streaming, out):
    """Memory of the torus transform against n, with the fitted log-log slope."""
    from bfmht.rank import complexity_sweep
    from bfmht.utils import presets
    from bfmht.utils.tables import rows_to_csv

    log = RunLog("bench")
    with log.step("sweep"):
        result = complexity_sweep(
            sizes,
            m_ratio=m_ratio,
            eps=eps,
            freq_arity=int(freq_arity),
            streaming=streaming,
            threads=ctx.obj["threads"],
            out=out,
        )
    if out is None:
        click.echo(rows_to_csv(result.rows, presets.csv_columns["bench"]), nl=False)
    log.payload.update(slope=result.slope, prefactor=result.prefactor, rows=result.rows)
    log.write(out)
    click.echo(f"stored entries ~ n^{result.slope:.3f}", err=True)


@cli.command()
def version():
    """Print the version."""
    info = get_version_info()
    click.echo(f"bfmht {get_version(include_git_hash=True)}")
    if info["git_hash"]:
        click.echo(f"git commit {info['git_hash']}")


def main():
    print(f"This is bfmht v{get_version(include_git_hash=True)}", file=sys.stderr)
    if env.bool("BFMHT_DEBUG", False):
        print(" * Environment variable BFMHT_DEBUG is true - block errors are checked", file=sys.stderr)
    print(file=sys.stderr)
    cli()


if __name__ == "__main__":
    main()
