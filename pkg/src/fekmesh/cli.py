"""Command-line interface: build meshes, extract nodes, fit functions,
and reproduce the benchmark tables.

All output is deterministic for a fixed configuration and seed: CSV
files carry 17 significant digits, JSON is key-sorted, and nothing
records timestamps.  Exit code 0 means success, 2 a configuration
problem, 3 a numerical failure (rank loss or a grid over the workspace
cap).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from fekmesh.approx import (
    interpolate,
    least_squares_fit,
    lebesgue_constant,
    test_function,
    uniform_error,
)
from fekmesh.basis import FAMILIES, BasisSpec
from fekmesh.fekete import (
    RankDeficiencyError,
    cubature_weights,
    extract_afp,
    moment_vector,
    refined_moments,
)
from fekmesh.geometry import (
    BUILTIN_DOMAIN_NAMES,
    Domain,
    Polygon,
    builtin_domain,
    domain_from_json,
)
from fekmesh.mesh import (
    Mesh,
    MeshTooLargeError,
    control_mesh,
    mesh_metadata,
    uniform_am,
    uniform_am_cardinality,
    wam,
    write_points_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

DEFAULT_DEGREES = (5, 10, 15, 20, 25, 30)
DEFAULT_AM_CAP = 1e7

TABLE_DOMAINS = {
    5: "simplex",
    6: "lintrap",
    7: "cubtrap",
    8: "convpoly",
    9: "nonconvpoly",
}

LEBESGUE_DOMAINS = ("disk", "simplex", "lintrap", "cubtrap", "convpoly", "nonconvpoly")


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, resolved from the parsed args."""

    command: str
    domain_label: str
    domain: Domain | None
    n: int | None
    degrees: tuple[int, ...]
    basis: str
    refine: int
    control_factor: int
    seed: int
    out_base: str
    svg: bool
    am: bool
    am_cap: float
    weights: bool
    method: str
    fid: int
    table_id: int
    decomposition: str

    def path(self, suffix: str) -> str:
        return self.out_base + suffix


def resolve_domain(text: str) -> tuple[str, Domain]:
    """Accepts a builtin name, an inline JSON object, or a JSON file path."""
    if text in BUILTIN_DOMAIN_NAMES:
        return text, builtin_domain(text)
    if text.lstrip().startswith("{"):
        return "custom", domain_from_json(json.loads(text))
    if os.path.exists(text):
        with open(text) as fh:
            return "custom", domain_from_json(json.load(fh))
    raise ValueError(
        f"domain {text!r} is neither a builtin name {BUILTIN_DOMAIN_NAMES}, "
        f"inline JSON, nor an existing file"
    )


def parse_degrees(text: str) -> tuple[int, ...]:
    try:
        degrees = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"cannot parse degree list {text!r}; use e.g. 5,10,15")
    if not degrees or any(d < 1 for d in degrees):
        raise ValueError("degree list must hold positive integers")
    return degrees


def config_from_args(args: argparse.Namespace) -> RunConfig:
    command = args.command
    table_id = getattr(args, "id", 0)
    if command == "table":
        label, domain = "", None
        n = None
        degrees = parse_degrees(args.degrees)
        out_default = f"table-{table_id}"
    else:
        label, domain = resolve_domain(args.domain)
        n = args.n
        degrees = (n,)
        out_default = f"{command}-{label}-n{n}"
    return RunConfig(
        command=command,
        domain_label=label,
        domain=domain,
        n=n,
        degrees=degrees,
        basis=getattr(args, "basis", "cheb"),
        refine=getattr(args, "refine", 2),
        control_factor=getattr(args, "control_factor", 4),
        seed=getattr(args, "seed", 0),
        out_base=args.out if args.out else out_default,
        svg=getattr(args, "svg", False),
        am=(command == "am") or getattr(args, "am", False),
        am_cap=getattr(args, "am_cap", DEFAULT_AM_CAP),
        weights=getattr(args, "weights", False),
        method=getattr(args, "method", "ls-wam"),
        fid=getattr(args, "f", 1),
        table_id=table_id,
        decomposition=getattr(args, "decomposition", "auto"),
    )


def write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_svg(path: str, points, highlight=None, size: int = 600, pad: int = 20) -> None:
    """Hand-rolled scatter plot; equal scales on both axes."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    lo = pts.min(axis=0)
    span = float(max((pts.max(axis=0) - lo).max(), 1e-30))
    scale = (size - 2 * pad) / span

    def place(p):
        return pad + (p[0] - lo[0]) * scale, size - pad - (p[1] - lo[1]) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for p in pts:
        cx, cy = place(p)
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2" fill="#4477aa"/>')
    if highlight is not None:
        for p in np.asarray(highlight, dtype=np.float64).reshape(-1, 2):
            cx, cy = place(p)
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3.5" fill="#cc3311"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def format_sci(value) -> str:
    """One-significant-digit scientific notation, e.g. 5E-4."""
    if value is None:
        return "*"
    if value == 0.0:
        return "0"
    mantissa, exponent = f"{value:.0E}".split("E")
    return f"{mantissa}E{int(exponent)}"


def format_cell(value, kind: str) -> str:
    if value is None:
        return "*"
    if kind == "int":
        return str(int(round(value)))
    return format_sci(value)


def render_table(title: str, degrees, rows) -> str:
    """rows: list of (label, kind, values) with kind 'int' or 'sci'."""
    texts = [[format_cell(v, kind) for v in vals] for _, kind, vals in rows]
    label_w = max(len(r[0]) for r in rows)
    label_w = max(label_w, 1)
    widths = [
        max(len(str(d)), max(len(col[i]) for col in texts)) + 2
        for i, d in enumerate(degrees)
    ]
    lines = [title]
    lines.append("n".ljust(label_w) + "".join(str(d).rjust(w) for d, w in zip(degrees, widths)))
    for (label, _, _), cells in zip(rows, texts):
        lines.append(label.ljust(label_w) + "".join(c.rjust(w) for c, w in zip(cells, widths)))
    return "\n".join(lines)


def cmd_mesh(cfg: RunConfig) -> int:
    if cfg.am:
        m = uniform_am(cfg.domain, cfg.n, cap=cfg.am_cap)
    else:
        m = wam(cfg.domain, cfg.n, decomposition=cfg.decomposition)
    csv_path = cfg.path(".csv")
    write_points_csv(csv_path, m.points)
    write_json(cfg.path(".json"), {"command": cfg.command, **mesh_metadata(m)})
    if cfg.svg:
        write_svg(cfg.path(".svg"), m.points)
    kind = m.provenance["construction"]
    print(f"{cfg.domain_label} degree {cfg.n}: {m.cardinality} points ({kind}) -> {csv_path}")
    return EXIT_OK


def _extract(cfg: RunConfig) -> tuple[Mesh, object]:
    m = wam(cfg.domain, cfg.n)
    spec = BasisSpec.for_domain(cfg.basis, cfg.n, cfg.domain)
    return m, extract_afp(m, spec, cfg.refine)


def _afp_report(cfg: RunConfig, result) -> dict:
    return {
        "command": cfg.command,
        "domain": cfg.domain.to_json(),
        "degree": cfg.n,
        "basis": cfg.basis,
        "refine_rounds": cfg.refine,
        "mesh_cardinality": result.mesh_cardinality,
        "node_count": result.size,
        "vdm_logabs": result.vdm_logabs,
        "condition_history": list(result.rank_report["cond_history"]),
    }


def cmd_afp(cfg: RunConfig) -> int:
    m, result = _extract(cfg)
    report = _afp_report(cfg, result)
    csv_path = cfg.path(".csv")
    if cfg.weights:
        spec = BasisSpec.for_domain(cfg.basis, cfg.n, cfg.domain)
        b = refined_moments(result, moment_vector(cfg.domain, spec))
        w = cubature_weights(result, b)
        report["weights_sum"] = float(w.sum())
        report["weights_min"] = float(w.min())
        with open(csv_path, "w") as fh:
            fh.write("x,y,w\n")
            for (x, y), wi in zip(result.points, w):
                fh.write(f"{x:.17g},{y:.17g},{wi:.17g}\n")
    else:
        write_points_csv(csv_path, result.points)
    write_json(cfg.path(".json"), report)
    if cfg.svg:
        write_svg(cfg.path(".svg"), m.points, highlight=result.points)
    print(
        f"{cfg.domain_label} degree {cfg.n}: {result.size} nodes out of "
        f"{result.mesh_cardinality} mesh points -> {csv_path}"
    )
    return EXIT_OK


def cmd_leb(cfg: RunConfig) -> int:
    m, result = _extract(cfg)
    control = control_mesh(cfg.domain, cfg.n, cfg.control_factor)
    lam = lebesgue_constant(result, control)
    report = _afp_report(cfg, result)
    report["control_cardinality"] = control.cardinality
    report["lebesgue"] = lam
    write_json(cfg.path(".json"), report)
    if cfg.svg:
        write_svg(cfg.path(".svg"), m.points, highlight=result.points)
    print(f"{cfg.domain_label} degree {cfg.n}: lebesgue constant {lam:.3f}")
    return EXIT_OK


def cmd_approx(cfg: RunConfig) -> int:
    shifted = isinstance(cfg.domain, Polygon)
    f = test_function(cfg.fid, shifted=shifted)
    spec = BasisSpec.for_domain(cfg.basis, cfg.n, cfg.domain)
    if cfg.method == "ls-wam":
        approx = least_squares_fit(f, wam(cfg.domain, cfg.n), spec)
    elif cfg.method == "ls-am":
        approx = least_squares_fit(f, uniform_am(cfg.domain, cfg.n, cap=cfg.am_cap), spec)
    elif cfg.method == "interp-afp":
        _, result = _extract(cfg)
        approx = interpolate(f, result)
    else:
        raise ValueError(f"unknown method {cfg.method!r}")
    control = control_mesh(cfg.domain, cfg.n, cfg.control_factor)
    err = uniform_error(approx, f, control)
    write_json(
        cfg.path(".json"),
        {
            "command": cfg.command,
            "domain": cfg.domain.to_json(),
            "degree": cfg.n,
            "basis": cfg.basis,
            "refine_rounds": cfg.refine,
            "method": cfg.method,
            "function": cfg.fid,
            "shifted": shifted,
            "error": err,
        },
    )
    print(
        f"{cfg.domain_label} degree {cfg.n}: method {cfg.method}, "
        f"function {cfg.fid}, max error {err:.6e}"
    )
    return EXIT_OK


class _TableRun:
    """Shared mesh/node/control cache for one table invocation."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._cache: dict = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def domain(self, name: str) -> Domain:
        return self._get(("domain", name), lambda: builtin_domain(name))

    def wam(self, name: str, n: int) -> Mesh:
        return self._get(("wam", name, n), lambda: wam(self.domain(name), n))

    def control(self, name: str, n: int) -> Mesh:
        return self._get(
            ("control", name, n),
            lambda: control_mesh(self.domain(name), n, self.cfg.control_factor),
        )

    def afp(self, name: str, n: int, family: str, rounds: int):
        def build():
            spec = BasisSpec.for_domain(family, n, self.domain(name))
            return extract_afp(self.wam(name, n), spec, rounds)

        return self._get(("afp", name, n, family, rounds), build)

    def uniform(self, name: str, n: int) -> Mesh:
        return self._get(
            ("am", name, n),
            lambda: uniform_am(self.domain(name), n, cap=self.cfg.am_cap),
        )


def _guarded(build):
    try:
        return build()
    except (MeshTooLargeError, RankDeficiencyError, np.linalg.LinAlgError):
        return None


def _error_rows(run: _TableRun, name: str, degrees, with_am: bool):
    """Benchmark error rows: least squares on meshes (optionally on the
    uniform grid) and interpolation at extracted nodes, per test function."""
    cfg = run.cfg
    shifted = isinstance(run.domain(name), Polygon)
    rows = []
    for fid in (1, 2, 3):
        f = test_function(fid, shifted=shifted)

        def ls_on(mesh_builder, n):
            mesh = mesh_builder(n)
            spec = BasisSpec.for_domain(cfg.basis, n, run.domain(name))
            approx = least_squares_fit(f, mesh, spec)
            return uniform_error(approx, f, run.control(name, n))

        if with_am:
            rows.append(
                (
                    f"f{fid} ls uniform",
                    "sci",
                    [
                        _guarded(lambda n=n: ls_on(lambda k: run.uniform(name, k), n))
                        for n in degrees
                    ],
                )
            )
        rows.append(
            (
                f"f{fid} ls mesh",
                "sci",
                [
                    _guarded(lambda n=n: ls_on(lambda k: run.wam(name, k), n))
                    for n in degrees
                ],
            )
        )

        def interp_err(n):
            result = run.afp(name, n, cfg.basis, cfg.refine)
            return uniform_error(interpolate(f, result), f, run.control(name, n))

        rows.append(
            (
                f"f{fid} interp nodes",
                "sci",
                [_guarded(lambda n=n: interp_err(n)) for n in degrees],
            )
        )
    return rows


def _lebesgue_cell(run: _TableRun, name: str, n: int, family: str, rounds: int):
    result = run.afp(name, n, family, rounds)
    return lebesgue_constant(result, run.control(name, n))


def build_table(cfg: RunConfig) -> tuple[str, list]:
    run = _TableRun(cfg)
    degrees = cfg.degrees
    tid = cfg.table_id
    if tid == 1:
        rows = [
            (
                "uniform grid",
                "int",
                [float(uniform_am_cardinality(run.domain("disk"), n)) for n in degrees],
            ),
            ("mesh", "int", [float(run.wam("disk", n).cardinality) for n in degrees]),
            (
                "nodes",
                "int",
                [
                    float(run.afp("disk", n, cfg.basis, cfg.refine).size)
                    for n in degrees
                ],
            ),
        ]
        return "point counts on the disk", rows
    if tid == 2:
        rows = []
        for family in FAMILIES:
            for rounds in (0, 2):
                rows.append(
                    (
                        f"{family} s={rounds}",
                        "int",
                        [
                            _guarded(
                                lambda n=n, fa=family, s=rounds: _lebesgue_cell(
                                    run, "disk", n, fa, s
                                )
                            )
                            for n in degrees
                        ],
                    )
                )
        return "lebesgue constants on the disk by basis and refinement", rows
    if tid == 3:
        return "approximation errors on the disk", _error_rows(
            run, "disk", degrees, with_am=True
        )
    if tid == 4:
        rows = [
            (
                name,
                "int",
                [
                    _guarded(
                        lambda n=n, nm=name: _lebesgue_cell(
                            run, nm, n, cfg.basis, cfg.refine
                        )
                    )
                    for n in degrees
                ],
            )
            for name in LEBESGUE_DOMAINS
        ]
        return "lebesgue constants of extracted nodes by domain", rows
    if tid in TABLE_DOMAINS:
        name = TABLE_DOMAINS[tid]
        return (
            f"approximation errors on the {name} domain",
            _error_rows(run, name, degrees, with_am=False),
        )
    raise ValueError(f"unknown table id {tid}; choose 1..9")


def cmd_table(cfg: RunConfig) -> int:
    title, rows = build_table(cfg)
    print(render_table(f"table {cfg.table_id}: {title}", cfg.degrees, rows))
    write_json(
        cfg.path(".json"),
        {
            "command": "table",
            "table": cfg.table_id,
            "title": title,
            "degrees": list(cfg.degrees),
            "rows": [
                {"label": label, "kind": kind, "values": list(vals)}
                for label, kind, vals in rows
            ],
        },
    )
    return EXIT_OK


COMMANDS = {
    "mesh": cmd_mesh,
    "am": cmd_mesh,
    "afp": cmd_afp,
    "leb": cmd_leb,
    "approx": cmd_approx,
    "table": cmd_table,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fekmesh",
        description="meshes, near-optimal interpolation nodes, and polynomial "
        "fitting on plane domains",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument(
            "--domain",
            default="disk",
            help=f"builtin name ({', '.join(BUILTIN_DOMAIN_NAMES)}), inline JSON, "
            "or a JSON file path",
        )
        p.add_argument("--n", type=int, required=True, help="polynomial degree")
        p.add_argument("--out", help="output base name (default <command>-<domain>-n<n>)")
        p.add_argument("--svg", action="store_true", help="also write an SVG scatter plot")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    def basis_opts(p):
        p.add_argument("--basis", choices=FAMILIES, default="cheb")
        p.add_argument("--refine", type=int, default=2, help="basis refinement rounds")

    p = sub.add_parser("mesh", help="build the degree-n mesh")
    common(p)
    p.add_argument("--am", action="store_true", help="build the dense uniform grid instead")
    p.add_argument(
        "--decomposition",
        choices=["auto", "triangles", "trapezoids"],
        default="auto",
        help="how to split polygon domains",
    )
    p.add_argument("--am-cap", dest="am_cap", type=float, default=DEFAULT_AM_CAP)

    p = sub.add_parser("am", help="build the dense uniform comparison grid")
    common(p)
    p.add_argument("--am-cap", dest="am_cap", type=float, default=DEFAULT_AM_CAP)

    p = sub.add_parser("afp", help="extract near-optimal interpolation nodes")
    common(p)
    basis_opts(p)
    p.add_argument("--weights", action="store_true", help="also compute cubature weights")

    p = sub.add_parser("leb", help="lebesgue constant of the extracted nodes")
    common(p)
    basis_opts(p)
    p.add_argument("--control-factor", dest="control_factor", type=int, default=4)

    p = sub.add_parser("approx", help="fit a benchmark function and report the error")
    common(p)
    basis_opts(p)
    p.add_argument("--f", type=int, choices=(1, 2, 3), default=1, help="test function id")
    p.add_argument(
        "--method",
        choices=["ls-wam", "ls-am", "interp-afp"],
        default="ls-wam",
    )
    p.add_argument("--control-factor", dest="control_factor", type=int, default=4)
    p.add_argument("--am-cap", dest="am_cap", type=float, default=DEFAULT_AM_CAP)

    p = sub.add_parser("table", help="reproduce a benchmark table")
    p.add_argument("--id", type=int, required=True, choices=range(1, 10))
    p.add_argument("--degrees", default="5,10,15,20,25,30", help="comma-separated degrees")
    p.add_argument("--basis", choices=FAMILIES, default="cheb")
    p.add_argument("--refine", type=int, default=2)
    p.add_argument("--control-factor", dest="control_factor", type=int, default=4)
    p.add_argument("--am-cap", dest="am_cap", type=float, default=DEFAULT_AM_CAP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output base name (default table-<id>)")

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (ValueError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RankDeficiencyError, MeshTooLargeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
