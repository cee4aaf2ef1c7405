"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 computation rejected (degree cap,
invalid config, failed validation or oracle mismatch), 3 negativity witness.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import itertools
import json
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigInvalid, DegreeCapExceeded, GridTooCoarse, SingularMatrix, TomoError
from .fock import QuadratureGrid, quadrature_table, tomogram_from_fock
from .gaussian import load_state, validate
from .positivity import ScanSpec, gaussian_positivity_report, wigner_admissibility_check
from .reconstruction import (
    GaussianTomogramSource,
    ReconstructionConfig,
    frobenius,
    polar_grid,
    reconstruct_density,
    reference_for_state,
)
from .tomogram import build_kernel, tomogram_table

EXIT_OK, EXIT_INPUT, EXIT_REJECTED, EXIT_WITNESS = 0, 1, 2, 3
SIG_DIGITS = 12


class InputError(Exception):
    pass


def fmt(x):
    """Fixed 12-significant-digit text for a real number."""
    x = float(x)
    if x == 0:
        x = 0.0  # drop the sign of -0.0
    return f"{x:.{SIG_DIGITS}g}"


def rounded(obj):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, complex):
        return [float(fmt(obj.real)), float(fmt(obj.imag))]
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return rounded(obj.tolist())
    return obj


def dump_json(obj):
    return json.dumps(rounded(obj), indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def thread_count():
    raw = os.environ.get("TOMO_THREADS", "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            raise InputError(f"TOMO_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def ordered_map(fn, items):
    """Parallel map that keeps input order (deterministic output)."""
    items = list(items)
    workers = min(thread_count(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_complex(text):
    text = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(text)
    except ValueError:
        raise InputError(f"cannot parse complex number {text!r}") from None


def parse_int_set(text):
    """``"0-3"``, ``"0..3"``, ``"2"`` or ``"0,1,5"`` -> sorted list of ints."""
    out = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        sep = ".." if ".." in part else ("-" if "-" in part[1:] else None)
        try:
            if sep:
                lo, hi = part.split(sep, 1)
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise InputError(f"empty range {part!r}")
                out.update(range(lo, hi + 1))
            else:
                out.add(int(part))
        except ValueError:
            raise InputError(f"cannot parse photon numbers {part!r}") from None
    if not out or min(out) < 0:
        raise InputError(f"photon numbers must be nonnegative integers: {text!r}")
    return sorted(out)


def parse_n(text, modes):
    specs = text.split(";")
    if len(specs) == 1:
        specs = specs * modes
    if len(specs) != modes:
        raise InputError(f"--n needs {modes} ';'-separated specs, got {len(specs)}")
    return [parse_int_set(s) for s in specs]


def parse_alpha(text, modes):
    parts = text.split(";")
    if len(parts) == 1:
        parts = parts * modes
    if len(parts) != modes:
        raise InputError(f"--alpha needs {modes} ';'-separated values, got {len(parts)}")
    return tuple(parse_complex(p) for p in parts)


def read_state(path):
    try:
        return load_state(path)
    except FileNotFoundError:
        raise InputError(f"cannot read state file {path}") from None
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None


def alpha_points(args, modes):
    if getattr(args, "alpha_grid", None):
        try:
            box, res = args.alpha_grid.split(":")
            spec = ScanSpec(alpha_box=float(box), resolution=int(res))
        except ValueError:
            raise InputError("--alpha-grid expects BOX:RESOLUTION") from None
        return [tuple(a) for a in spec.alphas(modes)]
    if getattr(args, "polar_grid", None):
        if modes != 1:
            raise InputError("--polar-grid is for one-mode states")
        cfg = polar_config(args.polar_grid)
        nodes, _ = polar_grid(cfg["centre"], cfg["radius"], cfg["radial"], cfg["angular"])
        return [(complex(a),) for a in nodes]
    raw = args.alpha or ["0"]
    return [parse_alpha(a, modes) for a in raw]


def polar_config(text):
    """``RADIUS,RADIAL,ANGULAR[,CENTRE]`` for the reconstruction grid."""
    parts = text.split(",")
    if len(parts) not in (3, 4):
        raise InputError("--polar-grid expects RADIUS,RADIAL,ANGULAR[,CENTRE]")
    try:
        cfg = {"radius": float(parts[0]), "radial": int(parts[1]), "angular": int(parts[2])}
    except ValueError:
        raise InputError("--polar-grid expects RADIUS,RADIAL,ANGULAR[,CENTRE]") from None
    cfg["centre"] = parse_complex(parts[3]) if len(parts) == 4 else 0j
    return cfg


# ---------------------------------------------------------------------------
# output


def manifest(command, params, started, warns):
    return {
        "command": command,
        "parameters": params,
        "tool": "pntomo",
        "version": __version__,
        "threads": thread_count(),
        "wall_time_s": round(time.perf_counter() - started, 6),
        "warnings": sorted(set(warns)),
    }


def emit(text, args, man):
    """Write payload to ``-o`` (plus a sidecar manifest) or to stdout."""
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        Path(str(out) + ".manifest.json").write_text(dump_json(man), encoding="utf-8")
    else:
        sys.stdout.write(text)
    if getattr(args, "manifest", None):
        Path(args.manifest).write_text(dump_json(man), encoding="utf-8")


def table_text(header, rows, fmt_name):
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
        return buf.getvalue()
    return dump_json({"columns": header, "rows": [list(r) for r in rows]})


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, started, warns):
    state = read_state(args.state)
    report = validate(state)
    params = {"state": str(args.state)}
    emit(dump_json(report.to_dict()), args, manifest("validate", params, started, warns))
    return EXIT_OK if report.verdict == "Valid" else EXIT_REJECTED


def _alpha_columns(modes):
    if modes == 1:
        return ["n"], ["re_alpha", "im_alpha"]
    ns = [f"n{k + 1}" for k in range(modes)]
    al = [f"re_alpha{k + 1}" for k in range(modes)] + [f"im_alpha{k + 1}" for k in range(modes)]
    return ns, al


def _oracle_values(state, alpha, n_sets, oracle, cutoff):
    n_box = tuple(max(s) for s in n_sets)
    if oracle == "quadrature":
        fine, _ = quadrature_table(state, alpha, n_box, grid=QuadratureGrid.for_modes(state.modes))
        return fine
    # fock
    rho = reference_for_state(state, cutoff)
    out = np.zeros(tuple(k + 1 for k in n_box))
    for idx in np.ndindex(*out.shape):
        out[idx] = tomogram_from_fock(rho, idx, alpha)
    return out


def cmd_tomogram(args, started, warns):
    state = read_state(args.state)
    N = state.modes
    n_sets = parse_n(args.n, N)
    alphas = alpha_points(args, N)
    n_box = tuple(max(s) for s in n_sets)
    if args.oracle != "none" and N > 2:
        raise InputError("oracles support at most two modes")
    values = tomogram_table(state, np.array(alphas), n_box, cap=args.degree_cap)
    if args.oracle != "none":
        oracle = ordered_map(
            lambda a: _oracle_values(state, a, n_sets, args.oracle, args.fock_cutoff), alphas
        )
    ncols, acols = _alpha_columns(N)
    header = ncols + acols + ["omega"] + (["omega_oracle", "abs_diff"] if args.oracle != "none" else [])
    rows = []
    for b, a in enumerate(alphas):
        for n in _product(n_sets):
            val = float(values[n + (b,)])
            row = list(n) + [float(x.real) for x in a] + [float(x.imag) for x in a] + [val]
            if args.oracle != "none":
                ref = float(oracle[b][n])
                row += [ref, abs(val - ref)]
            rows.append(row)
    params = {
        "state": str(args.state),
        "n": [list(s) for s in n_sets],
        "alpha": [[[x.real, x.imag] for x in a] for a in alphas],
        "format": args.format,
        "oracle": args.oracle,
        "degree_cap": args.degree_cap,
    }
    emit(table_text(header, rows, args.format), args, manifest("tomogram", params, started, warns))
    return EXIT_OK


def _product(n_sets):
    return [tuple(n) for n in itertools.product(*n_sets)]


def cmd_p0(args, started, warns):
    state = read_state(args.state)
    alphas = alpha_points(args, state.modes)
    kernel = build_kernel(state, np.array(alphas))
    _, acols = _alpha_columns(state.modes)
    rows = [
        [float(x.real) for x in a] + [float(x.imag) for x in a] + [float(p)]
        for a, p in zip(alphas, np.atleast_1d(kernel.p0))
    ]
    params = {"state": str(args.state), "alpha": [[[x.real, x.imag] for x in a] for a in alphas]}
    emit(table_text(acols + ["p0"], rows, args.format), args, manifest("p0", params, started, warns))
    return EXIT_OK


class CsvTomogramSource:
    """Tomogram values read from a one-mode CSV written by ``pntomo tomogram``."""

    modes = 1

    def __init__(self, path):
        self.values = {}
        try:
            with open(path, encoding="utf-8", newline="") as fh:
                reader = csv.DictReader(fh)
                need = {"n", "re_alpha", "im_alpha", "omega"}
                if not reader.fieldnames or not need <= set(reader.fieldnames):
                    raise InputError(f"{path}: CSV needs columns {sorted(need)}")
                for row in reader:
                    key = (int(row["n"]), fmt(row["re_alpha"]), fmt(row["im_alpha"]))
                    self.values[key] = float(row["omega"])
        except FileNotFoundError:
            raise InputError(f"cannot read tomogram file {path}") from None
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from None

    def __call__(self, n, alpha):
        n = int(np.atleast_1d(n)[0])
        a = complex(np.atleast_1d(alpha)[0])
        key = (n, fmt(a.real), fmt(a.imag))
        try:
            return self.values[key]
        except KeyError:
            raise ConfigInvalid(
                f"tomogram CSV has no value for n={n}, alpha=({fmt(a.real)}, {fmt(a.imag)})"
            ) from None


def cmd_reconstruct(args, started, warns):
    if bool(args.state) == bool(args.tomogram_csv):
        raise InputError("give exactly one of STATE or --tomogram-csv")
    cfg_kwargs = dict(
        s=(args.s,),
        cutoff=args.cutoff,
        radial_nodes=args.radial,
        angular_nodes=args.angular,
        max_radius=args.radius,
        n_max=args.n_max,
    )
    state = None
    if args.state:
        state = read_state(args.state)
        cfg = ReconstructionConfig(**cfg_kwargs).for_state(state)
        source = GaussianTomogramSource(state)
    else:
        centre = (parse_complex(args.centre),) if args.centre else (0j,)
        cfg = ReconstructionConfig(centre=centre, **cfg_kwargs)
        source = CsvTomogramSource(args.tomogram_csv)
    result = reconstruct_density(source, cfg)
    rho = result.rho
    payload = {
        "modes": rho.modes,
        "cutoff": rho.cutoff,
        "basis": "lexicographic photon numbers",
        "density_matrix": [[[z.real, z.imag] for z in row] for row in rho.matrix],
        "trace": result.diagnostics["trace"],
        "min_eigenvalue": result.diagnostics["min_eigenvalue"],
        "hermiticity_residual": result.diagnostics["hermiticity_residual"],
    }
    if state is not None:
        try:
            ref = reference_for_state(state, cfg.cutoff)
            payload["frobenius_to_reference"] = frobenius(rho, ref)
        except TomoError:
            payload["frobenius_to_reference"] = None
    params = {
        "input": str(args.state or args.tomogram_csv),
        "config": cfg.to_dict(),
    }
    man = manifest("reconstruct", params, started, warns)
    emit(dump_json(payload), args, man)
    return EXIT_OK


def cmd_positivity(args, started, warns):
    state = read_state(args.state)
    spec = ScanSpec(n_max=args.n_max, alpha_box=args.alpha_box, resolution=args.resolution)
    if args.method == "quadrature":
        report = wigner_admissibility_check(state, args.n_max, spec, args.tolerance)
        report.uncertainty_checks = validate(state)
    else:
        report = gaussian_positivity_report(state, spec, args.tolerance)
    params = {"state": str(args.state), "scan": spec.to_dict(), "method": args.method,
              "tolerance": args.tolerance}
    emit(dump_json(report.to_dict()), args, manifest("positivity", params, started, warns))
    return EXIT_WITNESS if report.negative_witnesses else EXIT_OK


def cmd_oracle_compare(args, started, warns):
    state = read_state(args.state)
    if state.modes > 2:
        raise InputError("oracle comparison supports at most two modes")
    alphas = alpha_points(args, state.modes)
    n_box = (args.n_max,) * state.modes
    values = tomogram_table(state, np.array(alphas), n_box, cap=None)
    quad = ordered_map(lambda a: quadrature_table(state, a, n_box)[0], alphas)
    try:
        rho = reference_for_state(state, args.fock_cutoff)
    except TomoError:
        rho = None
    rows, worst = [], 0.0
    for b, a in enumerate(alphas):
        for n in np.ndindex(*values.shape[:-1]):
            val = float(values[n + (b,)])
            q = float(quad[b][n])
            entry = {"n": list(n), "alpha": [[x.real, x.imag] for x in a], "hermite": val,
                     "quadrature": q, "abs_diff_quadrature": abs(val - q)}
            worst = max(worst, abs(val - q))
            if rho is not None:
                f = tomogram_from_fock(rho, n, a)
                entry["fock"] = f
                entry["abs_diff_fock"] = abs(val - f)
                worst = max(worst, abs(val - f))
            rows.append(entry)
    ok = worst <= args.tolerance
    payload = {"max_abs_diff": worst, "tolerance": args.tolerance, "agree": ok, "rows": rows}
    params = {"state": str(args.state), "n_max": args.n_max,
              "alpha": [[[x.real, x.imag] for x in a] for a in alphas],
              "fock_cutoff": args.fock_cutoff, "tolerance": args.tolerance}
    emit(dump_json(payload), args, manifest("oracle-compare", params, started, warns))
    return EXIT_OK if ok else EXIT_REJECTED


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="pntomo", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pntomo {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_opt=True):
        sp.add_argument("-o", "--output", help="write result here (plus OUTPUT.manifest.json)")
        sp.add_argument("--manifest", help="also write the run manifest to this path")
        if fmt_opt:
            sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = sub.add_parser("validate", help="uncertainty-relation checks")
    sp.add_argument("state")
    common(sp, fmt_opt=False)
    sp.set_defaults(func=cmd_validate)

    def alpha_opts(sp):
        sp.add_argument("--alpha", action="append",
                        help="displacement, e.g. 0.5+0.3j; modes separated by ';' (repeatable)")
        sp.add_argument("--alpha-grid", help="square grid BOX:RESOLUTION per mode")

    sp = sub.add_parser("tomogram", help="photon-number tomogram values")
    sp.add_argument("state")
    sp.add_argument("--n", default="0", help="photon numbers, e.g. 0-3 or 0,2,5; modes separated by ';'")
    alpha_opts(sp)
    sp.add_argument("--polar-grid", help="reconstruction grid RADIUS,RADIAL,ANGULAR[,CENTRE]")
    sp.add_argument("--oracle", choices=["none", "quadrature", "fock"], default="none")
    sp.add_argument("--fock-cutoff", type=int, default=40)
    sp.add_argument("--degree-cap", type=int, default=64)
    common(sp)
    sp.set_defaults(func=cmd_tomogram)

    sp = sub.add_parser("p0", help="vacuum probability P0(alpha)")
    sp.add_argument("state")
    alpha_opts(sp)
    common(sp)
    sp.set_defaults(func=cmd_p0)

    sp = sub.add_parser("reconstruct", help="density matrix from the tomogram")
    sp.add_argument("state", nargs="?")
    sp.add_argument("--tomogram-csv", help="one-mode CSV from 'tomogram --polar-grid'")
    sp.add_argument("--s", type=float, default=-0.5, help="ordering parameter in (-1, 0]")
    sp.add_argument("--cutoff", type=int, default=12)
    sp.add_argument("--radial", type=int, default=40)
    sp.add_argument("--angular", type=int, default=40)
    sp.add_argument("--radius", type=float, default=4.0)
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--centre", help="grid centre for --tomogram-csv input")
    common(sp, fmt_opt=False)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("positivity", help="search for negative tomogram values")
    sp.add_argument("state")
    sp.add_argument("--n-max", type=int, default=15)
    sp.add_argument("--alpha-box", type=float, default=3.0)
    sp.add_argument("--resolution", type=int, default=9)
    sp.add_argument("--tolerance", type=float, default=1e-10)
    sp.add_argument("--method", choices=["hermite", "quadrature"], default="hermite")
    common(sp, fmt_opt=False)
    sp.set_defaults(func=cmd_positivity)

    sp = sub.add_parser("oracle-compare", help="closed form against quadrature and Fock oracles")
    sp.add_argument("state")
    sp.add_argument("--n-max", type=int, default=5)
    alpha_opts(sp)
    sp.add_argument("--fock-cutoff", type=int, default=40)
    sp.add_argument("--tolerance", type=float, default=1e-6)
    common(sp, fmt_opt=False)
    sp.set_defaults(func=cmd_oracle_compare)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        warns = _WarningList(caught)
        try:
            return args.func(args, started, warns)
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        except DegreeCapExceeded as exc:
            print(f"error: degree cap exceeded for n = {exc.index}: {exc}", file=sys.stderr)
            return EXIT_REJECTED
        except (ConfigInvalid, GridTooCoarse, SingularMatrix, TomoError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_REJECTED


class _WarningList:
    """Iterable view of recorded warnings as text."""

    def __init__(self, caught):
        self._caught = caught

    def __iter__(self):
        return iter(f"{w.category.__name__}: {w.message}" for w in self._caught)


if __name__ == "__main__":
    sys.exit(main())
