"""Command-line front end: ``ghz-ent {classify,ree,genuine,curve,sweep,audit}``.

Exit codes: 0 fully separable (or success), 10 entangled but biseparable,
20 genuinely entangled, 2 input error, 30 solver failure, 1 audit mismatch.
"""

from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import math
import sys
import time

import numpy as np

from .errors import ConvergenceFailure, GhzError, PreconditionViolated
from .ghz_core import GhzDiagonalState, ghz_basis_state, parse_state_json, state_to_dict
from .noise_models import PauliChannelSpec, apply_pauli_channel
from .ree import (
    closed_form_ree,
    genuine_ree,
    genuine_threshold,
    ghz_noise_family,
    is_biseparable,
    ree,
    ree_numeric,
)
from .separability import EPS_CRIT, is_fully_separable, symmetric_border_curve

EXIT_SEPARABLE = 0
EXIT_ENTANGLED = 10
EXIT_GENUINE = 20
EXIT_INPUT = 2
EXIT_CONVERGENCE = 30
EXIT_AUDIT = 1
AUDIT_TOL = 1e-6


def _sig(x: float) -> float:
    """Round to 12 significant digits."""
    return float(f"{x:.12g}")


def _clean(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return _sig(x) if math.isfinite(x) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    return obj


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _write_rows(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])


def _emit(args, record=None, header=None, rows=None):
    """Write a JSON record, or CSV/JSON for tabular output, to --out or stdout."""
    buf = io.StringIO()
    if rows is not None:
        if args.format == "json":
            json.dump(_clean([dict(zip(header, r)) for r in rows]), buf, indent=2)
            buf.write("\n")
        else:
            _write_rows(buf, header, rows)
    elif args.format == "csv":
        flat = {k: v for k, v in record.items() if not isinstance(v, (dict, list))}
        _write_rows(buf, list(flat), [list(flat.values())])
    else:
        json.dump(_clean(record), buf, indent=2)
        buf.write("\n")
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_state(args) -> GhzDiagonalState:
    path = getattr(args, "input", None)
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_state_json(text)


# -- classify -------------------------------------------------------------------------


def classify(state: GhzDiagonalState, eps_crit: float = EPS_CRIT) -> tuple[dict, int]:
    """Three-way classification with margins; returns (record, exit code)."""
    t0 = time.perf_counter()
    rep = is_fully_separable(state, eps_crit)
    max_p = state.max_p
    if rep.fully_separable:
        label = "boundary_separable" if abs(rep.margin) <= eps_crit else "fully_separable"
        code = EXIT_SEPARABLE
    elif is_biseparable(state, eps_crit):
        label = "boundary_genuine" if abs(max_p - 0.5) <= eps_crit else "entangled_biseparable"
        code = EXIT_ENTANGLED
    else:
        label, code = "genuinely_entangled", EXIT_GENUINE
    record = dict(state_to_dict(state))
    record.update(
        {
            "class": label,
            "branch": rep.branch,
            "separability_margin": rep.margin,
            "lambda_minus": rep.lambda_minus,
            "kappa": rep.kappa,
            "mu": rep.mu,
            "ppt": rep.ppt,
            "max_p": max_p,
            "genuine_ree": genuine_ree(state, eps_crit),
        }
    )
    record["timing_s"] = time.perf_counter() - t0
    return record, code


def _ree_record(res) -> dict:
    out = {
        "E": res.E,
        "method": res.method,
        "gap": res.gap,
        "closest": state_to_dict(res.closest)["values"],
    }
    return out


def cmd_classify(args) -> int:
    state = _read_state(args)
    record, code = classify(state, args.eps_crit)
    if args.with_ree:
        res = ree(state, seed=args.seed)
        record["ree"] = res.E
        record["ree_method"] = res.method
    if args.audit:
        from . import audit

        mins = [audit.ppt_min_eigenvalue(state, cut) for cut in audit.Cut]
        record["audit_ppt_min_eigenvalues"] = mins
        # the closed-form PPT test is the conjunction over the three cuts
        if (min(mins) >= -1e-12) != record["ppt"] and abs(min(mins)) > 1e-9:
            print("audit: dense PPT disagrees with the closed-form test", file=sys.stderr)
            _emit(args, record)
            return EXIT_AUDIT
    _emit(args, record)
    return code


# -- ree --------------------------------------------------------------------------------


def cmd_ree(args) -> int:
    state = _read_state(args)
    t0 = time.perf_counter()
    res = ree(state, method=args.method, seed=args.seed)
    record = _ree_record(res)
    if args.audit and res.E > 0.0:
        try:
            closed = closed_form_ree(state)
        except PreconditionViolated as exc:
            closed = None
            record["closed_form"] = f"not applicable: {exc}"
        numeric = ree_numeric(state, seed=args.seed)
        record["numeric"] = _ree_record(numeric)
        if closed is not None:
            record["closed_form"] = _ree_record(closed)
            diff = abs(closed.E - numeric.E)
            record["audit_difference"] = diff
            if diff > AUDIT_TOL:
                record["timing_s"] = time.perf_counter() - t0
                _emit(args, record)
                print(f"audit: closed form and numeric REE differ by {diff:.3g}", file=sys.stderr)
                return EXIT_CONVERGENCE
    record["timing_s"] = time.perf_counter() - t0
    _emit(args, record)
    return 0


# -- genuine ------------------------------------------------------------------------------


def cmd_genuine(args) -> int:
    state = _read_state(args)
    record = {
        "max_p": state.max_p,
        "biseparable": is_biseparable(state, args.eps_crit),
        "E_genuine": genuine_ree(state, args.eps_crit),
    }
    _emit(args, record)
    return 0


# -- curve ---------------------------------------------------------------------------------


def cmd_curve(args) -> int:
    if args.samples < 2:
        raise GhzError("--samples must be at least 2")
    pts = symmetric_border_curve(args.samples)
    _emit(args, header=["a", "u", "v"], rows=[list(r) for r in pts])
    return 0


# -- sweep -----------------------------------------------------------------------------------


def _grid(args):
    if args.steps < 1:
        raise GhzError("--steps must be at least 1")
    if not (0.0 <= args.p_start <= 1.0 and 0.0 <= args.p_end <= 1.0):
        raise GhzError("--p-start and --p-end must lie in [0, 1]")
    if args.steps == 1:
        return [args.p_start]
    return list(np.linspace(args.p_start, args.p_end, args.steps))


def _state_row(p, state, args):
    record, _ = classify(state, args.eps_crit)
    row = [p, record["class"], record["max_p"]]
    if args.with_ree:
        row.append(ree(state, seed=args.seed).E)
    row.append(record["genuine_ree"])
    return row


def cmd_sweep(args) -> int:
    header = ["p", "class", "max_p"] + (["ree"] if args.with_ree else []) + ["genuine_ree"]
    rows = []
    if args.family == "ghz-noise":
        if args.n < 2:
            raise GhzError("--n must be at least 2")
        header.append("genuine_threshold")
        for p in _grid(args):
            pt = ghz_noise_family(args.n, p)
            if pt.state is not None:
                row = _state_row(p, pt.state, args)
            else:
                # only the genuine-entanglement boundary is available beyond three qubits
                label = "genuinely_entangled" if pt.genuinely_entangled else "biseparable"
                row = [p, label, pt.P] + ([None] if args.with_ree else []) + [pt.E_genuine]
            rows.append(row + [genuine_threshold(args.n)])
    else:
        if not args.spec:
            raise GhzError("--family pauli-channel needs --spec")
        with open(args.spec, encoding="utf-8") as fh:
            spec = PauliChannelSpec.from_json(fh.read())
        state = _read_state(args) if args.input else ghz_basis_state(1)
        ident = np.array(PauliChannelSpec.identity().qubits)
        for t in _grid(args):
            # channel strength t interpolates between the identity and the given channel
            mixed = PauliChannelSpec(tuple(map(tuple, (1 - t) * ident + t * np.array(spec.qubits))))
            rows.append(_state_row(t, apply_pauli_channel(state, mixed), args))
    _emit(args, header=header, rows=rows)
    return 0


# -- audit ----------------------------------------------------------------------------------


def run_audit(state: GhzDiagonalState, random_search: bool = False, seed: int = 0) -> dict:
    """Re-derive everything checkable about ``state`` from the explicit 8x8 matrix."""
    from . import audit
    from .ghz_core import (
        LOCAL_PAULI_PERMUTATIONS,
        PAIR_FLIP_GENERATORS,
        PAULI_SIGNS,
        to_density_entries,
    )
    from .separability import is_ppt

    checks = {}
    dense = audit.build_dense(state)
    eig = np.sort(np.linalg.eigvalsh(dense.matrix))
    err = float(np.abs(eig - np.sort(state.p)).max())
    checks["eigenvalues"] = {"ok": err <= 1e-10, "error": err}
    diag, off = dense.entries()
    rho = to_density_entries(state)
    err = float(max(np.abs(diag - rho.diag).max(), np.abs(off - rho.offdiag).max()))
    checks["density_entries"] = {"ok": err <= 1e-12, "error": err}
    checks["pauli_signs"] = {"ok": bool(np.allclose(audit.derive_pauli_signs(), PAULI_SIGNS, atol=1e-12))}
    checks["local_paulis"] = {"ok": audit.derive_local_permutations() == LOCAL_PAULI_PERMUTATIONS}
    flips = audit.derive_pair_flips()
    checks["pair_flips"] = {"ok": all(flips[q] == f for q, f in PAIR_FLIP_GENERATORS)}
    mins = [audit.ppt_min_eigenvalue(state, cut) for cut in audit.Cut]
    closed = is_ppt(state)
    near = abs(min(mins)) <= 1e-9
    checks["ppt_cuts"] = {
        "ok": (min(mins) >= -1e-12) == closed or near,
        "min_eigenvalues": mins,
        "closed_form": closed,
    }
    if random_search:
        E = ree(state, seed=seed).E
        bound = audit.random_search_ree(state, seed=seed)
        checks["random_search_ree"] = {"ok": bound >= E - 1e-9 and bound - E <= 1e-4,
                                       "ree": E, "random_search": bound}
    return {"ok": all(c["ok"] for c in checks.values()), "checks": checks}


def cmd_audit(args) -> int:
    state = _read_state(args)
    report = run_audit(state, random_search=args.random_search, seed=args.seed)
    _emit(args, report)
    return 0 if report["ok"] else EXIT_AUDIT


# -- parser -----------------------------------------------------------------------------------


def _global_flags(p, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--eps-crit", type=float, default=d(EPS_CRIT),
                   help="tolerance on separability and biseparability margins")
    p.add_argument("--seed", type=int, default=d(0), help="seed for random multistarts")
    p.add_argument("--audit", action="store_true", default=d(False),
                   help="cross-check results against independent solvers")
    p.add_argument("--format", choices=("json", "csv"), default=d(None), help="output format")
    p.add_argument("--out", default=d(None), help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghz-ent", description="Entanglement classification of three-qubit GHZ-diagonal states."
    )
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, state_input=True):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        if state_input:
            p.add_argument("--in", dest="input", default=None,
                           help="state JSON path ('-' or omitted: stdin)")
        p.set_defaults(func=func)
        return p

    p = add("classify", cmd_classify, "fully separable / biseparable / genuinely entangled")
    p.add_argument("--with-ree", action="store_true", help="also compute the REE")
    p = add("ree", cmd_ree, "relative entropy of entanglement")
    p.add_argument("--method", choices=("auto", "closed", "numeric"), default="auto")
    add("genuine", cmd_genuine, "genuine-entanglement REE")
    p = add("curve", cmd_curve, "border curve of the symmetric slice", state_input=False)
    p.add_argument("--samples", type=int, default=200)
    p = add("sweep", cmd_sweep, "classify a one-parameter family", state_input=False)
    p.add_argument("--family", choices=("ghz-noise", "pauli-channel"), required=True)
    p.add_argument("--n", type=int, default=3, help="number of qubits (ghz-noise)")
    p.add_argument("--p-start", type=float, default=0.0)
    p.add_argument("--p-end", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=21, help="number of rows")
    p.add_argument("--spec", help="Pauli channel JSON (pauli-channel)")
    p.add_argument("--in", dest="input", default=None,
                   help="initial state JSON for pauli-channel (default |GHZ_1>)")
    p.add_argument("--with-ree", action="store_true", help="add an REE column")
    p = add("audit", cmd_audit, "re-derive tables and verdicts from dense matrices")
    p.add_argument("--random-search", action="store_true",
                   help="also bound the REE by an independent random search (slow)")
    return parser


_TABULAR = {"curve", "sweep"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command in _TABULAR else "json"
    try:
        return args.func(args)
    except (GhzError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceFailure as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        if exc.residual is not None:
            print(f"residual: {exc.residual:.3g}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
