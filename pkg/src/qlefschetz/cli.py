"""Command-line front end.

Human-readable reports go to stdout, logs to stderr, and the optional
``--out`` artifact is canonical (JSON, or the series text format for
``modify``).  Exit codes: 0 ok, 1 exact-comparison failure, 2 usage error,
3 oracle gap / unavailable mode.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .coh_ring import RingElement, frac_str, restriction_hom
from .errors import ModeUnavailable, OracleGap, QLError
from .formal_series import apply_hom, dump_series, load_series
from .io_util import dump_json, read_text
from .localization import dump_graphs, enumerate_meta_graphs, recursion_report
from .orbifold_groups import (EdgeGroupData, characters, edge_aut_bruteforce, edge_aut_order, group_catalog,
                              kernel_order, load_character, load_group_file, sweep)
from .quantum_lefschetz import (AdmissibleContext, check_main_theorem, extract_instanton_numbers,
                                SmallJOracle, hypergeometric_modification, mirror_normalize,
                                validate_admissible_series)
from .targets import TargetModel, load_target_config, small_J_series

log = logging.getLogger("qlefschetz")

COMMANDS = ("modify", "check-lefschetz", "mirror", "graphs", "groups", "validate")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_GAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    ambient: str | None = None
    sub: str | None = None
    series: str | None = None
    out: str | None = None
    order: Fraction = Fraction(4)
    b_max: int = 3
    beta: tuple | None = None
    k: tuple | None = None
    sector: str | None = None
    b: int = 0
    mode: str = "structural"
    stable_only: bool = False
    kappa: bool = False
    d_max: int = 3
    group: str | None = None
    group_file: str | None = None
    character_file: str | None = None
    element: int | None = None
    delta: Fraction | None = None
    max_delta: Fraction = Fraction(4)
    extra: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_tuple(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qlefschetz", description="Exact quantum Lefschetz computations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    def common(sp, target=True):
        if target:
            sp.add_argument("--target", required=True)
        sp.add_argument("--out")
        sp.add_argument("--order", type=_fraction, default=Fraction(4))

    sp = sub.add_parser("modify", help="emit the hypergeometrically modified J-function")
    common(sp)
    sp.add_argument("--kappa", action="store_true", help="keep the kappa twist")

    sp = sub.add_parser("check-lefschetz", help="compare restricted modified J with the sub-target J")
    sp.add_argument("--ambient", required=True)
    sp.add_argument("--sub")
    sp.add_argument("--out")
    sp.add_argument("--order", type=_fraction, default=Fraction(4))
    sp.add_argument("--b-max", type=int, default=3)

    sp = sub.add_parser("mirror", help="I0, mirror map and instanton numbers")
    common(sp)
    sp.add_argument("--d-max", type=int, default=3)

    sp = sub.add_parser("graphs", help="meta graph enumeration and recursion dump")
    common(sp)
    sp.add_argument("--series", help="input mu for numeric modes (default 0)")
    sp.add_argument("--beta", type=_int_tuple, required=True)
    sp.add_argument("--k", type=_int_tuple)
    sp.add_argument("--sector")
    sp.add_argument("--b", type=int, default=0)
    sp.add_argument("--mode", choices=("structural", "numeric", "numeric-full"), default="structural")
    sp.add_argument("--stable-only", action="store_true")

    sp = sub.add_parser("groups", help="edge automorphism orders")
    sp.add_argument("--out")
    sp.add_argument("--group", help="catalog name, e.g. Z2, D3, S4, Q8")
    sp.add_argument("--group-file")
    sp.add_argument("--character-file")
    sp.add_argument("--element", type=int)
    sp.add_argument("--delta", type=_fraction)
    sp.add_argument("--max-delta", type=_fraction, default=Fraction(4))

    sp = sub.add_parser("validate", help="admissible-series report")
    common(sp)
    sp.add_argument("--series")
    return p


def parse_args(argv) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    if ns.command is None:
        raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
    cfg = RunConfig(ns.command)
    for name in ("target", "ambient", "sub", "series", "out", "order", "b_max", "beta", "k", "sector", "b",
                 "mode", "stable_only", "kappa", "d_max", "group", "group_file", "character_file",
                 "element", "delta", "max_delta"):
        if hasattr(ns, name) and getattr(ns, name) is not None:
            setattr(cfg, name, getattr(ns, name))
    cfg.extra["verbose"] = ns.verbose
    if cfg.order <= 0:
        raise UsageError("--order must be positive")
    if cfg.b_max < 0 or cfg.b < 0 or cfg.d_max < 1:
        raise UsageError("--b-max and --b must be >= 0, --d-max >= 1")
    if cfg.command == "groups":
        if cfg.group is not None and cfg.group_file is not None:
            raise UsageError("give either --group or --group-file, not both")
        if (cfg.element is None) != (cfg.delta is None):
            raise UsageError("--element and --delta go together")
        if cfg.element is not None and cfg.group is None and cfg.group_file is None:
            raise UsageError("--element needs --group or --group-file")
    return cfg


# ---------------------------------------------------------------------------
# helpers


def context_for(target: TargetModel) -> AdmissibleContext:
    subset = target.meta.get("complete_intersection") or (target.positive_bundle,)
    return AdmissibleContext(target, target.meta.get("spec"), subset)


def _hom_for(ambient: TargetModel, sub: TargetModel):
    images = ambient.meta.get("restriction")
    if not images:
        raise QLError("VALIDATION_ERROR", "ambient config needs a 'restriction' map")
    return restriction_hom(ambient.ring, sub.ring, {k: sub.ring.element(v) for k, v in images.items()})


def _emit(cfg: RunConfig, lines, data, raw: str | None = None):
    for line in lines:
        print(line)
    if cfg.out:
        Path(cfg.out).write_text(raw if raw is not None else dump_json(data))
        log.info("wrote %s", cfg.out)


def _modified(ctx: AdmissibleContext, order, kappa=False):
    J = small_J_series(ctx.target, order, spec=ctx.spec)
    return hypergeometric_modification(ctx, J, twist_kappa=kappa)


# ---------------------------------------------------------------------------
# commands


def cmd_modify(cfg: RunConfig) -> int:
    target = load_target_config(cfg.target)
    ctx = context_for(target)
    Jtw = _modified(ctx, cfg.order, cfg.kappa)
    text = dump_series(Jtw)
    _emit(cfg, [f"modified J of {target.name}: {len(Jtw.terms)} coefficients to order {frac_str(cfg.order)}"],
          None, raw=text)
    if not cfg.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    target = load_target_config(cfg.target)
    ctx = context_for(target)
    paths = [cfg.series] if cfg.series else target.meta.get("admissible_inputs", [])
    if not paths:
        raise UsageError("validate needs --series or admissible_inputs in the target config")
    reports, ok = [], True
    lines = []
    for p in paths:
        s = load_series(read_text(p), ring=target.ring)
        rep = validate_admissible_series(ctx, s)
        ok &= rep.ok
        lines.append(f"{p}: {'admissible' if rep.ok else 'NOT admissible'}")
        lines += ["  " + x for x in rep.lines()]
        reports.append({"series": str(p), "report": rep.to_dict()})
    _emit(cfg, lines, {"reports": reports, "ok": ok})
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_check(cfg: RunConfig) -> int:
    ambient = load_target_config(cfg.ambient)
    sub_path = cfg.sub or ambient.meta.get("sub")
    if not sub_path:
        raise UsageError("check-lefschetz needs --sub or 'sub' in the ambient config")
    sub = load_target_config(sub_path)
    ctx = context_for(ambient)
    report = check_main_theorem(ctx, sub, _hom_for(ambient, sub), order=cfg.order, b_max=cfg.b_max)
    _emit(cfg, report.lines(), report.to_dict())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_mirror(cfg: RunConfig) -> int:
    ambient = load_target_config(cfg.target)
    sub_path = ambient.meta.get("sub")
    if not sub_path:
        raise UsageError("mirror needs 'sub' and 'restriction' in the target config")
    sub = load_target_config(sub_path)
    ctx = context_for(ambient)
    order = max(cfg.order, Fraction(cfg.d_max))
    restricted = apply_hom(_modified(ctx, order), _hom_for(ambient, sub))
    md = mirror_normalize(restricted, sub.divisor_pairing)
    (label,) = sub.divisor_pairing.keys() if len(sub.divisor_pairing) == 1 else (None,)
    if label is None:
        raise QLError("UNSUPPORTED_TARGET", "instanton extraction needs exactly one divisor class")
    table = extract_instanton_numbers(md.normalized, label, cfg.d_max)
    data = {"mirror": md.to_dict(), "instantons": table.to_dict()}
    lines = [f"I0: {', '.join(f'{k}: {v}' for k, v in sorted(data['mirror']['I0'].items()))}",
             f"mirror map: {data['mirror']['mirror_map']}"]
    lines += [f"n_{d} = {frac_str(n)}" for d, n in sorted(table.n.items())]
    lines.append(f"dilaton consistent: {table.dilaton_consistent}")
    _emit(cfg, lines, data)
    return EXIT_OK if table.dilaton_consistent else EXIT_MISMATCH


def cmd_graphs(cfg: RunConfig) -> int:
    target = load_target_config(cfg.target)
    ctx = context_for(target)
    k = cfg.k if cfg.k is not None else ctx.spec.zero()
    sectors = [cfg.sector] if cfg.sector else list(target.sector_table.sectors)
    data, lines = {"graphs": [], "recursion": []}, []
    for c in sectors:
        graphs = enumerate_meta_graphs(ctx, cfg.beta, k, c, stable_only=cfg.stable_only)
        n_stable = sum(g.stable for g in graphs)
        lines.append(f"beta={list(cfg.beta)} k={list(k)} c={c}: {len(graphs)} graphs ({n_stable} stable)")
        lines += dump_graphs(graphs).splitlines()
        data["graphs"] += [g.to_dict() for g in graphs]
        if graphs:
            oracle = mu = None
            if cfg.mode != "structural":
                if target.small_J is None:
                    raise ModeUnavailable("oracle", f"target {target.name} has no small J-function")
                oracle = SmallJOracle(target)
                J = small_J_series(target, cfg.order, spec=ctx.spec)
                mu = load_series(read_text(cfg.series), ring=target.ring) if cfg.series else J.like({}, J.window)
            rep = recursion_report(ctx, cfg.beta, k, c, cfg.b, mode=cfg.mode, mu=mu, oracle=oracle)
            lines += rep.lines()
            data["recursion"].append(rep.to_dict())
    _emit(cfg, lines, data)
    bad = [r for r in data["recursion"] if r["status"] == "mismatch"]
    return EXIT_MISMATCH if bad else EXIT_OK


def _catalog_group(name: str):
    for G in group_catalog():
        if G.name == name:
            return G
    raise UsageError(f"unknown catalog group {name!r}")


def cmd_groups(cfg: RunConfig) -> int:
    if cfg.group is None and cfg.group_file is None:
        rows = sweep(max_delta=cfg.max_delta)
        ok = all(r["formula"] == r["bruteforce"] and r["exact_sequence"] for r in rows)
        per_group: dict = {}
        for r in rows:
            per_group[r["group"]] = per_group.get(r["group"], 0) + 1
        lines = [f"{g}: {n} edge data checked" for g, n in per_group.items()]
        lines.append(f"{len(rows)} cases, formula = brute force: {ok}")
        _emit(cfg, lines, {"rows": rows, "ok": ok})
        return EXIT_OK if ok else EXIT_MISMATCH
    G = _catalog_group(cfg.group) if cfg.group else load_group_file(cfg.group_file)
    chis = [load_character(read_text(cfg.character_file), G)] if cfg.character_file else characters(G)
    rows = sweep([G], max_delta=cfg.max_delta) if cfg.element is None else []
    if cfg.element is not None:
        if not 0 <= cfg.element < G.order:
            raise UsageError("--element out of range")
        for rho in chis:
            d = EdgeGroupData(G, rho, cfg.element, cfg.delta)
            try:
                d.check()
            except QLError:
                continue
            rows.append({"group": G.name, "g": cfg.element, "rho": [frac_str(v) for v in rho.values],
                         "delta": frac_str(d.delta), "formula": edge_aut_order(d),
                         "bruteforce": edge_aut_bruteforce(d), "kernel": kernel_order(d.a, d.delta)})
        if not rows:
            raise QLError("INVALID_EDGE_DATA", f"no character satisfies the age congruence for delta={frac_str(cfg.delta)}")
    elif cfg.character_file:
        keep = [frac_str(v) for v in chis[0].values]
        rows = [r for r in rows if r["rho"] == keep]
    ok = all(r["formula"] == r["bruteforce"] for r in rows)
    lines = [f"{r['group']} g={r['g']} rho=[{', '.join(r['rho'])}] delta={r['delta']}: |Aut|={r['formula']} "
             f"brute={r['bruteforce']} kernel={r['kernel']}" for r in rows]
    _emit(cfg, lines, {"rows": rows, "ok": ok})
    return EXIT_OK if ok else EXIT_MISMATCH


HANDLERS = {"modify": cmd_modify, "check-lefschetz": cmd_check, "mirror": cmd_mirror, "graphs": cmd_graphs,
            "groups": cmd_groups, "validate": cmd_validate}


def run(cfg: RunConfig) -> int:
    try:
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OracleGap, ModeUnavailable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GAP
    except QLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if cfg.extra.get("verbose") else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
