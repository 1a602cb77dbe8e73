"""Command-line entry point: ``b0kit <subcommand> ...``.

Exit status is 0 on success, 1 when a result contradicts the published
claims (or a cross-check disagrees), and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from . import families as fam
from .bogomolov import DEFAULT_B0_MAX_ORDER, Strategy, b0
from .certificate import Certificate, check_lemf, check_lemma21
from .homology import schur_multiplier
from .pcgroup import (
    DEFAULT_MAX_ORDER,
    PcPresentation,
    PresentationError,
    TooLargeToEnumerate,
    enforced_quotient,
    format_presentation,
    is_consistent,
    parse_presentation,
)

log = logging.getLogger("b0kit")

EXIT_OK, EXIT_CONTRADICTION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    prime: int | None = None
    family: str | None = None
    r: int = 0
    control: str | None = None
    file: str | None = None
    strategy: str | None = None
    threads: int = 1
    max_order: int | None = None
    fmt: str = "text"
    output: str | None = None
    seed: int = 0

    def validate(self):
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.max_order is not None and self.max_order < 1:
            raise UsageError("--max-order must be positive")
        sources = sum(x is not None for x in (self.family, self.control, self.file))
        if sources > 1:
            raise UsageError("give only one of --family, --control, --file")
        if (self.family or self.control) and self.prime is None:
            raise UsageError("--family/--control need --prime")
        if self.strategy is not None:
            try:
                Strategy.parse(self.strategy)
            except ValueError as exc:
                raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# group selection
# ---------------------------------------------------------------------------


def _load_group(cfg: RunConfig) -> tuple[PcPresentation, fam.FamilySpec | None]:
    if cfg.file:
        path = Path(cfg.file)
        try:
            text = path.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from None
        try:
            return parse_presentation(text, name=path.stem), None
        except PresentationError as exc:
            raise UsageError(f"{path}: {exc}") from None
    if cfg.family:
        try:
            spec = fam.FamilySpec(cfg.family, cfg.prime, cfg.r)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return fam.build(spec), spec
    if cfg.control:
        pool = fam.controls(cfg.prime) + fam.order_p5_controls(cfg.prime)
        for P in pool:
            if P.name == cfg.control:
                return P, None
        names = ", ".join(sorted({P.name for P in pool}))
        raise UsageError(f"unknown control {cfg.control!r}; choose from {names}")
    raise UsageError("choose a group with --family, --control or --file")


def _emit(cfg: RunConfig, payload: dict, text: str):
    out = json.dumps(payload, indent=2, sort_keys=True) if cfg.fmt == "json" else text
    if cfg.output:
        Path(cfg.output).write_text(out + "\n")
    else:
        print(out)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> int:
    P, spec = _load_group(cfg)
    ok, fails = is_consistent(P)
    payload = {"group": P.name, "fingerprint": P.fingerprint, "nominal_order": P.nominal_order, "consistent": ok}
    lines = [f"{P.name or 'group'} [{P.fingerprint}]", f"nominal order {P.nominal_order}"]
    status = EXIT_OK
    if ok:
        payload["order"] = P.nominal_order
        lines.append("consistent")
        if P.nominal_order <= (cfg.max_order or DEFAULT_MAX_ORDER):
            Z = P.center(cfg.max_order or DEFAULT_MAX_ORDER)
            D = P.derived_subgroup(cfg.max_order or DEFAULT_MAX_ORDER)
            payload.update(center_order=Z.order, derived_order=D.order, abelianization=P.abelianization().to_dict())
            lines.append(f"|Z(G)| = {Z.order}, |[G,G]| = {D.order}, G/[G,G] = {P.abelianization()}")
        if P.n == 5:
            rep = check_lemf(P)
            payload["five_generator_criterion"] = rep.to_dict()
            lines.append(f"five-generator criterion: {'holds' if rep.ok else 'fails'}")
    else:
        payload["failures"] = [{"overlap": lab, "lhs": list(a), "rhs": list(b)} for lab, a, b in fails]
        lines.append(f"inconsistent: {len(fails)} failed overlaps, first {fails[0][0]}: {fails[0][1]} vs {fails[0][2]}")
        try:
            Q, order = enforced_quotient(P)
            payload["collapsed_order"] = order
            payload["collapsed_presentation"] = format_presentation(Q)
            lines.append(f"defines a group of order {order}")
        except PresentationError as exc:
            payload["collapse_error"] = str(exc)
            lines.append(f"could not collapse: {exc}")
    if spec is not None:
        want_ok, want_order = fam.expected_consistency(spec)
        agrees = ok == want_ok and (not want_order or payload.get("order", payload.get("collapsed_order")) == want_order)
        payload["matches_expectation"] = agrees
        if not agrees:
            status = EXIT_CONTRADICTION
            lines.append("CONTRADICTS the expected consistency/order")
    _emit(cfg, payload, "\n".join(lines))
    return status


def cmd_families(cfg: RunConfig, show_text: bool, include_impostors: bool) -> int:
    p = cfg.prime
    if p is None:
        raise UsageError("families list needs --prime")
    try:
        specs = fam.family_members(p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if include_impostors and p >= 5:
        specs += [fam.FamilySpec(t, p) for t in fam.IMPOSTOR_TAGS]
    rows = []
    lines = []
    for s in specs:
        P = fam.build(s)
        ok = P.is_consistent()
        order = P.nominal_order if ok else enforced_quotient(P)[1]
        row = {"tag": s.family, "p": s.p, "r": s.r, "label": s.label, "order": order, "consistent": ok, "fingerprint": P.fingerprint}
        if show_text:
            row["presentation"] = format_presentation(P)
        rows.append(row)
        lines.append(f"{s.family:<13} p={s.p} r={s.r}  order={order:<6} consistent={ok}")
        if show_text:
            lines.append(format_presentation(P).rstrip())
    payload = {"prime": p, "members": rows}
    if p >= 5:
        payload["b0_family_count"] = fam.b0_family_count(p)
        lines.append(f"count formula 1 + gcd(4,p-1) + gcd(3,p-1) = {fam.b0_family_count(p)}")
    _emit(cfg, payload, "\n".join(lines))
    return EXIT_OK


def cmd_schur(cfg: RunConfig) -> int:
    P, _ = _load_group(cfg)
    M = schur_multiplier(P)
    payload = {**M.to_dict(), "group": P.name, "fingerprint": P.fingerprint}
    _emit(cfg, payload, f"M({P.name or 'G'}) = {M}")
    return EXIT_OK


def cmd_b0(cfg: RunConfig, early_exit: bool) -> int:
    P, spec = _load_group(cfg)
    res = b0(P, cfg.strategy, max_order=cfg.max_order or DEFAULT_B0_MAX_ORDER, threads=cfg.threads, early_exit=early_exit)
    payload = res.to_dict()
    text = f"B0({P.name or 'G'}) = {res.b0}   M = {res.multiplier}   [{res.strategy.value}, {res.pair_count} pairs, {res.wall_time:.2f}s]"
    status = EXIT_OK
    if spec is not None and spec.family in fam.PAPER_TAGS and fam.expected_consistency(spec)[0] and res.b0.is_trivial:
        status = EXIT_CONTRADICTION
        text += "\nCONTRADICTS the claim B0 != 0"
    _emit(cfg, payload, text)
    return status


def _parse_segment(P: PcPresentation, gens: str) -> int:
    names = [g.strip() for g in gens.split(",") if g.strip()]
    try:
        idx = sorted(int(g.lstrip("fg")) - 1 for g in names)
    except ValueError:
        raise UsageError(f"cannot parse --n-gens {gens!r}") from None
    if not idx or idx != list(range(idx[0], P.n)):
        raise UsageError("--n-gens must list a terminal segment such as f4,f5")
    return idx[0]


def cmd_certify(cfg: RunConfig, n_gens: str) -> int:
    P, spec = _load_group(cfg)
    if not P.is_consistent():
        raise UsageError("certify needs a consistent presentation")
    k = _parse_segment(P, n_gens)
    try:
        res = check_lemma21(P, k, cfg.strategy or Strategy.CONJ_REDUCED)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = res.to_dict()
    if isinstance(res, Certificate):
        text = f"certificate for {P.name}: t = {res.t}, h = {res.h}, |B0| >= {res.b0_lower_bound}, {res.pairs_scanned} pairs scanned"
        certified = res.valid
    else:
        text = f"no certificate for {P.name}: {res.reason}"
        certified = False
    status = EXIT_OK
    if spec is not None and spec.family in fam.PAPER_TAGS and fam.expected_consistency(spec)[0] and not certified:
        status = EXIT_CONTRADICTION
    _emit(cfg, payload, text)
    return status


def _confirm_243() -> tuple[bool, dict, str]:
    """Slow one-shot: B0 of G(243,28) straight from the bicyclic-restriction definition."""
    from .oracle import MulTable, b0_direct, cocycle_space, h2_qz

    P = fam.build(fam.FamilySpec("G243_28", 3))
    T = MulTable.from_presentation(P, 243)
    C = cocycle_space(T, 243)
    H = h2_qz(T, C, 243)
    B = b0_direct(T, C, 243)
    exact = b0(P).b0
    ok = not B.is_trivial and B == exact and H.order == schur_multiplier(P).order
    row = {"group": P.name, "fingerprint": P.fingerprint, "h2_qz": H.to_dict(), "b0_direct": B.to_dict(), "b0": exact.to_dict(), "agree": ok}
    return ok, row, f"{'ok' if ok else 'FAIL':4}  {P.name:<14} |G|=243 H2(Q/Z)={H}  B0 direct={B}  B0={exact}"


def cmd_oracle_check(cfg: RunConfig, confirm_243: bool = False) -> int:
    from .oracle import analyse

    bound = cfg.max_order or 64
    rows, lines, ok = [], [], True
    for P in fam.oracle_corpus(bound):
        rep = analyse(P)
        M = schur_multiplier(P)
        B = b0(P).b0
        agree = rep.h2_qz.order == M.order and rep.b0_direct == B
        ok &= agree
        rows.append({**rep.to_dict(), "multiplier": M.to_dict(), "b0": B.to_dict(), "agree": agree, "fingerprint": P.fingerprint})
        lines.append(f"{'ok' if agree else 'FAIL':4}  {P.name:<14} |G|={P.nominal_order:<3} H2(Q/Z)={rep.h2_qz}  M={M}  B0 direct={rep.b0_direct}  B0={B}")
    if confirm_243:
        good, row, line = _confirm_243()
        ok &= good
        rows.append(row)
        lines.append(line)
    _emit(cfg, {"ok": ok, "groups": rows}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_CONTRADICTION


def cmd_reproduce(cfg: RunConfig, oracle: bool) -> int:
    from .reproduce import reproduce

    if cfg.prime not in (3, 5, 7):
        raise UsageError("reproduce supports --prime 3, 5 or 7")
    results = reproduce(cfg.prime, threads=cfg.threads, oracle=oracle)
    ok = all(r.passed for r in results)
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<22} {r.seconds:7.2f}s")
        lines += [f"      {d}" for d in r.detail]
    _emit(cfg, {"prime": cfg.prime, "ok": ok, "checks": [r.to_dict() for r in results]}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_CONTRADICTION


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common(sp: argparse.ArgumentParser, group: bool = True):
    sp.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    sp.add_argument("--output", "-o", help="write the report to this file")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--max-order", type=int, help="enumeration budget")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--prime", "-p", type=int)
    if group:
        sp.add_argument("--family", choices=fam.PAPER_TAGS + fam.IMPOSTOR_TAGS)
        sp.add_argument("--r", type=int, default=0)
        sp.add_argument("--control", help="control group name, e.g. 'Heis(3)'")
        sp.add_argument("--file", help="presentation in the pcgroup text format")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="b0kit", description="Bogomolov multipliers of small p-groups")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("verify", help="consistency and structure of a presentation"))
    fp = sub.add_parser("families", help="list family members")
    fp.add_argument("action", choices=("list",))
    fp.add_argument("--text", action="store_true", help="include presentations")
    fp.add_argument("--impostors", action="store_true", help="also list the collapsing presentations")
    _common(fp, group=False)
    _common(sub.add_parser("schur", help="Schur multiplier"))
    bp = sub.add_parser("b0", help="exact Bogomolov multiplier")
    bp.add_argument("--strategy", choices=("full", "conj"))
    bp.add_argument("--early-exit", action="store_true", help="stop once B0 is proven trivial")
    _common(bp)
    cp = sub.add_parser("certify", help="lower bound for |B0| via a normal subgroup")
    cp.add_argument("--n-gens", default="f4,f5")
    cp.add_argument("--strategy", choices=("full", "conj"))
    _common(cp)
    op = sub.add_parser("oracle-check", help="cross-check against brute-force cohomology")
    op.add_argument("--confirm-243", action="store_true", help="also compute B0(G(243,28)) from the definition (slow)")
    _common(op, group=False)
    rp = sub.add_parser("reproduce", help="run the full check suite for one prime")
    rp.add_argument("--oracle", action="store_true", help="include the oracle cross-check")
    _common(rp, group=False)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    cfg = RunConfig(
        command=args.command,
        prime=args.prime,
        family=getattr(args, "family", None),
        r=getattr(args, "r", 0),
        control=getattr(args, "control", None),
        file=getattr(args, "file", None),
        strategy=getattr(args, "strategy", None),
        threads=args.threads,
        max_order=args.max_order,
        fmt=args.fmt,
        output=args.output,
        seed=args.seed,
    )
    random.seed(cfg.seed)
    try:
        cfg.validate()
        if cfg.command == "verify":
            return cmd_verify(cfg)
        if cfg.command == "families":
            return cmd_families(cfg, args.text, args.impostors)
        if cfg.command == "schur":
            return cmd_schur(cfg)
        if cfg.command == "b0":
            return cmd_b0(cfg, args.early_exit)
        if cfg.command == "certify":
            return cmd_certify(cfg, args.n_gens)
        if cfg.command == "oracle-check":
            return cmd_oracle_check(cfg, args.confirm_243)
        if cfg.command == "reproduce":
            return cmd_reproduce(cfg, args.oracle)
    except (UsageError, TooLargeToEnumerate) as exc:
        # a refused budget is a configuration problem, reported like bad flags
        print(f"b0kit {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    raise AssertionError(cfg.command)  # argparse restricts the choices


if __name__ == "__main__":
    sys.exit(main())
