"""Command-line interface.

Exit status: 0 on success, 1 when the input is rejected, 2 when an internal
invariant breaks (always a defect).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .errors import InputError, InternalInvariantViolated, MismatchReport, QuadMapsError
from .formats import (
    format_emap,
    format_kmap,
    format_umap,
    parse_emap,
    parse_kmap,
    parse_umap,
    read_file,
    write_file,
)
from .surface_core import SurfaceType, canonical_code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        write_file(path, text)


def _csv(rows, columns, path=None):
    out = sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")
    try:
        w = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    finally:
        if out is not sys.stdout:
            out.close()


def _sizes(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise InputError(f"bad size list {text!r}") from exc


# --- commands -----------------------------------------------------------------


def cmd_forward(a):
    from .forward_bijection import quad_to_unicellular

    q = read_file(a.inp, parse_emap)
    _emit(format_umap(quad_to_unicellular(q, check=a.check)), a.out)


def cmd_reverse(a):
    from .reverse_bijection import unicellular_to_quad

    u = read_file(a.inp, parse_umap)
    _emit(format_emap(unicellular_to_quad(u, check=a.check)), a.out)


def cmd_miermont_forward(a):
    from .multipoint import phi_multi

    q = read_file(a.inp, parse_emap)
    _, s = read_file(a.sources, parse_kmap)
    if s is None:
        raise InputError("the sources file has no sources block")
    _emit(format_kmap(phi_multi(q, s, check=a.check), s), a.out)


def cmd_miermont_reverse(a):
    from .multipoint import lambda_multi

    mk, _ = read_file(a.inp, parse_kmap)
    if mk is None:
        raise InputError("the input file holds no map")
    q, s = lambda_multi(mk, check=a.check)
    _emit(format_emap(q), a.out)
    if a.sources_out:
        write_file(a.sources_out, format_kmap(None, s))


def cmd_ab(a):
    from .multipoint import ab_forward

    q = read_file(a.inp, parse_emap)
    if not 0 <= a.point < q.n_vertices:
        raise InputError(f"vertex {a.point} outside [0, {q.n_vertices})")
    res = ab_forward(q, a.point)
    _emit(format_kmap(res.map, res.sources), a.out)
    if a.out not in (None, "-"):
        print(json.dumps({"faces": res.map.k, "pointed_flag": res.pointed_flag}))


def cmd_enumerate(a):
    from .enumeration import ORACLE_MAX_EDGES, enumerate_labeled

    if a.n > ORACLE_MAX_EDGES + 1:
        raise InputError(f"enumeration output is limited to n <= {ORACLE_MAX_EDGES + 1}")
    s = SurfaceType.parse(a.surface)
    count = 0
    chunks = []
    for u in enumerate_labeled(a.n, s, well=a.well_labeled):
        count += 1
        if not a.count_only:
            chunks.append(format_umap(u))
    if a.count_only:
        print(count)
    else:
        _emit("\n".join(chunks), a.out)


def cmd_counts(a):
    from .enumeration import COUNT_COLUMNS, verify_counts

    s = SurfaceType.parse(a.surface)
    tables = verify_counts(s, a.nmax, bijective=not a.fast, jobs=a.jobs)
    _csv([t.row() for t in tables], COUNT_COLUMNS, a.out)


def cmd_gf(a):
    from .genfun import Q_series, rooted_counts

    s = SurfaceType.parse(a.surface)
    h2 = int(2 * s.h)
    if s.h >= 1:
        q = Q_series(s, a.order)
        coeffs = [q[n] for n in range(a.order + 1)]
    else:
        coeffs = [c * (n + 2 - h2) for n, c in enumerate(rooted_counts(s, a.order))]
    rows = []
    for n, c in enumerate(coeffs):
        w = n + 2 - h2
        rows.append({"n": n, "coeff": c, "coeff/(n+2-2h)": c // w if w > 0 else ""})
    _csv(rows, ["n", "coeff", "coeff/(n+2-2h)"], a.out)


def cmd_pp(a):
    from .genfun import pp_count

    _csv([{"n": n, "count": pp_count(n)} for n in range(1, a.nmax + 1)], ["n", "count"], a.out)


def cmd_sample(a):
    from .sampler import SAMPLE_COLUMNS, SampleConfig, sample_labeled_unicellular, sample_rows

    cfg = SampleConfig(SurfaceType.parse(a.surface), a.n, a.seed, a.replicates, a.mode)
    _csv(sample_rows(cfg, jobs=a.jobs), SAMPLE_COLUMNS, a.out)
    if a.maps:
        text = "\n".join(format_umap(sample_labeled_unicellular(cfg, r)) for r in range(cfg.replicates))
        write_file(a.maps, text)


def cmd_scaling(a):
    from .sampler import SAMPLE_COLUMNS, experiment_scaling, summary_rows

    s = SurfaceType.parse(a.surface)
    res = experiment_scaling(s, _sizes(a.sizes), a.replicates, a.seed, jobs=a.jobs)
    _csv(res.rows + summary_rows(s, a.seed, res), SAMPLE_COLUMNS, a.out)


def _suite_counts():
    from .enumeration import verify_counts

    for name in ("S0", "N0.5", "S1", "N1"):
        verify_counts(SurfaceType.parse(name), 3)
    return "count identities on S0, N0.5, S1, N1 up to n = 3"


def _suite_roundtrip():
    from .enumeration import enumerate_labeled
    from .forward_bijection import quad_to_unicellular
    from .reverse_bijection import unicellular_to_quad

    total = 0
    for name in ("S0", "N0.5", "N1"):
        for n in (1, 2, 3):
            for u in enumerate_labeled(n, SurfaceType.parse(name), well=True):
                if quad_to_unicellular(unicellular_to_quad(u)).code() != u.code():
                    raise MismatchReport(f"round trip failed on {name} n={n}", first=format_umap(u))
                total += 1
    return f"{total} well-labeled maps survive reverse then forward"


def _suite_multipoint():
    from .enumeration import enumerate_k_rooted
    from .multipoint import lambda_multi, phi_multi

    total = 0
    for name in ("S0", "N0.5", "N1"):
        for n in (1, 2, 3):
            for mk in enumerate_k_rooted(n, 2, SurfaceType.parse(name)):
                q, s = lambda_multi(mk)
                if phi_multi(q, s) != mk:
                    raise MismatchReport("two-source round trip failed", first=format_kmap(mk, s))
                total += 1
    return f"{total} two-face maps survive the multipoint round trip"


def _suite_ab():
    from .enumeration import enumerate_quadrangulations_by_flags
    from .multipoint import ab_backward, ab_forward

    total = 0
    for name in ("S0", "N0.5", "N1"):
        for n in (1, 2, 3):
            for q in enumerate_quadrangulations_by_flags(n, SurfaceType.parse(name)):
                for v in range(q.n_vertices):
                    res = ab_forward(q, v)
                    q2, v2, _ = ab_backward(res.map, res.pointed_flag)
                    q1 = q.rerooted(res.sources.corners[0])
                    mark1 = [int(x == v) for x in range(q1.n_vertices)]
                    mark2 = [int(x == v2) for x in range(q2.n_vertices)]
                    if canonical_code(q2, mark2) != canonical_code(q1, mark1):
                        raise MismatchReport("pointed round trip failed", first=format_emap(q))
                    total += 1
    return f"{total} pointed quadrangulations survive the pointed round trip"


def _suite_gf():
    from .enumeration import count_table
    from .genfun import Q_series

    for name in ("S1", "N1"):
        s = SurfaceType.parse(name)
        q = Q_series(s, 4)
        for n in range(1, 5):
            lab = count_table(s, n, bijective=False).counts["labeled"]
            if q[n] != 2 * lab:
                raise MismatchReport(f"{name} n={n}: [t^n]Q={q[n]} but 2*labeled={2 * lab}")
    return "scheme series matches enumeration on S1 and N1 up to n = 4"


SUITES = {
    "counts": _suite_counts,
    "roundtrip": _suite_roundtrip,
    "multipoint": _suite_multipoint,
    "ab": _suite_ab,
    "gf": _suite_gf,
}


def cmd_verify(a):
    names = list(SUITES) if a.suite == "all" else [a.suite]
    for name in names:
        if name not in SUITES:
            raise InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
        print(f"PASS {name}: {SUITES[name]()}")


# --- parser -------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="quadmaps", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def io(cmd, fn, help_):
        sp = sub.add_parser(cmd, help=help_)
        sp.add_argument("--in", dest="inp", required=True)
        sp.add_argument("--out", default=None)
        sp.add_argument("--check", action="store_true", help="verify invariants after every step")
        sp.set_defaults(func=fn)
        return sp

    io("forward", cmd_forward, "quadrangulation (.emap) to well-labeled one-face map (.umap)")
    io("reverse", cmd_reverse, "well-labeled one-face map (.umap) to quadrangulation (.emap)")
    sp = io("miermont-forward", cmd_miermont_forward, "quadrangulation with delayed sources to a k-face map")
    sp.add_argument("--sources", required=True)
    sp = io("miermont-reverse", cmd_miermont_reverse, "k-face map (.kmap) to quadrangulation and sources")
    sp.add_argument("--sources-out", default=None)
    sp = io("ab", cmd_ab, "pointed quadrangulation to a labeled map with one face per local maximum")
    sp.add_argument("--point", type=int, required=True)

    sp = sub.add_parser("enumerate", help="list labeled one-face maps")
    sp.add_argument("--surface", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--well-labeled", action="store_true")
    sp.add_argument("--count-only", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("counts", help="count table CSV")
    sp.add_argument("--surface", required=True)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--fast", action="store_true", help="skip building quadrangulations")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_counts)

    sp = sub.add_parser("gf", help="coefficients of the pointed-map series")
    sp.add_argument("--surface", required=True)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_gf)

    sp = sub.add_parser("pp", help="rooted quadrangulations of the projective plane")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_pp)

    sp = sub.add_parser("sample", help="uniform labeled one-face maps and their statistics")
    sp.add_argument("--surface", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--replicates", type=int, default=1)
    sp.add_argument("--mode", choices=("auto", "exact", "float"), default="auto")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--maps", default=None, help="also write the sampled maps (.umap blocks)")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("scaling", help="normalized radius across sizes")
    sp.add_argument("--surface", required=True)
    sp.add_argument("--sizes", required=True)
    sp.add_argument("--replicates", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_scaling)

    sp = sub.add_parser("verify", help="run a built-in consistency suite")
    sp.add_argument("--suite", required=True)
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except (InternalInvariantViolated, MismatchReport) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (InputError, QuadMapsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
