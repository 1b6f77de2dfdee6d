"""Command line entry point.

Every command writes its artifacts plus ``manifest.json`` into ``--out``.
The manifest records the full configuration, the seed, the package version
and a SHA-256 digest of every input and output file, which is enough to
replay the run byte for byte.

Exit status: 0 on success, 1 when a validation fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, combmap
from .combmap import RED
from .errors import TriPercError
from .matebij import phi, phi_inverse, space_filling_exploration, walk_interface
from .nested import walk_bubble_tree
from .observables import cardy_probabilities, epsilon_pivotal, loop_ensemble
from .sampler import SamplerConfig, count_by_inner, iter_walks, sample_walk, sample_walk_peeling, substream
from .scaling import (
    diameter_experiment, jumps_experiment, markov_experiment, moments_experiment, sample_sized_map,
)
from .walkcore import Walk, is_member

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _fractions(text: str) -> tuple:
    try:
        u = tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --arcs value {text!r}") from exc
    if len(u) != 3:
        raise argparse.ArgumentTypeError("--arcs takes three comma-separated fractions")
    return u


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


# ---------------------------------------------------------------------------
# artifacts


class _Run:
    def __init__(self, args):
        self.args = args
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.outputs = {}
        self.inputs = {}

    def _record(self, name: str, data: bytes) -> None:
        (self.out / name).write_bytes(data)
        self.outputs[name] = hashlib.sha256(data).hexdigest()

    def write_json(self, name: str, obj) -> None:
        self._record(name, (json.dumps(obj, indent=1, sort_keys=True) + "\n").encode())

    def write_csv(self, name: str, rows: list[dict], fields: list[str] | None = None) -> None:
        buf = io.StringIO()
        fields = fields or (list(rows[0]) if rows else [])
        wr = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        wr.writeheader()
        wr.writerows(rows)
        self._record(name, buf.getvalue().encode())

    def read_input(self, path: str) -> bytes:
        data = Path(path).read_bytes()
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()
        return data

    def finish(self, status: int) -> int:
        config = {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(self.args).items()
                  if k not in ("func",)}
        manifest = {
            "command": self.args.command,
            "config": config,
            "seed": getattr(self.args, "seed", None),
            "version": __version__,
            "inputs": self.inputs,
            "outputs": dict(sorted(self.outputs.items())),
            "status": status,
        }
        data = (json.dumps(manifest, indent=1, sort_keys=True) + "\n").encode()
        (self.out / "manifest.json").write_bytes(data)
        return status


def _map_from_args(run: _Run, args, index: int = 0):
    if args.map:
        return combmap.from_json(run.read_input(args.map).decode())
    rng = substream(args.seed, index)
    if args.edges:
        return sample_sized_map(args.edges, rng)
    from .sampler import sample_map

    return sample_map(args.boundary_length, rng)


def _walk_from_args(run: _Run, args) -> Walk:
    if args.word:
        return Walk.from_word(args.word, (args.l, args.r))
    if args.walk_file:
        return Walk.from_text(run.read_input(args.walk_file).decode())
    cfg = SamplerConfig((args.l, args.r), seed=args.seed, max_steps=args.max_steps)
    w = sample_walk_peeling(cfg)
    if not isinstance(w, Walk):
        raise TriPercError("sampler produced no walk within its budget")
    return w


# ---------------------------------------------------------------------------
# commands


def _one_sample(job):
    split, seed, i, method, max_steps = job
    cfg = SamplerConfig(split, seed=seed, max_steps=max_steps)
    fn = sample_walk_peeling if method == "peeling" else sample_walk
    w = fn(cfg, substream(seed, i))
    if not isinstance(w, Walk):
        return {"index": i, "truncated": True}
    return {"index": i, "start": list(w.start), "word": w.word, "N": len(w), "n": w.inner_count()}


def cmd_sample(run: _Run, args) -> int:
    split = (args.l, args.r)
    jobs = [(split, args.seed, i, args.method, args.max_steps) for i in range(args.count)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(_one_sample, jobs))
    else:
        rows = [_one_sample(j) for j in jobs]
    bad = [r for r in rows if "word" in r and len(r["word"]) != 3 * r["n"] + 2 * sum(split) + 1]
    run.write_csv("samples.csv", [{k: r.get(k) for k in ("index", "N", "n")} for r in rows],
                  ["index", "N", "n"])
    run.write_json("walks.json", rows)
    return EXIT_FAILED if bad else EXIT_OK


def cmd_enumerate(run: _Run, args) -> int:
    max_n = (args.nmax - 2 * args.l - 2 * args.r - 1) // 3
    if max_n < 0:
        run.write_csv("counts.csv", [], ["n", "count"])
        return EXIT_OK
    if args.r == 0:
        counts = count_by_inner(args.l, 0, max_n)
    else:
        counts = [0] * (max_n + 1)
        for w in iter_walks(args.l, args.r, args.nmax):
            counts[w.inner_count()] += 1
    run.write_csv("counts.csv", [{"n": n, "count": c} for n, c in enumerate(counts)])
    print(" ".join(str(c) for c in counts))
    return EXIT_OK


def cmd_roundtrip(run: _Run, args) -> int:
    rows = []
    seen = {}
    failures = 0
    for lL in range(args.nmax // 2 + 1):
        for lR in range(args.nmax // 2 + 1):
            if 2 * lL + 2 * lR + 1 > args.nmax:
                continue
            for w in iter_walks(lL, lR, args.nmax):
                p = phi_inverse(w)
                ok = phi(p) == w
                key = combmap.canonical_form(p.triangulation)
                distinct = key not in seen
                seen.setdefault(key, w.word)
                ok = ok and distinct
                failures += not ok
                rows.append({"ell_L": lL, "ell_R": lR, "word": w.word, "N": len(w), "ok": ok})
    run.write_csv("roundtrip.csv", rows)
    run.write_json("summary.json", {"walks": len(rows), "failures": failures})
    print(f"{len(rows)} walks, {failures} failures")
    return EXIT_FAILED if failures else EXIT_OK


def cmd_explore(run: _Run, args) -> int:
    w = _walk_from_args(run, args)
    p = phi_inverse(w)
    rec = space_filling_exploration(p)
    T, Z = walk_interface(w)
    run.write_json("map.json", p.triangulation.to_dict())
    run.write_json("exploration.json", rec.to_dict())
    run.write_csv("interface.csv", [{"time": int(t), "L": int(z[0]), "R": int(z[1])} for t, z in zip(T, Z)])
    return EXIT_OK if rec.walk == w and is_member(w) else EXIT_FAILED


def cmd_bubbles(run: _Run, args) -> int:
    if args.word or args.walk_file:
        w = _walk_from_args(run, args)
    else:
        t = _map_from_args(run, args)
        w = phi(combmap.identify_monochromatic_as_dichromatic(t, t.root))
    tree = walk_bubble_tree(w, args.depth_max, args.width_max)
    run.write_json("bubbles.json", tree.to_dict())
    return EXIT_OK


def cmd_loops(run: _Run, args) -> int:
    rows = []
    for i in range(args.count):
        t = _map_from_args(run, args, i)
        for r in loop_ensemble(t).to_rows():
            rows.append({"sample": i, **r})
    run.write_csv("loops.csv", rows, ["sample", "id", "cluster", "length", "mass", "area"])
    return EXIT_OK


def cmd_pivotal(run: _Run, args) -> int:
    t = _map_from_args(run, args)
    piv = epsilon_pivotal(t, args.eps)
    flags = np.zeros(t.n_vertices, dtype=bool)
    flags[piv.vertices] = True
    run.write_csv("pivotal.csv", [{"vertex": v, "changed_loops": int(piv.changed_loops[v]),
                                   "pivotal": int(flags[v])} for v in range(t.n_vertices)])
    run.write_json("pivotal_summary.json", {"count": int(piv.vertices.shape[0]),
                                            "mass_per_point": piv.mass_per_point,
                                            "total_mass": piv.total_mass})
    return EXIT_OK


def cmd_cardy(run: _Run, args) -> int:
    t = _map_from_args(run, args)
    est = cardy_probabilities(t, args.arcs, args.vertex, args.samples, seed=args.seed,
                              exhaustive=args.exhaustive, workers=args.workers)
    run.write_csv("cardy.csv", [est.to_row()])
    return EXIT_OK


def cmd_stats(run: _Run, args) -> int:
    exp = args.experiment
    if exp == "moments":
        res, rec = moments_experiment(args.count, args.min_edges, seed=args.seed)
        ok = 0.47 <= res.correlation <= 0.53
    elif exp == "jumps":
        res, rec = jumps_experiment(args.count, args.min_edges, seed=args.seed)
        ok = 1.35 <= res.index <= 1.65
    elif exp == "diameter":
        res, rec = diameter_experiment(per_size=args.count, seed=args.seed)
        ok = 0.20 <= res.slope <= 0.30
    else:
        reps = [markov_experiment(args.ell, seed=s) for s in
                (int(x) for x in substream(args.seed).integers(0, 2 ** 63, args.count))]
        passed = sum(r.pvalue >= 0.01 for r in reps)
        run.write_json("stats.json", {"experiment": exp, "repetitions": len(reps), "passed": passed,
                                      "pvalues": [r.pvalue for r in reps]})
        return EXIT_OK if passed >= 0.95 * len(reps) else EXIT_FAILED
    run.write_json("stats.json", {"experiment": exp, **rec.to_dict()})
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------------------
# parser


def _add_common(p, seed=True):
    p.add_argument("--out", default="triperc-out", help="output directory")
    if seed:
        p.add_argument("--seed", type=_seed, default=0, help="64-bit seed")
    p.add_argument("--workers", type=_positive, default=1, help="parallel sample workers")


def _add_map_source(p):
    p.add_argument("--map", help="JSON map file (default: sample one)")
    p.add_argument("--boundary-length", type=int, default=6, help="boundary length of sampled maps")
    p.add_argument("--edges", type=int, default=0, help="sample maps with about this many edges")


def _add_walk_source(p):
    p.add_argument("--word", help="walk as a word over a, b, c")
    p.add_argument("--walk-file", help="file holding a walk in text form")
    p.add_argument("--l", type=_nonneg, default=0, help="left boundary arc length")
    p.add_argument("--r", type=_nonneg, default=0, help="right boundary arc length")
    p.add_argument("--max-steps", type=_positive, default=1_000_000)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="triperc", description="Percolated triangulations and their walk encoding.",
                 allow_abbrev=False)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="sample member walks", allow_abbrev=False)
    _add_common(p)
    p.add_argument("--l", type=_nonneg, default=0, help="left boundary arc length")
    p.add_argument("--r", type=_nonneg, default=0, help="right boundary arc length")
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--method", choices=("peeling", "rejection"), default="peeling")
    p.add_argument("--max-steps", type=_positive, default=1_000_000)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("enumerate", help="count member walks by inner vertices", allow_abbrev=False)
    _add_common(p, seed=False)
    p.add_argument("--l", type=_nonneg, default=0)
    p.add_argument("--r", type=_nonneg, default=0)
    p.add_argument("--nmax", type=_positive, required=True, help="maximal walk length in steps")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("roundtrip", help="exhaustive bijection check", allow_abbrev=False)
    _add_common(p, seed=False)
    p.add_argument("--nmax", type=_positive, required=True, help="maximal walk length in steps")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("explore", help="space-filling exploration of one map", allow_abbrev=False)
    _add_common(p)
    _add_walk_source(p)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("bubbles", help="nested bubble tree", allow_abbrev=False)
    _add_common(p)
    _add_walk_source(p)
    _add_map_source(p)
    p.add_argument("--depth-max", type=_positive, default=8)
    p.add_argument("--width-max", type=_positive, default=64)
    p.set_defaults(func=cmd_bubbles)

    p = sub.add_parser("loops", help="loop ensembles", allow_abbrev=False)
    _add_common(p)
    _add_map_source(p)
    p.add_argument("--count", type=_positive, default=1)
    p.set_defaults(func=cmd_loops)

    p = sub.add_parser("pivotal", help="epsilon-pivotal vertices", allow_abbrev=False)
    _add_common(p)
    _add_map_source(p)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=cmd_pivotal)

    p = sub.add_parser("cardy", help="crossing probabilities", allow_abbrev=False)
    _add_common(p)
    _add_map_source(p)
    p.add_argument("--arcs", type=_fractions, required=True, help="increasing boundary positions u1,u2,u3 in [0, 1]")
    p.add_argument("--vertex", type=_nonneg, default=0)
    p.add_argument("--samples", type=_positive, default=1000)
    p.add_argument("--exhaustive", action="store_true")
    p.set_defaults(func=cmd_cardy)

    p = sub.add_parser("stats", help="scaling diagnostics", allow_abbrev=False)
    _add_common(p)
    p.add_argument("--experiment", choices=("moments", "jumps", "diameter", "markov"), required=True)
    p.add_argument("--count", type=_positive, default=20, help="walks, maps per size, or repetitions")
    p.add_argument("--min-edges", type=_positive, default=100_000)
    p.add_argument("--ell", type=_positive, default=4, help="boundary length for the markov test")
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = _Run(args)
    try:
        status = args.func(run, args)
    except TriPercError as exc:
        print(f"triperc {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        status = EXIT_FAILED
    return run.finish(status)


if __name__ == "__main__":
    sys.exit(main())
