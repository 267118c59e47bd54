"""Command line runner: ``rwentropy <subcommand> --config PATH``.

Every run writes its artifacts and a ``manifest.json`` (config hash, seed,
library versions, artifact digests) into the output directory. Outputs
depend only on the config and the seed, so repeated runs are byte
identical whatever the thread count.

Exit codes: 0 success, 2 configuration error, 3 convergence failure
(including a failed equality check), 4 geometry-precision failure.
"""
import argparse
import hashlib
import io
import json
import os
import platform
import sys

from .config import ConfigError, load_config

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_GEOMETRY = 0, 2, 3, 4

SUBCOMMANDS = ("walk", "lyapunov", "drift", "entropy", "partition", "verify", "oracle")


class _Run:
    """Collects artifacts for one run and writes them with the manifest."""

    def __init__(self, cfg, out, command):
        self.cfg = cfg
        self.out = out
        self.command = command
        self.hash = cfg.digest()
        self.files = {}

    def jsonl(self, name, rows):
        buf = io.StringIO()
        for r in rows:
            r = dict(r)
            r["config_hash"] = self.hash
            buf.write(json.dumps(r, sort_keys=True) + "\n")
        self.files[name] = buf.getvalue()

    def json(self, name, obj):
        obj = dict(obj)
        obj["config_hash"] = self.hash
        self.files[name] = json.dumps(obj, sort_keys=True, indent=1) + "\n"

    def csv(self, name, reports, curves=None):
        lines = []
        for i, rep in enumerate(reports):
            text = rep.to_csv(header=(i == 0)).splitlines()
            for j, line in enumerate(text):
                head = i == 0 and j == 0
                line += ",config_hash" if head else "," + self.hash
                if curves is not None:
                    line += ",curve" if head else ',"%s"' % " ".join(map(str, curves[i]))
                lines.append(line)
        self.files[name] = "\n".join(lines) + "\n"

    def text(self, name, text):
        self.files[name] = "# config_hash %s\n" % self.hash + text

    def write(self):
        os.makedirs(self.out, exist_ok=True)
        for name, text in sorted(self.files.items()):
            with open(os.path.join(self.out, name), "w", newline="\n") as fh:
                fh.write(text)
        man = {
            "command": self.command,
            "config": json.loads(self.cfg.canonical()),
            "config_hash": self.hash,
            "seed": self.cfg.seed,
            "versions": _versions(),
            "artifacts": {n: hashlib.sha256(t.encode()).hexdigest()
                          for n, t in sorted(self.files.items())},
        }
        with open(os.path.join(self.out, "manifest.json"), "w", newline="\n") as fh:
            fh.write(json.dumps(man, sort_keys=True, indent=1) + "\n")


def _versions():
    import mpmath
    import numba
    import numpy
    import scipy
    from . import __version__
    return {"rwentropy": __version__, "python": platform.python_version(),
            "numpy": numpy.__version__, "scipy": scipy.__version__,
            "mpmath": mpmath.__version__, "numba": numba.__version__}


def _hs(cfg):
    from .estimators import horizons
    return list(cfg.horizons) if cfg.horizons else horizons(cfg.horizon)


def _torus_runs(cfg, curves, entropy, threads):
    from .estimators import _torus_job, path_seed, run_paths
    hs = _hs(cfg)
    args = [(cfg.measure(), path_seed(cfg.seed, i), hs, list(curves), entropy,
             cfg.anchor_distance, 64) for i in range(cfg.paths)]
    return hs, run_paths(_torus_job, args, threads)


def _need_torus(cfg, what):
    if cfg.model != "torus":
        raise ConfigError("model", "%s is available for the torus model only" % what)


# -- subcommands -----------------------------------------------------------------

def cmd_walk(cfg, run, threads):
    from .walk import SamplePath
    path = SamplePath(cfg.measure(), cfg.seed)
    buf = io.StringIO()
    path.dump_jsonl(buf, cfg.walk["n_min"], cfg.walk["n_max"])
    run.jsonl("walk.jsonl", [json.loads(l) for l in buf.getvalue().splitlines()])
    return EXIT_OK


def cmd_drift(cfg, run, threads):
    from .estimators import aggregate
    _need_torus(cfg, "drift")
    hs, runs = _torus_runs(cfg, [(1, 0)], False, threads)
    rep = aggregate("drift", [r["drift"] for r in runs], hs, cfg.seed)
    run.jsonl("drift.jsonl", rep.rows())
    run.csv("drift.csv", [rep])
    return EXIT_OK


def cmd_lyapunov(cfg, run, threads):
    from .estimators import aggregate, _braid_job, path_seed, run_paths
    curves = cfg.curve_list()
    if cfg.model == "torus":
        hs, runs = _torus_runs(cfg, curves, False, threads)
        keys = ["lyapunov:%d,%d" % c for c in curves]
    else:
        from .braid import MulticurveCoord
        hs = _hs(cfg)
        cs = [MulticurveCoord(c) for c in curves]
        args = [(cfg.measure(), path_seed(cfg.seed, i), hs, cs) for i in range(cfg.paths)]
        runs = run_paths(_braid_job, args, threads)
        keys = ["lyapunov:%d" % i for i in range(len(cs))]
    reps = []
    rows = []
    for c, k in zip(curves, keys):
        rep = aggregate("lyapunov", [r[k] for r in runs], hs, cfg.seed)
        reps.append(rep)
        for row in rep.rows():
            row["curve"] = list(c)
            rows.append(row)
    run.jsonl("lyapunov.jsonl", rows)
    run.csv("lyapunov.csv", reps, curves)
    return EXIT_OK


def cmd_entropy(cfg, run, threads):
    from .estimators import aggregate
    _need_torus(cfg, "entropy")
    hs, runs = _torus_runs(cfg, [(1, 0)], True, threads)
    rep = aggregate("entropy_sigma", [r["entropy_sigma"] for r in runs], hs, cfg.seed)
    run.jsonl("entropy.jsonl", rep.rows())
    run.csv("entropy.csv", [rep])
    return EXIT_OK


def cmd_partition(cfg, run, threads):
    from .partition import (build_sequence, check_semi_markov, exact_sequence,
                            partition_defects)
    from .walk import SamplePath
    _need_torus(cfg, "partition")
    path = SamplePath(cfg.measure(), cfg.seed)
    lo, hi = cfg.partition["n_min"], cfg.partition["n_max"]
    if len(cfg.measure()) == 1:
        seq = exact_sequence(path, lo, hi)
    else:
        seq = build_sequence(path, lo, hi, C=cfg.anchor_distance)
    buf = io.StringIO()
    seq.dump(buf)
    run.text("partitions.txt", buf.getvalue())
    rep = check_semi_markov(seq)
    defects = {str(j): partition_defects(P) for j, P in sorted(seq.parts.items())}
    run.json("semi_markov.json", {
        "window": [lo, hi],
        "good_times": [int(g) for g in seq.goods],
        "rectangles": {str(j): len(P) for j, P in sorted(seq.parts.items())},
        "checked_edges": rep.checked_edges,
        "violations": [[list(v[0])] + [x if isinstance(x, (int, str)) or x is None else str(x)
                                       for x in v[1:]] for v in rep.violations],
        "M1": rep.count("M1"), "M2": rep.count("M2"),
        "partition_defects": {k: v for k, v in defects.items() if v},
        "ok": rep.ok and not any(defects.values()),
    })
    return EXIT_OK


def cmd_verify(cfg, run, threads):
    from .estimators import equality_report
    _need_torus(cfg, "the equality report")
    tol = cfg.tolerances
    rep, reports = equality_report(
        cfg.model, cfg.measure(), paths=cfg.paths, horizon=cfg.horizon, seed=cfg.seed,
        C=cfg.anchor_distance, z=tol["z"], rel_tol=tol["relative"],
        one_sided_tol=tol["one_sided"], threads=threads, non_elementary=cfg.non_elementary)
    run.json("report.json", rep)
    rows = [row for r in reports.values() for row in r.rows()]
    run.jsonl("estimates.jsonl", rows)
    if reports:
        run.csv("estimates.csv", list(reports.values()))
    if rep["pass"] is False:
        print("equality check failed", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_oracle(cfg, run, threads):
    from .oracles import run_all
    res = run_all(seed=cfg.seed)
    run.json("oracles.json", res)
    return EXIT_OK if res["ok"] else EXIT_CONVERGENCE


COMMANDS = {"walk": cmd_walk, "drift": cmd_drift, "lyapunov": cmd_lyapunov,
            "entropy": cmd_entropy, "partition": cmd_partition, "verify": cmd_verify,
            "oracle": cmd_oracle}


def build_parser():
    p = argparse.ArgumentParser(prog="rwentropy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="JSON experiment config")
        s.add_argument("--seed", type=int, default=None, help="override the config seed")
        s.add_argument("--out", default=None, help="output directory")
        s.add_argument("--threads", type=int, default=1, help="worker processes")
    return p


def main(argv=None):
    from .flat import GeometryError
    from .torus import NotConverged
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed)
        if args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
        run = _Run(cfg, cfg.out_dir(args.out), args.command)
        code = COMMANDS[args.command](cfg, run, args.threads)
        run.write()
        return code
    except ConfigError as e:
        print("config error: %s" % e, file=sys.stderr)
        return EXIT_CONFIG
    except NotConverged as e:
        print("not converged: %s" % e, file=sys.stderr)
        return EXIT_CONVERGENCE
    except GeometryError as e:
        print("geometry failure: %s" % e, file=sys.stderr)
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
