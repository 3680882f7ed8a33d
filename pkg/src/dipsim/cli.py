"""Command-line front end: instance generation, single protocol runs,
bandwidth/error sweeps with a rendered figure, and oracle classification."""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from . import PROTOCOLS
from .engine import _stable_seed, make_adversary, run_protocol, build_report
from .generators import (
    gen_fooling_instance,
    gen_nonmember,
    gen_random_cograph,
    gen_random_dh,
    gen_yes_gadget,
)
from .graphs import (
    Graph,
    GraphError,
    NetworkConfig,
    is_cograph_oracle,
    is_dh_oracle,
    load_network,
    save_network,
)

EXIT_ACCEPT, EXIT_REJECT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

PROVER_KINDS = ("honest", "wrong-graph", "bit-flip", "cert-swap", "order-forge")

_CLASS_MIN_N = {"cograph": 1, "dh": 1, "non-cograph": 4, "non-dh": 5,
                "gadget": 5, "fooling": 10}


def classify(g: Graph) -> str:
    if not g.is_connected():
        return "disconnected"
    if is_cograph_oracle(g):
        return "cograph+dh"
    if is_dh_oracle(g):
        return "dh-only"
    return "neither"


def make_instance(cls: str, n: int, seed) -> NetworkConfig:
    if n < _CLASS_MIN_N[cls]:
        raise GraphError(f"class {cls} requires n >= {_CLASS_MIN_N[cls]}")
    if cls == "cograph":
        return gen_random_cograph(n, seed)
    if cls == "dh":
        return gen_random_dh(n, seed)[0]
    if cls in ("non-cograph", "non-dh"):
        return gen_nonmember(cls, n, seed)
    if cls == "gadget":
        return gen_yes_gadget(gen_random_cograph(n - 4, seed).graph)
    # fooling: two cograph halves of total size n - 8
    k1 = (n - 8 + 1) // 2
    k2 = n - 8 - k1
    return gen_fooling_instance(gen_random_cograph(k1, seed).graph,
                                gen_random_cograph(k2, _stable_seed(seed, "half2")).graph)


def _load_graph_raw(path) -> Graph:
    """Graph from file without the connectivity requirement (for `oracle`)."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        return Graph(data["n"], [tuple(e) for e in data["edges"]])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"{path}: malformed graph object: {exc}") from exc


def _prover(args):
    params = {"k": args.k, "edits": args.k}
    return make_adversary(args.prover, params)


def cmd_gen(args) -> int:
    cfg = make_instance(args.cls, args.n, args.seed)
    save_network(cfg, args.out)
    print(classify(cfg.graph))
    return EXIT_ACCEPT


def cmd_run(args) -> int:
    cfg = load_network(args.graph)
    protocol = PROTOCOLS[args.protocol]
    verdict, bw, transcript = run_protocol(cfg, protocol, _prover(args), args.seed,
                                           prime_mode=args.prime, cap_bits=args.cap)
    fc = protocol.field_config(cfg, args.prime)
    coins = [bits.val for kind, bits in transcript.rounds if kind == "random"]
    report = build_report(protocol, args.seed, fc, coins, verdict, bw)
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print("accepted" if verdict.accepted else "rejected")
    return EXIT_ACCEPT if verdict.accepted else EXIT_REJECT


def _sweep_row(task):
    proto_name, cls, n, inst_seed, prover_kind, k, trials, prime = task
    protocol = PROTOCOLS[proto_name]
    cfg = make_instance(cls, n, inst_seed)
    prover = make_adversary(prover_kind, {"k": k, "edits": k})
    hits = 0
    max_cert = 0
    max_bc = 0
    for j in range(trials):
        run_seed = _stable_seed(inst_seed, "trial", j)
        verdict, bw, _ = run_protocol(cfg, protocol, prover, run_seed, prime_mode=prime)
        hits += verdict.accepted
        max_cert = max(max_cert, *bw.max_cert_bits)
        max_bc = max(max_bc, bw.max_broadcast_bits)
    return [n, inst_seed, prover_kind, f"{hits / trials:.6g}", max_cert, max_bc]


def _render_sweep_figure(rows, out_csv):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    fig, ax = plt.subplots(figsize=(6, 4))
    xs = np.log2([r[0] for r in rows])
    cert = np.array([r[4] for r in rows], dtype=float)
    bc = np.array([r[5] for r in rows], dtype=float)
    ax.scatter(xs, cert, label="max certificate bits", marker="o")
    ax.scatter(xs, bc, label="max broadcast bits", marker="s")
    if len(set(xs)) > 1:
        a, b = np.polyfit(xs, bc, 1)
        grid = np.linspace(xs.min(), xs.max(), 50)
        ax.plot(grid, a * grid + b, "--",
                label=f"broadcast fit {a:.2f}*log2(n) + {b:.1f}")
    ax.set_xlabel("log2 n")
    ax.set_ylabel("bits")
    ax.legend()
    fig.tight_layout()
    fig_path = os.path.splitext(out_csv)[0] + ".png"
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return fig_path


def cmd_sweep(args) -> int:
    ns = [int(x) for x in args.n_list.split(",") if x.strip()] if args.n_list else []
    tasks = []
    for n in ns:
        for i in range(args.instances):
            inst_seed = _stable_seed(args.seed, n, i)
            tasks.append((args.protocol, args.cls, n, inst_seed,
                          args.prover, args.k, args.trials, args.prime))
    workers = int(os.environ.get("DIP_LAB_THREADS", "1"))
    if workers > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "instance_seed", "prover", "acceptance_frequency",
                    "max_cert_bits", "max_broadcast_bits"])
        w.writerows(rows)
    if rows:
        fig_path = _render_sweep_figure(rows, args.out)
        print(f"wrote {args.out} and {fig_path}")
    else:
        print(f"wrote {args.out}")
    return EXIT_ACCEPT


def cmd_oracle(args) -> int:
    print(classify(_load_graph_raw(args.graph)))
    return EXIT_ACCEPT


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dipsim",
        description="Distributed interactive proofs for cograph and "
                    "distance-hereditary recognition.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--class", dest="cls", required=True, choices=sorted(_CLASS_MIN_N))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run one protocol instance")
    r.add_argument("--protocol", required=True, choices=sorted(PROTOCOLS))
    r.add_argument("--graph", required=True)
    r.add_argument("--prover", default="honest", choices=PROVER_KINDS)
    r.add_argument("--k", type=int, default=1, help="bit-flip count / edge edits")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--prime", default="fixed", choices=("fixed", "paper"))
    r.add_argument("--cap", type=int, default=None, help="bandwidth cap in bits")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="acceptance/bandwidth sweep to CSV + figure")
    s.add_argument("--protocol", required=True, choices=sorted(PROTOCOLS))
    s.add_argument("--class", dest="cls", required=True, choices=sorted(_CLASS_MIN_N))
    s.add_argument("--n-list", required=True, help="comma-separated sizes")
    s.add_argument("--instances", type=int, default=1)
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--prover", default="honest", choices=PROVER_KINDS)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--prime", default="fixed", choices=("fixed", "paper"))
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle", help="classify a graph file")
    o.add_argument("--graph", required=True)
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
