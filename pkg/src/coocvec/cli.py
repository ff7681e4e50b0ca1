"""Command-line pipeline over the workbench modules.

Every subcommand reads and writes the formats module's file types, embeds a
provenance stamp in each output, and maps module errors to a one-line
`error <category>: message` on stderr with a nonzero exit.  Outputs are
byte-identical across runs with the same configuration and seed on a single
thread.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import convex_model, evaluation, factorization, formats, regularization
from .closed_form import (
    LOSS_NAMES,
    assemble_spmi_solution,
    minimize_pair_numeric,
    solve_pair,
)
from .corpus import WindowSpec, build_vocabulary, count_sharded, read_corpus
from .errors import DomainError, FormatError, MixedProvenanceError, WorkbenchError
from .pmi import VARIANTS, SparseMatrix, build_matrix, pmi_value
from .vectors import Embedding


def _config_dict(args: argparse.Namespace, skip=("func", "command", "config")) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or callable(value):
            continue
        out[key] = value
    return out


def _emit(lines: list[str], path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------- subcommands


def cmd_count(args: argparse.Namespace) -> int:
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("COOC_THREADS", "1"))
    records = read_corpus(args.input)
    vocab = build_vocabulary(records, min_count=args.min_count)
    win = WindowSpec(
        left=args.left,
        right=args.right,
        positional_weight=args.weighting,
        subsample_threshold=args.subsample,
        context_subsample=args.context_subsample,
        context_subsample_threshold=args.context_subsample_threshold,
        stochastic_subsample=args.stochastic,
    )
    stats = count_sharded(records, vocab, win, seed=args.seed, shards=threads)
    config = _config_dict(args)
    config["threads"] = threads
    prov = formats.make_provenance("count", config)
    formats.write_cooc(stats, args.output, prov=prov, binary=args.binary)
    vocab_out = args.vocab_out or args.output + ".vocab"
    formats.write_vocab(vocab, vocab_out, prov=prov)
    return 0


def cmd_pmi(args: argparse.Namespace) -> int:
    stats = formats.read_cooc(args.cooc)
    matrix = build_matrix(stats, args.variant, k=args.k)
    prov = formats.make_provenance(
        "pmi", _config_dict(args), {"cooc": formats.read_provenance(args.cooc)}
    )
    formats.write_matrix(
        matrix, args.output, tag=args.variant, k=args.k, prov=prov, binary=args.binary
    )
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    stats = formats.read_cooc(args.cooc)
    entries = {}
    alphas = {}
    for (w, c) in sorted(stats.pairs):
        sol = solve_pair(
            args.loss,
            stats.count(w, c),
            float(stats.row_marginal[w]),
            float(stats.col_marginal[c]),
            stats.total,
            args.k,
        )
        entries[(w, c)] = sol.x_star
        if sol.alpha is not None:
            alphas[(w, c)] = sol.alpha
    implicit = None if args.loss == "logistic" else -1.0
    matrix = SparseMatrix(
        rows=stats.n_words, cols=stats.n_words, entries=entries, implicit_value=implicit
    )
    prov = formats.make_provenance(
        "solve", _config_dict(args), {"cooc": formats.read_provenance(args.cooc)}
    )
    formats.write_matrix(
        matrix,
        args.output,
        tag=f"solution:{args.loss}",
        k=args.k,
        prov=prov,
        binary=args.binary,
    )
    if args.alpha_out:
        if args.loss == "hinge":
            raise DomainError("hinge loss has no curvature weights to export")
        alpha_matrix = SparseMatrix(
            rows=stats.n_words, cols=stats.n_words, entries=alphas, implicit_value=0.0
        )
        formats.write_matrix(
            alpha_matrix,
            args.alpha_out,
            tag=f"alpha:{args.loss}",
            k=args.k,
            prov=prov,
            binary=args.binary,
        )
    return 0


def cmd_regularize(args: argparse.Namespace) -> int:
    stats = formats.read_cooc(args.cooc)
    spec = regularization.RegSpec(kind=args.reg, k=args.k, lam=args.lam)
    matrix = regularization.regularize_stats(stats, spec)
    prov = formats.make_provenance(
        "regularize", _config_dict(args), {"cooc": formats.read_provenance(args.cooc)}
    )
    formats.write_matrix(
        matrix,
        args.output,
        tag=f"reg:{args.reg}",
        k=args.k,
        lam=args.lam,
        prov=prov,
        binary=args.binary,
    )
    return 0


def cmd_factorize(args: argparse.Namespace) -> int:
    matrix, _ = formats.read_matrix(args.matrix)
    words = None
    if args.vocab:
        words = formats.read_vocab(args.vocab).words
    upstream = {"matrix": formats.read_provenance(args.matrix)}
    if args.weighted:
        if not args.alpha:
            raise FormatError("--weighted needs --alpha with curvature weights")
        alpha_matrix, _ = formats.read_matrix(args.alpha)
        upstream["alpha"] = formats.read_provenance(args.alpha)
        weights = {}
        for key in matrix.entries:
            if key not in alpha_matrix.entries:
                raise FormatError(f"alpha file lacks weight for stored pair {key}")
            weights[key] = alpha_matrix.entries[key]
        problem = factorization.WeightedFactorizationProblem(
            n_rows=matrix.rows,
            n_cols=matrix.cols,
            targets=dict(matrix.entries),
            weights=weights,
            dim=args.dim,
            epochs=args.epochs,
            ridge=args.ridge,
            tol=args.tol,
        )
        result = factorization.weighted_factorize(problem, seed=args.seed)
        W, C = result.pair.W, result.pair.C
        meta = {"method": "als", "converged": str(result.converged).lower()}
        row_words = words or [str(i) for i in range(matrix.rows)]
        emb = Embedding(words=row_words, vectors=W, meta=meta)
        prov = formats.make_provenance("factorize", _config_dict(args), upstream)
        formats.write_embedding(emb, args.output, prov=prov)
        if args.context_out:
            ctx_words = [str(i) for i in range(matrix.cols)] if words is None else words
            formats.write_embedding(
                Embedding(words=ctx_words, vectors=C, meta=meta), args.context_out, prov=prov
            )
        return 0
    svd = factorization.truncated_svd(
        matrix,
        dim=args.dim,
        seed=args.seed,
        oversample=args.oversample,
        power_iters=args.power_iters,
    )
    emb = factorization.word_vectors(svd, args.flavor, words=words)
    emb.meta = {"method": "svd", "flavor": args.flavor}
    prov = formats.make_provenance("factorize", _config_dict(args), upstream)
    formats.write_embedding(emb, args.output, prov=prov)
    return 0


def cmd_train_convex(args: argparse.Namespace) -> int:
    records = read_corpus(args.input)
    vocab = build_vocabulary(records, min_count=args.min_count)
    spec = convex_model.ContextSpec(
        mode=args.mode,
        window=WindowSpec(left=args.left, right=args.right),
        weighting=args.weighting,
    )
    cfg = convex_model.TrainConfig(
        l1=args.l1,
        objective=args.objective,
        k_neg=args.k_neg,
        noise=args.noise,
        epochs=args.epochs,
        step_initial=args.step,
        step_decay=not args.no_decay,
        full_batch=args.full_batch,
        seed=args.seed,
    )
    model = convex_model.train(records, vocab, spec, cfg)
    prov = formats.make_provenance("train-convex", _config_dict(args))
    formats.write_embedding(model, args.output, prov=prov)
    if args.vocab_out:
        formats.write_vocab(vocab, args.vocab_out, prov=prov)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    emb = formats.read_embedding(args.embedding)
    dataset = formats.read_similarity(args.dataset)
    report = evaluation.spearman(emb, dataset, metric=args.metric)
    prov = formats.make_provenance(
        "eval", _config_dict(args), {"embedding": formats.read_provenance(args.embedding)}
    )
    lines = [
        formats.provenance_line(prov),
        f"spearman\t{report.coefficient!r}",
        f"coverage\t{report.coverage!r}",
        f"pairs_scored\t{report.n_scored}",
    ]
    _emit(lines, args.output)
    return 0


def cmd_neighbors(args: argparse.Namespace) -> int:
    emb = formats.read_embedding(args.embedding)
    hits = evaluation.neighbors(emb, args.word, args.n, metric=args.metric)
    lines = [f"{w}\t{s!r}" for w, s in hits]
    _emit(lines, args.output)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    provs = {"cooc": formats.read_provenance(args.cooc)}
    stats = formats.read_cooc(args.cooc)
    matrix = None
    if args.matrix:
        matrix, _ = formats.read_matrix(args.matrix)
        provs["matrix"] = formats.read_provenance(args.matrix)
    roots = [p.root for p in provs.values() if p is not None]
    if any(r is None for r in roots) or len(set(roots)) > 1:
        raise MixedProvenanceError(
            "inputs carry different provenance roots; rerun the pipeline end to end"
        )

    rng = np.random.default_rng(args.seed)
    pair_keys = sorted(stats.pairs)
    if len(pair_keys) > args.samples:
        chosen = rng.choice(len(pair_keys), size=args.samples, replace=False)
        pair_keys = [pair_keys[i] for i in sorted(chosen)]
    tuples = [
        (
            stats.count(w, c),
            float(stats.row_marginal[w]),
            float(stats.col_marginal[c]),
            stats.total,
        )
        for (w, c) in pair_keys
    ]

    lines = [formats.provenance_line(formats.make_provenance("report", _config_dict(args), provs))]
    for loss in LOSS_NAMES:
        worst = 0.0
        agree = True
        for n_wc, n_w, n_c, total in tuples:
            sol = solve_pair(loss, n_wc, n_w, n_c, total, args.k)
            if sol.neg_inf:
                continue
            numeric = minimize_pair_numeric(loss, n_wc, n_w, n_c, total, args.k)
            worst = max(worst, abs(sol.x_star - numeric))
            shifted = math.log(n_wc * total / (n_w * n_c)) - math.log(args.k)
            if loss == "hinge":
                agree = agree and (sol.x_star > 0) == (shifted >= 0)
            elif sol.x_star != 0.0 and shifted != 0.0:
                agree = agree and (sol.x_star > 0) == (shifted > 0)
        lines.append(f"closed_form_max_abs_err[{loss}]\t{worst!r}")
        lines.append(f"sign_agreement[{loss}]\t{'yes' if agree else 'NO'}")

    lam_grid = [0.01, 0.1, 1.0, 10.0]
    l1_worst = 0.0
    l2_worst = 0.0
    for (w, c), (n_wc, n_w, n_c, total) in zip(pair_keys, tuples):
        pmi = pmi_value(stats, w, c)
        if pmi is None:
            continue
        for lam in lam_grid:
            exact1 = regularization.solve_exact(pmi, args.k, lam, "l1")
            l1_worst = max(l1_worst, abs(regularization.solve_l1(pmi, args.k, lam) - exact1))
            if pmi - math.log(args.k) > 0.0:
                exact2 = regularization.solve_exact(pmi, args.k, lam, "l2")
                chord = regularization.solve_l2(pmi, args.k, lam)
                if exact2 != 0.0:
                    l2_worst = max(l2_worst, abs(chord - exact2) / abs(exact2))
    lines.append(f"l1_closed_form_max_abs_err\t{l1_worst!r}")
    lines.append(f"l2_chord_max_rel_err\t{l2_worst!r}")

    if matrix is not None:
        for flavor in ("plain", "symmetric"):
            gap = factorization.consistency_report(matrix, flavor)
            lines.append(f"consistency_max_abs_gap[{flavor}]\t{gap!r}")

    _emit(lines, args.output)
    return 0


# ------------------------------------------------------------------ parsing


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="coocvec",
        description="co-occurrence word-vector workbench",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    def sub(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = subparsers.add_parser(name, help=help_text)
        p.add_argument("--config", help="file of key=value defaults, overridden by flags")
        p.set_defaults(func=func)
        subs[name] = p
        return p

    p = sub("count", cmd_count, "count weighted co-occurrences from a corpus")
    p.add_argument("--input", required=True, help="corpus: one document per line")
    p.add_argument("--output", required=True, help="co-occurrence triplet file")
    p.add_argument("--vocab-out", help="vocabulary TSV (default: <output>.vocab)")
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--left", type=int, default=2)
    p.add_argument("--right", type=int, default=2)
    p.add_argument("--weighting", choices=("constant", "reciprocal"), default="constant")
    p.add_argument("--subsample", type=float, default=None, help="target down-weight threshold")
    p.add_argument("--context-subsample", action="store_true")
    p.add_argument("--context-subsample-threshold", type=float, default=None)
    p.add_argument("--stochastic", action="store_true", help="sampled drops instead of weights")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="record shards (default COOC_THREADS or 1)")
    p.add_argument("--binary", action="store_true")

    p = sub("pmi", cmd_pmi, "build a PMI-family matrix")
    p.add_argument("--cooc", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--variant", choices=VARIANTS, required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--binary", action="store_true")

    p = sub("solve", cmd_solve, "closed-form pair scores for one loss")
    p.add_argument("--cooc", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--loss", choices=LOSS_NAMES, required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--alpha-out", help="also write curvature weights")
    p.add_argument("--binary", action="store_true")

    p = sub("regularize", cmd_regularize, "L1/L2-regularized pair scores")
    p.add_argument("--cooc", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--reg", choices=regularization.REG_KINDS, required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--binary", action="store_true")

    p = sub("factorize", cmd_factorize, "low-rank vectors from a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--flavor", choices=("plain", "symmetric"), default="plain")
    p.add_argument("--vocab", help="vocabulary TSV for row labels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oversample", type=int, default=8)
    p.add_argument("--power-iters", type=int, default=4)
    p.add_argument("--weighted", action="store_true", help="weighted ALS instead of SVD")
    p.add_argument("--alpha", help="curvature weight file for --weighted")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--ridge", type=float, default=1e-8)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--context-out", help="also write context vectors (weighted mode)")

    p = sub("train-convex", cmd_train_convex, "train the convex sparse model")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--vocab-out")
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--mode", choices=convex_model.CONTEXT_MODES, default="bag")
    p.add_argument("--left", type=int, default=2)
    p.add_argument("--right", type=int, default=2)
    p.add_argument("--weighting", choices=("constant", "reciprocal"), default="constant")
    p.add_argument("--objective", choices=convex_model.OBJECTIVES, default="negative_sampling")
    p.add_argument("--k-neg", type=int, default=5)
    p.add_argument("--noise", choices=convex_model.NOISE_KINDS, default="unigram")
    p.add_argument("--l1", type=float, default=0.0)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--step", type=float, default=0.025)
    p.add_argument("--no-decay", action="store_true")
    p.add_argument("--full-batch", action="store_true")
    p.add_argument("--seed", type=int, default=0)

    p = sub("eval", cmd_eval, "rank correlation against a similarity dataset")
    p.add_argument("--embedding", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--metric", choices=evaluation.METRICS, default="cosine")
    p.add_argument("--output")

    p = sub("neighbors", cmd_neighbors, "nearest neighbours of one word")
    p.add_argument("--embedding", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--metric", choices=evaluation.METRICS, default="cosine")
    p.add_argument("--output")

    p = sub("report", cmd_report, "closed-form vs numeric sweeps and factor consistency")
    p.add_argument("--cooc", required=True)
    p.add_argument("--matrix", help="marker-free matrix for the consistency check")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")

    return parser, subs


def _apply_config_file(argv: list[str], subs: dict[str, argparse.ArgumentParser]) -> None:
    command = next((a for a in argv if not a.startswith("-")), None)
    if command not in subs:
        return
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return
    sub = subs[command]
    actions = {a.dest: a for a in sub._actions}
    overrides = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise FormatError(f"config line needs key=value, got {line!r}")
                key, _, value = line.partition("=")
                dest = key.strip().replace("-", "_")
                if dest not in actions or dest in ("config", "func", "command"):
                    raise FormatError(f"unknown config key {key.strip()!r} for {command}")
                action = actions[dest]
                if isinstance(action, argparse._StoreTrueAction):
                    overrides[dest] = value.strip().lower() in ("1", "true", "yes", "on")
                elif action.type is not None:
                    overrides[dest] = action.type(value.strip())
                else:
                    overrides[dest] = value.strip()
    except OSError as exc:
        raise FormatError(f"cannot read config file {path}: {exc}") from exc
    sub.set_defaults(**overrides)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        _apply_config_file(argv, subs)
        args = parser.parse_args(argv)
        return args.func(args)
    except WorkbenchError as err:
        print(f"error {err.category}: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error io: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
