"""Run the whole command-line pipeline on a toy corpus.

Writes everything under a scratch directory (default: a fresh temp dir) and
prints the interesting artifacts as it goes.  Handy as a smoke test and as a
copy-paste source for the command zoo.
"""
import argparse
import pathlib
import sys
import tempfile

from coocvec.cli import main as cli

CORPUS = """\
the cat sat on the mat
the dog sat on the rug
a cat and a dog met on the rug
the dog saw the cat on the mat
a dog and a cat sat by the door
"""

SIMPAIRS = [
    ("cat", "dog", 8.0),
    ("mat", "rug", 7.5),
    ("cat", "mat", 3.0),
    ("door", "rug", 2.5),
    ("the", "a", 6.0),
]


def run(*argv: str) -> None:
    print("$ coocvec " + " ".join(argv))
    code = cli(list(argv))
    if code != 0:
        sys.exit(code)


def show(path: pathlib.Path, limit: int = 8) -> None:
    lines = path.read_text().splitlines()
    for line in lines[:limit]:
        print("   ", line)
    if len(lines) > limit:
        print(f"    ... ({len(lines) - limit} more lines)")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workdir", help="where to put artifacts (default: temp dir)")
    args = ap.parse_args()
    work = pathlib.Path(args.workdir or tempfile.mkdtemp(prefix="coocvec-demo-"))
    work.mkdir(parents=True, exist_ok=True)
    print(f"working in {work}\n")

    corpus = work / "corpus.txt"
    corpus.write_text(CORPUS)
    sim = work / "sim.tsv"
    sim.write_text("".join(f"{a}\t{b}\t{s}\n" for a, b, s in SIMPAIRS))

    counts = work / "counts.txt"
    run("count", "--input", str(corpus), "--output", str(counts), "--left", "2", "--right", "2")
    print("  vocabulary:")
    show(pathlib.Path(str(counts) + ".vocab"))

    ppmi = work / "ppmi.txt"
    run("pmi", "--cooc", str(counts), "--output", str(ppmi), "--variant", "ppmi")

    sol = work / "solution.txt"
    alpha = work / "alpha.txt"
    run("solve", "--cooc", str(counts), "--output", str(sol), "--loss", "squared",
        "--alpha-out", str(alpha))

    reg = work / "reg_l1.txt"
    run("regularize", "--cooc", str(counts), "--output", str(reg), "--reg", "l1", "--lam", "0.5")

    emb = work / "embedding.txt"
    run("factorize", "--matrix", str(ppmi), "--output", str(emb), "--dim", "4",
        "--vocab", str(counts) + ".vocab")

    als = work / "als.txt"
    run("factorize", "--matrix", str(sol), "--output", str(als), "--dim", "3",
        "--weighted", "--alpha", str(alpha), "--vocab", str(counts) + ".vocab",
        "--epochs", "100")

    conv = work / "convex.txt"
    run("train-convex", "--input", str(corpus), "--output", str(conv),
        "--epochs", "20", "--k-neg", "2", "--full-batch", "--step", "0.5")

    print("  nearest neighbours of 'cat' in the factorized space:")
    run("neighbors", "--embedding", str(emb), "--word", "cat", "--n", "4")

    evalout = work / "eval.tsv"
    run("eval", "--embedding", str(emb), "--dataset", str(sim), "--output", str(evalout))
    show(evalout)

    run("report", "--cooc", str(counts), "--matrix", str(ppmi), "--samples", "50")

    print(f"\nartifacts left in {work}")


if __name__ == "__main__":
    main()
