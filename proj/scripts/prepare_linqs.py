#!/usr/bin/env python3
"""Convert a LINQS citation dataset (Cora, Citeseer) into gvnr input files.

Reads <name>.cites and <name>.content from SOURCE and writes
OUT/<name>.edges, OUT/<name>.labels and OUT/<name>.docs.

Each .content line is "paper_id bit_1 ... bit_m label". A document is the list
of words whose bit is set, written as tokens w<index>. Citations that point to
papers missing from .content are dropped.
"""

import argparse
import pathlib
import sys


def convert(source: pathlib.Path, name: str, out: pathlib.Path) -> dict:
    content = source / f"{name}.content"
    cites = source / f"{name}.cites"
    for path in (content, cites):
        if not path.exists():
            raise FileNotFoundError(path)

    papers = []
    words = None
    for line_no, line in enumerate(content.read_text(encoding="utf-8").splitlines(), 1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) < 3:
            raise ValueError(f"{content}:{line_no}: expected id, word bits and label")
        bits = fields[1:-1]
        if words is None:
            words = len(bits)
        elif len(bits) != words:
            raise ValueError(f"{content}:{line_no}: {len(bits)} word bits, expected {words}")
        tokens = [f"w{i}" for i, b in enumerate(bits) if float(b) != 0.0]
        papers.append((fields[0], fields[-1], tokens))

    known = {pid for pid, _, _ in papers}
    edges = []
    dropped = 0
    for line in cites.read_text(encoding="utf-8").splitlines():
        fields = line.split()
        if not fields:
            continue
        cited, citing = fields[0], fields[1]
        if cited in known and citing in known:
            edges.append((citing, cited))
        else:
            dropped += 1

    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"{name}.edges", "w", encoding="utf-8") as f:
        for citing, cited in edges:
            f.write(f"{citing} {cited}\n")
    with open(out / f"{name}.labels", "w", encoding="utf-8") as f:
        for pid, label, _ in papers:
            f.write(f"{pid} {label}\n")
    with open(out / f"{name}.docs", "w", encoding="utf-8") as f:
        for pid, _, tokens in papers:
            f.write(f"{pid}\t{' '.join(tokens)}\n")
    return {"papers": len(papers), "edges": len(edges), "dropped": dropped, "words": words or 0}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", type=pathlib.Path, help="directory with <name>.cites and <name>.content")
    parser.add_argument("--name", help="dataset name (default: directory name)")
    parser.add_argument("--out", type=pathlib.Path, help="output directory (default: data/<name>)")
    args = parser.parse_args(argv)
    name = args.name or args.source.name
    out = args.out or pathlib.Path("data") / name
    try:
        stats = convert(args.source, name, out)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"{name}: {stats['papers']} papers, {stats['edges']} citations "
          f"({stats['dropped']} dropped), {stats['words']} words -> {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
