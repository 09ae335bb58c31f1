#!/usr/bin/env python3
"""Convert common graph-dataset formats into a ccgc bundle directory.

A bundle is:
    features.csv   N rows of D comma-separated floats
    edges.tsv      one "u<TAB>v" pair per line, 0-indexed
    labels.txt     optional, one integer per line
    meta.json      {"num_classes": K, "name": str}

Supported inputs:
  * .npz archives with keys like feat/features/x, adj/edges/edge_index, label/labels/y
    (the layout used by several public graph-clustering repositories)
  * a directory holding feat.npy / adj.npy / label.npy

Usage:
    python3 convert_datasets.py INPUT OUT_DIR [--name NAME]
"""
import argparse
import json
import os
import sys

import numpy as np


def pick(d, names):
    for n in names:
        if n in d:
            return d[n]
    return None


def load_any(path):
    if os.path.isdir(path):
        feat = np.load(os.path.join(path, "feat.npy"))
        adj = np.load(os.path.join(path, "adj.npy"))
        label_path = os.path.join(path, "label.npy")
        label = np.load(label_path) if os.path.exists(label_path) else None
        return feat, adj, label
    data = np.load(path, allow_pickle=True)
    feat = pick(data, ["feat", "features", "x", "X"])
    adj = pick(data, ["adj", "A", "edges", "edge_index"])
    label = pick(data, ["label", "labels", "y", "Y"])
    if feat is None or adj is None:
        sys.exit(f"could not find feature/adjacency arrays in {path}; keys: {list(data)}")
    return feat, adj, label


def edges_from(adj):
    adj = np.asarray(adj)
    if adj.ndim == 2 and adj.shape[0] == adj.shape[1]:
        us, vs = np.nonzero(adj)
        return [(int(u), int(v)) for u, v in zip(us, vs) if u < v]
    if adj.ndim == 2 and 2 in adj.shape:  # edge list, either orientation
        pairs = adj.T if adj.shape[0] == 2 else adj
        out = set()
        for u, v in pairs:
            u, v = int(u), int(v)
            if u != v:
                out.add((min(u, v), max(u, v)))
        return sorted(out)
    sys.exit(f"unrecognized adjacency shape {adj.shape}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("input")
    ap.add_argument("out_dir")
    ap.add_argument("--name", default=None)
    args = ap.parse_args()

    feat, adj, label = load_any(args.input)
    feat = np.asarray(feat, dtype=np.float64)
    edges = edges_from(adj)

    os.makedirs(args.out_dir, exist_ok=True)
    np.savetxt(os.path.join(args.out_dir, "features.csv"), feat,
               delimiter=",", fmt="%.17g")
    with open(os.path.join(args.out_dir, "edges.tsv"), "w") as f:
        for u, v in edges:
            f.write(f"{u}\t{v}\n")

    meta = {"name": args.name or os.path.splitext(os.path.basename(args.input))[0]}
    if label is not None:
        label = np.asarray(label).astype(int).ravel()
        with open(os.path.join(args.out_dir, "labels.txt"), "w") as f:
            for l in label:
                f.write(f"{l}\n")
        meta["num_classes"] = int(label.max()) + 1
    with open(os.path.join(args.out_dir, "meta.json"), "w") as f:
        json.dump(meta, f, indent=2)

    print(f"wrote {feat.shape[0]} nodes, {feat.shape[1]} features, "
          f"{len(edges)} edges to {args.out_dir}")


if __name__ == "__main__":
    main()
