#!/usr/bin/env python3
# Copyright 2026 The CryptGraph Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Downloads the dolphins and polblogs networks and converts them.

Output goes to data/datasets/{dolphins,polblogs}.txt in the cryptgraph edge
list format. Vertices are relabeled 0..n-1 in order of their GML id. Self
loops and repeated edges are dropped. polblogs keeps every directed edge; the
loader later drops the second edge of each reciprocal pair and says so.

    python3 scripts/fetch_datasets.py
    python3 scripts/fetch_datasets.py --source polblogs=/path/polblogs.zip
"""

import argparse
import io
import pathlib
import re
import sys
import urllib.request
import zipfile

DATASETS = {
    "dolphins": {
        "url": "http://www-personal.umich.edu/~mejn/netdata/dolphins.zip",
        "member": "dolphins.gml",
        "kind": "undirected",
        "expect_nodes": 62,
    },
    "polblogs": {
        "url": "http://www-personal.umich.edu/~mejn/netdata/polblogs.zip",
        "member": "polblogs.gml",
        "kind": "directed",
        "expect_nodes": 1490,
    },
}

_TOKEN = re.compile(r'\s*(?:(\[)|(\])|("(?:[^"\\]|\\.)*")|([^\s\[\]"]+))', re.S)


def parse_gml(text):
    """Returns (node_ids, edges) from a GML document."""
    stack = [[]]
    key = None
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        opened, closed, quoted, word = m.groups()
        if opened:
            stack.append([])
            stack[-2].append((key, stack[-1]))
            key = None
        elif closed:
            stack.pop()
        elif key is None:
            key = word
        else:
            stack[-1].append((key, quoted if quoted else word))
            key = None
    top = stack[0]
    graph = next((v for k, v in top if k == "graph"), top)
    nodes, edges = [], []
    for k, v in graph:
        if k == "node":
            nodes.append(int(dict(v)["id"]))
        elif k == "edge":
            d = dict(v)
            edges.append((int(d["source"]), int(d["target"])))
    return nodes, edges


def convert(name, raw):
    spec = DATASETS[name]
    if raw[:2] == b"PK":
        with zipfile.ZipFile(io.BytesIO(raw)) as z:
            raw = z.read(spec["member"])
    nodes, edges = parse_gml(raw.decode("utf-8", errors="replace"))
    index = {v: i for i, v in enumerate(sorted(set(nodes)))}
    if len(index) != spec["expect_nodes"]:
        print(f"warning: {name} has {len(index)} nodes, expected {spec['expect_nodes']}",
              file=sys.stderr)
    directed = spec["kind"] == "directed"
    seen, out = set(), []
    for u, v in edges:
        a, b = index[u], index[v]
        if a == b:
            continue
        k = (a, b) if directed else (min(a, b), max(a, b))
        if k in seen:
            continue
        seen.add(k)
        out.append(k)
    out.sort()
    lines = [f"# {name}: {len(index)} vertices, {len(out)} edges",
             f"graph {spec['kind']} {len(index)}"]
    lines += [f"e {a} {b}" for a, b in out]
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default=str(pathlib.Path(__file__).resolve().parent.parent /
                                             "data" / "datasets"))
    ap.add_argument("--source", action="append", default=[],
                    help="NAME=PATH to use a local .zip or .gml instead of downloading")
    ap.add_argument("names", nargs="*", default=sorted(DATASETS))
    args = ap.parse_args()
    local = dict(s.split("=", 1) for s in args.source)
    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    status = 0
    for name in args.names:
        if name not in DATASETS:
            print(f"unknown dataset {name}", file=sys.stderr)
            return 2
        try:
            if name in local:
                raw = pathlib.Path(local[name]).read_bytes()
            else:
                with urllib.request.urlopen(DATASETS[name]["url"], timeout=60) as r:
                    raw = r.read()
            text = convert(name, raw)
        except (OSError, KeyError, ValueError, zipfile.BadZipFile) as e:
            print(f"{name}: {e}", file=sys.stderr)
            status = 1
            continue
        path = out_dir / f"{name}.txt"
        path.write_text(text)
        print(f"wrote {path}")
    return status


if __name__ == "__main__":
    sys.exit(main())
