#!/usr/bin/env python3
# Copyright 2026 The meshtopo Authors
# SPDX-License-Identifier: Apache-2.0
#
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

"""Reference BPT encoder written from the token layout alone.

  bpt_oracle.py emit          expected token lists for the fixed fixtures
  bpt_oracle.py check CLI     compare `CLI tokenize` against this encoder
"""

import json
import math
import os
import random
import subprocess
import sys
import tempfile

LEVELS, BLOCKS, OFFSETS = 1024, 16, 64
FAN_BREAK = 1 + BLOCKS**3 + OFFSETS**3
QUAD, CLOSED_PATCH, CLOSED_BREAK = FAN_BREAK + 1, FAN_BREAK + 2, FAN_BREAK + 3
VOCAB = FAN_BREAK + 4


def quantize(c):
    c = min(max(c, -1.0), 1.0)
    b = math.floor((c + 1.0) / 2.0 * (LEVELS - 1) + 0.5)
    return min(max(b, 0), LEVELS - 1)


def canonical(verts, faces):
    bins = [tuple(quantize(c) for c in v) for v in verts]
    used = sorted({v for f in faces for v in f})
    # y, z, x with original index as the stable tie-break
    used.sort(key=lambda i: (bins[i][1], bins[i][2], bins[i][0], i))
    out_bins, remap = [], {}
    for i in used:
        if out_bins and out_bins[-1] == bins[i]:
            remap[i] = len(out_bins) - 1
        else:
            remap[i] = len(out_bins)
            out_bins.append(bins[i])
    out_faces = []
    for f in faces:
        g = []
        for v in f:
            if remap[v] not in g:
                g.append(remap[v])
        if len(g) < 3:
            continue
        k = g.index(min(g))
        out_faces.append(g[k:] + g[:k])
    out_faces.sort()
    return out_bins, out_faces


def vertex_tokens(b):
    blk = [x // OFFSETS for x in b]
    off = [x % OFFSETS for x in b]
    block_id = (blk[0] * BLOCKS + blk[1]) * BLOCKS + blk[2]
    offset_id = (off[0] * OFFSETS + off[1]) * OFFSETS + off[2]
    return [1 + block_id, 1 + BLOCKS**3 + offset_id]


def patches(nv, faces):
    covered = [False] * len(faces)
    result = []
    while not all(covered):
        counts = [0] * nv
        for fi, f in enumerate(faces):
            if not covered[fi]:
                for v in f:
                    counts[v] += 1
        best = max(counts)
        center = counts.index(best)
        mine = [fi for fi, f in enumerate(faces) if not covered[fi] and center in f]
        for fi in mine:
            covered[fi] = True
        result.append((center, mine))
    return result


def around(face, center):
    k = face.index(center)
    n = len(face)
    mid = face[(k + 2) % n] if n == 4 else None
    return [face[(k + 1) % n], mid, face[(k - 1) % n]]


def runs(center, fids, faces):
    rest = [(fi, around(faces[fi], center)) for fi in fids]
    out = []
    while rest:
        ends = {r[1][2] for r in rest}
        heads = [r for r in rest if r[1][0] not in ends]
        pool = heads if heads else rest
        first = min(pool, key=lambda r: r[1][0])
        cycle = not heads
        rest.remove(first)
        chain = [first]
        while True:
            nxt = [r for r in rest if r[1][0] == chain[-1][1][2]]
            if not nxt:
                break
            rest.remove(nxt[0])
            chain.append(nxt[0])
        closed = cycle and chain[-1][1][2] == chain[0][1][0]
        out.append((chain, closed))
    return out


def encode(verts, faces):
    bins, faces = canonical(verts, faces)
    toks, pspans, fspans = [], [], []
    for center, fids in patches(len(bins), faces):
        pstart = len(toks)
        fstart = pstart
        for r, (chain, closed) in enumerate(runs(center, fids, faces)):
            if r == 0:
                toks.append(CLOSED_PATCH if closed else 0)
                toks += vertex_tokens(bins[center])
            else:
                toks.append(CLOSED_BREAK if closed else FAN_BREAK)
            toks += vertex_tokens(bins[chain[0][1][0]])
            for i, (_, (s, mid, e)) in enumerate(chain):
                last = closed and i == len(chain) - 1
                if mid is not None:
                    toks.append(QUAD)
                    toks += vertex_tokens(bins[mid])
                if not last:
                    toks += vertex_tokens(bins[e])
                fspans.append([fstart, len(toks)])
                fstart = len(toks)
        pspans.append([pstart, len(toks)])
    return {"vocab": VOCAB, "tokens": toks, "patch_spans": pspans, "face_spans": fspans}


def window(enc, max_faces, start):
    fs, ps, t = enc["face_spans"], enc["patch_spans"], enc["tokens"]
    end_face = min(len(fs), start + max_faces)
    anchor = fs[start][0]
    begin = next(p[0] for p in ps if p[0] <= anchor < p[1])
    end = fs[end_face - 1][1]
    toks = t[begin:end]
    openers = (0, FAN_BREAK, CLOSED_PATCH, CLOSED_BREAK)
    if end_face < len(fs):
        nxt = fs[end_face]
        if nxt[0] == nxt[1] or t[nxt[0]] not in openers:
            for i in range(len(toks) - 1, -1, -1):
                if toks[i] in openers:
                    toks[i] = {CLOSED_PATCH: 0, CLOSED_BREAK: FAN_BREAK}.get(toks[i], toks[i])
                    break
    return toks


# Fixtures, same coordinates as tests/support/fixtures.cpp.
def fan(n, rim, sweep):
    v = [(0.0, 0.0, 0.0)]
    v += [(0.5 * math.cos(sweep * i / n), 0.5 * math.sin(sweep * i / n), 0.0) for i in range(rim)]
    return v, [[0, 1 + i, 1 + (i + 1) % rim] for i in range(n)]


def grid(nx, ny, quads):
    v = [(-1.0 + 2.0 * i / nx, -1.0 + 2.0 * j / ny, 0.0) for j in range(ny + 1) for i in range(nx + 1)]
    f = []
    for j in range(ny):
        for i in range(nx):
            a, b = j * (nx + 1) + i, j * (nx + 1) + i + 1
            c, d = b + nx + 1, a + nx + 1
            f += [[a, b, c, d]] if quads else [[a, b, c], [a, c, d]]
    return v, f


FIXTURES = {
    "triangle": ([(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)], [[0, 1, 2]]),
    "tetrahedron": ([(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)],
                    [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]),
    "closed_fan": fan(5, 5, 2 * math.pi),
    "open_fan": fan(5, 6, 0.75 * math.pi),
    "quad_grid": grid(3, 2, True),
    "tri_grid": grid(5, 1, False),
}


def random_mesh(rng):
    nv = 4 + rng.randrange(30)
    v = [tuple(rng.uniform(-1, 1) for _ in range(3)) for _ in range(nv)]
    f = []
    for _ in range(1 + rng.randrange(40)):
        f.append(rng.sample(range(nv), 4 if rng.random() < 0.3 else 3))
    return v, f


def emit():
    out = {}
    for name, (v, f) in FIXTURES.items():
        enc = encode(v, f)
        out[name] = {"count": len(enc["tokens"]), "tokens": enc["tokens"],
                     "face_spans": enc["face_spans"]}
    out["tri_grid_window_4_3"] = window(encode(*FIXTURES["tri_grid"]), 4, 3)
    out["block_64_0_0"] = vertex_tokens((64, 0, 0))
    print(json.dumps(out))


def write_obj(path, v, f):
    with open(path, "w") as fh:
        for p in v:
            fh.write("v %r %r %r\n" % p)
        for face in f:
            fh.write("f " + " ".join(str(i + 1) for i in face) + "\n")


def check(cli):
    rng = random.Random(20260)
    cases = list(FIXTURES.items()) + [("random%d" % i, random_mesh(rng)) for i in range(60)]
    bad = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, (v, f) in cases:
            path = os.path.join(tmp, name + ".obj")
            write_obj(path, v, f)
            res = subprocess.run([cli, "tokenize", path], capture_output=True, text=True)
            if res.returncode != 0:
                print("FAIL %s: exit %d %s" % (name, res.returncode, res.stderr.strip()))
                bad += 1
                continue
            got = json.loads(res.stdout)
            want = encode(v, f)
            for key in ("vocab", "tokens", "patch_spans", "face_spans"):
                if got[key] != want[key]:
                    print("FAIL %s: %s differs" % (name, key))
                    bad += 1
                    break
    print("%d/%d meshes match the reference encoder" % (len(cases) - bad, len(cases)))
    return 1 if bad else 0


if __name__ == "__main__":
    if len(sys.argv) >= 2 and sys.argv[1] == "emit":
        emit()
    elif len(sys.argv) == 3 and sys.argv[1] == "check":
        sys.exit(check(sys.argv[2]))
    else:
        sys.exit(__doc__)
