#!/usr/bin/env python3
# SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
# SPDX-License-Identifier: Apache-2.0
"""Generate a quasi-cyclic LDPC base matrix with a dual-diagonal parity part.

The info part is built column by column: rows are picked to balance check
degrees, and shifts are drawn so that no length-4 cycle exists for any of the
lifting sizes passed with --check-z (shifts are reduced mod Z when lifted).
"""
import argparse
import random


def has_four_cycle(base, col, rows, shifts, lifts):
    mb = len(base)
    for zl in lifts:
        for a_idx in range(len(rows)):
            for b_idx in range(a_idx + 1, len(rows)):
                ra, rb = rows[a_idx], rows[b_idx]
                sa, sb = shifts[a_idx] % zl, shifts[b_idx] % zl
                for other in range(len(base[0])):
                    if other == col:
                        continue
                    ta, tb = base[ra][other], base[rb][other]
                    if ta < 0 or tb < 0:
                        continue
                    if (sa - ta + tb - sb) % zl == 0:
                        return True
    return False


def build(mb, nb, heavy_cols, heavy_weight, weight, z_ref, lifts, seed):
    rng = random.Random(seed)
    kb = nb - mb
    base = [[-1] * nb for _ in range(mb)]
    for i in range(mb):
        base[i][kb + i] = 0
        if i + 1 < mb:
            base[i + 1][kb + i] = 0
    degree = [sum(1 for v in row if v >= 0) for row in base]
    for col in range(kb):
        w = heavy_weight if col < heavy_cols else weight
        for _attempt in range(2000):
            order = sorted(range(mb), key=lambda r: (degree[r], rng.random()))
            rows = sorted(order[:w])
            shifts = [rng.randrange(z_ref) for _ in rows]
            if not has_four_cycle(base, col, rows, shifts, lifts):
                break
        else:
            raise SystemExit(f"could not place column {col} without 4-cycles")
        for r, s in zip(rows, shifts):
            base[r][col] = s
            degree[r] += 1
    return base


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, required=True)
    ap.add_argument("--cols", type=int, required=True)
    ap.add_argument("--heavy-cols", type=int, default=0)
    ap.add_argument("--heavy-weight", type=int, default=6)
    ap.add_argument("--weight", type=int, default=3)
    ap.add_argument("--z-ref", type=int, required=True)
    ap.add_argument("--check-z", type=int, nargs="+", required=True)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--name", default="")
    args = ap.parse_args()
    base = build(args.rows, args.cols, args.heavy_cols, args.heavy_weight,
                 args.weight, args.z_ref, args.check_z, args.seed)
    print("# SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors")
    print("# SPDX-License-Identifier: Apache-2.0")
    print(f"# {args.name}".rstrip())
    print(f"# generated by tools/gen_base_matrix.py --rows {args.rows} --cols {args.cols} "
          f"--heavy-cols {args.heavy_cols} --heavy-weight {args.heavy_weight} "
          f"--weight {args.weight} --z-ref {args.z_ref} --check-z {' '.join(map(str, args.check_z))} "
          f"--seed {args.seed}")
    print(f"{args.rows} {args.cols} {args.z_ref}")
    for row in base:
        print(" ".join(f"{v:3d}" for v in row))


if __name__ == "__main__":
    main()
