#!/usr/bin/env python3
"""Writes the score and reply fixtures under tests/data/.

    python3 tests/oracles/make_fixtures.py tests/data
"""

import json
import math
import random
import sys
from pathlib import Path


def bump_row(t, centres, widths, amps, ripple, phase):
    row = []
    for i in range(t):
        v = 0.2 + ripple * math.sin(0.9 * i + phase)
        for c, w, a in zip(centres, widths, amps):
            v += a * math.exp(-0.5 * ((i - c) / w) ** 2)
        row.append(round(v, 6))
    return row


def score_doc(rows, labels, fps=1.0):
    return {"fps": fps, "num_frames": len(rows[0]), "queries": labels, "scores": rows}


def write(path, doc):
    path.write_text(json.dumps(doc, indent=1) + "\n")


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    write(out / "scores_t100.json", score_doc(
        [bump_row(100, [25, 67.5], [2.75, 4.0], [0.6, 0.5], 0.03, 0.0),
         bump_row(100, [25, 67.5], [2.75, 4.0], [0.5, 0.6], 0.03, 0.4)],
        ["a person lifting a heavy log", "two teams on a sandy beach"]))

    write(out / "constant_t100.json", score_doc([[0.3] * 100], ["anything"]))

    rng = random.Random(600)
    rows = []
    for q in range(4):
        row = bump_row(600, [140 + 7 * q, 430 - 5 * q], [6.0, 9.0], [0.45, 0.4], 0.02, q)
        rows.append([round(v + rng.gauss(0.0, 0.01), 6) for v in row])
    write(out / "scores_t600_q4.json", score_doc(
        rows, ["a hand holding a red cup", "a kitchen with white tiles", "someone pouring water",
               "a close-up of a kettle"]))

    (out / "mock_mllm_reply.txt").write_text(
        "Sure, here are the descriptions.\n"
        '["a hand holding a red cup", "a kitchen with white tiles", '
        '"someone pouring water", "a close-up of a kettle"]\n')

    (out / "mock_mllm_reply_long.txt").write_text(
        "1. a red cup on a table\n2. a kitchen counter\n3. water being poured\n4. a steaming kettle\n"
        "5. a person smiling\n6. a window with curtains\n7. a tiled floor\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
