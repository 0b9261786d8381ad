"""Reference oracle worker for the subprocess protocol.

Run as ``python -m aog_explainer.worker --weights mlp.json`` (or ``--function``)
and point ``--subprocess-cmd`` at it.  Reads request lines on stdin and writes
one response line per request.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .oracle.masking import masked_inputs
from .oracle.mlp import load_mlp
from .oracle.synthetic import load_function, parse_polynomial


def serve(model, stdin=sys.stdin, stdout=sys.stdout) -> None:
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        msg = json.loads(line)
        X = masked_inputs(np.array(msg["x"], dtype=float), np.array(msg["r"], dtype=float), np.array(msg["masks"], dtype=np.int64))
        values = model.predict(X) if len(msg["masks"]) else np.zeros(0)
        stdout.write(json.dumps({"id": msg["id"], "values": [float(v) for v in values]}) + "\n")
        stdout.flush()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="python -m aog_explainer.worker")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--weights", help="MLP weights JSON")
    group.add_argument("--function", help="synthetic function JSON file or polynomial in x1..xn")
    parser.add_argument("--n", type=int, default=None, help="variable count for a polynomial")
    args = parser.parse_args(argv)
    if args.weights:
        model = load_mlp(args.weights)
    elif os.path.exists(args.function):
        model = load_function(args.function)
    else:
        model = parse_polynomial(args.function, args.n)
    serve(model)
    return 0


if __name__ == "__main__":
    sys.exit(main())
