"""Rewrite the golden JSON reports from the current implementation.

Run from the repository root after an intentional schema change:
    python3 tests/golden/regenerate.py
"""

import contextlib
import io
import json
import pathlib

from commat.cli import main

HERE = pathlib.Path(__file__).parent
DATA = HERE.parent.parent / "src" / "commat" / "data"


def argv_for(args):
    return ["--json"] + [str(DATA / a[len("@data/"):]) if a.startswith("@data/") else a for a in args]


def run(args):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv_for(args))
    if code != 0:
        raise SystemExit(f"{args} exited with {code}")
    return json.loads(buf.getvalue())


if __name__ == "__main__":
    cases = json.loads((HERE / "cases.json").read_text())
    for name, args in cases.items():
        out = run(args)
        (HERE / f"{name}.json").write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
        print("wrote", name)
