#!/usr/bin/env python3
"""Smoke test for the qhopf_py extension module.

Builds the cdylib with cargo, loads it, and exercises the exposed
surface: normal forms, basis enumeration, the verification suites, the
projector matrices and the numeric winding pairing.

Run from the repository root (or anywhere inside it):

    python3 python/smoke_test.py
"""

import json
import math
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile


def build_and_import():
    root = pathlib.Path(__file__).resolve().parent.parent
    subprocess.run(
        ["cargo", "build", "--release", "-p", "qhopf-py"], cwd=root, check=True
    )
    built = root / "target" / "release" / "libqhopf_py.so"
    if not built.exists():  # e.g. macOS
        built = root / "target" / "release" / "libqhopf_py.dylib"
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    stage = pathlib.Path(tempfile.mkdtemp(prefix="qhopf-py-"))
    shutil.copy2(built, stage / f"qhopf_py{suffix}")
    sys.path.insert(0, str(stage))
    import qhopf_py

    return qhopf_py


def main():
    qh = build_and_import()
    failures = []

    def check(name, cond, detail=""):
        line = "ok" if cond else "FAIL"
        print(f"{line:4s} {name}" + (f"  ({detail})" if detail and not cond else ""))
        if not cond:
            failures.append(name)

    # Normal forms against the known reductions.
    disc = qh.Presentation("disc")
    check("disc relation nf", disc.nf("x* x") == "(3/4) + (1/4) x x*", disc.nf("x* x"))
    s3 = qh.Presentation("s3")
    check(
        "total-space nf",
        s3.nf("a* a b* b") == "(1/4) + (1/4) a a* + (1/2) b b*",
        s3.nf("a* a b* b"),
    )
    check("parameter override", qh.Presentation("disc", q="1/3").nf("x* x") ==
          "(2/3) + (1/3) x x*")

    # Basis enumeration and completion.
    check("degree-1 basis", s3.basis(1) == ["a", "a*", "b", "b*"])
    check("filtration dims", [len(s3.basis_upto(d)) for d in range(7)] ==
          [1, 5, 15, 35, 69, 121, 195])
    check("completion rule count", s3.complete(8) == 21)
    check("completed_to", s3.completed_to() >= 8)

    # Verification suites.
    bundle = qh.verify_bundle(degree=3)
    check("bundle suite", bundle and all(r["status"] == "pass" for r in bundle),
          json.dumps([r for r in bundle if r["status"] != "pass"]))
    galois = qh.verify_galois(max_winding=3)
    check("galois suite", galois and all(r["status"] == "pass" for r in galois))

    # Representations.
    check("family list", "s3-shift-b" in qh.families())
    res = qh.relation_residual("s3-shift-b", dim=64, window=58)
    check("shift-b residual", res <= 1e-12, str(res))
    norms = dict(qh.generator_norms("s3-shift-a", dim=64))
    check("generator norms", all(v <= 1.0 + 1e-12 for v in norms.values()))

    # Projectors and the pairing.
    check("trivial projector", qh.projector(0) == [["1"]])
    e1 = qh.projector(1)
    check("E(1) size", len(e1) == 2 and len(e1[0]) == 2)
    rep = qh.pairing(1, dim=128, window=64)
    check("pairing value", math.isclose(rep["value_re"], 1.0, abs_tol=1e-8),
          str(rep))
    check("pairing nearest int", rep["nearest_int"] == 1)
    check("pairing tail bound", rep["tail_bound"] < 1e-10)

    # Error paths surface as ValueError.
    try:
        s3.nf("a +")
        check("parse error raises", False)
    except ValueError:
        check("parse error raises", True)

    if failures:
        print(f"\n{len(failures)} check(s) failed: {failures}")
        return 1
    print("\nall smoke checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
