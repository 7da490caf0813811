"""Smoke test for the Python extension.

Builds the cdylib with cargo, loads it as `isotropy`, and checks a few
known values. Run from anywhere: python3 python/smoke_test.py
"""

import importlib.util
import json
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    subprocess.run(["cargo", "build", "--release", "-p", "isotropy-py"], cwd=ROOT, check=True)
    lib = ROOT / "target" / "release" / "libisotropy_py.so"
    tmp = pathlib.Path(tempfile.mkdtemp())
    dest = tmp / "isotropy.so"
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("isotropy", dest)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    iso = load()

    g, c = iso.family(3, 3, 1)
    assert g.order == 6561
    v = c.is_nondegenerate()
    assert v["nondegenerate"] and v["regular_classes"] == 1, v

    _, c0 = iso.family(3, 3, 0)
    assert not c0.is_nondegenerate()["nondegenerate"]
    assert c0.obstruction_scalar()["extension_exists"]
    assert c.obstruction_scalar()["alpha_r_s"] == 1

    z = iso.Group("order36")
    fixture = iso.Cocycle(z, "fixture")
    assert fixture.lagrangian(normal_only=True)["status"] == "certified_none"
    assert iso.h2(z, 6)["invariants"] == [2, 3]

    s = iso.Group("symplectic_std:3,2")
    std = iso.Cocycle(s, "standard")
    out = std.construct(2)
    assert out["status"] == "found" and out["found"]["order"] == 9

    assert iso.rank_lemma(5, 5)["min_rank"] == 3
    h = iso.heisenberg_lift(3)
    assert len(h["representations"]) == 11 and h["sum_of_squares"] == 27

    pi = {"Q": {"kind": "abelian", "invariants": [3]}, "A": {"invariants": [3]}, "pi": [[0], [1], [2]]}
    cp, info = iso.iyb_build(json.dumps(pi))
    assert info["bijective"] and info["roundtrip"]["pi_recovered"] == pi["pi"]
    assert cp.is_nondegenerate(exhaustive=True)["nondegenerate"]

    try:
        iso.Group('{"kind": "cayley", "order": 2, "table": [[0, 1], [1]]}')
    except ValueError as e:
        assert "$.table[1]" in str(e)
    else:
        raise AssertionError("malformed table accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    sys.exit(main())
