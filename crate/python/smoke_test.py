"""Smoke test for the `blp` extension module.

Build and install first, e.g. `maturin build --release -m crates/python/Cargo.toml`
followed by `pip install target/wheels/blp-*.whl`.
"""

from fractions import Fraction

import blp


def main():
    cfg = blp.ModelConfig(p=2, i0=0, j0=0, I=1, J=1)
    assert cfg.exponents == (2, 2, 2)
    assert cfg.atom_count == "64"
    assert cfg.grid() == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert cfg.interior() == [(1, 1)]

    model = blp.Model(cfg)
    assert model.atom_count == 64
    meta = model.metadata()
    assert meta["atom_count"] == 64 and meta["pi_box"] == "1/1"

    # Group law (u,v,w)(u',v',w') = (u+u', v+v', w+w'+u v').
    for a in range(0, 64, 7):
        for b in range(0, 64, 5):
            u, v, w = model.element(a)
            u2, v2, w2 = model.element(b)
            assert model.element(model.mul_atoms(a, b)) == ((u + u2) % 4, (v + v2) % 4, (w + w2 + u * v2) % 4)

    cells = model.partition("Level(1,0)")
    assert len(cells) == 64 and len(set(cells)) == 4

    f = model.random_function(seed=7)
    assert len(f) == 64 and all(isinstance(x, Fraction) for x in f)
    assert model.random_function(seed=7) == f

    # Tower property and mean preservation, exactly.
    fine = model.cond_expect(f, "Level(1,1)")
    coarse = model.cond_expect(fine, "Level(0,0)")
    assert coarse == model.cond_expect(f, "Level(0,0)")
    assert sum(fine) == sum(f)

    # Calderon reproduction: sum over the grid of D D* f is f.
    g = model.random_function(seed=3, level=(1, 1))
    total = [Fraction(0)] * 64
    for i, j in cfg.difference_grid():
        dstar = model.apply(f"Dstar:{i},{j}", g)
        total = [t + x for t, x in zip(total, model.apply(f"D:{i},{j}", dstar))]
    assert total == g

    nonneg = model.random_function(seed=1, level=(1, 1), nonnegative=True)
    m = model.maximal("Mstar", nonneg)
    assert all(x >= y for x, y in zip(m, nonneg))
    assert len(model.square_function(nonneg)) == 64
    assert len(model.transform(nonneg, seed=2, m=2)) == 64

    n = model.norm("d:1,1")
    assert n["converged"] and abs(n["norm"] - 1.0) < 1e-9

    report = model.verify("lemma1-eq23", seed=0)
    assert report["suite"] == "lemma1-eq23" and report["summary"]["fail"] == 0
    assert "cross-model" in blp.SUITES

    plane = blp.ProjectivePlane(2)
    assert len(plane.points()) == 7 and len(plane.lines()) == 7
    assert all(len(plane.points_on(l)) == 3 for l in range(7))
    assert all(c["status"] == "pass" for c in plane.checks())

    for bad in (lambda: blp.ModelConfig(4, 0, 0, 1, 1), lambda: blp.ProjectivePlane(6),
                lambda: model.partition("Cell(1)"), lambda: model.verify("nope")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("blp smoke test passed")


if __name__ == "__main__":
    main()
