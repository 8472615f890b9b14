"""Quick check that the extension imports and its main entry points run."""

import math

import hartree_inverse as hi


def main():
    for name, closed, numeric, err in hi.kernel_checks():
        assert err < 1e-8, (name, closed, numeric, err)
    c = hi.constants()
    assert abs(c["kato"] - 4 * math.pi) < 1e-12
    assert c["rollnik_bound"] < c["kato"]

    grid = hi.Grid(16, 16.0)
    phi = hi.Field.from_profile(grid, "gaussian:width=2,unit")
    assert abs(phi.norm() - 1.0) < 1e-6
    assert len(phi) == 16**3

    model = hi.Model.nls(0.5, 1.0, 1.25, 2.0)
    out, drift = hi.evolve(phi, "nls", 0.5, 0.01, model)
    assert drift < 1e-12
    back = hi.Field.from_values(grid, out.values())
    assert back.distance(out) == 0.0

    est, order, width, flagged = hi.extrapolate([(2.0, 1.125), (4.0, 1.03125), (8.0, 1.0078125)])
    assert abs(est - 1.0) < 1e-12 and abs(order - 2.0) < 1e-6 and not flagged

    g = hi.Grid(32, 32.0)
    phi = hi.Field.from_profile(g, "gaussian:width=2,cx=5,unit").scale(0.5)
    ratio, width, points = hi.recon_ratio(model, phi, [2.0, 4.0, 8.0], horizon=4.0, dt=0.01)
    assert abs(ratio - model.ratio) < 0.05 * model.ratio, (ratio, points)

    ok, lines, _ = hi.run_experiment("self-test", {"output.dir": "/tmp/hartree-smoke"})
    assert ok, "\n".join(lines)
    print(f"smoke ok: ratio {ratio:.5f} (planted {model.ratio}), {len(lines)} self-test gates")


if __name__ == "__main__":
    main()
