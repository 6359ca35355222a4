"""Smoke test for the qpn extension module. Run after `maturin develop`."""

import pathlib

import qpn

NETWORKS = pathlib.Path(__file__).resolve().parents[3] / "networks"


def load(name):
    return qpn.Network.from_file(str(NETWORKS / name))


def main():
    det = load("fig2-det.qpn")
    prob = load("fig2-prob.qpn")
    assert det.influence("z", "y", ["x"]) == "+"
    assert prob.influence("z", "y", ["x"]) == "?"
    assert det.explain("z", "y", ["x"]).startswith("step 1: DNP(w)")

    fig1 = load("fig1-det.qpn")
    assert fig1.separated("x", "y", ["z"])
    assert not fig1.d_separated("x", "y", ["z"])

    tax = load("fig8-tax.qpn")
    assert tax.synergy("salary", "interest", "taxes") in {"+", "-", "0", "?"}

    reduced = det.transform("dnp:w")
    assert reduced != det
    assert qpn.Network(reduced.serialize()) == reduced
    assert reduced.to_dot().startswith("digraph")
    assert ("z", "w", "+") in det.edges()

    verdict = det.check_influence("z", "y", ["x"], trials=5, seed=1)
    assert verdict["trials_run"] == 5
    assert verdict["violations"] == []

    for bad in (lambda: load("broken-cycle.qpn"), lambda: prob.transform("dnp:w")):
        try:
            bad()
        except qpn.QpnError as e:
            assert str(e)
        else:
            raise AssertionError("expected QpnError")
    try:
        det.transform("flip:w")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
    print("smoke test passed")


if __name__ == "__main__":
    main()
