"""Quick end-to-end check of the Python bindings.

Build first:  pip install --no-build-isolation ./crates/pursuitwidth-py
"""

import pursuitwidth as pw

UNCERTAIN = """positions 4 actions a b
0 2 1
1 2 0
2 2 0
3 1 1
move 0 a 1
move 0 a 2
move 1 a 0
move 1 b 3
move 2 a 3
move 2 b 0
move 3 a 3
init 0
"""


def main():
    c3 = pw.Digraph.cycle(3)
    assert pw.width(c3) == 2
    assert pw.width(pw.Digraph(1)) == 1
    assert pw.cops_win(c3, 2) and not pw.cops_win(c3, 1)

    g = pw.Digraph.parse(c3.to_edge_list())
    assert g.edges() == c3.edges()

    m = pw.multiply(c3, 2, trace=True)
    assert m["passed"] and m["max_cops"] <= m["bound"], m
    assert m["trace"], "expected a longest play"

    grk = pw.blown_up_tree(1, 2)
    assert len(grk) == 8
    assert pw.width(grk, "dpw") == 4

    game = pw.ParityGame.parse(UNCERTAIN)
    assert game.solve()[0] == 0
    hidden = pw.ParityGame.parse(UNCERTAIN, "1 2\n")
    assert hidden.solve_imperfect()["winner"] == 1

    try:
        pw.width(c3, budget=5)
    except pw.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget was not enforced")

    report = pw.verify("hierarchy", nmax=3, random=0)
    assert report["passed"], report["failed_checks"]
    print("smoke test ok:", report["instances"], "hierarchy instances")


if __name__ == "__main__":
    main()
