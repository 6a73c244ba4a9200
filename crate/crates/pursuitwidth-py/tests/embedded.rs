use std::ffi::CString;

use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "pursuitwidth").unwrap();
        pursuitwidth_py::pursuitwidth_module(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("pw", m).unwrap();
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn widths_and_multiplier() {
    with_module(
        r#"
c3 = pw.Digraph.cycle(3)
assert pw.width(c3) == 2
assert pw.width(pw.blown_up_tree(1, 2), "dpw") == 4
m = pw.multiply(c3, 2)
assert m["passed"] and m["max_cops"] <= 4, m
assert pw.Digraph.parse(c3.to_edge_list()).edges() == c3.edges()
"#,
    );
}

#[test]
fn errors_map_to_exceptions() {
    with_module(
        r#"
try:
    pw.width(pw.Digraph.cycle(3), budget=5)
    raise AssertionError("no budget error")
except pw.BudgetExceeded:
    pass
try:
    pw.Digraph(3, [(2, 5)])
    raise AssertionError("no input error")
except ValueError:
    pass
"#,
    );
}

#[test]
fn imperfect_information() {
    with_module(
        r#"
text = "positions 4 actions a b\n0 2 1\n1 2 0\n2 2 0\n3 1 1\nmove 0 a 1\nmove 0 a 2\nmove 1 a 0\nmove 1 b 3\nmove 2 a 3\nmove 2 b 0\nmove 3 a 3\ninit 0\n"
assert pw.ParityGame.parse(text).solve_imperfect()["winner"] == 0
assert pw.ParityGame.parse(text, "1 2\n").solve_imperfect()["winner"] == 1
"#,
    );
}
