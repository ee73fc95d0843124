use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyDict>)>(f: F) {
    Python::initialize();
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(star_forge_py::star_forge)(py);
        let globals = PyDict::new(py);
        globals.set_item("sf", m).unwrap();
        f(py, &globals);
    });
}

fn run(py: Python<'_>, g: &Bound<'_, PyDict>, code: &str) {
    let c = std::ffi::CString::new(code).unwrap();
    if let Err(e) = py.run(&c, Some(g), None) {
        e.display(py);
        panic!("python code failed:\n{code}");
    }
}

#[test]
fn series_and_moyal() {
    with_module(|py, g| {
        run(
            py,
            g,
            r#"
p = sf.Profile.desk()
m = sf.Moyal(p, {(1, 2): "1 h^1"})
x1, x2 = sf.Series(p, "1 x^(1,0)"), sf.Series(p, "1 x^(0,1)")
assert m.mul(x1, x2) - m.mul(x2, x1) == sf.Series(p, "2 h^1")
assert m.assoc_residual(x1, x2, x1 * x2).is_zero()
assert len(sf.Series(p, "1 + 1 h^1 x^(1,1)")) == 2
"#,
        );
    });
}

#[test]
fn errors_map_to_value_error() {
    with_module(|py, g| {
        run(
            py,
            g,
            r#"
p = sf.Profile.desk()
for bad in [lambda: sf.Series(p, "1 q^2"),
            lambda: sf.Moyal(p, {(1, 2): "1"}),
            lambda: sf.Profile.parse("1,2"),
            lambda: sf.run_scenario("[moyal]\npi 1 2 = 1 h^1\npi 2 1 = 1 h^1\n")]:
    try:
        bad()
    except ValueError:
        pass
    else:
        raise AssertionError("no error")
"#,
        );
    });
}

#[test]
fn fedosov_and_gauge() {
    with_module(|py, g| {
        run(
            py,
            g,
            r#"
p = sf.Profile.desk()
f = sf.Fedosov(p, {(1, 2): "1 h^1"})
assert f.r == "0" and f.certificate_terms() == 0
assert sf.gauge(p, {(1, 2): "1/2"}, {(1, 2): "1 h^1"}) == sf.gauge_ode(p, {(1, 2): "1/2"}, {(1, 2): "1 h^1"})
r = sf.run_scenario("[fedosov]\npi 1 2 = 1 h^1\n")
assert r.passed and ("fedosov", "class_residual", 0, True) in r.checks()
"#,
        );
    });
}
