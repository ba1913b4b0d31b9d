use std::ffi::CString;

use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyDict>)>(f: F) {
    Python::attach(|py| {
        let module = wrap_pymodule!(mbios_bounds_py::mbios_bounds_module)(py);
        let globals = PyDict::new(py);
        globals.set_item("mb", module).unwrap();
        f(py, &globals);
    });
}

fn eval_f64(py: Python<'_>, globals: &Bound<'_, PyDict>, expr: &str) -> f64 {
    let code = CString::new(expr).unwrap();
    py.eval(&code, Some(globals), None).unwrap().extract().unwrap()
}

#[test]
fn capacity_and_threshold_from_python() {
    with_module(|py, g| {
        assert_eq!(eval_f64(py, g, "mb.Channel.bec(0.5).capacity()"), 0.5);
        let th = eval_f64(py, g, "mb.threshold(mb.Ensemble.builtin('gallager_3_6'), '2level')");
        assert!((th - 0.249).abs() <= 0.005);
    });
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(|py, g| {
        let run = |src: &str| {
            let code = CString::new(src).unwrap();
            py.run(&code, Some(g), None).unwrap_err()
        };
        assert!(run("mb.Channel.bsc(2.0)").is_instance_of::<pyo3::exceptions::PyValueError>(py));
        assert!(run("mb.Ensemble.builtin('nope')").is_instance_of::<pyo3::exceptions::PyValueError>(py));
        assert!(run("mb.density_bound(mb.Channel.bec(0.0), 0.1)")
            .is_instance_of::<pyo3::exceptions::PyArithmeticError>(py));
    });
}
