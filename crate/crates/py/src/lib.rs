use pyo3::prelude::*;

#[pymodule]
fn hardflow_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
