//! Python bindings exposing the main types and operations: characters,
//! eta-quotient expansions, point counts, pullback signs, and the
//! verification pipeline.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cytwist::charfield::{PrimeModulus, QuadraticCharacterSpec};
use cytwist::counting::{count_catalog_entry, CountOptions};
use cytwist::forms::entry_pullback_sign;
use cytwist::harness::{verify_geometric_twist, PipelineOptions, Report};
use cytwist::qseries::{expand_eta_quotient, EtaQuotient};
use cytwist::varieties::Catalog;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Kronecker symbol (a|n).
#[pyfunction]
fn kronecker(a: i64, n: i64) -> i8 {
    cytwist::charfield::kronecker(a, n)
}

/// True iff no prime square divides n.
#[pyfunction]
fn is_squarefree(n: i64) -> PyResult<bool> {
    cytwist::charfield::is_squarefree(n).map_err(value_err)
}

/// chi_d(n), the quadratic character of Q(sqrt(d)) at n.
#[pyfunction]
fn chi(d: i64, n: i64) -> PyResult<i8> {
    Ok(QuadraticCharacterSpec::new(d).map_err(value_err)?.chi(n))
}

/// Fundamental discriminant of Q(sqrt(d)).
#[pyfunction]
fn discriminant(d: i64) -> PyResult<i64> {
    Ok(QuadraticCharacterSpec::new(d)
        .map_err(value_err)?
        .discriminant())
}

/// Legendre symbol by Euler's criterion (odd prime p).
#[pyfunction]
fn legendre(a: i64, p: u64) -> PyResult<i8> {
    let pm = PrimeModulus::new(p).map_err(value_err)?;
    cytwist::charfield::legendre_oracle(a, &pm).map_err(value_err)
}

fn parse_factors(factors: Vec<(u64, i32)>) -> PyResult<EtaQuotient> {
    EtaQuotient::new(&factors).map_err(value_err)
}

/// Coefficients c_1..c_B of prod eta(q^m)^r for the given (m, r) pairs.
#[pyfunction]
fn eta_expand(factors: Vec<(u64, i32)>, precision: usize) -> PyResult<Vec<BigInt>> {
    let f = expand_eta_quotient(&parse_factors(factors)?, precision).map_err(value_err)?;
    Ok(f.coeffs().to_vec())
}

/// Smallest admissible Gamma_0-level of an eta quotient.
#[pyfunction]
fn eta_level(factors: Vec<(u64, i32)>) -> PyResult<u64> {
    Ok(parse_factors(factors)?.level())
}

/// Coefficients of the twist by the character of Q(sqrt(d)).
#[pyfunction]
fn eta_twist(factors: Vec<(u64, i32)>, d: i64, precision: usize) -> PyResult<Vec<BigInt>> {
    let f = expand_eta_quotient(&parse_factors(factors)?, precision).map_err(value_err)?;
    let spec = QuadraticCharacterSpec::new(d).map_err(value_err)?;
    let g = cytwist::qseries::twist_expansion(&f, &spec, precision).map_err(value_err)?;
    Ok(g.coeffs().to_vec())
}

/// N D^2 when gcd(N, D) = 1; raises when the level has no simple answer.
#[pyfunction]
fn twisted_level(level: u64, d: i64) -> PyResult<u64> {
    let spec = QuadraticCharacterSpec::new(d).map_err(value_err)?;
    cytwist::qseries::twisted_level(level, &spec).map_err(value_err)
}

/// Catalog ids.
#[pyfunction]
fn catalog_ids() -> Vec<String> {
    Catalog::builtin().ids().map(String::from).collect()
}

/// Exact point count of a cataloged variety (twisted by d) over F_p.
/// Returns a dict with `count` and, for pencils, the per-fiber counts.
#[pyfunction]
#[pyo3(signature = (variety, p, d = 1, threads = 1, budget_log2 = 33))]
fn count<'py>(
    py: Python<'py>,
    variety: &str,
    p: u64,
    d: i64,
    threads: usize,
    budget_log2: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let cat = Catalog::builtin();
    let entry = cat.get(variety).map_err(value_err)?;
    let pm = PrimeModulus::new(p).map_err(value_err)?;
    let opts = CountOptions {
        threads,
        budget_log2,
    };
    let r = count_catalog_entry(entry, d, &pm, &opts).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("variety", r.variety)?;
    out.set_item("p", r.p)?;
    out.set_item("d", r.d)?;
    out.set_item("count", r.count)?;
    if let Some(fibers) = r.fibers {
        out.set_item("fibers", fibers)?;
    }
    Ok(out)
}

/// Sign of the involution's pullback action on the holomorphic form,
/// computed on the entry's default residue chart.
#[pyfunction]
fn pullback_sign(variety: &str, involution: &str) -> PyResult<i8> {
    let cat = Catalog::builtin();
    let entry = cat.get(variety).map_err(value_err)?;
    entry_pullback_sign(entry, involution).map_err(value_err)
}

/// e1 e2 e3 together with the local fixed-locus dimension.
#[pyfunction]
fn local_fixed_sign(e1: i8, e2: i8, e3: i8) -> PyResult<(i8, usize)> {
    cytwist::forms::local_fixed_sign(e1, e2, e3).map_err(value_err)
}

/// Run the geometric twist pipeline for one family; returns the report entry
/// as a dict (same schema as the CLI's JSON report).
#[pyfunction]
#[pyo3(signature = (family, d, pmax = 50, threads = 1, budget_log2 = 25))]
fn verify_family<'py>(
    py: Python<'py>,
    family: &str,
    d: i64,
    pmax: u64,
    threads: usize,
    budget_log2: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let cat = Catalog::builtin();
    let entry = cat.get(family).map_err(value_err)?;
    let opts = PipelineOptions {
        threads,
        pmax,
        count_budget_log2: budget_log2,
    };
    let report = verify_geometric_twist(entry, d, &opts, &BTreeMap::new()).map_err(value_err)?;
    let json = Report::new(vec![report]).to_json().map_err(value_err)?;
    let module = py.import("json")?;
    let parsed = module.call_method1("loads", (json,))?;
    parsed.get_item("entries")?.get_item(0)
}

#[pymodule]
fn cytwist_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(is_squarefree, m)?)?;
    m.add_function(wrap_pyfunction!(chi, m)?)?;
    m.add_function(wrap_pyfunction!(discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(legendre, m)?)?;
    m.add_function(wrap_pyfunction!(eta_expand, m)?)?;
    m.add_function(wrap_pyfunction!(eta_level, m)?)?;
    m.add_function(wrap_pyfunction!(eta_twist, m)?)?;
    m.add_function(wrap_pyfunction!(twisted_level, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_ids, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(pullback_sign, m)?)?;
    m.add_function(wrap_pyfunction!(local_fixed_sign, m)?)?;
    m.add_function(wrap_pyfunction!(verify_family, m)?)?;
    Ok(())
}
