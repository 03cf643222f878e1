//! Small dense complex helpers shared by the simulation modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// `exp(i·2π·turns)`.
pub fn cis_turns(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * turns)
}

/// Largest entrywise modulus of `m`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `‖U U† − I‖_max`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let prod = u * u.adjoint();
    max_abs_diff(&prod, &CMatrix::identity(n, n))
}

/// `‖H − H†‖_max`.
pub fn hermiticity_deviation(h: &CMatrix) -> f64 {
    max_abs_diff(h, &h.adjoint())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `|v⟩⟨v|`
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Formats a complex number as `re+im i` with 12 significant digits.
pub fn format_complex(z: Complex64) -> String {
    format!("{:.11e}{:+.11e}i", z.re, z.im)
}

/// Row-major dump, one matrix row per line, entries separated by a space.
pub fn format_matrix(m: &CMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format_complex(m[(r, c)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
