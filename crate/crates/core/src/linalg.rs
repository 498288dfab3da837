//! Dense complex helpers shared by the analysis stages.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest entry modulus, `‖M‖_max`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entry modulus of `M − M†`.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Exact elementwise Hermiticity, no tolerance.
pub fn is_exactly_hermitian(m: &CMatrix) -> bool {
    m.is_square() && hermitian_asymmetry(m) == 0.0
}

/// Rotates the global phase of `v` so that its largest-magnitude component is
/// real and positive. Components within a relative 1e-12 of the maximum count
/// as ties; the lowest index wins.
pub fn fix_phase(v: &mut [C64]) {
    let top = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if top == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= top * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

pub fn column(m: &CMatrix, j: usize) -> CVector {
    m.column(j).into_owned()
}

/// Orthogonal projector `Σ |v⟩⟨v|` onto the span of an orthonormal set.
pub fn projector(basis: &[CVector], dim: usize) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    for v in basis {
        p += v * v.adjoint();
    }
    p
}

pub fn to_vec(v: &CVector) -> Vec<C64> {
    v.iter().copied().collect()
}

pub fn from_slice(v: &[C64]) -> CVector {
    CVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_fix_makes_largest_component_real_positive() {
        let mut v = vec![C64::new(0.1, 0.2), C64::new(0.0, -3.0), C64::new(1.0, 1.0)];
        fix_phase(&mut v);
        assert!(v[1].im == 0.0 && v[1].re > 0.0);
        assert!((v[1].re - 3.0).abs() < 1e-15);
    }

    #[test]
    fn phase_fix_breaks_ties_by_lowest_index() {
        let s = 1.0 / 3f64.sqrt();
        let mut v = vec![C64::new(0.0, s), C64::new(-s, 0.0), C64::new(0.0, -s)];
        fix_phase(&mut v);
        assert!(v[0].im == 0.0 && v[0].re > 0.0);
    }

    #[test]
    fn asymmetry_of_hermitian_is_zero() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.5, 2.0), C64::new(0.5, -2.0), C64::new(-1.0, 0.0)],
        );
        assert!(is_exactly_hermitian(&m));
    }
}
