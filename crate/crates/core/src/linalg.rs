//! Dense complex matrix helpers over `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn from_rows(dim: usize, entries: &[Complex64]) -> CMat {
    CMat::from_row_slice(dim, dim, entries)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn hadamard() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    from_rows(2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
}

pub fn pauli_x() -> CMat {
    from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMat {
    from_rows(2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMat {
    diag(&[c(1.0, 0.0), c(-1.0, 0.0)])
}

pub fn diag(d: &[Complex64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

/// `e^{−iθZ/2}`
pub fn zrot(theta: f64) -> CMat {
    diag(&[Complex64::cis(-theta / 2.0), Complex64::cis(theta / 2.0)])
}

/// `e^{−iθX/2}`
pub fn xrot(theta: f64) -> CMat {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    from_rows(2, &[c(co, 0.0), c(0.0, -si), c(0.0, -si), c(co, 0.0)])
}

/// `e^{−iθY/2}`
pub fn yrot(theta: f64) -> CMat {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    from_rows(2, &[c(co, 0.0), c(-si, 0.0), c(si, 0.0), c(co, 0.0)])
}

pub fn s_gate() -> CMat {
    diag(&[c(1.0, 0.0), c(0.0, 1.0)])
}

pub fn t_gate() -> CMat {
    diag(&[c(1.0, 0.0), Complex64::cis(std::f64::consts::FRAC_PI_4)])
}

pub fn cz() -> CMat {
    diag(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)])
}

/// CNOT with the first tensor factor as control.
pub fn cnot() -> CMat {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    from_rows(4, &[l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o])
}

pub fn swap() -> CMat {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    from_rows(4, &[l, o, o, o, o, o, l, o, o, l, o, o, o, o, o, l])
}

pub fn mat_pow(a: &CMat, k: usize) -> CMat {
    (0..k).fold(identity(a.nrows()), |acc, _| acc * a)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max entrywise distance between `a` and `e^{iφ}b`, minimized over the phase
/// aligning their overlap.
pub fn phase_free_distance(a: &CMat, b: &CMat) -> f64 {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
    max_abs(&(a - b * phase))
}

/// The phase `e^{iφ}` with `a ≈ e^{iφ}b`.
pub fn relative_phase(a: &CMat, b: &CMat) -> Complex64 {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    overlap / overlap.norm()
}

pub fn unitarity_error(a: &CMat) -> f64 {
    max_abs(&(a.adjoint() * a - identity(a.nrows())))
}

/// Operator-Schmidt rank of a 4x4 matrix across its two tensor factors.
pub fn schmidt_rank(a: &CMat, tol: f64) -> usize {
    let mut r = CMat::zeros(4, 4);
    for i0 in 0..2 {
        for i1 in 0..2 {
            for j0 in 0..2 {
                for j1 in 0..2 {
                    r[(i0 * 2 + j0, i1 * 2 + j1)] = a[(i0 * 2 + i1, j0 * 2 + j1)];
                }
            }
        }
    }
    r.svd(false, false).singular_values.iter().filter(|s| **s > tol).count()
}
