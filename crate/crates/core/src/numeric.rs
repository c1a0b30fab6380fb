//! Small numeric helpers shared across modules.

use num_complex::Complex64;

/// Pairwise sum with a topology fixed by the slice length, so results do not
/// depend on how the terms were produced.
pub fn tree_sum(terms: &[Complex64]) -> Complex64 {
    match terms.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => terms[0],
        len => {
            let (a, b) = terms.split_at(len / 2);
            tree_sum(a) + tree_sum(b)
        }
    }
}

/// Relative distance `|a − b| / max(|b|, floor)`.
pub fn rel_err(a: Complex64, b: Complex64, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}

/// `2^e` for possibly large integer `e`, saturating to 0 or ∞ outside f64 range.
pub fn pow2(e: i64) -> f64 {
    2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Rescales `v` in place by a power of two so its largest component has modulus
/// in [0.5, 1); returns the exponent removed. Zero vectors are left untouched.
pub fn normalize_pow2(v: &mut [Complex64]) -> i64 {
    let max = v.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
    if max == 0.0 || !max.is_finite() {
        return 0;
    }
    let e = max.log2().floor() as i64 + 1;
    let s = pow2(-e);
    v.iter_mut().for_each(|z| *z *= s);
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_sum_matches_naive() {
        let terms: Vec<Complex64> = (0..37).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        assert_eq!(tree_sum(&terms), Complex64::new(666.0, -666.0));
        assert_eq!(tree_sum(&[]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn normalize_pow2_is_exact() {
        let mut v = vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, -12.0)];
        let e = normalize_pow2(&mut v);
        assert_eq!(e, 4);
        assert_eq!(v[1], Complex64::new(0.0, -0.75));
        assert_eq!(v[0] * pow2(e), Complex64::new(3.0, 0.0));
    }
}
