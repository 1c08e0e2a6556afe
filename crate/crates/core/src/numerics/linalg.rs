//! Dense complex linear algebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Determinant by LU factorization with partial pivoting.
///
/// A zero pivot column short-circuits to an exact zero.
pub fn det_complex(m: &DMatrix<Complex64>) -> Complex64 {
    assert!(m.is_square(), "det_complex needs a square matrix");
    let n = m.nrows();
    if n == 1 {
        return m[(0, 0)];
    }
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = a[(k, k)].norm();
        for r in k + 1..n {
            let v = a[(r, k)].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k {
            a.swap_rows(piv, k);
            det = -det;
        }
        let p = a[(k, k)];
        det *= p;
        let inv = p.inv();
        for r in k + 1..n {
            let f = a[(r, k)] * inv;
            if f.norm() == 0.0 {
                continue;
            }
            for c in k + 1..n {
                let v = a[(k, c)];
                a[(r, c)] -= f * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn scalar() {
        assert_eq!(det_complex(&DMatrix::from_element(1, 1, c(5.0))), c(5.0));
    }

    #[test]
    fn identity() {
        let m = DMatrix::<Complex64>::identity(4, 4);
        assert!((det_complex(&m) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn swap() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        assert!((det_complex(&m) - c(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_is_zero() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        assert!(det_complex(&m).norm() < 1e-14);
    }

    proptest! {
        // det(L U) = prod diag(U) for unit lower-triangular L
        #[test]
        fn product_of_triangular_factors(n in 1usize..7, seed in proptest::collection::vec(-2.0f64..2.0, 98)) {
            let mut l = DMatrix::<Complex64>::identity(n, n);
            let mut u = DMatrix::<Complex64>::zeros(n, n);
            let mut it = seed.iter().cycle();
            let mut next = || *it.next().unwrap();
            let mut expect = Complex64::new(1.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    if i > j {
                        l[(i, j)] = Complex64::new(next(), next());
                    } else {
                        u[(i, j)] = Complex64::new(next(), next());
                    }
                }
                if u[(i, i)].norm() < 0.1 {
                    u[(i, i)] += Complex64::new(1.0, 0.0);
                }
                expect *= u[(i, i)];
            }
            let got = det_complex(&(l * u));
            prop_assert!((got - expect).norm() <= 1e-10 * expect.norm());
        }
    }
}
