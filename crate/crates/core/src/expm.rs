//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005).

use nalgebra::DMatrix;
use num_complex::Complex64;

type CMatrix = DMatrix<Complex64>;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the degree-13 approximant meets unit roundoff.
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &CMatrix) -> CMatrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }

    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * c(2f64.powi(-squarings));

    let id = CMatrix::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = PADE13;

    let inner_u = &a6 * (&a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]));
    let u = &scaled * (inner_u + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + &id * c(b[1]));
    let inner_v = &a6 * (&a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]));
    let v = inner_v + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + &id * c(b[0]);

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Plain Taylor series; only trustworthy for small norms.
    fn taylor(a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * a * c(1.0 / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn zero_gives_identity() {
        let z = CMatrix::zeros(5, 5);
        assert_eq!(expm(&z), CMatrix::identity(5, 5));
    }

    #[test]
    fn diagonal_and_nilpotent() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(-40.0),
            c(3.0),
            Complex64::new(0.0, 25.0),
        ]));
        let e = expm(&d);
        assert!((e[(0, 0)] - c((-40f64).exp())).norm() < 1e-28);
        assert!((e[(1, 1)] - c(3f64.exp())).norm() < 1e-13);
        assert!((e[(2, 2)] - Complex64::new(0.0, 25.0).exp()).norm() < 1e-13);

        let mut n = CMatrix::zeros(2, 2);
        n[(0, 1)] = c(7.0);
        let e = expm(&n);
        assert!((e[(0, 1)] - c(7.0)).norm() < 1e-14);
        assert!((e[(0, 0)] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_generator() {
        let theta = 31.4;
        let mut g = CMatrix::zeros(2, 2);
        g[(0, 1)] = c(-theta);
        g[(1, 0)] = c(theta);
        let e = expm(&g);
        assert!((e[(0, 0)].re - theta.cos()).abs() < 1e-12);
        assert!((e[(1, 0)].re - theta.sin()).abs() < 1e-12);
    }

    #[test]
    fn matches_taylor_for_small_random_matrices() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..20 {
            let a = CMatrix::from_fn(6, 6, |_, _| {
                Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
            });
            assert!(max_abs(&(expm(&a) - taylor(&a))) < 1e-13);
        }
    }

    #[test]
    fn semigroup_on_larger_norms() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..10 {
            let a = CMatrix::from_fn(8, 8, |_, _| {
                Complex64::new(rng.gen_range(-1.0..0.3), rng.gen_range(-3.0..3.0))
            });
            let whole = expm(&(&a * c(3.0)));
            let parts = expm(&(&a * c(1.0))) * expm(&(&a * c(2.0)));
            let scale = max_abs(&whole).max(1.0);
            assert!(max_abs(&(whole - parts)) < 1e-10 * scale);
        }
    }
}
