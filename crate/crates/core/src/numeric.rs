//! Numeric probes: seeded multistart damped-Newton iteration on square or
//! over-determined polynomial systems in complex arithmetic.
//!
//! These probes never certify anything on their own; callers use them to
//! find candidates that are then verified exactly, or label their verdicts
//! as probe-level.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;
use crate::poly::MultiPoly;
use crate::scalar::Field;

/// Seed used when `KOVA_SEED` is unset.
pub const DEFAULT_SEED: u64 = 0x4B4F_5641;

/// Probe seed: the `KOVA_SEED` environment variable when it parses as an
/// unsigned integer, else [`DEFAULT_SEED`].
pub fn default_seed() -> u64 {
    std::env::var("KOVA_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Deterministic random generator for probes.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random point in the complex unit polydisc.
pub fn random_polydisc(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let th = rng.gen::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(r, th)
        })
        .collect()
}

/// A polynomial system `F(x) = 0` with its Jacobian, evaluated numerically.
pub struct NumericSystem {
    eqs: Vec<Box<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>>,
    jac: Vec<Vec<Box<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>>>,
    n: usize,
}

impl NumericSystem {
    /// Builds the system from polynomials sharing a ring with `n` variables.
    pub fn new<F: Field>(eqs: &[MultiPoly<F>], n: usize) -> Self {
        let mut e: Vec<Box<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>> = Vec::new();
        let mut j: Vec<Vec<Box<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>>> = Vec::new();
        for p in eqs {
            let pc = p.clone();
            e.push(Box::new(move |x| pc.eval_complex(x)));
            let mut row: Vec<Box<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>> = Vec::new();
            for k in 0..n {
                let d = p.deriv(k);
                row.push(Box::new(move |x| d.eval_complex(x)));
            }
            j.push(row);
        }
        NumericSystem { eqs: e, jac: j, n }
    }

    /// Residual vector.
    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.eqs.iter().map(|f| f(x)).collect()
    }

    /// Euclidean norm of the residual.
    pub fn residual(&self, x: &[Complex64]) -> f64 {
        self.eval(x).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Damped Newton (Levenberg–Marquardt) iteration; returns the final point
    /// and its residual norm.
    pub fn solve(&self, start: &[Complex64], iters: usize, tol: f64) -> (Vec<Complex64>, f64) {
        let mut x = start.to_vec();
        let mut res = self.residual(&x);
        let mut mu = 1e-6;
        for _ in 0..iters {
            if res < tol {
                break;
            }
            let fx = self.eval(&x);
            let jm = Matrix::from_fn(self.eqs.len(), self.n, |i, k| (self.jac[i][k])(&x));
            // Normal equations (JᴴJ + μI) δ = −Jᴴ F.
            let jh = Matrix::from_fn(self.n, self.eqs.len(), |i, k| jm.get(k, i).conj());
            let jhj = jh.mul(&jm).expect("conformant");
            let rhs: Vec<Complex64> = jh
                .mul_vec(&fx)
                .expect("conformant")
                .into_iter()
                .map(|c| -c)
                .collect();
            let mut improved = false;
            for _ in 0..8 {
                let a = jhj
                    .add(&Matrix::diagonal(&vec![Complex64::new(mu, 0.0); self.n]))
                    .expect("square");
                let step = match a.solve(&rhs) {
                    Ok(sol) => sol.particular().cloned(),
                    Err(_) => None,
                };
                let Some(step) = step else {
                    mu *= 10.0;
                    continue;
                };
                let cand: Vec<Complex64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
                let r = self.residual(&cand);
                if r.is_finite() && r < res {
                    x = cand;
                    res = r;
                    mu = (mu * 0.1).max(1e-15);
                    improved = true;
                    break;
                }
                mu *= 10.0;
            }
            if !improved {
                break;
            }
        }
        (x, res)
    }
}

/// Euclidean norm of a complex vector.
pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
