//! Kovalevskaya matrices `K = Df^A(c) + diag(p)` and their spectra, the
//! Kovalevskaya exponents, together with the structural checks on them:
//! the universal exponent −1, Hamiltonian pairing and invariance under
//! quasi-homogeneous changes of variables.

use num_complex::Complex64;
use num_traits::Zero;

use crate::balances::Balance;
use crate::error::{KovaError, Result};
use crate::matrix::Matrix;
use crate::poly::{vars, vars_owned, MultiPoly};
use crate::roots::{dense_deriv, dense_degree, dense_gcd, extract_roots, square_free_layers};
use crate::scalar::{int, Field};
use crate::system::{WeightVector, WeightedSystem};
use crate::{QMatrix, QPoly, QRootSet, QSystem, Rational};

/// Name of the spectral variable.
pub const LAMBDA: &str = "lambda";

/// Matching tolerance for numeric exponents.
pub const NUMERIC_MATCH_TOL: f64 = 1e-9;

/// Semisimplicity verdict on `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semisimple {
    /// Diagonalisable.
    Yes,
    /// A nontrivial Jordan block exists.
    No,
    /// Could not be decided.
    Undetermined,
}

/// Kovalevskaya data of one balance.
#[derive(Clone, Debug)]
pub struct KovalevskayaData {
    /// The balance.
    pub balance: Balance,
    /// `K = Df^A(c) + diag(p)`.
    pub k: QMatrix,
    /// `det(λI − K)` in the variable `lambda`.
    pub charpoly: QPoly,
    /// Kovalevskaya exponents.
    pub exponents: QRootSet,
    /// `(−p₁c₁, …, −p_mc_m)`, an eigenvector for −1.
    pub trivial_eigenvector: Vec<Rational>,
    /// Semisimplicity of `K`.
    pub semisimple: Semisimple,
    /// Whether the semisimplicity verdict is exact (otherwise a numeric
    /// Jordan probe).
    pub semisimple_exact: bool,
}

impl KovalevskayaData {
    /// Exponents as complex numbers (exact ones first), sorted by real part.
    pub fn exponents_complex(&self) -> Vec<Complex64> {
        let mut v = self.exponents.all_complex();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// The positive integer exponents, sorted, with multiplicity.
    pub fn positive_integer_exponents(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .exponents
            .exact_multiset()
            .iter()
            .filter(|q| q.is_integer() && **q > Rational::zero())
            .map(|q| crate::roots::as_small_integer(q).unwrap_or(i64::MAX))
            .collect();
        out.sort();
        out
    }
}

/// Builds the Kovalevskaya matrix of a balance and analyses its spectrum.
pub fn kov_matrix(sys: &QSystem, b: &Balance) -> Result<KovalevskayaData> {
    let m = sys.dim();
    if b.c.len() != m {
        return Err(KovaError::Dimension(format!(
            "balance has {} entries, system has {m}",
            b.c.len()
        )));
    }
    let p: Vec<Rational> = sys.weight.p.iter().map(|&v| int(v)).collect();
    let k = sys.jacobian_fa(&b.c).add(&Matrix::diagonal(&p))?;
    let v: Vec<Rational> = (0..m).map(|i| -&p[i] * &b.c[i]).collect();
    let kv = k.mul_vec(&v)?;
    if kv.iter().zip(&v).any(|(a, b)| a != &-b.clone()) {
        return Err(KovaError::Internal(
            "K(−p⊙c) ≠ −(−p⊙c): the balance equations do not hold".into(),
        ));
    }
    let charpoly = k.charpoly_poly(&vars(&[LAMBDA]))?;
    let exponents = extract_roots(&charpoly)?;
    let (semisimple, semisimple_exact) = semisimplicity(&k, &exponents)?;
    Ok(KovalevskayaData {
        balance: b.clone(),
        k,
        charpoly,
        exponents,
        trivial_eigenvector: v,
        semisimple,
        semisimple_exact,
    })
}

fn semisimplicity(k: &QMatrix, exps: &QRootSet) -> Result<(Semisimple, bool)> {
    let n = k.rows();
    // Exact part: every repeated rational eigenvalue needs a full eigenspace.
    for (lambda, mult) in &exps.exact_roots {
        if *mult > 1 {
            let nullity = n - k.shift(lambda)?.rank();
            if nullity != *mult {
                return Ok((Semisimple::No, true));
            }
        }
    }
    // Residual factor: square-free means its (irrational) roots are simple.
    let res = exps.residual_factor.to_dense();
    if dense_degree(&res).unwrap_or(0) == 0 {
        return Ok((Semisimple::Yes, true));
    }
    let g = dense_gcd(&res, &dense_deriv(&res));
    if dense_degree(&g) == Some(0) {
        return Ok((Semisimple::Yes, true));
    }
    // Repeated irrational eigenvalues: numeric Jordan probe.
    let kc = k.map(|q| q.to_complex());
    let mut verdicts = Vec::new();
    for (mult, layer) in square_free_layers(&res) {
        if mult < 2 {
            continue;
        }
        for (root, _) in crate::roots::numeric_roots(&layer).0 {
            let shifted = kc.shift(&root)?;
            let nullity = n - shifted.rank();
            verdicts.push(nullity == mult);
        }
    }
    if verdicts.is_empty() {
        Ok((Semisimple::Undetermined, false))
    } else if verdicts.iter().all(|&v| v) {
        Ok((Semisimple::Yes, false))
    } else if verdicts.iter().all(|&v| !v) {
        Ok((Semisimple::No, false))
    } else {
        Ok((Semisimple::Undetermined, false))
    }
}

/// Outcome of [`hamiltonian_pairing_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum PairingVerdict {
    /// The multiset is invariant under `λ ↦ h − λ`.
    Consistent,
    /// Exponents without a partner `h − λ`.
    Inconsistent { unpaired: Vec<String> },
}

/// Checks that the exponent multiset is invariant under `λ ↦ h − λ`.
pub fn hamiltonian_pairing_check(data: &KovalevskayaData, h: i64) -> PairingVerdict {
    let mut unpaired = Vec::new();
    let exact = data.exponents.exact_multiset();
    let mut reflected: Vec<Rational> = exact.iter().map(|l| int(h) - l).collect();
    let mut a = exact.clone();
    a.sort();
    reflected.sort();
    if a != reflected {
        let mut pool = reflected.clone();
        for l in &a {
            if let Some(pos) = pool.iter().position(|x| x == l) {
                pool.remove(pos);
            } else {
                unpaired.push(l.to_expr());
            }
        }
    }
    let numeric = {
        let mut v = Vec::new();
        for (r, m) in &data.exponents.numeric_roots {
            for _ in 0..*m {
                v.push(*r);
            }
        }
        v
    };
    let mut used = vec![false; numeric.len()];
    for l in &numeric {
        let target = Complex64::new(h as f64, 0.0) - l;
        let found = numeric.iter().enumerate().position(|(j, x)| {
            !used[j] && (x - target).norm() <= NUMERIC_MATCH_TOL * (1.0 + target.norm())
        });
        match found {
            Some(j) => used[j] = true,
            None => unpaired.push(format!("{:.10}{:+.10}i", l.re, l.im)),
        }
    }
    if unpaired.is_empty() {
        PairingVerdict::Consistent
    } else {
        PairingVerdict::Inconsistent { unpaired }
    }
}

/// Direction of a change of variables passed to [`invariance_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapDirection {
    /// The map gives the new variables in terms of the old: `y = ψ(x)`.
    NewOfOld,
    /// The map gives the old variables in terms of the new: `x = φ(y)`.
    OldOfNew,
}

/// Per-balance outcome of [`invariance_check`].
#[derive(Clone, Debug)]
pub struct InvarianceEntry {
    /// The original balance.
    pub balance: Vec<Rational>,
    /// Its image in the new coordinates (`None` when skipped).
    pub mapped: Option<Vec<Rational>>,
    /// Original characteristic polynomial (dense, low to high).
    pub original: Vec<Rational>,
    /// Transformed characteristic polynomial (`None` when skipped).
    pub transformed: Option<Vec<Rational>>,
    /// Why the check was skipped, if it was.
    pub skipped: Option<String>,
}

/// Outcome of [`invariance_check`].
#[derive(Clone, Debug)]
pub struct InvarianceVerdict {
    /// Whether every non-skipped balance has the same exponent multiset.
    pub matches: bool,
    /// The transformed system.
    pub transformed: QSystem,
    /// Per-balance details.
    pub entries: Vec<InvarianceEntry>,
}

/// Whether every monomial of `f[i]` has `w`-weighted degree `deg[i]`.
fn quasi_homogeneous(f: &[QPoly], w: &[i64], deg: &[i64]) -> Option<usize> {
    f.iter().enumerate().position(|(i, fi)| {
        fi.is_zero() || fi.terms().any(|(m, _)| m.weighted_degree(w) != deg[i])
    })
}

/// Inverts a quasi-homogeneous polynomial map `b = F(a)` with invertible
/// linear part by fixed-point iteration, verifying the result exactly.
/// `F` lives in the ring of `a`; the inverse lives in `b_ring`.
pub fn invert_quasi_homogeneous(f: &[QPoly], b_ring: &crate::poly::Vars) -> Result<Vec<QPoly>> {
    let n = f.len();
    let lin = Matrix::from_fn(n, n, |i, k| {
        let mut e = vec![0u32; n];
        e[k] = 1;
        f[i].coeff(&e)
    });
    let inv = lin.inverse()?.ok_or_else(|| {
        KovaError::Precondition("the map has a singular linear part".into())
    })?;
    let nonlinear: Vec<QPoly> = f
        .iter()
        .map(|fi| fi.filter(|m| m.degree() >= 2))
        .collect();
    let b: Vec<QPoly> = (0..n).map(|i| MultiPoly::var(b_ring, i)).collect();
    let apply_inv = |v: &[QPoly]| -> Vec<QPoly> {
        (0..n)
            .map(|k| {
                (0..n).fold(MultiPoly::zero(b_ring), |acc, i| {
                    acc.add(&v[i].scale(inv.get(k, i)))
                })
            })
            .collect()
    };
    let mut g = apply_inv(&b);
    let max_deg = f.iter().filter_map(|p| p.total_degree()).max().unwrap_or(1) as usize;
    for _ in 0..(n * max_deg + 4) {
        let rhs: Vec<QPoly> = (0..n).map(|i| b[i].sub(&nonlinear[i].substitute(&g))).collect();
        let next = apply_inv(&rhs);
        if next == g {
            break;
        }
        g = next;
    }
    let check: Vec<QPoly> = f.iter().map(|fi| fi.substitute(&g)).collect();
    if check != b {
        return Err(KovaError::Precondition(
            "the map has no polynomial inverse".into(),
        ));
    }
    Ok(g)
}

/// Transforms the system by a quasi-homogeneous change of variables with
/// new weights `q` and compares the Kovalevskaya exponents of every balance
/// with those of its image.
pub fn invariance_check(
    sys: &QSystem,
    map: &[QPoly],
    direction: MapDirection,
    q: &[i64],
    balances: &[Balance],
) -> Result<InvarianceVerdict> {
    let m = sys.dim();
    if map.len() != m || q.len() != m {
        return Err(KovaError::Dimension(format!(
            "map has {} components and {} weights, system has dimension {m}",
            map.len(),
            q.len()
        )));
    }
    let x_ring = vars_owned(sys.state_names());
    let y_names: Vec<String> = (1..=m).map(|i| format!("y{i}")).collect();
    let y_ring = vars_owned(y_names.clone());
    let p = &sys.weight.p;
    // ψ : x ↦ y in the x ring, φ : y ↦ x in the y ring.
    let (psi, phi) = match direction {
        MapDirection::NewOfOld => {
            let psi: Vec<QPoly> = map.iter().map(|f| f.embed(&x_ring)).collect::<Result<_>>()?;
            if let Some(i) = quasi_homogeneous(&psi, p, q) {
                return Err(KovaError::Precondition(format!(
                    "component {} of the map is not quasi-homogeneous of degree {}",
                    i + 1,
                    q[i]
                )));
            }
            let phi = invert_quasi_homogeneous(&psi, &y_ring)?;
            (psi, phi)
        }
        MapDirection::OldOfNew => {
            let phi: Vec<QPoly> = map
                .iter()
                .map(|f| {
                    // Accept maps written over y-names or positional names.
                    if f.nvars() == m {
                        Ok(MultiPoly::from_terms(
                            &y_ring,
                            f.terms().map(|(e, c)| (e.0.clone(), c.clone())),
                        ))
                    } else {
                        f.embed(&y_ring)
                    }
                })
                .collect::<Result<_>>()?;
            if let Some(i) = quasi_homogeneous(&phi, q, p) {
                return Err(KovaError::Precondition(format!(
                    "component {} of the map is not quasi-homogeneous of degree {}",
                    i + 1,
                    p[i]
                )));
            }
            let psi = invert_quasi_homogeneous(&phi, &x_ring)?;
            (psi, phi)
        }
    };
    // New right-hand sides dy/dz = Dψ(φ(y)) · f(φ(y), z).
    let mut yz_names = y_names.clone();
    yz_names.push(crate::system::Z.into());
    let yz = vars_owned(yz_names);
    let mut images: Vec<QPoly> = phi.iter().map(|f| f.embed(&yz)).collect::<Result<_>>()?;
    images.push(MultiPoly::var(&yz, m));
    let rhs_old: Vec<QPoly> = sys.rhs_all().iter().map(|f| f.substitute(&images)).collect();
    let phi_x: Vec<QPoly> = images[..m].to_vec();
    let rhs_new: Vec<QPoly> = (0..m)
        .map(|i| {
            (0..m).fold(MultiPoly::zero(&yz), |acc, k| {
                let d = psi[i].deriv(k).substitute(&phi_x);
                acc.add(&d.mul(&rhs_old[k]))
            })
        })
        .collect();
    let weight = WeightVector::new(q.to_vec(), sys.weight.r, sys.weight.s)?;
    let transformed =
        WeightedSystem::from_rhs(&format!("{}-transformed", sys.name), &y_names, weight, rhs_new)?;
    let mut entries = Vec::new();
    let mut matches = true;
    for b in balances {
        let original = kov_matrix(sys, b)?.charpoly.to_dense();
        let jac = Matrix::from_fn(m, m, |i, k| psi[i].deriv(k).eval(&b.c));
        if jac.det()?.is_zero() {
            entries.push(InvarianceEntry {
                balance: b.c.clone(),
                mapped: None,
                original,
                transformed: None,
                skipped: Some("the map is singular at the balance".into()),
            });
            continue;
        }
        let d: Vec<Rational> = psi.iter().map(|f| f.eval(&b.c)).collect();
        let nb = Balance::new(&transformed, d.clone())?;
        let t = kov_matrix(&transformed, &nb)?.charpoly.to_dense();
        matches &= t == original;
        entries.push(InvarianceEntry {
            balance: b.c.clone(),
            mapped: Some(d),
            original,
            transformed: Some(t),
            skipped: None,
        });
    }
    Ok(InvarianceVerdict {
        matches,
        transformed,
        entries,
    })
}
