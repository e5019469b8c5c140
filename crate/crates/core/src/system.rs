//! Weighted polynomial ODE systems `dxᵢ/dz = fᵢ(x, z) + gᵢ(x, z)`.
//!
//! The split into the quasi-homogeneous principal part `f` and the lower
//! order part `g` is derived from the declared weights: a monomial of the
//! right-hand side of equation `i` belongs to `fᵢ` when its weighted degree is
//! exactly `pᵢ + 1` and to `gᵢ` when it is smaller. Larger degrees violate
//! (A1) and are rejected at construction.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;

use crate::error::{KovaError, Result};
use crate::expr::parse_expr_at;
use crate::matrix::Matrix;
use crate::numeric::{self, NumericSystem};
use crate::poly::{vars_owned, MultiPoly, Mono, Vars};
use crate::scalar::Field;

/// Name of the independent variable.
pub const Z: &str = "z";

/// Weights `(p₁,…,p_m, r, s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    /// Weighted degrees of the dependent variables.
    pub p: Vec<i64>,
    /// Weighted degree of `z`.
    pub r: i64,
    /// Order of the cyclic action; `r + 1`, or 1 for autonomous systems.
    pub s: i64,
}

impl WeightVector {
    /// Validates and builds a weight vector.
    pub fn new(p: Vec<i64>, r: i64, s: i64) -> Result<Self> {
        if p.is_empty() {
            return Err(KovaError::Weights("at least one dependent variable".into()));
        }
        if let Some(bad) = p.iter().find(|&&v| v <= 0) {
            return Err(KovaError::Weights(format!(
                "weights of dependent variables must be positive, got {bad}"
            )));
        }
        if r < 0 || s <= 0 {
            return Err(KovaError::Weights("need r >= 0 and s >= 1".into()));
        }
        if r > 0 && s != r + 1 {
            return Err(KovaError::Weights(format!("s must equal r + 1 = {}", r + 1)));
        }
        if r == 0 && s != 1 {
            return Err(KovaError::Weights("r = 0 requires s = 1".into()));
        }
        let g = p.iter().fold(r.gcd(&s), |acc, v| acc.gcd(v));
        if g != 1 {
            return Err(KovaError::Weights(format!("weights share the factor {g}")));
        }
        Ok(WeightVector { p, r, s })
    }

    /// Weights of the ring `(x₁,…,x_m, z)`.
    pub fn ring_weights(&self) -> Vec<i64> {
        let mut w = self.p.clone();
        w.push(self.r);
        w
    }
}

/// A weighted polynomial ODE system.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSystem<F: Field> {
    /// Display name.
    pub name: String,
    /// Ring variables `(x₁,…,x_m, z)`.
    pub vars: Vars,
    /// Quasi-homogeneous principal parts.
    pub f: Vec<MultiPoly<F>>,
    /// Lower-order parts.
    pub g: Vec<MultiPoly<F>>,
    /// Weights.
    pub weight: WeightVector,
}

/// One assumption violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Which assumption (`"A1"`, `"A2"`, `"A3"`).
    pub assumption: &'static str,
    /// Equation index (1-based).
    pub eq: usize,
    /// Offending monomial.
    pub monomial: String,
    /// Expected weighted degree (or residue class for A3).
    pub expected: i64,
    /// Actual weighted degree (or residue class for A3).
    pub actual: i64,
}

/// Verdict on condition (S).
#[derive(Clone, Debug, PartialEq)]
pub enum SVerdict {
    /// Holds at the stated confidence (`"probe"` or `"asserted"`).
    Holds { confidence: &'static str },
    /// A nonzero root of the truncated system was found.
    Violated { witness: Vec<Complex64> },
    /// Nothing could be concluded.
    Unverified,
}

impl SVerdict {
    /// Whether the verdict is `Holds`.
    pub fn holds(&self) -> bool {
        matches!(self, SVerdict::Holds { .. })
    }
}

/// Condition (S) checking mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SMode {
    /// Record the user's claim that (S) holds.
    Assert,
    /// Multistart numeric search for nonzero roots of `f^A`.
    Probe { seed: u64 },
}

/// Tolerances of the (S) probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SProbeConfig {
    /// Number of random starts.
    pub starts: usize,
    /// Newton iterations per start.
    pub iters: usize,
    /// Residual under which a point counts as a root.
    pub residual_tol: f64,
    /// Norm above which a root counts as nonzero.
    pub nonzero_tol: f64,
}

impl Default for SProbeConfig {
    fn default() -> Self {
        SProbeConfig {
            starts: 100,
            iters: 50,
            residual_tol: 1e-12,
            nonzero_tol: 1e-6,
        }
    }
}

/// Outcome of the assumption checks.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    /// Every monomial of `fᵢ` has weighted degree `pᵢ + 1`.
    pub a1_ok: bool,
    /// Every monomial of `gᵢ` has weighted degree below `pᵢ + 1`.
    pub a2_ok: bool,
    /// Invariance under the `Z_s` action.
    pub a3_ok: bool,
    /// Condition (S) verdict.
    pub s: SVerdict,
    /// Itemised violations.
    pub violations: Vec<Violation>,
}

impl AssumptionReport {
    /// Whether (S) holds at the reported confidence.
    pub fn s_ok(&self) -> bool {
        self.s.holds()
    }
}

impl<F: Field> WeightedSystem<F> {
    /// Builds a system from full right-hand sides, routing monomials into
    /// `f` and `g` by weighted degree.
    pub fn from_rhs(
        name: &str,
        state: &[String],
        weight: WeightVector,
        rhs: Vec<MultiPoly<F>>,
    ) -> Result<Self> {
        let vars = Self::make_vars(state)?;
        if weight.p.len() != state.len() || rhs.len() != state.len() {
            return Err(KovaError::Dimension(format!(
                "{} variables, {} weights, {} equations",
                state.len(),
                weight.p.len(),
                rhs.len()
            )));
        }
        let w = weight.ring_weights();
        let mut f = Vec::new();
        let mut g = Vec::new();
        for (i, e) in rhs.into_iter().enumerate() {
            let e = e.embed(&vars)?;
            let target = weight.p[i] + 1;
            let mut fi = MultiPoly::zero(&vars);
            let mut gi = MultiPoly::zero(&vars);
            for (mono, c) in e.terms() {
                let d = mono.weighted_degree(&w);
                if d == target {
                    fi.add_term(mono.clone(), c.clone());
                } else if d < target {
                    gi.add_term(mono.clone(), c.clone());
                } else {
                    return Err(KovaError::AssumptionA1 {
                        eq: i + 1,
                        monomial: MultiPoly::monomial(&vars, mono.0.clone(), F::one()).to_expr(),
                        expected: target,
                        actual: d,
                    });
                }
            }
            f.push(fi);
            g.push(gi);
        }
        let sys = WeightedSystem {
            name: name.to_string(),
            vars,
            f,
            g,
            weight,
        };
        if sys.weight.r == 0 && sys.involves_z() {
            return Err(KovaError::Weights(
                "r = 0 declares an autonomous system but z occurs".into(),
            ));
        }
        Ok(sys)
    }

    /// Builds a system from an explicit split without validating it (the
    /// assumption checks then report any violation).
    pub fn from_split(
        name: &str,
        state: &[String],
        weight: WeightVector,
        f: Vec<MultiPoly<F>>,
        g: Vec<MultiPoly<F>>,
    ) -> Result<Self> {
        let vars = Self::make_vars(state)?;
        if weight.p.len() != state.len() || f.len() != state.len() || g.len() != state.len() {
            return Err(KovaError::Dimension("inconsistent system sizes".into()));
        }
        Ok(WeightedSystem {
            name: name.to_string(),
            f: f.into_iter().map(|p| p.embed(&vars)).collect::<Result<_>>()?,
            g: g.into_iter().map(|p| p.embed(&vars)).collect::<Result<_>>()?,
            vars,
            weight,
        })
    }

    fn make_vars(state: &[String]) -> Result<Vars> {
        let mut names: Vec<String> = state.to_vec();
        for (i, n) in names.iter().enumerate() {
            if n == Z {
                return Err(KovaError::Precondition(
                    "`z` is reserved for the independent variable".into(),
                ));
            }
            if names[..i].contains(n) {
                return Err(KovaError::Precondition(format!("duplicate variable `{n}`")));
            }
        }
        names.push(Z.to_string());
        Ok(vars_owned(names))
    }

    /// State dimension `m`.
    pub fn dim(&self) -> usize {
        self.f.len()
    }

    /// Names of the dependent variables.
    pub fn state_names(&self) -> Vec<String> {
        self.vars[..self.dim()].to_vec()
    }

    /// Index of `z` in the ring.
    pub fn z_index(&self) -> usize {
        self.dim()
    }

    /// Full right-hand side `fᵢ + gᵢ`.
    pub fn rhs(&self, i: usize) -> MultiPoly<F> {
        self.f[i].add(&self.g[i])
    }

    /// All right-hand sides.
    pub fn rhs_all(&self) -> Vec<MultiPoly<F>> {
        (0..self.dim()).map(|i| self.rhs(i)).collect()
    }

    /// Autonomous principal part `fᵢ(x, 0)`.
    pub fn f_autonomous(&self, i: usize) -> MultiPoly<F> {
        let z = self.z_index();
        self.f[i].filter(|e| e.0[z] == 0)
    }

    /// Non-autonomous principal part `fᵢ − fᵢ^A`.
    pub fn f_nonautonomous(&self, i: usize) -> MultiPoly<F> {
        self.f[i].sub(&self.f_autonomous(i))
    }

    /// Whether `z` appears anywhere.
    pub fn involves_z(&self) -> bool {
        let z = self.z_index();
        self.f.iter().chain(&self.g).any(|p| p.involves(z))
    }

    /// `f^A` restricted to the state ring `(x₁,…,x_m)`.
    pub fn truncated(&self) -> Vec<MultiPoly<F>> {
        let sv = vars_owned(self.state_names());
        (0..self.dim())
            .map(|i| {
                self.f_autonomous(i)
                    .embed(&sv)
                    .expect("autonomous part is free of z")
            })
            .collect()
    }

    /// Jacobian of `f^A` at a point of the state space.
    pub fn jacobian_fa(&self, c: &[F]) -> Matrix<F> {
        let fa = self.truncated();
        Matrix::from_fn(self.dim(), self.dim(), |i, k| fa[i].deriv(k).eval(c))
    }

    /// Checks (A1), (A2) and (A3) symbolically, with the given (S) mode.
    pub fn check_assumptions(&self, mode: SMode) -> AssumptionReport {
        let w = self.weight.ring_weights();
        let mut violations = Vec::new();
        let mono = |m: &Mono| MultiPoly::monomial(&self.vars, m.0.clone(), F::one()).to_expr();
        for i in 0..self.dim() {
            let target = self.weight.p[i] + 1;
            for (m, _) in self.f[i].terms() {
                let d = m.weighted_degree(&w);
                if d != target {
                    violations.push(Violation {
                        assumption: "A1",
                        eq: i + 1,
                        monomial: mono(m),
                        expected: target,
                        actual: d,
                    });
                }
            }
            for (m, _) in self.g[i].terms() {
                let d = m.weighted_degree(&w);
                if d >= target {
                    violations.push(Violation {
                        assumption: "A2",
                        eq: i + 1,
                        monomial: mono(m),
                        expected: target - 1,
                        actual: d,
                    });
                }
            }
            // (A3): substituting xₖ ↦ ω^{pₖ}xₖ, z ↦ ω^r z with ωˢ = 1 must
            // multiply every monomial of fᵢ + gᵢ by ω^{pᵢ+1}.
            let s = self.weight.s;
            for (m, _) in self.rhs(i).terms() {
                let d = m.weighted_degree(&w).rem_euclid(s);
                let want = target.rem_euclid(s);
                if d != want {
                    violations.push(Violation {
                        assumption: "A3",
                        eq: i + 1,
                        monomial: mono(m),
                        expected: want,
                        actual: d,
                    });
                }
            }
        }
        let has = |a: &str| violations.iter().any(|v| v.assumption == a);
        AssumptionReport {
            a1_ok: !has("A1"),
            a2_ok: !has("A2"),
            a3_ok: !has("A3"),
            s: self.condition_s(mode, &SProbeConfig::default()),
            violations,
        }
    }

    /// Checks condition (S): the only zero of `f^A` is the origin.
    pub fn condition_s(&self, mode: SMode, cfg: &SProbeConfig) -> SVerdict {
        let seed = match mode {
            SMode::Assert => {
                return SVerdict::Holds {
                    confidence: "asserted",
                }
            }
            SMode::Probe { seed } => seed,
        };
        let m = self.dim();
        let fa = self.truncated();
        let sys = NumericSystem::new(&fa, m);
        let mut rng = numeric::rng(seed);
        for _ in 0..cfg.starts {
            let start = numeric::random_polydisc(&mut rng, m, 1.0);
            let (x, res) = sys.solve(&start, cfg.iters, cfg.residual_tol);
            if res >= cfg.residual_tol || numeric::norm(&x) <= cfg.nonzero_tol {
                continue;
            }
            // A small residual near a high-multiplicity zero at the origin is
            // not a witness: rescale along the weighted action to unit size
            // (zeros of f^A are invariant under it) and require the point to
            // stay a zero there.
            let lam = x
                .iter()
                .zip(&self.weight.p)
                .map(|(c, &p)| c.norm().powf(1.0 / p as f64))
                .fold(0.0, f64::max);
            if lam == 0.0 {
                continue;
            }
            let scaled: Vec<Complex64> = x
                .iter()
                .zip(&self.weight.p)
                .map(|(c, &p)| c / lam.powi(p as i32))
                .collect();
            let (y, res2) = sys.solve(&scaled, cfg.iters, cfg.residual_tol);
            if res2 < 1e-9 && numeric::norm(&y) > 0.5 {
                return SVerdict::Violated { witness: y };
            }
        }
        SVerdict::Holds { confidence: "probe" }
    }

    /// Symbolic check of the quasi-homogeneity identity
    /// `fᵢ^A(λ^{p}x) = λ^{pᵢ+1} fᵢ^A(x)` in a fresh symbol λ.
    pub fn quasi_homogeneity_holds(&self) -> bool {
        let mut names = self.state_names();
        names.push("lambda__".into());
        let ring = vars_owned(names);
        let m = self.dim();
        let lam = MultiPoly::<F>::var(&ring, m);
        let images: Vec<MultiPoly<F>> = (0..m)
            .map(|k| MultiPoly::var(&ring, k).mul(&lam.pow(self.weight.p[k] as u32)))
            .collect();
        self.truncated().iter().enumerate().all(|(i, fa)| {
            let lhs = fa.substitute(&images);
            let rhs = fa
                .embed(&ring)
                .expect("state ring embeds")
                .mul(&lam.pow((self.weight.p[i] + 1) as u32));
            lhs == rhs
        })
    }

    /// Renders the system in the input document format.
    pub fn to_document(&self) -> String {
        let mut s = format!("system {}\n", self.name);
        s.push_str(&format!("vars {}\n", self.state_names().join(" ")));
        let ws: Vec<String> = self.weight.p.iter().map(|v| v.to_string()).collect();
        s.push_str(&format!(
            "weights {} {} {}\n",
            ws.join(" "),
            self.weight.r,
            self.weight.s
        ));
        for (i, n) in self.state_names().iter().enumerate() {
            s.push_str(&format!("eq {n} = {}\n", self.rhs(i)));
        }
        s
    }

    /// Maps coefficients into another field.
    pub fn map_coeffs<G: Field, M: Fn(&F) -> G + Copy>(&self, f: M) -> WeightedSystem<G> {
        WeightedSystem {
            name: self.name.clone(),
            vars: self.vars.clone(),
            f: self.f.iter().map(|p| p.map_coeffs(f)).collect(),
            g: self.g.iter().map(|p| p.map_coeffs(f)).collect(),
            weight: self.weight.clone(),
        }
    }
}

impl<F: Field> fmt::Display for WeightedSystem<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_document())
    }
}

/// Parses a system document.
///
/// ```text
/// system <name>
/// vars x1 x2 ... xm
/// weights p1 ... pm r s
/// eq x1 = <expr>
/// ...
/// ```
pub fn parse_system(text: &str) -> Result<WeightedSystem<BigRational>> {
    let mut name: Option<String> = None;
    let mut state: Option<Vec<String>> = None;
    let mut weights: Option<(Vec<i64>, usize)> = None;
    let mut eqs: Vec<(String, String, usize, usize)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - trimmed.len();
        let (kw, rest) = match trimmed.find(char::is_whitespace) {
            Some(k) => (&trimmed[..k], &trimmed[k..]),
            None => (trimmed, ""),
        };
        let syntax = |col: usize, msg: String| KovaError::Syntax {
            line: line_no,
            col,
            msg,
        };
        match kw {
            "system" => {
                let n = rest.trim();
                if n.is_empty() {
                    return Err(syntax(indent + 1, "missing system name".into()));
                }
                name = Some(n.to_string());
            }
            "vars" => {
                let v: Vec<String> = rest.split_whitespace().map(String::from).collect();
                if v.is_empty() {
                    return Err(syntax(indent + 1, "no variables declared".into()));
                }
                for n in &v {
                    if !n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                        || !n.chars().all(|c| c.is_alphanumeric() || c == '_')
                    {
                        return Err(syntax(indent + 1, format!("invalid variable name `{n}`")));
                    }
                }
                state = Some(v);
            }
            "weights" => {
                let mut v = Vec::new();
                for t in rest.split_whitespace() {
                    v.push(
                        t.parse::<i64>()
                            .map_err(|_| syntax(indent + 1, format!("invalid weight `{t}`")))?,
                    );
                }
                weights = Some((v, line_no));
            }
            "eq" => {
                let Some(eqpos) = rest.find('=') else {
                    return Err(syntax(indent + 1, "expected `=`".into()));
                };
                let lhs = rest[..eqpos].trim();
                let lhs = lhs.strip_suffix('\'').unwrap_or(lhs).trim().to_string();
                let col = indent + kw.len() + eqpos + 2;
                eqs.push((lhs, rest[eqpos + 1..].to_string(), line_no, col));
            }
            other => {
                return Err(syntax(indent + 1, format!("unknown directive `{other}`")));
            }
        }
    }
    let state = state.ok_or_else(|| KovaError::Syntax {
        line: 1,
        col: 1,
        msg: "missing `vars` line".into(),
    })?;
    let (wv, wline) = weights.ok_or_else(|| KovaError::Syntax {
        line: 1,
        col: 1,
        msg: "missing `weights` line".into(),
    })?;
    if wv.len() != state.len() + 2 {
        return Err(KovaError::Syntax {
            line: wline,
            col: 1,
            msg: format!("expected {} weights (p..., r, s)", state.len() + 2),
        });
    }
    let m = state.len();
    let weight = WeightVector::new(wv[..m].to_vec(), wv[m], wv[m + 1])?;
    let mut full = state.clone();
    full.push(Z.to_string());
    let ring = vars_owned(full);
    let mut rhs: Vec<Option<MultiPoly<BigRational>>> = vec![None; m];
    for (lhs, text, line, col) in eqs {
        let idx = state
            .iter()
            .position(|v| *v == lhs)
            .ok_or_else(|| KovaError::UnknownVariable(lhs.clone()))?;
        if rhs[idx].is_some() {
            return Err(KovaError::Syntax {
                line,
                col: 1,
                msg: format!("duplicate equation for `{lhs}`"),
            });
        }
        rhs[idx] = Some(parse_expr_at(&text, line, col)?.to_poly(&ring)?);
    }
    let rhs: Vec<MultiPoly<BigRational>> = rhs
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.ok_or_else(|| KovaError::Syntax {
                line: 1,
                col: 1,
                msg: format!("missing equation for `{}`", state[i]),
            })
        })
        .collect::<Result<_>>()?;
    WeightedSystem::from_rhs(name.as_deref().unwrap_or("unnamed"), &state, weight, rhs)
}

/// Names of the builtin systems.
pub const BUILTINS: &[&str] = &["painleve1", "painleve2", "painleve4", "p1-hierarchy:<m>"];

/// Document of the first Painlevé equation in Hamiltonian form.
pub const PAINLEVE1: &str = "system painleve1\nvars x y\nweights 3 2 4 5\neq x = 6*y^2 + z\neq y = x\n";
/// Document of the second Painlevé equation with α = 1.
pub const PAINLEVE2: &str =
    "system painleve2\nvars x y\nweights 2 1 2 3\neq x = 2*y^3 + y*z + 1\neq y = x\n";
/// Document of the fourth Painlevé equation with α = 1, β = 2.
pub const PAINLEVE4: &str = "system painleve4\nvars x y\nweights 1 1 1 2\neq x = -x^2 + 2*x*y + 2*x*z + 1\neq y = -y^2 + 2*x*y - 2*y*z + 2\n";

/// Loads a builtin system by name (`painleve1`, `painleve2`, `painleve4`,
/// `p1-hierarchy:m`).
pub fn builtin(name: &str) -> Result<WeightedSystem<BigRational>> {
    match name {
        "painleve1" => parse_system(PAINLEVE1),
        "painleve2" => parse_system(PAINLEVE2),
        "painleve4" => parse_system(PAINLEVE4),
        _ => {
            if let Some(m) = name.strip_prefix("p1-hierarchy:") {
                let m: usize = m.parse().map_err(|_| {
                    KovaError::Precondition(format!("invalid hierarchy index `{m}`"))
                })?;
                Ok(crate::hierarchy::generate(m)?.system)
            } else {
                Err(KovaError::Precondition(format!(
                    "unknown builtin `{name}` (known: {})",
                    BUILTINS.join(", ")
                )))
            }
        }
    }
}
