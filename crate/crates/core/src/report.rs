//! Structured reports of every pipeline stage, as JSON values with a
//! deterministic plain-text rendering.
//!
//! Polynomials are emitted as expression strings in the input grammar so
//! that they re-parse to the same polynomial. Laurent polynomials in the
//! blown-up coordinates are emitted together with a polynomial numerator
//! and the power of `w` it is multiplied by.

use serde_json::{json, Map, Value};

use crate::balances::{find_balances, isolation_test, Balance, SearchConfig};
use crate::blowup::{resolve, BlowupChart, Holomorphy, Resolution, SLaurent};
use crate::charts::{
    all_charts, chart_consistency, default_chart, fixed_point_bridge_tol, infinity_fixed_points,
    to_chart, Branch, BridgeVerdict, ChartKind, BRIDGE_TOL,
};
use crate::error::{KovaError, Result};
use crate::hierarchy;
use crate::kovalevskaya::kov_matrix;
use crate::lpoly::LaurentPoly;
use crate::normalform::Linearizability;
use crate::numeric;
use crate::poly::MultiPoly;
use crate::scalar::{format_rational, Field};
use crate::series::{expand, painleve_test, ClassicalVerdict, ExtendedVerdict, ResonanceStatus};
use crate::system::{SMode, SProbeConfig, SVerdict};
use crate::{QSystem, SMatrix};

/// Settings shared by every report.
#[derive(Clone, Debug)]
pub struct Options {
    /// Series or normal-form order (default: per-balance default).
    pub order: Option<usize>,
    /// Balance to analyse (1-based; default: all).
    pub balance: Option<usize>,
    /// Chart `j` (1-based; default: per-balance default).
    pub chart: Option<usize>,
    /// Branch of `c_j^{1/p_j}`.
    pub branch: Branch,
    /// Seed of the numeric probes.
    pub seed: u64,
    /// Condition (S) probe tolerances.
    pub probe: SProbeConfig,
    /// Relative tolerance of the numeric spectral bridge.
    pub bridge_tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            order: None,
            balance: None,
            chart: None,
            branch: Branch::Standard,
            seed: numeric::DEFAULT_SEED,
            probe: SProbeConfig::default(),
            bridge_tol: BRIDGE_TOL,
        }
    }
}

/// A finished report.
#[derive(Clone, Debug)]
pub struct Report {
    /// Structured content.
    pub json: Value,
    /// Whether every internal consistency check passed.
    pub consistent: bool,
}

impl Report {
    /// Pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("JSON values always serialise")
    }

    /// Indented plain-text outline.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        render(&self.json, 0, &mut out);
        out
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if is_scalar(val) {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar_text(val)));
                } else if val.as_array().is_some_and(|a| a.iter().all(is_scalar)) {
                    let items: Vec<String> =
                        val.as_array().expect("array").iter().map(scalar_text).collect();
                    out.push_str(&format!("{pad}{k}: [{}]\n", items.join(", ")));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render(val, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if is_scalar(item) {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(item)));
                } else if item.as_array().is_some_and(|a| a.iter().all(is_scalar)) {
                    let row: Vec<String> =
                        item.as_array().expect("array").iter().map(scalar_text).collect();
                    out.push_str(&format!("{pad}- [{}]\n", row.join(", ")));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render(item, indent + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_text(other))),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn strings<T: Field>(v: &[T]) -> Vec<String> {
    v.iter().map(Field::to_expr).collect()
}

fn matrix_rows(m: &SMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_expr()).collect())
        .collect()
}

fn complex_str(z: &num_complex::Complex64) -> String {
    if z.im.abs() < 1e-12 {
        format!("{:.12}", z.re)
    } else {
        format!("{:.12}{:+.12}i", z.re, z.im)
    }
}

/// A Laurent polynomial as `{expr, numerator, w_power}` with
/// `expr = numerator·w^{w_power}` and a polynomial numerator.
fn laurent_json(p: &SLaurent, w: usize) -> Value {
    let shift = p.min_exponent(w).unwrap_or(0).min(0);
    let mut e = vec![0; p.vars().len()];
    e[w] = -shift;
    let num = p
        .shift(&e)
        .to_poly()
        .map(|q| q.to_expr())
        .unwrap_or_else(|| p.to_expr());
    json!({ "expr": p.to_expr(), "numerator": num, "w_power": shift })
}

fn selected_balances(sys: &QSystem, opts: &Options) -> Result<Vec<(usize, Balance)>> {
    let found = find_balances(
        sys,
        &SearchConfig {
            seed: opts.seed,
            ..SearchConfig::default()
        },
    )?
    .balances;
    match opts.balance {
        None => Ok(found.into_iter().enumerate().map(|(i, b)| (i + 1, b)).collect()),
        Some(k) if k >= 1 && k <= found.len() => Ok(vec![(k, found[k - 1].clone())]),
        Some(k) => Err(KovaError::Precondition(format!(
            "balance index {k} out of range (the system has {} balances)",
            found.len()
        ))),
    }
}

fn chart_index(opts: &Options, sys: &QSystem) -> Result<Option<usize>> {
    match opts.chart {
        None => Ok(None),
        Some(j) if j >= 1 && j <= sys.dim() => Ok(Some(j - 1)),
        Some(j) => Err(KovaError::Precondition(format!(
            "chart index {j} out of range 1..={}",
            sys.dim()
        ))),
    }
}

fn system_header(sys: &QSystem) -> Value {
    json!({
        "name": sys.name,
        "variables": sys.state_names(),
        "weights": { "p": sys.weight.p, "r": sys.weight.r, "s": sys.weight.s },
        "equations": (0..sys.dim())
            .map(|i| format!("{}' = {}", sys.vars[i], sys.rhs(i).to_expr()))
            .collect::<Vec<_>>(),
    })
}

/// Assumption checks and condition (S).
pub fn check(sys: &QSystem, opts: &Options) -> Result<Report> {
    let mut rep = sys.check_assumptions(SMode::Assert);
    rep.s = sys.condition_s(SMode::Probe { seed: opts.seed }, &opts.probe);
    let s = match &rep.s {
        SVerdict::Holds { confidence } => json!({ "status": "holds", "confidence": confidence }),
        SVerdict::Violated { witness } => json!({
            "status": "violated",
            "witness": witness.iter().map(complex_str).collect::<Vec<_>>(),
        }),
        SVerdict::Unverified => json!({ "status": "unverified" }),
    };
    let violations: Vec<Value> = rep
        .violations
        .iter()
        .map(|v| {
            json!({
                "assumption": v.assumption,
                "equation": v.eq,
                "monomial": v.monomial,
                "expected": v.expected,
                "actual": v.actual,
            })
        })
        .collect();
    Ok(Report {
        json: json!({
            "system": system_header(sys),
            "A1": rep.a1_ok,
            "A2": rep.a2_ok,
            "A3": rep.a3_ok,
            "S": s,
            "quasi_homogeneous": sys.quasi_homogeneity_holds(),
            "violations": violations,
        }),
        consistent: true,
    })
}

/// Balances with their discovery route and isolation verdict.
pub fn balances(sys: &QSystem, opts: &Options) -> Result<Report> {
    let search = find_balances(
        sys,
        &SearchConfig {
            seed: opts.seed,
            ..SearchConfig::default()
        },
    )?;
    let mut list = Vec::new();
    for (i, b) in search.balances.iter().enumerate() {
        list.push(json!({
            "index": i + 1,
            "c": strings(&b.c),
            "source": format!("{:?}", b.source),
            "isolation": format!("{:?}", isolation_test(sys, b)?),
            "default_chart": default_chart(sys, b).map(|j| j + 1),
        }));
    }
    Ok(Report {
        json: json!({
            "system": system_header(sys),
            "balances": list,
            "numeric_only": search
                .numeric_only
                .iter()
                .map(|r| r.iter().map(complex_str).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
        consistent: true,
    })
}

/// Kovalevskaya matrices and exponents.
pub fn exponents(sys: &QSystem, opts: &Options) -> Result<Report> {
    let mut list = Vec::new();
    for (i, b) in selected_balances(sys, opts)? {
        let kd = kov_matrix(sys, &b)?;
        let mut exact = kd.exponents.exact_multiset();
        exact.sort();
        list.push(json!({
            "index": i,
            "c": strings(&b.c),
            "K": (0..kd.k.rows())
                .map(|r| (0..kd.k.cols()).map(|c| format_rational(kd.k.get(r, c))).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "charpoly": kd.charpoly.to_expr(),
            "exponents": exact.iter().map(format_rational).collect::<Vec<_>>(),
            "numeric_exponents": kd
                .exponents
                .numeric_roots
                .iter()
                .flat_map(|(z, k)| std::iter::repeat(complex_str(z)).take(*k))
                .collect::<Vec<_>>(),
            "semisimple": format!("{:?}", kd.semisimple),
            "trivial_eigenvector": strings(&kd.trivial_eigenvector),
        }));
    }
    Ok(Report {
        json: json!({ "system": system_header(sys), "balances": list }),
        consistent: true,
    })
}

/// Laurent series with the resonance log and the residual check.
pub fn series(sys: &QSystem, opts: &Options) -> Result<Report> {
    let mut list = Vec::new();
    let mut consistent = true;
    for (i, b) in selected_balances(sys, opts)? {
        let kd = kov_matrix(sys, &b)?;
        let n = opts.order.unwrap_or_else(|| crate::series::default_order(sys, &kd)).max(1);
        let exp = expand(sys, &b, n)?;
        let residual_ok = exp.residual_failure(sys)?.is_none();
        consistent &= residual_ok;
        let log: Vec<Value> = exp
            .resonance_log
            .iter()
            .filter(|e| !matches!(e.status, ResonanceStatus::Nonresonant))
            .map(|e| match &e.status {
                ResonanceStatus::FreeParameter {
                    dim,
                    params,
                    non_semisimple,
                } => json!({
                    "n": e.n, "status": "free-parameter", "dim": dim,
                    "params": params, "non_semisimple": non_semisimple,
                }),
                ResonanceStatus::LogObstruction {
                    witness,
                    obstruction,
                } => json!({
                    "n": e.n, "status": "log-obstruction",
                    "witness": strings(witness), "obstruction": obstruction.to_expr(),
                }),
                ResonanceStatus::Nonresonant => unreachable!("filtered"),
            })
            .collect();
        let coeffs: Vec<Value> = exp
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, row)| json!({ "n": k, "a": row.iter().map(MultiPoly::to_expr).collect::<Vec<_>>() }))
            .collect();
        list.push(json!({
            "index": i,
            "c": strings(&b.c),
            "order": exp.order,
            "computed": exp.computed,
            "parameters": exp.ring[..exp.ring.len() - 1].to_vec(),
            "coefficients": coeffs,
            "resonances": log,
            "param_count": exp.param_count,
            "family_size": exp.family_size(),
            "obstructed": exp.obstructed(),
            "residual_ok": residual_ok,
        }));
    }
    Ok(Report {
        json: json!({ "system": system_header(sys), "T": "z - z0", "balances": list }),
        consistent,
    })
}

/// Classical and extended Painlevé-test verdicts.
pub fn painleve(sys: &QSystem, opts: &Options) -> Result<Report> {
    let selected = selected_balances(sys, opts)?;
    let bs: Vec<Balance> = selected.iter().map(|(_, b)| b.clone()).collect();
    let verdicts = painleve_test(sys, &bs, opts.order, opts.branch)?;
    let list: Vec<Value> = selected
        .iter()
        .zip(&verdicts)
        .map(|((i, b), v)| {
            let classical = match &v.classical {
                ClassicalVerdict::Pass => json!({ "status": "pass" }),
                ClassicalVerdict::Fail(r) => json!({ "status": "fail", "reason": r }),
            };
            let extended = match &v.extended {
                ExtendedVerdict::PassAtOrder(n) => json!({ "status": "pass-at-order", "order": n }),
                ExtendedVerdict::Fail(r) => json!({ "status": "fail", "reason": r }),
                ExtendedVerdict::Undetermined(r) => json!({ "status": "undetermined", "reason": r }),
            };
            json!({
                "index": i,
                "c": strings(&b.c),
                "exponents": v.exponents,
                "integral": v.integral,
                "classical": classical,
                "extended": extended,
                "k": v.k,
                "family_dimension": v.family_dimension,
                "param_count": v.expansion.param_count,
                "series_order": v.expansion.order,
            })
        })
        .collect();
    Ok(Report {
        json: json!({ "system": system_header(sys), "balances": list }),
        consistent: true,
    })
}

/// Chart fields, consistency checks and fixed points at infinity.
pub fn charts(sys: &QSystem, opts: &Options) -> Result<Report> {
    let cons = chart_consistency(sys)?;
    let list: Vec<Value> = all_charts(sys)?
        .iter()
        .map(|cf| {
            json!({
                "chart": cf.chart.label(sys),
                "coords": cf.coords.to_vec(),
                "weights": cf.weights,
                "field": cf.polynomial.iter().map(MultiPoly::to_expr).collect::<Vec<_>>(),
                "denominator": cf.denominator.to_expr(),
                "action": cf.action,
            })
        })
        .collect();
    let forced = chart_index(opts, sys)?;
    let mut points = Vec::new();
    let mut consistent = cons.all();
    for (i, b) in selected_balances(sys, opts)? {
        let Some(j) = forced.or_else(|| default_chart(sys, &b)) else {
            points.push(json!({ "index": i, "c": strings(&b.c), "skipped": "no chart with a rational root" }));
            continue;
        };
        let cf = to_chart(sys, ChartKind::X(j))?;
        let (fps, _) = infinity_fixed_points(sys, &cf, std::slice::from_ref(&b), opts.branch)?;
        let Some(fp) = fps.first() else {
            points.push(json!({ "index": i, "c": strings(&b.c), "skipped": format!("c_{} = 0", j + 1) }));
            continue;
        };
        let kd = kov_matrix(sys, &b)?;
        let bridge = fixed_point_bridge_tol(sys, fp, &kd, false, opts.bridge_tol)?;
        consistent &= fp.vanishes;
        let bridge_json = match &bridge {
            BridgeVerdict::Verified {
                sigma,
                sigma_numeric,
                exact,
            } => json!({
                "status": "verified",
                "sigma": sigma.as_ref().map(Field::to_expr),
                "sigma_numeric": complex_str(sigma_numeric),
                "exact": exact,
            }),
            BridgeVerdict::Failed { max_diff } => json!({ "status": "failed", "max_diff": max_diff }),
        };
        points.push(json!({
            "index": i,
            "c": strings(&b.c),
            "chart": cf.chart.label(sys),
            "rho": fp.rho.to_expr(),
            "fixed_point": strings(&fp.coords),
            "vanishes": fp.vanishes,
            "jacobian": matrix_rows(&fp.jacobian),
            "spectrum": fp.spectrum_numeric.iter().map(complex_str).collect::<Vec<_>>(),
            "bridge": bridge_json,
        }));
    }
    Ok(Report {
        json: json!({
            "system": system_header(sys),
            "charts": list,
            "consistency": {
                "round_trips": cons.round_trips,
                "cocycle": cons.cocycle,
                "action_invariant": cons.action_invariant,
                "pushforward": cons.pushforward,
            },
            "fixed_points": points,
        }),
        consistent,
    })
}

fn resolutions(sys: &QSystem, opts: &Options) -> Result<Vec<(usize, Balance, Result<Resolution>)>> {
    let chart = chart_index(opts, sys)?;
    let order = opts.order.map(|n| n as i64);
    Ok(selected_balances(sys, opts)?
        .into_iter()
        .map(|(i, b)| {
            let r = resolve(sys, &b, chart, opts.branch, order);
            (i, b, r)
        })
        .collect())
}

fn normal_form_json(r: &Resolution) -> Value {
    let p = &r.prepared;
    let nf = &r.normal_form;
    let cert = match crate::normalform::linearizability_certificate(nf) {
        Linearizability::Certified { degree, complete } => {
            json!({ "status": "certified", "degree": degree, "complete": complete })
        }
        Linearizability::Obstructed { monomials } => json!({ "status": "obstructed", "monomials": monomials }),
    };
    json!({
        "chart": r.chart + 1,
        "order": r.order,
        "fixed_point": strings(&r.fixed_point.coords),
        "sigma": p.field.sigma.to_expr(),
        "chart_coords": p.chart_coords.to_vec(),
        "coords": p.field.coords.to_vec(),
        "weights": p.field.weights.iter().map(format_rational).collect::<Vec<_>>(),
        "T": matrix_rows(&p.t),
        "shifted_coordinates": p.hat_in_v().iter().map(MultiPoly::to_expr).collect::<Vec<_>>(),
        "field": p.field.components.iter().map(MultiPoly::to_expr).collect::<Vec<_>>(),
        "manifold": {
            "stable": r.manifold.stable.iter().map(|&i| p.field.coords[i].clone()).collect::<Vec<_>>(),
            "phi": r.manifold.phi.iter().map(MultiPoly::to_expr).collect::<Vec<_>>(),
            "weighted_order": r.manifold.order,
            "taylor_degree": r.manifold.taylor_degree,
            "residual_ok": r.manifold.residual_ok,
        },
        "normal_form": {
            "coords": nf.field.coords.to_vec(),
            "transform": nf.transform.iter().map(MultiPoly::to_expr).collect::<Vec<_>>(),
            "inverse": nf.inverse.iter().map(MultiPoly::to_expr).collect::<Vec<_>>(),
            "field": nf.field.components.iter().map(MultiPoly::to_expr).collect::<Vec<_>>(),
            "removed": nf.removed.iter().map(|m| json!({
                "equation": nf.source.coords[m.equation],
                "degree": m.degree,
                "coefficient": m.coefficient.to_expr(),
            })).collect::<Vec<_>>(),
            "g1": nf.g1.iter().map(|t| json!({
                "equation": nf.field.coords[t.equation],
                "monomial": MultiPoly::monomial(&nf.field.coords, t.monomial.0.clone(), t.coefficient.clone()).to_expr(),
            })).collect::<Vec<_>>(),
            "resonances": nf.resonances.len(),
            "condition_p": nf.condition_p,
            "certificate": cert,
        },
    })
}

/// Linear preparation, unstable manifold and normal form per balance.
pub fn normal_form(sys: &QSystem, opts: &Options) -> Result<Report> {
    let mut list = Vec::new();
    let mut consistent = true;
    for (i, b, r) in resolutions(sys, opts)? {
        let mut entry = Map::new();
        entry.insert("index".into(), json!(i));
        entry.insert("c".into(), json!(strings(&b.c)));
        match r {
            Ok(r) => {
                consistent &= r.manifold.residual_ok;
                entry.insert("result".into(), normal_form_json(&r));
            }
            Err(e) if e.is_input_error() => {
                entry.insert("skipped".into(), json!(e.to_string()));
            }
            Err(e) => return Err(e),
        }
        list.push(Value::Object(entry));
    }
    Ok(Report {
        json: json!({ "system": system_header(sys), "balances": list }),
        consistent,
    })
}

fn holomorphy_json(h: &Holomorphy) -> Value {
    match h {
        Holomorphy::Holomorphic => json!({ "status": "holomorphic" }),
        Holomorphy::Pole { order, terms } => json!({
            "status": "pole",
            "order": order,
            "terms": terms.iter().map(|t| json!({
                "component": t.component, "term": t.term, "w_order": t.w_order,
            })).collect::<Vec<_>>(),
        }),
    }
}

fn chart_json(b: &BlowupChart) -> Value {
    let w = b.w_index();
    json!({
        "coords": b.coords.to_vec(),
        "weights": b.weights,
        "passive": b.passive.iter().map(|&i| b.coords[i].clone()).collect::<Vec<_>>(),
        "substitution": b.source_coords.iter().zip(&b.substitution)
            .map(|(c, s)| format!("{c} = {}", s.to_expr())).collect::<Vec<_>>(),
        "field": b.coords.iter().zip(&b.components)
            .map(|(c, f)| json!({ "d/dz": c, "rhs": laurent_json(f, w) })).collect::<Vec<_>>(),
        "holomorphy": holomorphy_json(&b.holomorphy),
        "z_is_time": b.z_is_time,
        "dichotomy_ok": b.dichotomy_ok,
    })
}

fn resolution_consistent(r: &Resolution) -> bool {
    r.gluing.pullback_ok
        && r.gluing.divisor_bookkeeping
        && r.divisor.ok
        && r.blowup.z_is_time
        && r.blowup.dichotomy_ok
        && r.full.dichotomy_ok
        && r.manifold.residual_ok
        && r.action.as_ref().map_or(true, |a| a.gluing_invariant && a.field_invariant)
}

fn blowup_json(r: &Resolution) -> Value {
    let w = r.full.w_index();
    let action = match &r.action {
        Some(a) => json!({
            "order": a.order,
            "map": a.display(&r.full.coords),
            "images": a.images.iter().map(|p| laurent_json(p, w)).collect::<Vec<_>>(),
            "gluing_invariant": a.gluing_invariant,
            "field_invariant": a.field_invariant,
        }),
        None => json!({ "status": "unsupported", "reason": "p_j > 2" }),
    };
    json!({
        "chart": r.chart + 1,
        "order": r.order,
        "fixed_point": strings(&r.fixed_point.coords),
        "blowup": chart_json(&r.blowup),
        "full": chart_json(&r.full),
        "divisor": {
            "dw_dz_at_w0": r.divisor.value.as_ref().map(Field::to_expr),
            "expected": r.divisor.expected.to_expr(),
            "ok": r.divisor.ok,
        },
        "gluing": {
            "coords": r.gluing.coords.to_vec(),
            "maps": r.gluing.display(),
            "brackets": r.gluing.brackets.iter().map(MultiPoly::to_expr).collect::<Vec<_>>(),
            "p": r.gluing.p,
            "z": "z",
            "divisor_bookkeeping": r.gluing.divisor_bookkeeping,
            "pullback_ok": r.gluing.pullback_ok,
        },
        "action": action,
    })
}

/// Weighted blow-up, gluing map and induced action per balance.
pub fn blowup(sys: &QSystem, opts: &Options) -> Result<Report> {
    let mut list = Vec::new();
    let mut consistent = true;
    for (i, b, r) in resolutions(sys, opts)? {
        let mut entry = Map::new();
        entry.insert("index".into(), json!(i));
        entry.insert("c".into(), json!(strings(&b.c)));
        match r {
            Ok(r) => {
                consistent &= resolution_consistent(&r);
                entry.insert("result".into(), blowup_json(&r));
            }
            Err(e) if e.is_input_error() => {
                entry.insert("skipped".into(), json!(e.to_string()));
            }
            Err(e) => return Err(e),
        }
        list.push(Value::Object(entry));
    }
    Ok(Report {
        json: json!({ "system": system_header(sys), "balances": list }),
        consistent,
    })
}

/// The original chart plus one blown-up chart per balance, summarised.
pub fn atlas(sys: &QSystem, opts: &Options) -> Result<Report> {
    let mut charts = vec![json!({
        "name": "M0",
        "coords": sys.vars.to_vec(),
        "kind": "original",
    })];
    let mut failures = Vec::new();
    let mut consistent = true;
    for (i, b, r) in resolutions(sys, opts)? {
        match r {
            Ok(r) => {
                consistent &= resolution_consistent(&r);
                charts.push(json!({
                    "name": format!("M{i}"),
                    "balance": strings(&b.c),
                    "kind": "blow-up",
                    "coords": r.full.coords.to_vec(),
                    "chart": r.chart + 1,
                    "holomorphic_on_manifold": r.blowup.holomorphy.is_holomorphic(),
                    "gluing": r.gluing.display(),
                    "action": r.action.as_ref().map(|a| a.display(&r.full.coords)),
                    "quotient": r.action.as_ref().map(|a| format!("Z_{}", a.order)),
                }));
            }
            Err(e) if e.is_input_error() => {
                failures.push(json!({ "balance": i, "reason": e.to_string() }));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Report {
        json: json!({ "system": system_header(sys), "charts": charts, "failures": failures }),
        consistent,
    })
}

/// A member of the first Painlevé hierarchy with the three-route exponent
/// comparison.
pub fn hierarchy_report(m: usize) -> Result<Report> {
    let inst = hierarchy::generate(m)?;
    let cv = hierarchy::cross_validate(m)?;
    let consistent = cv.iter().all(|c| c.agree && c.reflection_symmetric);
    let rows: Vec<Value> = cv
        .iter()
        .map(|c| {
            json!({
                "k": c.k,
                "c": strings(&inst.balances[c.k - 1]),
                "kmatrix": c.kmatrix.iter().map(format_rational).collect::<Vec<_>>(),
                "closed_form": c.closed,
                "recursion": c.recursion.iter().map(format_rational).collect::<Vec<_>>(),
                "agree": c.agree,
                "reflection_symmetric": c.reflection_symmetric,
                "family_dimension": 2 * m - c.k + 1,
            })
        })
        .collect();
    Ok(Report {
        json: json!({
            "m": m,
            "P_m": inst.p_m.to_expr(),
            "system": system_header(&inst.system),
            "balances": rows,
        }),
        consistent,
    })
}

/// Parses a Laurent expression emitted by [`laurent_json`]'s `numerator`
/// field back to a Laurent polynomial (`numerator·w^{w_power}`).
pub fn parse_laurent(numerator: &str, w_power: i32, ring: &crate::poly::Vars) -> Result<SLaurent> {
    let w = ring
        .iter()
        .position(|c| c == "w")
        .ok_or_else(|| KovaError::UnknownVariable("w".into()))?;
    let p = crate::expr::parse_surd_poly(numerator, ring)?;
    let mut e = vec![0; ring.len()];
    e[w] = w_power;
    Ok(LaurentPoly::from_poly(&p).shift(&e))
}
