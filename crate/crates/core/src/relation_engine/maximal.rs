//! Exact audits of the weak-(1,1) and `Lᵖ` ratio maximal inequalities on
//! finite models.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{ratio_series, Accumulator, FiniteModel, Scalar};
use crate::error::{invalid, Error, Result};

/// Comparison slack for floating-point sides of an inequality.
pub const SLACK: f64 = 1e-12;

/// `M^𝓕_T[u, v](b) = max_{n ≤ T} |RATIOₙ(b)|` on every point.
///
/// Indices where both sums vanish are skipped; a positive numerator over a
/// zero denominator counts as `+∞` (returned as `Real(inf)`).
pub fn maximal_function(model: &FiniteModel, u: &[Scalar], v: &[Scalar], t: usize) -> Result<Vec<Scalar>> {
    if u.len() != model.len() || v.len() != model.len() {
        return Err(invalid("function tables must cover every point"));
    }
    if t > model.max_level() {
        return Err(Error::Capability(format!(
            "model defines F_n only for n <= {}",
            model.max_level()
        )));
    }
    let uf = |b: &usize| Ok(u[*b].clone());
    let vf = |b: &usize| Ok(v[*b].clone());
    (0..model.len())
        .map(|b| {
            let mut best = Scalar::zero();
            for n in 0..=t {
                let (su, sv) = super::weighted_sum_pair(model, &uf, &vf, &b, n)?;
                match su.checked_div(&sv) {
                    Some(r) => best = best.max(r.abs()),
                    None if su.is_zero() => {}
                    None => return Ok(Scalar::Real(f64::INFINITY)),
                }
            }
            Ok(best)
        })
        .collect()
}

/// `0.1·2^{k/2}` for `k = 0..20`: twenty points from `0.1` to about `72`.
pub fn default_epsilon_grid() -> Vec<f64> {
    (0..20).map(|k| 0.1 * 2f64.powf(k as f64 / 2.0)).collect()
}

#[derive(Debug, Clone)]
pub struct WeakTypeRow {
    pub epsilon: f64,
    /// `ν_v{M > ε}`.
    pub lhs_mass: Scalar,
    /// `ε⁻¹ ∫_{M>ε} u dν`.
    pub mid_bound: Scalar,
    /// `ε⁻¹ ‖u‖₁`.
    pub l1_bound: Scalar,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub p: f64,
    /// `‖M‖_p^p` in `Lᵖ(ν_v)`.
    pub lhs: f64,
    /// `‖u/v‖_p^p` in `Lᵖ(ν_v)`.
    pub norm_p: f64,
    /// `(p/(p−1))·‖u/v‖_p^p`.
    pub stated_bound: f64,
    pub stated_pass: bool,
    /// `(p/(p−1))^p·‖u/v‖_p^p`.
    pub doob_bound: f64,
    pub doob_pass: bool,
}

#[derive(Debug, Clone)]
pub struct MaximalAudit {
    pub weak: Vec<WeakTypeRow>,
    pub lp: Vec<LpRow>,
}

impl MaximalAudit {
    pub fn weak_pass(&self) -> bool {
        self.weak.iter().all(|r| r.pass)
    }
}

fn le_with_slack(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x <= y,
        _ => a.to_f64() <= b.to_f64() + SLACK * (1.0 + b.to_f64().abs()),
    }
}

fn exceeds(m: &Scalar, eps: &BigRational) -> bool {
    match m {
        Scalar::Exact(q) => q > eps,
        Scalar::Real(x) => *x > eps.to_f64().unwrap_or(f64::NAN),
    }
}

/// Weak-type audit over `ε` in `grid`; `u` must be nonnegative.
pub fn audit_weak_type(
    model: &FiniteModel,
    u: &[Scalar],
    v: &[Scalar],
    t: usize,
    grid: &[f64],
) -> Result<Vec<WeakTypeRow>> {
    if let Some(b) = u.iter().position(|x| x.is_negative()) {
        return Err(invalid(format!("weak-type audit needs u >= 0; u({b}) = {}", u[b])));
    }
    if let Some(b) = v.iter().position(|x| x.is_negative()) {
        return Err(invalid(format!("v must be nonnegative; v({b}) = {}", v[b])));
    }
    let m = maximal_function(model, u, v, t)?;
    let weights: Vec<Scalar> = model.weights().iter().cloned().map(Scalar::Exact).collect();
    let mut l1 = Accumulator::new();
    for (b, w) in weights.iter().enumerate() {
        l1.add_product(&u[b].abs(), w);
    }
    let l1 = l1.value();
    let mut rows = Vec::with_capacity(grid.len());
    for &epsilon in grid {
        if !(epsilon > 0.0) {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        let eps_q = BigRational::from_float(epsilon).expect("finite epsilon");
        let inv = Scalar::Exact(eps_q.recip());
        let mut lhs = Accumulator::new();
        let mut mid = Accumulator::new();
        for b in 0..model.len() {
            if exceeds(&m[b], &eps_q) {
                lhs.add_product(&v[b], &weights[b]);
                mid.add_product(&u[b], &weights[b]);
            }
        }
        let lhs_mass = lhs.value();
        let mid_bound = &mid.value() * &inv;
        let l1_bound = &l1 * &inv;
        let pass = le_with_slack(&lhs_mass, &mid_bound) && le_with_slack(&mid_bound, &l1_bound);
        rows.push(WeakTypeRow {
            epsilon,
            lhs_mass,
            mid_bound,
            l1_bound,
            pass,
        });
    }
    Ok(rows)
}

/// `Lᵖ` audit; requires `u = 0` wherever `v = 0` so that `u/v` is defined
/// `ν_v`-almost everywhere.
pub fn audit_lp(
    model: &FiniteModel,
    u: &[Scalar],
    v: &[Scalar],
    t: usize,
    p_values: &[f64],
) -> Result<Vec<LpRow>> {
    if let Some(b) = (0..model.len()).find(|&b| v[b].is_zero() && !u[b].is_zero()) {
        return Err(Error::Domain(format!(
            "u/v undefined at point {b}: v vanishes but u = {}",
            u[b]
        )));
    }
    if let Some(b) = v.iter().position(|x| x.is_negative()) {
        return Err(invalid(format!("v must be nonnegative; v({b}) = {}", v[b])));
    }
    let m = maximal_function(model, u, v, t)?;
    let mut rows = Vec::with_capacity(p_values.len());
    for &p in p_values {
        if !(p > 1.0) {
            return Err(invalid(format!("p must exceed 1, got {p}")));
        }
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for b in 0..model.len() {
            if !v[b].is_positive() {
                continue;
            }
            let mass = v[b].to_f64() * model.weight(b).to_f64().unwrap_or(f64::NAN);
            lhs.push(m[b].to_f64().powf(p) * mass);
            let ratio = u[b].checked_div(&v[b]).expect("v positive").abs();
            rhs.push(ratio.to_f64().powf(p) * mass);
        }
        let lhs = super::compensated_sum(lhs);
        let norm_p = super::compensated_sum(rhs);
        let c = p / (p - 1.0);
        let stated_bound = c * norm_p;
        let doob_bound = c.powf(p) * norm_p;
        let tol = |b: f64| SLACK * (1.0 + b.abs());
        rows.push(LpRow {
            p,
            lhs,
            norm_p,
            stated_bound,
            stated_pass: lhs <= stated_bound + tol(stated_bound),
            doob_bound,
            doob_pass: lhs <= doob_bound + tol(doob_bound),
        });
    }
    Ok(rows)
}

/// Both audits. The weak-type part uses `|u|`; the `Lᵖ` part uses `|u|` with
/// its values on `{v = 0}` removed, since those carry no `ν_v` mass.
pub fn audit_maximal(
    model: &FiniteModel,
    u: &[Scalar],
    v: &[Scalar],
    grid: &[f64],
    t: usize,
    p_values: &[f64],
) -> Result<MaximalAudit> {
    let abs_u: Vec<Scalar> = u.iter().map(Scalar::abs).collect();
    let weak = audit_weak_type(model, &abs_u, v, t, grid)?;
    let masked: Vec<Scalar> = abs_u
        .iter()
        .zip(v)
        .map(|(a, b)| if b.is_zero() { Scalar::zero() } else { a.clone() })
        .collect();
    let lp = audit_lp(model, &masked, v, t, p_values)?;
    Ok(MaximalAudit { weak, lp })
}

/// Ratio series of one point, used by reports that list the trajectory.
pub fn point_series(
    model: &FiniteModel,
    u: &[Scalar],
    v: &[Scalar],
    b: usize,
    t: usize,
) -> Result<super::RatioSeries> {
    ratio_series(model, &|p: &usize| Ok(u[*p].clone()), &|p: &usize| Ok(v[*p].clone()), &b, t)
}
