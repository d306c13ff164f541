//! Legendre transform of the divergence operator `D_f(., pi)`:
//!
//! ```text
//! D*_{f,pi}(h) = sup over nu << pi of { E_nu[h] - D_f(nu, pi) }.
//! ```
//!
//! Three routes are provided, ordered `oracle <= exact <= tight <= crude`:
//!
//! - [`exact_transform`]: solves `E_pi[(f*)'(h + c*)] = 1` for the offset
//!   `c*`, then `D* = E_pi[f*(h + c*)] - c*` with maximiser density
//!   `(f*)'(h + c*)`. Needs strict convexity.
//! - [`tight_transform`]: `E_pi[f*(h)] + f'(m) - f*(f'(m))` with
//!   `m = E_pi[(f*)'(h)]`; valid when `1/f''` is concave (`in_fc`).
//! - [`crude_transform`]: the plain Young-Fenchel moment `E_pi[f*(h)]`.
//! - [`simplex_oracle`]: direct supremum over the probability simplex, by
//!   exhaustive lattice search on small supports or multiplicative-weights
//!   ascent on larger ones. Test oracle, independent of the routes above.

use crate::dist::{FiniteDistribution, MeasurableFunction};
use crate::divergence::f_divergence;
use crate::error::{Error, Result};
use crate::ext::{kahan_sum, ExtReal};
use crate::generators::Generator;
use crate::optim::bisect_monotone;

/// Everything a transform evaluation produced, for inspection and audit.
#[derive(Debug, Clone)]
pub struct TransformReport {
    /// `D*_{f,pi}(h)` when computable.
    pub exact: ExtReal,
    /// Offset solving `E_pi[(f*)'(h + c*)] = 1`, when found.
    pub c_star: Option<f64>,
    /// Maximiser with density `(f*)'(h + c*)` w.r.t. `pi`, when it
    /// renormalises cleanly.
    pub nu_star: Option<FiniteDistribution>,
    /// Crude Young-Fenchel bound `E_pi[f*(h)]`.
    pub crude: ExtReal,
    /// Tighter bound, populated only for `in_fc` generators.
    pub tight: Option<ExtReal>,
    /// Simplex-search supremum, when requested.
    pub oracle: Option<ExtReal>,
}

/// `E_pi[f*(h)]`, `+inf` as soon as any positive-mass cell saturates.
pub fn crude_transform(
    g: &Generator,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
) -> Result<ExtReal> {
    h.require_support(pi)?;
    Ok(pi.expect_ext(|i| g.eval_fstar(h.value(i))))
}

/// `E_pi[f*(h)] + f'(m) - f*(f'(m))` with `m = E_pi[(f*)'(h)]`.
///
/// Falls back to the crude value when `(f*)'(h)` is not integrable, and is
/// `+inf` when `f*(h)` is not. Requires an `in_fc` generator.
pub fn tight_transform(
    g: &Generator,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
) -> Result<ExtReal> {
    h.require_support(pi)?;
    if !g.in_fc() {
        return Err(Error::Unsupported {
            generator: g.name(),
            reason: "tight transform needs 1/f'' concave".into(),
        });
    }
    let crude = pi.expect_ext(|i| g.eval_fstar(h.value(i)));
    if crude.is_pos_inf() {
        return Ok(ExtReal::INF);
    }
    let m = pi.expect_ext(|i| g.eval_fstar_prime(h.value(i)));
    let m = match m.finite_value() {
        Some(m) => m,
        None => return Ok(crude),
    };
    let fm = if m > 0.0 {
        ExtReal::from(g.eval_fprime(m))
    } else {
        g.fprime_at_zero()
    };
    let fm = match fm.finite_value() {
        Some(v) => v,
        None => return Ok(crude),
    };
    let correction = fm - g.eval_fstar(fm).expect_finite("f*(f'(m))");
    Ok(crude + correction)
}

/// Exact transform per the offset characterisation. `tol` bounds the
/// residual `|E_pi[(f*)'(h + c*)] - 1|`, not the offset itself.
pub fn exact_transform(
    g: &Generator,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    tol: f64,
) -> Result<TransformReport> {
    h.require_support(pi)?;
    if tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !g.strictly_convex() {
        return Err(Error::Unsupported {
            generator: g.name(),
            reason: "exact transform needs strict convexity".into(),
        });
    }

    let crude = crude_transform(g, pi, h)?;
    let tight = if g.in_fc() { Some(tight_transform(g, pi, h)?) } else { None };

    let mass = |c: f64| pi.expect_ext(|i| g.eval_fstar_prime(h.value(i) + c)).raw();
    let c_star = match bisect_monotone(mass, 1.0, tol, 200, 200) {
        Some(c) => c,
        None => {
            // No offset brings the maximiser mass to one: the supremum is
            // not attained and the transform saturates.
            return Ok(TransformReport {
                exact: ExtReal::INF,
                c_star: None,
                nu_star: None,
                crude,
                tight,
                oracle: None,
            });
        }
    };

    let exact = pi.expect_ext(|i| g.eval_fstar(h.value(i) + c_star)) - c_star;
    let density: Vec<f64> = (0..pi.len())
        .map(|i| {
            let d = g.eval_fstar_prime(h.value(i) + c_star);
            pi.weight(i) * if pi.weight(i) == 0.0 { 0.0 } else { d.raw() }
        })
        .collect();
    let total = kahan_sum(density.iter().copied());
    let nu_star = if (total - 1.0).abs() <= 10.0 * tol && total.is_finite() {
        FiniteDistribution::normalized(density).ok()
    } else {
        None
    };

    Ok(TransformReport { exact, c_star: Some(c_star), nu_star, crude, tight, oracle: None })
}

/// How [`simplex_oracle`] explores the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Exhaustive lattice with the given step; supports up to 8 atoms.
    Grid,
    /// Multiplicative-weights ascent from `nu = pi`; any support size.
    Ascent,
}

/// Lattice resolution the dominance sweeps use by default.
pub fn default_grid_resolution(n: usize) -> f64 {
    if n <= 4 {
        1e-2
    } else {
        5e-2
    }
}

/// Direct supremum of `E_nu[h] - D_f(nu, pi)` over the simplex.
pub fn simplex_oracle(
    g: &Generator,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    resolution: f64,
    mode: OracleMode,
) -> Result<ExtReal> {
    h.require_support(pi)?;
    if resolution <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    match mode {
        OracleMode::Grid => {
            let n = pi.len();
            if n > 8 {
                return Err(Error::InvalidArgument(format!(
                    "grid oracle supports at most 8 atoms, got {n}"
                )));
            }
            let steps = (1.0 / resolution).round().max(1.0) as u32;
            let mut best = f64::NEG_INFINITY;
            let mut counts = vec![0u32; n];
            search_compositions(&mut counts, 0, steps, &mut |counts| {
                let weights: Vec<f64> =
                    counts.iter().map(|&k| k as f64 / steps as f64).collect();
                let nu = FiniteDistribution::normalized(weights).expect("lattice point");
                let d = f_divergence(g, &nu, pi).expect("matching supports");
                if let Some(d) = d.finite_value() {
                    let objective = nu.expect(h) - d;
                    if objective > best {
                        best = objective;
                    }
                }
            });
            Ok(ExtReal::from(best))
        }
        OracleMode::Ascent => Ok(ascent_oracle(g, pi, h)),
    }
}

fn search_compositions(counts: &mut [u32], idx: usize, remaining: u32, visit: &mut impl FnMut(&[u32])) {
    if idx == counts.len() - 1 {
        counts[idx] = remaining;
        visit(counts);
        return;
    }
    for k in 0..=remaining {
        counts[idx] = k;
        search_compositions(counts, idx + 1, remaining - k, visit);
    }
}

/// Multiplicative-weights ascent with diminishing steps; deterministic.
fn ascent_oracle(g: &Generator, pi: &FiniteDistribution, h: &MeasurableFunction) -> ExtReal {
    const ITERS: usize = 10_000;
    let n = pi.len();
    let mut nu: Vec<f64> = pi.weights().to_vec();
    let mut best = f64::NEG_INFINITY;
    for t in 0..ITERS {
        let dist = FiniteDistribution::normalized(nu.clone()).expect("ascent iterate");
        if let Some(d) = f_divergence(g, &dist, pi).expect("matching supports").finite_value() {
            best = best.max(dist.expect(h) - d);
        }
        let eta = 0.5 / ((t + 1) as f64).sqrt();
        let mut updated = Vec::with_capacity(n);
        let mut max_log = f64::NEG_INFINITY;
        let mut logs = Vec::with_capacity(n);
        for i in 0..n {
            let w = dist.weight(i).max(1e-300);
            let ratio = if pi.weight(i) > 0.0 { w / pi.weight(i) } else { 1.0 };
            let grad = h.value(i) - g.eval_fprime(ratio.max(1e-12));
            let l = w.ln() + eta * grad;
            max_log = max_log.max(l);
            logs.push(l);
        }
        for l in logs {
            updated.push((l - max_log).exp());
        }
        nu = updated;
    }
    ExtReal::from(best)
}
