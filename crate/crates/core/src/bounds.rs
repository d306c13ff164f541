//! Change-of-measure bounds: `E_nu[h] <= moment(pi, h; params) + penalty(d)`.
//!
//! Thirteen bound rows are implemented, one per catalog divergence, each
//! evaluated exactly as printed in its closed form. Rows built on a
//! conjugate that is finite only left of zero work on the shifted variable
//! `h - h_max - c` internally, so the user-facing `h` is unrestricted.
//!
//! | row id              | free params | divergence expected in `d`      |
//! |---------------------|-------------|---------------------------------|
//! | `kl`                | lambda      | `KL(nu, pi)`                    |
//! | `power_tight:p`     | none        | power-p, `1 < p <= 2`           |
//! | `power:p` (p > 1)   | c (any)     | power-p                         |
//! | `pearson`           | none        | `chi2(nu, pi)`                  |
//! | `power:p` (0<p<1)   | c > 0       | power-p                         |
//! | `power:p` (p < 0)   | c >= 0      | power-p                         |
//! | `tv`                | gamma > 0   | `TV(nu, pi)`                    |
//! | `hellinger`         | c > 0       | `H^2(nu, pi)`                   |
//! | `reverse_pearson`   | c > 0       | `chi2(pi, nu)`                  |
//! | `reverse_kl`        | c > 0       | `KL(pi, nu)`                    |
//! | `lin:theta`         | lambda, c   | Lin's measure                   |
//! | `js`                | lambda, c   | `JS(nu, pi)`                    |
//! | `vincze_lecam`      | c > 0       | `VC(nu, pi)`                    |
//!
//! The caller supplies the divergence value rather than the posterior: the
//! bounds depend on `nu` only through it, which makes "what if the posterior
//! were this far away" sweeps cheap. [`eval_bound_for_posterior`] is the
//! convenience wrapper that takes `nu` and fills `d` in.
//!
//! Rows whose scale parameter has a closed-form optimum also expose the
//! pre-optimisation family [`lambda_parametric`]; substituting
//! [`optimal_lambda`] reproduces the printed row, and the stationarity of
//! that substitution is part of the acceptance suite.

use crate::dist::{FiniteDistribution, MeasurableFunction};
use crate::divergence::f_divergence;
use crate::error::{Error, Result};
use crate::ext::{kahan_sum, ExtReal};
use crate::generators::Generator;
use crate::legendre::{crude_transform, tight_transform};
use crate::optim::{golden_min, golden_min_log};

/// A bound row together with its per-row parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Row {
    Kl,
    /// Power-p for `1 < p <= 2`, fully optimised (the tighter route).
    PowerTight(f64),
    /// Power-p for `p > 1` with a free offset.
    PowerGeneral(f64),
    Pearson,
    /// Power-p for `0 < p < 1`.
    PowerFractional(f64),
    /// Power-p for `p < 0`.
    PowerNegative(f64),
    TotalVariation,
    SquaredHellinger,
    ReversePearson,
    ReverseKl,
    Lin(f64),
    JensenShannon,
    VinczeLeCam,
}

impl Row {
    /// Parses row identifiers as used on the CLI: `kl`, `power_tight:1.5`,
    /// `power:3` (regime read off the exponent), `lin:0.3`, `js`, ...
    pub fn parse(spec: &str) -> Result<Row> {
        let spec = spec.trim();
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => {
                let v: f64 = p.parse().map_err(|_| {
                    Error::ParameterOutOfRange(format!("`{p}` is not a number in `{spec}`"))
                })?;
                (n, Some(v))
            }
            None => (spec, None),
        };
        match (name, param) {
            ("kl", None) => Ok(Row::Kl),
            ("power_tight", Some(p)) if p > 1.0 && p <= 2.0 => Ok(Row::PowerTight(p)),
            ("power_tight", Some(p)) => Err(Error::ParameterOutOfRange(format!(
                "power_tight needs 1 < p <= 2, got {p}"
            ))),
            ("power", Some(p)) if p > 1.0 => Ok(Row::PowerGeneral(p)),
            ("power", Some(p)) if p > 0.0 && p < 1.0 => Ok(Row::PowerFractional(p)),
            ("power", Some(p)) if p < 0.0 => Ok(Row::PowerNegative(p)),
            ("power", Some(p)) => Err(Error::ParameterOutOfRange(format!(
                "power row needs p outside {{0, 1}}, got {p}"
            ))),
            ("pearson" | "pearson_chi2", None) => Ok(Row::Pearson),
            ("tv" | "total_variation", None) => Ok(Row::TotalVariation),
            ("hellinger" | "squared_hellinger", None) => Ok(Row::SquaredHellinger),
            ("reverse_pearson", None) => Ok(Row::ReversePearson),
            ("reverse_kl", None) => Ok(Row::ReverseKl),
            ("lin", Some(t)) if t > 0.0 && t < 1.0 => Ok(Row::Lin(t)),
            ("lin", Some(t)) => {
                Err(Error::ParameterOutOfRange(format!("lin needs theta in (0,1), got {t}")))
            }
            ("js" | "jensen_shannon", None) => Ok(Row::JensenShannon),
            ("vincze_lecam", None) => Ok(Row::VinczeLeCam),
            _ => Err(Error::InvalidArgument(format!("unknown bound row `{spec}`"))),
        }
    }

    pub fn id(&self) -> String {
        match self {
            Row::Kl => "kl".into(),
            Row::PowerTight(p) => format!("power_tight:{p}"),
            Row::PowerGeneral(p) | Row::PowerFractional(p) | Row::PowerNegative(p) => {
                format!("power:{p}")
            }
            Row::Pearson => "pearson".into(),
            Row::TotalVariation => "tv".into(),
            Row::SquaredHellinger => "hellinger".into(),
            Row::ReversePearson => "reverse_pearson".into(),
            Row::ReverseKl => "reverse_kl".into(),
            Row::Lin(t) => format!("lin:{t}"),
            Row::JensenShannon => "js".into(),
            Row::VinczeLeCam => "vincze_lecam".into(),
        }
    }

    /// All thirteen rows, with representative parameters where needed.
    pub fn catalog() -> Vec<Row> {
        vec![
            Row::Kl,
            Row::PowerTight(1.5),
            Row::PowerGeneral(3.0),
            Row::Pearson,
            Row::PowerFractional(0.5),
            Row::PowerNegative(-1.0),
            Row::TotalVariation,
            Row::SquaredHellinger,
            Row::ReversePearson,
            Row::ReverseKl,
            Row::Lin(0.3),
            Row::JensenShannon,
            Row::VinczeLeCam,
        ]
    }

    /// Generator whose divergence `D(nu, pi)` this row penalises. For the
    /// reverse rows this already encodes the argument swap.
    pub fn divergence_generator(&self) -> Generator {
        match self {
            Row::Kl => Generator::kl(),
            Row::PowerTight(p) | Row::PowerGeneral(p) | Row::PowerFractional(p)
            | Row::PowerNegative(p) => Generator::power(*p).expect("validated exponent"),
            Row::Pearson => Generator::pearson_chi2(),
            Row::TotalVariation => Generator::total_variation(),
            Row::SquaredHellinger => Generator::squared_hellinger(),
            Row::ReversePearson => Generator::reverse_pearson(),
            Row::ReverseKl => Generator::reverse_kl(),
            Row::Lin(t) => Generator::lin(*t).expect("validated theta"),
            Row::JensenShannon => Generator::jensen_shannon(),
            Row::VinczeLeCam => Generator::vincze_lecam(),
        }
    }

    pub fn uses_lambda(&self) -> bool {
        matches!(self, Row::Kl | Row::Lin(_) | Row::JensenShannon)
    }

    pub fn uses_gamma(&self) -> bool {
        matches!(self, Row::TotalVariation)
    }

    pub fn uses_c(&self) -> bool {
        matches!(
            self,
            Row::PowerGeneral(_)
                | Row::PowerFractional(_)
                | Row::PowerNegative(_)
                | Row::SquaredHellinger
                | Row::ReversePearson
                | Row::ReverseKl
                | Row::Lin(_)
                | Row::JensenShannon
                | Row::VinczeLeCam
        )
    }

    fn check_c(&self, c: f64) -> Result<()> {
        let bad = match self {
            Row::PowerGeneral(_) => !c.is_finite(),
            Row::PowerNegative(_) => !(c >= 0.0),
            _ => !(c > 0.0),
        };
        if bad {
            return Err(Error::ParameterOutOfRange(format!(
                "offset c = {c} violates the {} row constraint",
                self.id()
            )));
        }
        Ok(())
    }
}

/// A per-row parameter: pinned by the caller or resolved internally.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Param {
    #[default]
    Auto,
    Fixed(f64),
}

impl Param {
    pub fn fixed(self) -> Option<f64> {
        match self {
            Param::Fixed(v) => Some(v),
            Param::Auto => None,
        }
    }
}

/// Which row to evaluate and with which parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSpec {
    pub row: Row,
    pub lambda: Param,
    pub c: Param,
    pub gamma: Param,
}

impl BoundSpec {
    /// All applicable parameters left to automatic resolution.
    pub fn auto(row: Row) -> Self {
        Self { row, lambda: Param::Auto, c: Param::Auto, gamma: Param::Auto }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Param::Fixed(lambda);
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Param::Fixed(c);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Param::Fixed(gamma);
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.row.uses_lambda() {
            if let Param::Fixed(v) = self.lambda {
                return Err(Error::InvalidArgument(format!(
                    "row {} takes no lambda (got {v})",
                    self.row.id()
                )));
            }
        }
        if !self.row.uses_c() {
            if let Param::Fixed(v) = self.c {
                return Err(Error::InvalidArgument(format!(
                    "row {} takes no offset (got {v})",
                    self.row.id()
                )));
            }
        }
        if !self.row.uses_gamma() {
            if let Param::Fixed(v) = self.gamma {
                return Err(Error::InvalidArgument(format!(
                    "row {} takes no gamma (got {v})",
                    self.row.id()
                )));
            }
        }
        if let Param::Fixed(l) = self.lambda {
            if !(l > 0.0) {
                return Err(Error::ParameterOutOfRange(format!("lambda must be positive, got {l}")));
            }
        }
        if let Param::Fixed(g) = self.gamma {
            if !(g > 0.0) {
                return Err(Error::ParameterOutOfRange(format!("gamma must be positive, got {g}")));
            }
        }
        if let Param::Fixed(c) = self.c {
            self.row.check_c(c)?;
        }
        Ok(())
    }
}

/// A bound value plus the resolved parameters that produced it.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundResult {
    pub row: String,
    pub value: ExtReal,
    pub lambda: Option<f64>,
    pub c: Option<f64>,
    pub gamma: Option<f64>,
    pub divergence_value: ExtReal,
}

fn pos_moment(pi: &FiniteDistribution, h: &MeasurableFunction, r: f64) -> f64 {
    kahan_sum(
        pi.weights()
            .iter()
            .zip(h.values())
            .map(|(w, v)| w * v.max(0.0).powf(r)),
    )
}

fn moment_of(pi: &FiniteDistribution, values: impl Iterator<Item = f64>) -> f64 {
    kahan_sum(pi.weights().iter().zip(values).map(|(w, v)| w * v))
}

/// `hm - h + c` as a vector of shifted gaps (all `>= c`).
fn shifted_gaps(h: &MeasurableFunction, c: f64) -> Vec<f64> {
    let hm = h.max();
    h.values().iter().map(|v| hm - v + c).collect()
}

fn variance(pi: &FiniteDistribution, values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mean = moment_of(pi, values.clone());
    let second = moment_of(pi, values.map(|v| v * v));
    (second - mean * mean).max(0.0)
}

/// Stable `ln E_pi[exp(lambda h)]`.
fn log_mgf(pi: &FiniteDistribution, h: &MeasurableFunction, lambda: f64) -> f64 {
    let m = if lambda >= 0.0 { h.max() } else { h.min() };
    let sum = kahan_sum(
        pi.weights()
            .iter()
            .zip(h.values())
            .map(|(w, v)| w * (lambda * (v - m)).exp()),
    );
    lambda * m + sum.ln()
}

/// Evaluates a bound row exactly as printed. `d` is the matching
/// divergence value ([`Row::divergence_generator`]); `auto` parameters are
/// resolved by the closed-form optimum when one exists and by a scalar
/// search otherwise.
pub fn eval_bound(
    spec: &BoundSpec,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    d: ExtReal,
) -> Result<BoundResult> {
    h.require_support(pi)?;
    spec.validate()?;
    if d < ExtReal::finite(-1e-12) {
        return Err(Error::InvalidArgument(format!("divergence value {d} is negative")));
    }

    let row = spec.row;
    let (value, lambda, c, gamma) = match row {
        Row::Kl => {
            let lambda = match spec.lambda.fixed() {
                Some(l) => l,
                None => {
                    let f = |l: f64| kl_row_value(pi, h, l, d).raw();
                    golden_min_log(f, 1e-6, 1e6, 128).0
                }
            };
            (kl_row_value(pi, h, lambda, d), Some(lambda), None, None)
        }
        Row::PowerTight(_) | Row::Pearson => (fixed_row_value(row, pi, h, 0.0, d), None, None, None),
        Row::PowerGeneral(_) => {
            let c = resolve_offset(spec, pi, h, d, f64::NEG_INFINITY)?;
            (fixed_row_value(row, pi, h, c, d), None, Some(c), None)
        }
        Row::PowerFractional(_)
        | Row::PowerNegative(_)
        | Row::SquaredHellinger
        | Row::ReversePearson
        | Row::ReverseKl
        | Row::VinczeLeCam => {
            let floor = if matches!(row, Row::PowerNegative(_)) { 0.0 } else { 1e-6 };
            let c = resolve_offset(spec, pi, h, d, floor)?;
            (fixed_row_value(row, pi, h, c, d), None, Some(c), None)
        }
        Row::TotalVariation => {
            let gamma = match spec.gamma.fixed() {
                Some(g) => g,
                None => {
                    let f = |g: f64| tv_row_value(pi, h, g, d).raw();
                    golden_min_log(f, 1e-6, 1e6, 128).0
                }
            };
            (tv_row_value(pi, h, gamma, d), None, None, Some(gamma))
        }
        Row::Lin(_) | Row::JensenShannon => {
            let (lambda, c) = resolve_lambda_c(spec, pi, h, d)?;
            (mixture_row_value(row, pi, h, lambda, c, d), Some(lambda), Some(c), None)
        }
    };

    Ok(BoundResult { row: row.id(), value, lambda, c, gamma, divergence_value: d })
}

/// Computes the row's divergence from `nu` and evaluates the bound.
pub fn eval_bound_for_posterior(
    spec: &BoundSpec,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    nu: &FiniteDistribution,
) -> Result<BoundResult> {
    let d = f_divergence(&spec.row.divergence_generator(), nu, pi)?;
    eval_bound(spec, pi, h, d)
}

fn resolve_offset(
    spec: &BoundSpec,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    d: ExtReal,
    floor: f64,
) -> Result<f64> {
    if let Some(c) = spec.c.fixed() {
        spec.row.check_c(c)?;
        return Ok(c);
    }
    let range = (h.max() - h.min()).max(1.0);
    let (lo, hi) = if floor == f64::NEG_INFINITY {
        (h.min() - 5.0 * range, h.max() + 5.0 * range)
    } else {
        (floor.max(1e-6), 5.0 * range)
    };
    let f = |c: f64| fixed_row_value(spec.row, pi, h, c, d).raw();
    Ok(golden_min(f, lo, hi, 128).0)
}

fn resolve_lambda_c(
    spec: &BoundSpec,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    d: ExtReal,
) -> Result<(f64, f64)> {
    let inner = |c: f64| -> (f64, f64) {
        match spec.lambda.fixed() {
            Some(l) => (l, mixture_row_value(spec.row, pi, h, l, c, d).raw()),
            None => golden_min_log(
                |l| mixture_row_value(spec.row, pi, h, l, c, d).raw(),
                1e-6,
                1e6,
                96,
            ),
        }
    };
    let c = match spec.c.fixed() {
        Some(c) => {
            spec.row.check_c(c)?;
            c
        }
        None => {
            let range = (h.max() - h.min()).max(1.0);
            golden_min(|c| inner(c).1, 1e-6, 5.0 * range, 96).0
        }
    };
    Ok((inner(c).0, c))
}

fn kl_row_value(pi: &FiniteDistribution, h: &MeasurableFunction, lambda: f64, d: ExtReal) -> ExtReal {
    if d.is_pos_inf() {
        return ExtReal::INF;
    }
    ExtReal::from((log_mgf(pi, h, lambda) + d.raw()) / lambda)
}

fn tv_row_value(pi: &FiniteDistribution, h: &MeasurableFunction, gamma: f64, d: ExtReal) -> ExtReal {
    let hm = h.max();
    let floor_term = moment_of(pi, h.values().iter().map(|v| (v - hm).max(-gamma)));
    ExtReal::from(hm + floor_term) + d.weighted(gamma)
}

/// The rows whose printed form has no scale parameter left: evaluated
/// verbatim from the offset `c` (ignored by `power_tight` / `pearson`).
fn fixed_row_value(
    row: Row,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    c: f64,
    d: ExtReal,
) -> ExtReal {
    let hm = h.max();
    match row {
        Row::PowerTight(p) => {
            if d.is_pos_inf() {
                return ExtReal::INF;
            }
            let q = p / (p - 1.0);
            let head = pos_moment(pi, h, q - 1.0).powf(p - 1.0);
            let spread =
                (pos_moment(pi, h, q) - pos_moment(pi, h, q / p).powf(p)).max(0.0);
            ExtReal::from(head + spread.powf(1.0 / q) * d.raw().powf(1.0 / p))
        }
        Row::Pearson => {
            let head = pos_moment(pi, h, 1.0);
            let var = variance(pi, h.values().iter().copied());
            if d.is_pos_inf() && var == 0.0 {
                return ExtReal::from(head);
            }
            ExtReal::from(head + var.sqrt() * d.raw().sqrt())
        }
        Row::PowerGeneral(p) => {
            let q = p / (p - 1.0);
            let mq = moment_of(pi, h.values().iter().map(|v| (v - c).max(0.0).powf(q)));
            if mq == 0.0 {
                return ExtReal::finite(c);
            }
            ExtReal::from(c + mq.powf(1.0 / q) * (1.0 + d.raw()).powf(1.0 / p))
        }
        Row::PowerFractional(p) => {
            if !(d.raw() <= 1.0) {
                return ExtReal::INF;
            }
            let q = p / (p - 1.0);
            let gaps = shifted_gaps(h, c);
            let mq = moment_of(pi, gaps.iter().copied().map(|s| s.powf(q)));
            ExtReal::from(hm + c - mq.powf(1.0 / q) * (1.0 - d.raw()).powf(1.0 / p))
        }
        Row::PowerNegative(p) => {
            let q = p / (p - 1.0);
            let gaps = shifted_gaps(h, c);
            let mq = moment_of(pi, gaps.iter().copied().map(|s| s.powf(q)));
            let factor = (1.0 + d.raw()).powf(1.0 / p);
            ExtReal::from(hm + c - mq.powf(1.0 / q) * factor)
        }
        Row::SquaredHellinger => {
            if !(d.raw() >= 0.0 && d.raw() <= 1.0) {
                return ExtReal::INF;
            }
            let gaps = shifted_gaps(h, c);
            let inv = moment_of(pi, gaps.iter().copied().map(|s| 1.0 / s));
            let one = 1.0 - d.raw();
            ExtReal::from(hm + c - one * one / inv)
        }
        Row::ReversePearson => {
            let gaps = shifted_gaps(h, c);
            let a = moment_of(pi, gaps.iter().copied().map(f64::sqrt));
            ExtReal::from(hm + c - a * a / (1.0 + d.raw()))
        }
        Row::ReverseKl => {
            let gaps = shifted_gaps(h, c);
            let g = moment_of(pi, gaps.iter().copied().map(f64::ln));
            ExtReal::from(hm + c - (g - d.raw()).exp())
        }
        Row::VinczeLeCam => {
            let gaps = shifted_gaps(h, c);
            let a = moment_of(pi, gaps.iter().copied().map(f64::sqrt));
            let mean_h = moment_of(pi, h.values().iter().copied());
            ExtReal::from(2.0 * (hm + c) - mean_h - 4.0 * a * a / (2.0 + d.raw()))
        }
        Row::Kl | Row::TotalVariation | Row::Lin(_) | Row::JensenShannon => {
            unreachable!("handled by the dedicated evaluators")
        }
    }
}

fn mixture_row_value(
    row: Row,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    lambda: f64,
    c: f64,
    d: ExtReal,
) -> ExtReal {
    if d.is_pos_inf() {
        return ExtReal::INF;
    }
    let hm = h.max();
    let theta = match row {
        Row::Lin(t) => t,
        Row::JensenShannon => 0.5,
        _ => unreachable!("mixture evaluator only serves lin and js"),
    };
    let log_term = moment_of(
        pi,
        h.values()
            .iter()
            .map(|v| (1.0 - (lambda * (v - hm - c) / theta).exp()).ln()),
    );
    match row {
        Row::Lin(t) => {
            let tail = d.raw() + (1.0 - t) * (1.0 - t).ln() - t * t.ln();
            ExtReal::from(hm + c - (1.0 - t) * log_term / lambda + tail / lambda)
        }
        Row::JensenShannon => {
            ExtReal::from(hm + c - 0.5 * log_term / lambda + d.raw() / lambda)
        }
        _ => unreachable!(),
    }
}

/// The scale-parametric family behind each row that has a closed-form
/// optimum; substituting [`optimal_lambda`] gives the printed row back
/// (with the positive-part variance for `pearson`). Constants are included,
/// so values are directly comparable with [`eval_bound`].
pub fn lambda_parametric(
    row: Row,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    c: f64,
    lambda: f64,
    d: ExtReal,
) -> Result<ExtReal> {
    if !(lambda > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("lambda must be positive, got {lambda}")));
    }
    if d.is_pos_inf() {
        return Ok(ExtReal::INF);
    }
    let d = d.raw();
    let hm = h.max();
    let value = match row {
        Row::Pearson => {
            let var = variance(pi, h.values().iter().map(|v| v.max(0.0)));
            pos_moment(pi, h, 1.0) + 0.25 * lambda * var + d / lambda
        }
        Row::PowerTight(p) => {
            let q = p / (p - 1.0);
            let head = pos_moment(pi, h, q - 1.0).powf(p - 1.0);
            let spread =
                (pos_moment(pi, h, q) - pos_moment(pi, h, q / p).powf(p)).max(0.0);
            head + p.powf(1.0 - q) * lambda.powf(q - 1.0) * spread / q + d / lambda
        }
        Row::PowerGeneral(p) => {
            let q = p / (p - 1.0);
            let mq = moment_of(pi, h.values().iter().map(|v| (v - c).max(0.0).powf(q)));
            c + (1.0 + d) / lambda + p.powf(1.0 - q) * lambda.powf(q - 1.0) * mq / q
        }
        Row::PowerFractional(p) => {
            let q = p / (p - 1.0);
            let mq = moment_of(pi, shifted_gaps(h, c).into_iter().map(|s| s.powf(q)));
            hm + c + (d - 1.0) / lambda + p.powf(1.0 - q) * lambda.powf(q - 1.0) * mq / -q
        }
        Row::PowerNegative(p) => {
            let q = p / (p - 1.0);
            let mq = moment_of(pi, shifted_gaps(h, c).into_iter().map(|s| s.powf(q)));
            hm + c + (1.0 + d) / lambda - (-p).powf(1.0 - q) * lambda.powf(q - 1.0) * mq / q
        }
        Row::SquaredHellinger => {
            let inv = moment_of(pi, shifted_gaps(h, c).into_iter().map(|s| 1.0 / s));
            hm + c + (d - 1.0) / lambda + 0.25 * inv / (lambda * lambda)
        }
        Row::ReversePearson => {
            let a = moment_of(pi, shifted_gaps(h, c).into_iter().map(f64::sqrt));
            hm + c - 2.0 * a / lambda.sqrt() + (1.0 + d) / lambda
        }
        Row::ReverseKl => {
            let g = moment_of(pi, shifted_gaps(h, c).into_iter().map(f64::ln));
            hm + c + (-1.0 - lambda.ln() - g + d) / lambda
        }
        Row::VinczeLeCam => {
            let a = moment_of(pi, shifted_gaps(h, c).into_iter().map(f64::sqrt));
            let mean_h = moment_of(pi, h.values().iter().copied());
            2.0 * (hm + c) - mean_h - 4.0 * a / lambda.sqrt() + (2.0 + d) / lambda
        }
        Row::Kl | Row::TotalVariation | Row::Lin(_) | Row::JensenShannon => {
            return Err(Error::Unsupported {
                generator: row.id(),
                reason: "no closed-form scale optimum for this row".into(),
            })
        }
    };
    Ok(ExtReal::from(value))
}

/// The closed-form optimal scale for rows that have one.
///
/// For rows built on the shifted variable, `h` here must already be the
/// shifted (nonpositive) function `h - h_max - c`; for `power:p` with
/// `p > 1`, pass `h - c`. Degenerate denominators give `+inf`, meaning the
/// bound collapses to its offset terms.
pub fn optimal_lambda(
    row: Row,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    d: ExtReal,
) -> Result<f64> {
    h.require_support(pi)?;
    let d = if d.is_pos_inf() { return Ok(f64::INFINITY) } else { d.raw() };
    let needs_negative = matches!(
        row,
        Row::PowerFractional(_)
            | Row::PowerNegative(_)
            | Row::SquaredHellinger
            | Row::ReversePearson
            | Row::ReverseKl
            | Row::VinczeLeCam
    );
    if needs_negative && h.max() > 0.0 {
        return Err(Error::InvalidArgument(
            "this row's optimum needs the shifted variable h - h_max - c (nonpositive)".into(),
        ));
    }
    let lambda = match row {
        Row::Pearson => {
            let var = variance(pi, h.values().iter().map(|v| v.max(0.0)));
            if var == 0.0 {
                f64::INFINITY
            } else {
                2.0 * (d / var).sqrt()
            }
        }
        Row::PowerTight(p) => {
            let q = p / (p - 1.0);
            let spread =
                (pos_moment(pi, h, q) - pos_moment(pi, h, q / p).powf(p)).max(0.0);
            if spread == 0.0 {
                f64::INFINITY
            } else {
                p * (d / spread).powf(1.0 / q)
            }
        }
        Row::PowerGeneral(p) => {
            let q = p / (p - 1.0);
            let mq = pos_moment(pi, h, q);
            if mq == 0.0 {
                f64::INFINITY
            } else {
                p * ((1.0 + d) / mq).powf(1.0 / q)
            }
        }
        Row::PowerFractional(p) => {
            let q = p / (p - 1.0);
            let mq = moment_of(pi, h.values().iter().map(|v| (-v).powf(q)));
            if mq == 0.0 || !(d < 1.0) {
                f64::INFINITY
            } else {
                p * ((1.0 - d) / mq).powf(1.0 / q)
            }
        }
        Row::PowerNegative(p) => {
            let q = p / (p - 1.0);
            let mq = moment_of(pi, h.values().iter().map(|v| (-v).powf(q)));
            if mq == 0.0 {
                f64::INFINITY
            } else {
                -p * ((1.0 + d) / mq).powf(1.0 / q)
            }
        }
        Row::SquaredHellinger => {
            let inv = moment_of(pi, h.values().iter().map(|v| 1.0 / -v));
            inv / (2.0 - 2.0 * d)
        }
        Row::ReversePearson => {
            let a = moment_of(pi, h.values().iter().map(|v| (-v).sqrt()));
            if a == 0.0 {
                f64::INFINITY
            } else {
                ((1.0 + d) / a).powi(2)
            }
        }
        Row::ReverseKl => {
            let g = moment_of(pi, h.values().iter().map(|v| (-v).ln()));
            (d - g).exp()
        }
        Row::VinczeLeCam => {
            let a = moment_of(pi, h.values().iter().map(|v| (-v).sqrt()));
            if a == 0.0 {
                f64::INFINITY
            } else {
                ((1.0 + 0.5 * d) / a).powi(2)
            }
        }
        Row::Kl | Row::TotalVariation | Row::Lin(_) | Row::JensenShannon => {
            return Err(Error::Unsupported {
                generator: row.id(),
                reason: "no closed-form scale optimum for this row".into(),
            })
        }
    };
    Ok(lambda)
}

/// Which transform backs the generic two-parameter optimisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimMode {
    Crude,
    Tight,
}

/// Numerically minimises
/// `c + (B_g(lambda (h - c)) + d) / lambda` over the offset and the scale:
/// golden section on the offset (outer) and on the log-scale (inner, over
/// `[1e-6, 1e6]`), 128 iterations per axis.
///
/// In tight mode the search is additionally seeded with the crude-mode
/// optimum, so at matched inputs the tight result never exceeds the crude
/// one.
pub fn optimize_free_params(
    g: &Generator,
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    d: ExtReal,
    mode: OptimMode,
) -> Result<BoundResult> {
    h.require_support(pi)?;
    if mode == OptimMode::Tight && !g.in_fc() {
        return Err(Error::Unsupported {
            generator: g.name(),
            reason: "tight mode needs 1/f'' concave".into(),
        });
    }
    if d.is_pos_inf() {
        return Ok(BoundResult {
            row: format!("optimize({})", g.name()),
            value: ExtReal::INF,
            lambda: None,
            c: None,
            gamma: None,
            divergence_value: d,
        });
    }

    let objective = |c: f64, lambda: f64, m: OptimMode| -> f64 {
        let scaled = h.scaled_shifted(lambda, c);
        let b = match m {
            OptimMode::Crude => crude_transform(g, pi, &scaled),
            OptimMode::Tight => tight_transform(g, pi, &scaled),
        };
        match b {
            Ok(b) => ((b + d).weighted(1.0 / lambda) + c).raw(),
            Err(_) => f64::INFINITY,
        }
    };
    let search = |m: OptimMode| -> (f64, f64, f64) {
        let range = (h.max() - h.min()).max(1.0);
        let inner = |c: f64| golden_min_log(|l| objective(c, l, m), 1e-6, 1e6, 128);
        let (c_best, _) = golden_min(|c| inner(c).1, h.min() - 5.0 * range, h.max() + 5.0 * range, 128);
        let mut best = (c_best, inner(c_best).0, inner(c_best).1);
        for seed in [0.0, h.max()] {
            let (l, v) = inner(seed);
            if v < best.2 {
                best = (seed, l, v);
            }
        }
        best
    };

    let (mut c_best, mut l_best, mut v_best) = search(mode);
    if mode == OptimMode::Tight {
        let (c_crude, l_crude, _) = search(OptimMode::Crude);
        let v = objective(c_crude, l_crude, OptimMode::Tight);
        if v < v_best {
            c_best = c_crude;
            l_best = l_crude;
            v_best = v;
        }
    }

    Ok(BoundResult {
        row: format!("optimize({})", g.name()),
        value: ExtReal::from(v_best),
        lambda: Some(l_best),
        c: Some(c_best),
        gamma: None,
        divergence_value: d,
    })
}

/// The refined Vincze-Le Cam inequality: for any `C >= h_max` and scale,
///
/// ```text
/// E_nu[h] <= C + E_pi[ 1[h >= C - 4/l] (4 - 4 sqrt(l (C - h)) + l (C - h)) ] / l
///              + (VC(nu, pi) - 2) / l.
/// ```
///
/// Tighter than the main row but saturating; mostly of diagnostic interest.
pub fn vincze_lecam_refined(
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    d: ExtReal,
    big_c: f64,
    lambda: f64,
) -> Result<ExtReal> {
    h.require_support(pi)?;
    if big_c < h.max() {
        return Err(Error::ParameterOutOfRange(format!(
            "offset C = {big_c} is below the maximum {}",
            h.max()
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("lambda must be positive, got {lambda}")));
    }
    if d.is_pos_inf() {
        return Ok(ExtReal::INF);
    }
    let window = moment_of(
        pi,
        h.values().iter().map(|&v| {
            if v >= big_c - 4.0 / lambda {
                let s = lambda * (big_c - v);
                4.0 - 4.0 * s.sqrt() + s
            } else {
                0.0
            }
        }),
    );
    Ok(ExtReal::from(big_c + window / lambda + (d.raw() - 2.0) / lambda))
}

/// Bound on `E_nu[h]` for nonnegative `h` assuming only an `h ln h` moment:
///
/// ```text
/// E_nu[h] <= E_pi[h ln h] - E_pi[h] ln E_pi[h]
///              + ln( E_pi[ exp(dnu/dpi) ] ) E_pi[h],
/// ```
///
/// with `0 ln 0 = 0`. `+inf` when `nu` is not absolutely continuous.
pub fn hostile_bound(
    pi: &FiniteDistribution,
    h: &MeasurableFunction,
    nu: &FiniteDistribution,
) -> Result<ExtReal> {
    h.require_support(pi)?;
    nu.require_same_support(pi)?;
    if let Some(v) = h.values().iter().find(|v| **v < 0.0) {
        return Err(Error::InvalidArgument(format!("hostile bound needs h >= 0, got {v}")));
    }
    for i in 0..pi.len() {
        if pi.weight(i) == 0.0 && nu.weight(i) > 0.0 {
            return Ok(ExtReal::INF);
        }
    }
    let xlnx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let entropy = moment_of(pi, h.values().iter().map(|&v| xlnx(v)));
    let mean = moment_of(pi, h.values().iter().copied());
    let exp_term = pi
        .expect_ext(|i| ExtReal::from((nu.weight(i) / pi.weight(i)).exp()))
        .expect_finite("exponential divergence moment")
        .ln();
    Ok(ExtReal::from(entropy - xlnx(mean) + exp_term * mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{kl_divergence, total_variation};
    use crate::legendre::exact_transform;
    use std::f64::consts::{E, LN_2};

    fn half() -> FiniteDistribution {
        FiniteDistribution::new(vec![0.5, 0.5]).unwrap()
    }

    fn func(v: &[f64]) -> MeasurableFunction {
        MeasurableFunction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn kl_row_is_tight_at_the_gibbs_maximiser() {
        let pi = half();
        let h = func(&[0.0, 3f64.ln()]);
        let report = exact_transform(&Generator::kl(), &pi, &h, 1e-12).unwrap();
        let nu = report.nu_star.unwrap();
        let d = kl_divergence(&nu, &pi);
        let spec = BoundSpec::auto(Row::Kl).with_lambda(1.0);
        let bound = eval_bound(&spec, &pi, &h, d).unwrap();
        let e_nu_h = nu.expect(&h);
        assert!((bound.value.raw() - e_nu_h).abs() < 1e-9, "{} vs {e_nu_h}", bound.value);
        assert!((bound.value.raw() - 0.823959).abs() < 1e-6);
        assert!((LN_2 + d.raw() - bound.value.raw()).abs() < 1e-12);
    }

    #[test]
    fn tv_row_achieves_equality_on_the_dirac_instance() {
        let pi = half();
        let h = func(&[0.0, 1.0]);
        let nu = FiniteDistribution::new(vec![0.0, 1.0]).unwrap();
        let d = ExtReal::finite(total_variation(&nu, &pi));
        assert_eq!(d, ExtReal::finite(0.5));
        let spec = BoundSpec::auto(Row::TotalVariation).with_gamma(1.0);
        let bound = eval_bound(&spec, &pi, &h, d).unwrap();
        assert!((bound.value.raw() - 1.0).abs() < 1e-12);
        assert!((bound.value.raw() - nu.expect(&h)).abs() < 1e-12);
    }

    #[test]
    fn pearson_row_reduces_to_prior_moment_at_zero_divergence() {
        let pi = half();
        let h = func(&[-1.0, 2.0]);
        let bound = eval_bound(&BoundSpec::auto(Row::Pearson), &pi, &h, ExtReal::ZERO).unwrap();
        assert!((bound.value.raw() - 1.0).abs() < 1e-12); // E[h_+] = 0.5 * 2
        assert!(bound.value.raw() >= pi.expect(&h));
    }

    #[test]
    fn power_tight_row_matches_hand_instance() {
        let pi = half();
        let h = func(&[-1.0, 1.0]);
        let spec = BoundSpec::auto(Row::PowerTight(2.0));
        let bound = eval_bound(&spec, &pi, &h, ExtReal::finite(0.25)).unwrap();
        assert!((bound.value.raw() - 0.75).abs() < 1e-12, "{}", bound.value);
        let nu = FiniteDistribution::new(vec![0.25, 0.75]).unwrap();
        assert!(bound.value.raw() >= nu.expect(&h));
    }

    #[test]
    fn rows_match_their_parametric_form_at_the_optimal_scale() {
        let pi = FiniteDistribution::new(vec![0.3, 0.45, 0.25]).unwrap();
        let h = func(&[0.3, -0.8, 1.4]);
        let hm = h.max();
        let d = ExtReal::finite(0.37);
        let rows = [
            Row::PowerTight(1.5),
            Row::PowerGeneral(3.0),
            Row::PowerFractional(0.5),
            Row::PowerNegative(-1.0),
            Row::SquaredHellinger,
            Row::ReversePearson,
            Row::ReverseKl,
            Row::VinczeLeCam,
        ];
        for row in rows {
            let c = if row.uses_c() { 0.8 } else { 0.0 };
            let shifted = match row {
                Row::PowerGeneral(_) => h.shifted(-c),
                Row::PowerTight(_) | Row::Pearson => h.clone(),
                _ => h.shifted(-hm - c),
            };
            let lambda = optimal_lambda(row, &pi, &shifted, d).unwrap();
            assert!(lambda.is_finite() && lambda > 0.0, "{}: {lambda}", row.id());
            let parametric = lambda_parametric(row, &pi, &h, c, lambda, d).unwrap();
            let spec = if row.uses_c() {
                BoundSpec::auto(row).with_c(c)
            } else {
                BoundSpec::auto(row)
            };
            let printed = eval_bound(&spec, &pi, &h, d).unwrap().value;
            assert!(
                (parametric.raw() - printed.raw()).abs() <= 1e-10 * (1.0 + printed.raw().abs()),
                "{}: parametric {parametric} vs printed {printed}",
                row.id()
            );
        }
    }

    #[test]
    fn pearson_row_dominates_its_parametric_optimum() {
        // The printed row uses the full variance, the parametric family the
        // positive-part variance; they agree when h >= 0.
        let pi = FiniteDistribution::new(vec![0.25, 0.35, 0.4]).unwrap();
        let d = ExtReal::finite(0.2);
        let h_pos = func(&[0.2, 0.9, 1.4]);
        let l = optimal_lambda(Row::Pearson, &pi, &h_pos, d).unwrap();
        let parametric = lambda_parametric(Row::Pearson, &pi, &h_pos, 0.0, l, d).unwrap();
        let printed = eval_bound(&BoundSpec::auto(Row::Pearson), &pi, &h_pos, d).unwrap().value;
        assert!((parametric.raw() - printed.raw()).abs() < 1e-12);
        let h_mixed = func(&[-0.7, 0.9, 1.4]);
        let l2 = optimal_lambda(Row::Pearson, &pi, &h_mixed, d).unwrap();
        let parametric2 = lambda_parametric(Row::Pearson, &pi, &h_mixed, 0.0, l2, d).unwrap();
        let printed2 = eval_bound(&BoundSpec::auto(Row::Pearson), &pi, &h_mixed, d).unwrap().value;
        assert!(parametric2 <= printed2 + 1e-12);
    }

    #[test]
    fn optimal_lambda_hand_examples() {
        // Pearson with D = 1/4 and Var[h_+] = 1/4.
        let pi = half();
        let h = func(&[0.0, 1.0]);
        let l = optimal_lambda(Row::Pearson, &pi, &h, ExtReal::finite(0.25)).unwrap();
        assert!((l - 2.0).abs() < 1e-12);
        // Squared Hellinger with H^2 = 0 and E[(-h)^{-1}] = 1.
        let h_neg = func(&[-1.0, -1.0]);
        let l = optimal_lambda(Row::SquaredHellinger, &pi, &h_neg, ExtReal::ZERO).unwrap();
        assert!((l - 0.5).abs() < 1e-12);
        // Reverse KL at nu = pi with h = -1.
        let l = optimal_lambda(Row::ReverseKl, &pi, &h_neg, ExtReal::ZERO).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_lambda_rejects_unshifted_input_and_missing_formulas() {
        let pi = half();
        let h = func(&[0.0, 1.0]);
        assert!(optimal_lambda(Row::ReverseKl, &pi, &h, ExtReal::ZERO).is_err());
        assert!(optimal_lambda(Row::Kl, &pi, &h, ExtReal::ZERO).is_err());
        assert!(optimal_lambda(Row::JensenShannon, &pi, &h, ExtReal::ZERO).is_err());
        // Degenerate spread collapses to the +inf signal.
        let flat = func(&[1.0, 1.0]);
        let l = optimal_lambda(Row::Pearson, &pi, &flat, ExtReal::finite(0.3)).unwrap();
        assert!(l.is_infinite());
    }

    #[test]
    fn optimizer_recovers_the_kl_equality_case() {
        let pi = half();
        let h = func(&[0.0, 3f64.ln()]);
        let nu = FiniteDistribution::new(vec![0.25, 0.75]).unwrap();
        let d = kl_divergence(&nu, &pi);
        let res = optimize_free_params(&Generator::kl(), &pi, &h, d, OptimMode::Tight).unwrap();
        let target = 0.75 * 3f64.ln();
        assert!((res.value.raw() - target).abs() < 1e-4, "{} vs {target}", res.value);
        assert!(res.value.raw() >= target - 1e-9);
    }

    #[test]
    fn optimizer_handles_constant_functions() {
        let pi = half();
        let h = MeasurableFunction::constant(2, 1.3);
        let res =
            optimize_free_params(&Generator::kl(), &pi, &h, ExtReal::ZERO, OptimMode::Crude)
                .unwrap();
        assert!(res.value.raw() >= 1.3 - 1e-9);
        assert!(res.value.raw() <= 1.3 + 1e-3, "{}", res.value);
    }

    #[test]
    fn tight_optimum_never_exceeds_crude_optimum() {
        let pi = FiniteDistribution::new(vec![0.2, 0.5, 0.3]).unwrap();
        let h = func(&[0.4, -0.3, 1.2]);
        let d = ExtReal::finite(0.6);
        for g in [Generator::kl(), Generator::power(1.5).unwrap(), Generator::pearson_chi2()] {
            let tight = optimize_free_params(&g, &pi, &h, d, OptimMode::Tight).unwrap();
            let crude = optimize_free_params(&g, &pi, &h, d, OptimMode::Crude).unwrap();
            assert!(
                tight.value <= crude.value + 1e-8,
                "{}: {} vs {}",
                g.name(),
                tight.value,
                crude.value
            );
        }
    }

    #[test]
    fn tight_objective_below_crude_at_matched_parameters() {
        let pi = FiniteDistribution::new(vec![0.2, 0.5, 0.3]).unwrap();
        let h = func(&[0.4, -0.3, 1.2]);
        let g = Generator::power(1.7).unwrap();
        for (lambda, c) in [(0.5, 0.0), (2.0, -0.4), (1.0, 0.9)] {
            let scaled = h.scaled_shifted(lambda, c);
            let tight = tight_transform(&g, &pi, &scaled).unwrap();
            let crude = crude_transform(&g, &pi, &scaled).unwrap();
            assert!(tight <= crude, "lambda={lambda}, c={c}");
        }
    }

    #[test]
    fn optimizer_beats_the_closed_form_pearson_point() {
        let pi = FiniteDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let h = func(&[0.5, -0.2, 0.8, 1.1]);
        let d = ExtReal::finite(0.45);
        let tight =
            optimize_free_params(&Generator::pearson_chi2(), &pi, &h, d, OptimMode::Tight)
                .unwrap();
        let printed = eval_bound(&BoundSpec::auto(Row::Pearson), &pi, &h, d).unwrap();
        assert!(tight.value <= printed.value + 1e-6);
    }

    #[test]
    fn tv_offset_optimum_sits_at_the_saturation_edge() {
        // Minimising E[f*(h + c)] - c over the offset lands on 1/2 - h_max.
        let pi = half();
        let g = Generator::total_variation();
        for h in [func(&[0.0, 1.0]), func(&[-0.4, 1.7]), func(&[0.3, 2.0])] {
            let hm = h.max();
            let objective = |c: f64| {
                crude_transform(&g, &pi, &h.shifted(c)).map(|b| (b - c).raw()).unwrap()
            };
            let lo = 0.5 - hm - 2.0;
            let step = 1e-3;
            let mut best = f64::INFINITY;
            let mut best_c = lo;
            let mut k = 0;
            loop {
                let c = lo + step * k as f64;
                if c > 0.5 - hm + 2.0 {
                    break;
                }
                let v = objective(c);
                if v <= best + 1e-12 {
                    best = best.min(v);
                    best_c = c;
                }
                k += 1;
            }
            assert!(
                (best_c - (0.5 - hm)).abs() <= 2.0 * step,
                "argmin {best_c} vs {}",
                0.5 - hm
            );
        }
    }

    #[test]
    fn refined_vincze_lecam_hand_values() {
        let pi = half();
        let h = MeasurableFunction::constant(2, 0.0);
        let v = vincze_lecam_refined(&pi, &h, ExtReal::ZERO, 0.0, 1.0).unwrap();
        assert!((v.raw() - 2.0).abs() < 1e-12);
        let v = vincze_lecam_refined(&pi, &h, ExtReal::ZERO, 0.0, 1e3).unwrap();
        assert!(v.raw() > 0.0 && v.raw() <= 0.01, "{v}");
        assert!(vincze_lecam_refined(&pi, &h, ExtReal::ZERO, -0.5, 1.0).is_err());
    }

    #[test]
    fn refined_vincze_lecam_is_sound_on_random_posteriors() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let pi = FiniteDistribution::normalized(
                (0..n).map(|_| -f64::ln(rng.gen_range(1e-9..1.0))).collect(),
            )
            .unwrap();
            let nu = FiniteDistribution::normalized(
                (0..n).map(|_| -f64::ln(rng.gen_range(1e-9..1.0))).collect(),
            )
            .unwrap();
            let h = MeasurableFunction::new(
                (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            )
            .unwrap();
            let d = ExtReal::finite(crate::divergence::vincze_lecam(&nu, &pi));
            let big_c = h.max() + rng.gen_range(0.0..1.0);
            let lambda = rng.gen_range(0.05..20.0);
            let v = vincze_lecam_refined(&pi, &h, d, big_c, lambda).unwrap();
            assert!(v.raw() >= nu.expect(&h) - 1e-9);
        }
    }

    #[test]
    fn hostile_bound_constant_equality() {
        let pi = half();
        let nu = half();
        for a in [0.5, 1.0, 3.0] {
            let h = MeasurableFunction::constant(2, a);
            let v = hostile_bound(&pi, &h, &nu).unwrap();
            assert!((v.raw() - a).abs() < 1e-12, "a = {a}: {v}");
        }
    }

    #[test]
    fn hostile_bound_hand_instance() {
        let pi = half();
        let h = func(&[0.0, 2.0]);
        let nu = FiniteDistribution::new(vec![0.25, 0.75]).unwrap();
        let v = hostile_bound(&pi, &h, &nu).unwrap();
        let expected = LN_2 + (0.5 * (E.sqrt() + E.powf(1.5))).ln();
        assert!((v.raw() - expected).abs() < 1e-12, "{v} vs {expected}");
        assert!(v.raw() >= nu.expect(&h));
    }

    #[test]
    fn hostile_bound_edge_cases() {
        let pi = half();
        let nu = half();
        let with_zero = func(&[0.0, 1.0]);
        assert!(hostile_bound(&pi, &with_zero, &nu).is_ok());
        let negative = func(&[-0.1, 1.0]);
        assert!(hostile_bound(&pi, &negative, &nu).is_err());
        let pi_gap = FiniteDistribution::new(vec![0.0, 1.0]).unwrap();
        let v = hostile_bound(&pi_gap, &with_zero, &nu).unwrap();
        assert!(v.is_pos_inf());
    }

    #[test]
    fn param_validation_rejects_misuse() {
        let pi = half();
        let h = func(&[0.0, 1.0]);
        let d = ExtReal::ZERO;
        assert!(eval_bound(&BoundSpec::auto(Row::Pearson).with_lambda(1.0), &pi, &h, d).is_err());
        assert!(eval_bound(&BoundSpec::auto(Row::Kl).with_lambda(-1.0), &pi, &h, d).is_err());
        assert!(eval_bound(&BoundSpec::auto(Row::ReverseKl).with_c(0.0), &pi, &h, d).is_err());
        assert!(eval_bound(&BoundSpec::auto(Row::PowerNegative(-1.0)).with_c(0.0), &pi, &h, d).is_ok());
        assert!(eval_bound(&BoundSpec::auto(Row::TotalVariation).with_gamma(0.0), &pi, &h, d).is_err());
    }

    #[test]
    fn row_parsing_dispatches_power_regimes() {
        assert_eq!(Row::parse("power:3").unwrap(), Row::PowerGeneral(3.0));
        assert_eq!(Row::parse("power:0.5").unwrap(), Row::PowerFractional(0.5));
        assert_eq!(Row::parse("power:-1").unwrap(), Row::PowerNegative(-1.0));
        assert_eq!(Row::parse("power_tight:1.5").unwrap(), Row::PowerTight(1.5));
        assert!(Row::parse("power:1").is_err());
        assert!(Row::parse("power_tight:3").is_err());
        for row in Row::catalog() {
            assert_eq!(Row::parse(&row.id()).unwrap(), row);
        }
    }

    #[test]
    fn auto_parameters_resolve_and_stay_sound() {
        let pi = FiniteDistribution::new(vec![0.3, 0.7]).unwrap();
        let h = func(&[0.2, 1.1]);
        let nu = FiniteDistribution::new(vec![0.6, 0.4]).unwrap();
        for row in Row::catalog() {
            let bound = eval_bound_for_posterior(&BoundSpec::auto(row), &pi, &h, &nu).unwrap();
            let e_nu_h = nu.expect(&h);
            assert!(
                bound.value >= ExtReal::finite(e_nu_h - 1e-9),
                "{}: {} < {e_nu_h}",
                row.id(),
                bound.value
            );
        }
    }

    #[test]
    fn infinite_divergence_degrades_gracefully() {
        let pi = half();
        let h = func(&[0.0, 1.0]);
        let d = ExtReal::INF;
        let kl = eval_bound(&BoundSpec::auto(Row::Kl).with_lambda(1.0), &pi, &h, d).unwrap();
        assert!(kl.value.is_pos_inf());
        let rk = eval_bound(&BoundSpec::auto(Row::ReverseKl).with_c(0.5), &pi, &h, d).unwrap();
        assert_eq!(rk.value, ExtReal::finite(1.5));
        let vn = eval_bound(&BoundSpec::auto(Row::PowerNegative(-2.0)).with_c(1.0), &pi, &h, d)
            .unwrap();
        assert_eq!(vn.value, ExtReal::finite(2.0));
    }
}
