//! Convex divergence generators and their Legendre data.
//!
//! A generator is a convex `f` on the nonnegative reals with `f(1) = 0`
//! (and `f = +inf` on the negatives). Each catalog entry carries, in closed
//! form, everything the bound machinery consumes:
//!
//! | piece          | meaning                                            |
//! |----------------|----------------------------------------------------|
//! | `eval_f`       | the generator itself                               |
//! | `eval_fstar`   | convex conjugate `f*(t) = sup_{x>=0} { xt - f(x) }`|
//! | `eval_fstar_prime` | derivative of `f*` (a subderivative selection) |
//! | `eval_fprime`  | derivative of `f` on the positive axis             |
//! | `fprime_at_zero` / `fprime_at_inf` | domain thresholds `f'(0)`, `f'(inf)` |
//! | `in_fc`        | twice differentiable with `1/f''` concave          |
//!
//! Conventions: `f*` is constant at `-f(0)` for `t <= f'(0)` and `+inf` for
//! `t > f'(inf)`; at `t = f'(inf)` it takes its true (possibly finite)
//! supremum value. Consequently `f*(max(t, f'(0))) = f*(t)` everywhere.
//!
//! Generators are immutable values; all evaluation is pure, so they can be
//! shared and sent across threads freely.
//!
//! The catalog (`power:p` spans four parameter regimes with distinct
//! conjugate branches):
//!
//! | name                 | f(t)              | divergence                |
//! |----------------------|-------------------|---------------------------|
//! | `kl`                 | t ln t            | Kullback-Leibler          |
//! | `power:p` (p>1)      | t^p - 1           | power / Cressie-Read      |
//! | `power:p` (0<p<1)    | 1 - t^p           | power                     |
//! | `power:p` (p<0)      | t^p - 1           | power                     |
//! | `pearson_chi2`       | t^2 - 1           | Pearson chi-squared       |
//! | `total_variation`    | |t-1| / 2         | total variation           |
//! | `squared_hellinger`  | 1 - sqrt(t)       | squared Hellinger         |
//! | `reverse_kl`         | -ln t             | KL with swapped arguments |
//! | `reverse_pearson`    | 1/t - 1           | chi-squared, swapped      |
//! | `lin:theta`          | see `Generator::lin` | Lin's measure          |
//! | `jensen_shannon`     | `lin:0.5`         | Jensen-Shannon            |
//! | `vincze_lecam`       | (2-2t)/(t+1)      | Vincze-Le Cam / triangular|
//! | `delta`              | t - 1             | identically zero (kernel) |

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::optim::golden_max;

/// Shared alias for user-supplied generator bodies.
pub type GeneratorFn = Arc<dyn Fn(f64) -> ExtReal + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Kl,
    Power(f64),
    PearsonChi2,
    TotalVariation,
    SquaredHellinger,
    ReverseKl,
    ReversePearson,
    Lin(f64),
    JensenShannon,
    VinczeLeCam,
    Delta,
    Custom {
        name: String,
        f: GeneratorFn,
        in_fc: bool,
        strictly_convex: bool,
    },
    Reversed(Box<Generator>),
    /// Base generator with `f` totalised on the negative axis by its
    /// second-order Taylor polynomial at zero. The conjugate is unchanged:
    /// densities are nonnegative, so every Young-Fenchel step only ever
    /// evaluates `f` on the nonnegative axis.
    Extended {
        base: Box<Generator>,
        f_zero: f64,
        slope_zero: f64,
        curvature_zero: f64,
    },
    /// `scale * f + shift * (t - 1)` with `scale > 0`: the affine family the
    /// divergence operator is optimised over.
    Affine {
        base: Box<Generator>,
        scale: f64,
        shift: f64,
    },
}

/// A convex generator together with its conjugate and derivative data.
#[derive(Clone)]
pub struct Generator {
    kind: Kind,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Generator({})", self.name())
    }
}

/// Conjugate exponent `q` with `1/p + 1/q = 1`.
fn conj_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

impl Generator {
    pub fn kl() -> Self {
        Self { kind: Kind::Kl }
    }

    /// Power generator `t^p - 1` (or `1 - t^p` for `0 < p < 1`).
    pub fn power(p: f64) -> Result<Self> {
        if !p.is_finite() || p == 0.0 || p == 1.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "power exponent must be finite and outside {{0, 1}}, got {p}"
            )));
        }
        Ok(Self { kind: Kind::Power(p) })
    }

    pub fn pearson_chi2() -> Self {
        Self { kind: Kind::PearsonChi2 }
    }

    pub fn total_variation() -> Self {
        Self { kind: Kind::TotalVariation }
    }

    pub fn squared_hellinger() -> Self {
        Self { kind: Kind::SquaredHellinger }
    }

    pub fn reverse_kl() -> Self {
        Self { kind: Kind::ReverseKl }
    }

    pub fn reverse_pearson() -> Self {
        Self { kind: Kind::ReversePearson }
    }

    /// Lin's measure generator
    /// `f(t) = theta t ln t - (theta t + 1 - theta) ln(theta t + 1 - theta)`.
    ///
    /// The resulting divergence is
    /// `theta KL(nu, m) + (1 - theta) KL(pi, m)` with `m = theta nu + (1-theta) pi`;
    /// `theta = 1/2` is Jensen-Shannon.
    pub fn lin(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "lin parameter must lie in (0, 1), got {theta}"
            )));
        }
        Ok(Self { kind: Kind::Lin(theta) })
    }

    pub fn jensen_shannon() -> Self {
        Self { kind: Kind::JensenShannon }
    }

    pub fn vincze_lecam() -> Self {
        Self { kind: Kind::VinczeLeCam }
    }

    /// The kernel generator `t - 1`: its divergence vanishes identically.
    pub fn delta() -> Self {
        Self { kind: Kind::Delta }
    }

    /// User-supplied generator. `f` must be convex with `f(1) = 0` and `+inf`
    /// on the negatives; the conjugate is evaluated numerically. The `in_fc`
    /// and `strictly_convex` declarations are trusted, not verified.
    pub fn custom(
        name: impl Into<String>,
        f: GeneratorFn,
        in_fc: bool,
        strictly_convex: bool,
    ) -> Self {
        Self {
            kind: Kind::Custom { name: name.into(), f, in_fc, strictly_convex },
        }
    }

    /// Builds a catalog generator from its identifier and parameter list.
    pub fn make(name: &str, params: &[f64]) -> Result<Self> {
        let need = |n: usize| -> Result<f64> {
            params.get(n).copied().ok_or_else(|| {
                Error::ParameterOutOfRange(format!("`{name}` needs {} parameter(s)", n + 1))
            })
        };
        match name {
            "kl" => Ok(Self::kl()),
            "power" => Self::power(need(0)?),
            "pearson_chi2" | "pearson" => Ok(Self::pearson_chi2()),
            "total_variation" | "tv" => Ok(Self::total_variation()),
            "squared_hellinger" | "hellinger" => Ok(Self::squared_hellinger()),
            "reverse_kl" => Ok(Self::reverse_kl()),
            "reverse_pearson" => Ok(Self::reverse_pearson()),
            "lin" => Self::lin(need(0)?),
            "jensen_shannon" | "js" => Ok(Self::jensen_shannon()),
            "vincze_lecam" => Ok(Self::vincze_lecam()),
            "delta" => Ok(Self::delta()),
            other => Err(Error::UnknownGenerator(other.into())),
        }
    }

    /// Parses CLI/config spec strings such as `kl`, `power:1.5`, `lin:0.3`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        match spec.split_once(':') {
            None => Self::make(spec, &[]),
            Some((name, param)) => {
                let p: f64 = param.parse().map_err(|_| {
                    Error::ParameterOutOfRange(format!("`{param}` is not a number in `{spec}`"))
                })?;
                Self::make(name, &[p])
            }
        }
    }

    /// Identifier round-trippable through [`Generator::parse`] for catalog
    /// entries; descriptive for derived generators.
    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Kl => "kl".into(),
            Kind::Power(p) => format!("power:{p}"),
            Kind::PearsonChi2 => "pearson_chi2".into(),
            Kind::TotalVariation => "total_variation".into(),
            Kind::SquaredHellinger => "squared_hellinger".into(),
            Kind::ReverseKl => "reverse_kl".into(),
            Kind::ReversePearson => "reverse_pearson".into(),
            Kind::Lin(theta) => format!("lin:{theta}"),
            Kind::JensenShannon => "jensen_shannon".into(),
            Kind::VinczeLeCam => "vincze_lecam".into(),
            Kind::Delta => "delta".into(),
            Kind::Custom { name, .. } => name.clone(),
            Kind::Reversed(base) => format!("reverse({})", base.name()),
            Kind::Extended { base, .. } => format!("extended({})", base.name()),
            Kind::Affine { base, scale, shift } => {
                format!("affine({}, scale={scale}, shift={shift})", base.name())
            }
        }
    }

    /// `f(x)`, `+inf` for negative `x` (except for extended generators).
    pub fn eval_f(&self, x: f64) -> ExtReal {
        if x < 0.0 {
            if let Kind::Extended { f_zero, slope_zero, curvature_zero, .. } = &self.kind {
                return ExtReal::finite(f_zero + x * slope_zero + 0.5 * x * x * curvature_zero);
            }
            return ExtReal::INF;
        }
        match &self.kind {
            Kind::Kl => ExtReal::from(if x == 0.0 { 0.0 } else { x * x.ln() }),
            Kind::Power(p) => {
                if *p < 0.0 {
                    if x == 0.0 {
                        ExtReal::INF
                    } else {
                        ExtReal::from(x.powf(*p) - 1.0)
                    }
                } else if *p < 1.0 {
                    ExtReal::from(1.0 - x.powf(*p))
                } else {
                    ExtReal::from(x.powf(*p) - 1.0)
                }
            }
            Kind::PearsonChi2 => ExtReal::from(x * x - 1.0),
            Kind::TotalVariation => ExtReal::from(0.5 * (x - 1.0).abs()),
            Kind::SquaredHellinger => ExtReal::from(1.0 - x.sqrt()),
            Kind::ReverseKl => {
                if x == 0.0 {
                    ExtReal::INF
                } else {
                    ExtReal::from(-x.ln())
                }
            }
            Kind::ReversePearson => {
                if x == 0.0 {
                    ExtReal::INF
                } else {
                    ExtReal::from(1.0 / x - 1.0)
                }
            }
            Kind::Lin(theta) => ExtReal::from(lin_f(*theta, x)),
            Kind::JensenShannon => ExtReal::from(lin_f(0.5, x)),
            Kind::VinczeLeCam => ExtReal::from((2.0 - 2.0 * x) / (x + 1.0)),
            Kind::Delta => ExtReal::from(x - 1.0),
            Kind::Custom { f, .. } => f(x),
            Kind::Reversed(base) => {
                if x == 0.0 {
                    base.fprime_at_inf()
                } else {
                    base.eval_f(1.0 / x).weighted(x)
                }
            }
            Kind::Extended { base, .. } => base.eval_f(x),
            Kind::Affine { base, scale, shift } => {
                base.eval_f(x).weighted(*scale) + shift * (x - 1.0)
            }
        }
    }

    /// The conjugate `f*(t)` in closed form (numeric for custom/reversed
    /// generators).
    pub fn eval_fstar(&self, t: f64) -> ExtReal {
        match &self.kind {
            Kind::Kl => ExtReal::from((t - 1.0).exp()),
            Kind::Power(p) => power_fstar(*p, t),
            Kind::PearsonChi2 => {
                let tp = t.max(0.0);
                ExtReal::from(0.25 * tp * tp + 1.0)
            }
            Kind::TotalVariation => {
                if t > 0.5 {
                    ExtReal::INF
                } else {
                    ExtReal::finite(t.max(-0.5))
                }
            }
            Kind::SquaredHellinger => {
                if t < 0.0 {
                    ExtReal::finite(-1.0 + 0.25 / (-t))
                } else {
                    ExtReal::INF
                }
            }
            Kind::ReverseKl => {
                if t < 0.0 {
                    ExtReal::finite(-(1.0 + (-t).ln()))
                } else {
                    ExtReal::INF
                }
            }
            Kind::ReversePearson => {
                if t <= 0.0 {
                    ExtReal::finite(1.0 - 2.0 * (-t).sqrt())
                } else {
                    ExtReal::INF
                }
            }
            Kind::Lin(theta) => lin_fstar(*theta, t),
            Kind::JensenShannon => lin_fstar(0.5, t),
            Kind::VinczeLeCam => {
                if t > 0.0 {
                    ExtReal::INF
                } else if t <= -4.0 {
                    ExtReal::finite(-2.0)
                } else {
                    ExtReal::finite(-4.0 * (-t).sqrt() - t + 2.0)
                }
            }
            Kind::Delta => {
                if t > 1.0 {
                    ExtReal::INF
                } else {
                    ExtReal::finite(1.0)
                }
            }
            Kind::Custom { .. } | Kind::Reversed(_) => conjugate_numeric(self, t, 1e-11),
            Kind::Extended { base, .. } => base.eval_fstar(t),
            Kind::Affine { base, scale, shift } => {
                base.eval_fstar((t - shift) / scale).weighted(*scale) + *shift
            }
        }
    }

    /// Derivative of the conjugate, `(f*)'(t)`; nonnegative, nondecreasing,
    /// `+inf` past `f'(inf)`. Inverts `f'` where both are single-valued.
    pub fn eval_fstar_prime(&self, t: f64) -> ExtReal {
        match &self.kind {
            Kind::Kl => ExtReal::from((t - 1.0).exp()),
            Kind::Power(p) => power_fstar_prime(*p, t),
            Kind::PearsonChi2 => ExtReal::from(0.5 * t.max(0.0)),
            Kind::TotalVariation => {
                if t > 0.5 {
                    ExtReal::INF
                } else if t < -0.5 {
                    ExtReal::ZERO
                } else {
                    ExtReal::finite(1.0)
                }
            }
            Kind::SquaredHellinger => {
                if t < 0.0 {
                    ExtReal::finite(0.25 / (t * t))
                } else {
                    ExtReal::INF
                }
            }
            Kind::ReverseKl => {
                if t < 0.0 {
                    ExtReal::finite(-1.0 / t)
                } else {
                    ExtReal::INF
                }
            }
            Kind::ReversePearson => {
                if t < 0.0 {
                    ExtReal::finite(1.0 / (-t).sqrt())
                } else {
                    ExtReal::INF
                }
            }
            Kind::Lin(theta) => lin_fstar_prime(*theta, t),
            Kind::JensenShannon => lin_fstar_prime(0.5, t),
            Kind::VinczeLeCam => {
                if t >= 0.0 {
                    ExtReal::INF
                } else if t < -4.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::finite(2.0 / (-t).sqrt() - 1.0)
                }
            }
            Kind::Delta => {
                if t > 1.0 {
                    ExtReal::INF
                } else {
                    ExtReal::ZERO
                }
            }
            Kind::Custom { .. } | Kind::Reversed(_) => self.fprime_inverse(t),
            Kind::Extended { base, .. } => base.eval_fstar_prime(t),
            Kind::Affine { base, scale, shift } => base.eval_fstar_prime((t - shift) / scale),
        }
    }

    /// `f'(x)` for `x > 0` (a subderivative selection at kinks; total
    /// variation takes `f'(1) = 0`, the midpoint of its subdifferential).
    pub fn eval_fprime(&self, x: f64) -> f64 {
        debug_assert!(x > 0.0, "eval_fprime needs x > 0, got {x}");
        match &self.kind {
            Kind::Kl => x.ln() + 1.0,
            Kind::Power(p) => {
                if *p > 0.0 && *p < 1.0 {
                    -p * x.powf(p - 1.0)
                } else {
                    p * x.powf(p - 1.0)
                }
            }
            Kind::PearsonChi2 => 2.0 * x,
            Kind::TotalVariation => {
                if x < 1.0 {
                    -0.5
                } else if x > 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            Kind::SquaredHellinger => -0.5 / x.sqrt(),
            Kind::ReverseKl => -1.0 / x,
            Kind::ReversePearson => -1.0 / (x * x),
            Kind::Lin(theta) => lin_fprime(*theta, x),
            Kind::JensenShannon => lin_fprime(0.5, x),
            Kind::VinczeLeCam => -4.0 / ((x + 1.0) * (x + 1.0)),
            Kind::Delta => 1.0,
            Kind::Custom { f, .. } => {
                let h = 1e-6 * x.max(1.0);
                let hi = f(x + h).expect_finite("custom f near x");
                let lo = f((x - h).max(x * 0.5)).expect_finite("custom f near x");
                (hi - lo) / (x + h - (x - h).max(x * 0.5))
            }
            Kind::Reversed(base) => {
                let s = 1.0 / x;
                base.eval_f(s).expect_finite("reversed base f") - s * base.eval_fprime(s)
            }
            Kind::Extended { base, .. } => base.eval_fprime(x),
            Kind::Affine { base, scale, shift } => scale * base.eval_fprime(x) + shift,
        }
    }

    /// `f'(0) = inf over x > 0 of f'(x)`.
    pub fn fprime_at_zero(&self) -> ExtReal {
        match &self.kind {
            Kind::Kl => ExtReal::NEG_INF,
            Kind::Power(p) => {
                if *p > 1.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::NEG_INF
                }
            }
            Kind::PearsonChi2 => ExtReal::ZERO,
            Kind::TotalVariation => ExtReal::finite(-0.5),
            Kind::SquaredHellinger
            | Kind::ReverseKl
            | Kind::ReversePearson
            | Kind::Lin(_)
            | Kind::JensenShannon => ExtReal::NEG_INF,
            Kind::VinczeLeCam => ExtReal::finite(-4.0),
            Kind::Delta => ExtReal::finite(1.0),
            Kind::Custom { f, .. } => {
                // Mean slopes over [x, 2x]; still steepening near zero reads as -inf.
                let slope = |x: f64| (f(2.0 * x).raw() - f(x).raw()) / x;
                let near = slope(1e-9);
                let mid = slope(1e-6);
                if near < mid - 1e-3 * (1.0 + mid.abs()) {
                    ExtReal::NEG_INF
                } else {
                    ExtReal::from(near)
                }
            }
            Kind::Reversed(base) => {
                // f'(0) of the reversal is -g*(g'(inf)).
                match base.fprime_at_inf().finite_value() {
                    None => ExtReal::NEG_INF,
                    Some(v) => -base.eval_fstar(v),
                }
            }
            Kind::Extended { base, .. } => base.fprime_at_zero(),
            Kind::Affine { base, scale, shift } => {
                base.fprime_at_zero().weighted(*scale) + *shift
            }
        }
    }

    /// `f'(inf) = sup over x > 0 of f'(x)`.
    pub fn fprime_at_inf(&self) -> ExtReal {
        match &self.kind {
            Kind::Kl => ExtReal::INF,
            Kind::Power(p) => {
                if *p > 1.0 {
                    ExtReal::INF
                } else {
                    ExtReal::ZERO
                }
            }
            Kind::PearsonChi2 => ExtReal::INF,
            Kind::TotalVariation => ExtReal::finite(0.5),
            Kind::SquaredHellinger | Kind::ReverseKl | Kind::ReversePearson => ExtReal::ZERO,
            Kind::Lin(theta) => ExtReal::finite(-theta * theta.ln()),
            Kind::JensenShannon => ExtReal::finite(0.5 * std::f64::consts::LN_2),
            Kind::VinczeLeCam => ExtReal::ZERO,
            Kind::Delta => ExtReal::finite(1.0),
            Kind::Custom { f, .. } => {
                let slope = |x: f64| (f(2.0 * x).raw() - f(x).raw()) / x;
                let far = slope(1e12);
                let mid = slope(1e9);
                if far > mid + 1e-3 * (1.0 + mid.abs()) {
                    ExtReal::INF
                } else {
                    ExtReal::from(far)
                }
            }
            // f'(inf) of the reversal is g(0).
            Kind::Reversed(base) => base.eval_f(0.0),
            Kind::Extended { base, .. } => base.fprime_at_inf(),
            Kind::Affine { base, scale, shift } => base.fprime_at_inf().weighted(*scale) + *shift,
        }
    }

    /// Membership in the class admitting the tighter transform bound:
    /// twice differentiable on the positive axis with `1/f''` concave.
    /// True exactly for `kl`, `power:p` with `1 < p <= 2`, `pearson_chi2`,
    /// and positive affine images of those.
    pub fn in_fc(&self) -> bool {
        match &self.kind {
            Kind::Kl | Kind::PearsonChi2 => true,
            Kind::Power(p) => *p > 1.0 && *p <= 2.0,
            Kind::Custom { in_fc, .. } => *in_fc,
            Kind::Extended { base, .. } => base.in_fc(),
            Kind::Affine { base, .. } => base.in_fc(),
            _ => false,
        }
    }

    /// Strict convexity on the positive axis (guarantees the transform
    /// maximiser exists). False for `total_variation` and `delta`.
    pub fn strictly_convex(&self) -> bool {
        match &self.kind {
            Kind::TotalVariation | Kind::Delta => false,
            Kind::Custom { strictly_convex, .. } => *strictly_convex,
            Kind::Reversed(base) | Kind::Extended { base, .. } | Kind::Affine { base, .. } => {
                base.strictly_convex()
            }
            _ => true,
        }
    }

    /// `f(0)` as an extended real.
    pub fn f_at_zero(&self) -> ExtReal {
        self.eval_f(0.0)
    }

    /// The generator of the swapped-argument divergence, `t g(1/t)`.
    ///
    /// Reversing twice returns the original generator. Where the reversal is
    /// itself a catalog entry (exactly, not merely up to a kernel shift) the
    /// catalog entry is returned, so `kl` and `reverse_kl` swap and
    /// `total_variation` / `jensen_shannon` are fixed points.
    pub fn reversed(&self) -> Generator {
        match &self.kind {
            Kind::Kl => Generator::reverse_kl(),
            Kind::ReverseKl => Generator::kl(),
            Kind::TotalVariation => Generator::total_variation(),
            Kind::JensenShannon => Generator::jensen_shannon(),
            Kind::Reversed(base) => (**base).clone(),
            _ => Generator { kind: Kind::Reversed(Box::new(self.clone())) },
        }
    }

    /// Totalises `f` on the negative axis by the quadratic
    /// `f(0) + t f'(0) + t^2 f''(0)/2`, keeping the conjugate data intact.
    ///
    /// Needs `f'(0)` finite and `f''(0)` in `(0, inf)`; in the catalog that
    /// means `vincze_lecam`, `pearson_chi2` and `power:2`.
    pub fn extended(&self) -> Result<Generator> {
        let slope = self
            .fprime_at_zero()
            .finite_value()
            .ok_or_else(|| Error::UnsupportedExtension(self.name()))?;
        let curvature = self
            .curvature_at_zero()
            .filter(|c| *c > 0.0 && c.is_finite())
            .ok_or_else(|| Error::UnsupportedExtension(self.name()))?;
        let f_zero = self
            .f_at_zero()
            .finite_value()
            .ok_or_else(|| Error::UnsupportedExtension(self.name()))?;
        Ok(Generator {
            kind: Kind::Extended {
                base: Box::new(self.clone()),
                f_zero,
                slope_zero: slope,
                curvature_zero: curvature,
            },
        })
    }

    /// Right limit of `f''` at zero, when it exists in `(0, inf)`.
    fn curvature_at_zero(&self) -> Option<f64> {
        match &self.kind {
            Kind::PearsonChi2 => Some(2.0),
            Kind::Power(p) if *p == 2.0 => Some(2.0),
            Kind::VinczeLeCam => Some(8.0),
            Kind::Affine { base, scale, .. } => base.curvature_at_zero().map(|c| c * scale),
            Kind::Extended { base, .. } => base.curvature_at_zero(),
            _ => None,
        }
    }

    /// `f + c (t - 1)`: same divergence, shifted conjugate.
    pub fn kernel_shifted(&self, c: f64) -> Generator {
        self.affine(1.0, c)
    }

    /// `a f` for `a > 0`: scales the divergence linearly.
    pub fn scaled(&self, a: f64) -> Generator {
        self.affine(a, 0.0)
    }

    /// `a f + c (t - 1)` with `a > 0`.
    pub fn affine(&self, a: f64, c: f64) -> Generator {
        assert!(a > 0.0 && a.is_finite(), "affine scale must be positive, got {a}");
        assert!(c.is_finite(), "affine shift must be finite, got {c}");
        if let Kind::Affine { base, scale, shift } = &self.kind {
            return Generator {
                kind: Kind::Affine {
                    base: base.clone(),
                    scale: a * scale,
                    shift: a * shift + c,
                },
            };
        }
        Generator {
            kind: Kind::Affine { base: Box::new(self.clone()), scale: a, shift: c },
        }
    }

    /// Inverts the monotone `f'` numerically; used as the conjugate
    /// derivative for generators without a closed form.
    fn fprime_inverse(&self, t: f64) -> ExtReal {
        let t_ext = ExtReal::from(t);
        if t_ext <= self.fprime_at_zero() {
            return ExtReal::ZERO;
        }
        if t_ext >= self.fprime_at_inf() {
            return ExtReal::INF;
        }
        let mut lo = 1.0;
        while self.eval_fprime(lo) > t && lo > 1e-100 {
            lo *= 0.25;
        }
        let mut hi = 1.0;
        while self.eval_fprime(hi) < t && hi < 1e100 {
            hi *= 4.0;
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if self.eval_fprime(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        ExtReal::finite((lo * hi).sqrt())
    }
}

fn lin_f(theta: f64, x: f64) -> f64 {
    let xlnx = if x == 0.0 { 0.0 } else { x * x.ln() };
    let m = theta * x + 1.0 - theta;
    theta * xlnx - m * m.ln()
}

fn lin_fprime(theta: f64, x: f64) -> f64 {
    theta * (x / (theta * x + 1.0 - theta)).ln()
}

fn lin_fstar(theta: f64, t: f64) -> ExtReal {
    let scaled = theta * (t / theta).exp();
    if scaled >= 1.0 {
        ExtReal::INF
    } else {
        ExtReal::finite((1.0 - theta) * ((1.0 - theta) / (1.0 - scaled)).ln())
    }
}

fn lin_fstar_prime(theta: f64, t: f64) -> ExtReal {
    let e = (t / theta).exp();
    if theta * e >= 1.0 {
        ExtReal::INF
    } else {
        ExtReal::finite((1.0 - theta) * e / (1.0 - theta * e))
    }
}

fn power_fstar(p: f64, t: f64) -> ExtReal {
    let q = conj_exponent(p);
    if p > 1.0 {
        let tp = t.max(0.0);
        ExtReal::from(p.powf(1.0 - q) / q * tp.powf(q) + 1.0)
    } else if p > 0.0 {
        // 0 < p < 1, q < 0: finite only left of zero.
        if t < 0.0 {
            ExtReal::finite(-1.0 + p.powf(1.0 - q) / (-q) * (-t).powf(q))
        } else {
            ExtReal::INF
        }
    } else {
        // p < 0, 0 < q < 1: finite up to and including zero.
        if t <= 0.0 {
            ExtReal::finite(1.0 - (-p).powf(1.0 - q) / q * (-t).powf(q))
        } else {
            ExtReal::INF
        }
    }
}

fn power_fstar_prime(p: f64, t: f64) -> ExtReal {
    let q = conj_exponent(p);
    if p > 1.0 {
        ExtReal::from((t.max(0.0) / p).powf(q - 1.0))
    } else if p > 0.0 {
        if t < 0.0 {
            ExtReal::from((-t / p).powf(q - 1.0))
        } else {
            ExtReal::INF
        }
    } else if t < 0.0 {
        ExtReal::from((-t / -p).powf(q - 1.0))
    } else {
        ExtReal::INF
    }
}

/// Evaluates `f*(t) = sup_{x >= 0} { xt - f(x) }` by bracketing the concave
/// objective and refining with golden-section search.
///
/// The bracket doubles outward from the unit interval until the objective
/// decreases; a vanishing increment at huge arguments is read as a finite
/// asymptote, a persistent one as `+inf` (the supremum is unbounded exactly
/// when `t` exceeds `f'(inf)`).
pub fn conjugate_numeric(g: &Generator, t: f64, tol: f64) -> ExtReal {
    assert!(tol > 0.0, "tolerance must be positive");
    let phi = |x: f64| x * t - g.eval_f(x).raw();

    let phi0 = phi(0.0);
    let mut prev_x = 1.0;
    let mut prev_phi = phi(1.0);
    if prev_phi <= phi0 {
        // Concavity: already descending at 1, so the supremum sits in [0, 1].
        let (_, best) = golden_max(phi, 0.0, 1.0, 160);
        return ExtReal::from(best.max(phi0));
    }

    let mut lo = 0.0;
    loop {
        let x = prev_x * 2.0;
        let value = phi(x);
        if value <= prev_phi {
            let (_, best) = golden_max(phi, lo, x, 200);
            return ExtReal::from(best.max(prev_phi).max(phi0));
        }
        if value > 1e13 {
            return ExtReal::INF;
        }
        if x >= 1e18 {
            // Still climbing at the cap: either an asymptote (geometrically
            // shrinking steps) or genuine unboundedness.
            return if value - prev_phi <= 0.25 * tol {
                ExtReal::from(value)
            } else {
                ExtReal::INF
            };
        }
        if value - prev_phi <= 0.25 * tol && x > 1e8 {
            return ExtReal::from(value);
        }
        lo = prev_x;
        prev_x = x;
        prev_phi = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn catalog() -> Vec<Generator> {
        vec![
            Generator::kl(),
            Generator::power(1.5).unwrap(),
            Generator::power(3.0).unwrap(),
            Generator::pearson_chi2(),
            Generator::power(0.5).unwrap(),
            Generator::power(-1.0).unwrap(),
            Generator::total_variation(),
            Generator::squared_hellinger(),
            Generator::reverse_pearson(),
            Generator::reverse_kl(),
            Generator::lin(0.3).unwrap(),
            Generator::jensen_shannon(),
            Generator::vincze_lecam(),
        ]
    }

    #[test]
    fn every_generator_vanishes_at_one() {
        for g in catalog().iter().chain([Generator::delta()].iter()) {
            let v = g.eval_f(1.0).expect_finite("f(1)");
            assert!(v.abs() < 1e-14, "{}: f(1) = {v}", g.name());
        }
    }

    #[test]
    fn kl_conjugate_is_shifted_exponential() {
        let g = Generator::kl();
        assert!((g.eval_fstar(1.0).raw() - 1.0).abs() < 1e-15);
        assert!((g.eval_fstar(0.0).raw() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn power_two_conjugate_has_quarter_coefficient() {
        let g = Generator::power(2.0).unwrap();
        assert!((g.eval_fstar(2.0).raw() - 2.0).abs() < 1e-15);
        let oracle = conjugate_numeric(&g, 2.0, 1e-10).raw();
        assert!((oracle - 2.0).abs() < 1e-8);
    }

    #[test]
    fn total_variation_thresholds() {
        let g = Generator::total_variation();
        assert_eq!(g.fprime_at_inf(), ExtReal::finite(0.5));
        assert_eq!(g.fprime_at_zero(), ExtReal::finite(-0.5));
        assert_eq!(g.eval_fstar(0.5), ExtReal::finite(0.5));
        assert!(g.eval_fstar(0.5 + 1e-12).is_pos_inf());
        assert_eq!(g.eval_fstar(-3.0), ExtReal::finite(-0.5));
    }

    #[test]
    fn conjugate_saturates_below_fprime_zero() {
        // f*(t) = -f(0) for all t <= f'(0).
        for g in catalog() {
            if let Some(lo) = g.fprime_at_zero().finite_value() {
                let expected = -g.f_at_zero().expect_finite("f(0)");
                for t in [lo, lo - 1.0, lo - 7.5] {
                    let got = g.eval_fstar(t).expect_finite("fstar");
                    assert!((got - expected).abs() < 1e-12, "{} at {t}", g.name());
                }
            }
        }
    }

    #[test]
    fn conjugate_threshold_clamp_identity() {
        // f*(max(t, f'(0))) = f*(t).
        for g in catalog() {
            if let Some(lo) = g.fprime_at_zero().finite_value() {
                for t in [-9.0, lo - 0.5, lo, lo + 0.25] {
                    assert_eq!(g.eval_fstar(t.max(lo)), g.eval_fstar(t), "{}", g.name());
                }
            }
        }
    }

    #[test]
    fn conjugate_dominates_identity() {
        // t - f*(t) <= 0 is forced by f(1) = 0.
        for g in catalog() {
            for k in 0..200 {
                let t = -10.0 + 0.1 * k as f64;
                let fs = g.eval_fstar(t);
                assert!(
                    ExtReal::from(t) <= fs,
                    "{}: t = {t} exceeds f*(t) = {fs}",
                    g.name()
                );
            }
        }
    }

    #[test]
    fn fstar_prime_inverts_fprime() {
        for g in catalog() {
            if !g.strictly_convex() {
                continue;
            }
            for k in -6..=6 {
                let x = 10f64.powi(k) * 0.5;
                let t = g.eval_fprime(x);
                if let Some(back) = g.eval_fstar_prime(t).finite_value() {
                    assert!(
                        (back - x).abs() <= 1e-8 * x.max(1.0),
                        "{}: x = {x}, got {back}",
                        g.name()
                    );
                }
            }
        }
    }

    #[test]
    fn fstar_prime_monotone_and_nonnegative() {
        for g in catalog() {
            let mut prev = ExtReal::ZERO;
            for k in 0..400 {
                let t = -12.0 + 0.05 * k as f64;
                let d = g.eval_fstar_prime(t);
                assert!(d >= ExtReal::ZERO, "{} at {t}", g.name());
                assert!(d >= prev, "{}: derivative decreased at {t}", g.name());
                prev = d;
            }
        }
    }

    #[test]
    fn young_fenchel_on_a_grid() {
        for g in catalog() {
            for i in 0..24 {
                let a = 0.05 + 0.4 * i as f64;
                for j in 0..30 {
                    let b = -6.0 + 0.45 * j as f64;
                    let (fa, fb) = (g.eval_f(a), g.eval_fstar(b));
                    if let (Some(fa), Some(fb)) = (fa.finite_value(), fb.finite_value()) {
                        let lhs = a * b;
                        let rhs = fa + fb;
                        assert!(
                            lhs <= rhs + 1e-12 * (1.0 + rhs.abs()),
                            "{}: {a} * {b} > f + f*",
                            g.name()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fenchel_equality_along_the_derivative() {
        // x f'(x) - f(x) = f*(f'(x)) at differentiability points.
        for g in catalog() {
            if !g.strictly_convex() {
                continue;
            }
            for k in -4..=4 {
                let x = 10f64.powi(k) * 0.7;
                let t = g.eval_fprime(x);
                let lhs = x * t - g.eval_f(x).expect_finite("f");
                let rhs = g.eval_fstar(t).expect_finite("f*");
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()),
                    "{} at x = {x}: {lhs} vs {rhs}",
                    g.name()
                );
            }
        }
    }

    #[test]
    fn numeric_conjugate_matches_closed_forms_spot_checks() {
        let kl = Generator::kl();
        assert!((conjugate_numeric(&kl, 1.0, 1e-9).raw() - 1.0).abs() < 1e-7);
        let pearson = Generator::pearson_chi2();
        assert_eq!(conjugate_numeric(&pearson, 0.0, 1e-9), ExtReal::finite(1.0));
        assert!((conjugate_numeric(&pearson, 2.0, 1e-9).raw() - 2.0).abs() < 1e-8);
        let tv = Generator::total_variation();
        assert!((conjugate_numeric(&tv, 0.5, 1e-9).raw() - 0.5).abs() < 1e-9);
        assert!(conjugate_numeric(&tv, 0.6, 1e-9).is_pos_inf());
        let hell = Generator::squared_hellinger();
        assert!(conjugate_numeric(&hell, 0.0, 1e-9).is_pos_inf());
    }

    #[test]
    fn reverse_kl_is_the_reversal_of_kl() {
        let r = Generator::kl().reversed();
        assert_eq!(r.name(), "reverse_kl");
        assert!(r.eval_f(1.0).raw().abs() < 1e-15);
        assert!((r.eval_f(2.0).raw() + LN_2).abs() < 1e-15);
    }

    #[test]
    fn reversal_of_pearson_is_kernel_shift_of_reverse_pearson() {
        let rev = Generator::pearson_chi2().reversed();
        assert!((rev.eval_f(2.0).raw() - (-1.5)).abs() < 1e-12);
        let catalog_rev = Generator::reverse_pearson();
        assert!((catalog_rev.eval_f(2.0).raw() - (-0.5)).abs() < 1e-12);
        // Difference is affine with value 0 at t = 1, i.e. a kernel element.
        for t in [0.25, 0.5, 1.0, 2.0, 5.0] {
            let diff = rev.eval_f(t).raw() - catalog_rev.eval_f(t).raw();
            let c = -1.0;
            assert!((diff - c * (t - 1.0)).abs() < 1e-12, "at {t}");
        }
    }

    #[test]
    fn double_reversal_is_pointwise_identity() {
        for g in catalog() {
            let rr = g.reversed().reversed();
            for t in [0.2, 0.5, 1.0, 1.7, 3.0, 10.0] {
                let a = g.eval_f(t).raw();
                let b = rr.eval_f(t).raw();
                assert!(
                    (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
                    "{} at {t}: {a} vs {b}",
                    g.name()
                );
            }
        }
    }

    #[test]
    fn reversed_thresholds_follow_the_base() {
        // f'(inf) of the reversal equals f(0) of the base; total variation is
        // its own reversal with matching thresholds.
        let rev_hell = Generator::squared_hellinger().reversed();
        assert_eq!(rev_hell.fprime_at_inf(), ExtReal::finite(1.0));
        let rev_tv = Generator::total_variation().reversed();
        assert_eq!(rev_tv.fprime_at_inf(), ExtReal::finite(0.5));
        assert_eq!(rev_tv.fprime_at_zero(), ExtReal::finite(-0.5));
    }

    #[test]
    fn extended_vincze_lecam_keeps_the_conjugate() {
        let e = Generator::vincze_lecam().extended().unwrap();
        assert_eq!(e.eval_fstar(-5.0), ExtReal::finite(-2.0));
        assert!((e.eval_fstar(-1.0).raw() - (-1.0)).abs() < 1e-15);
        // f~* <= f* pointwise against the numeric oracle on the base.
        let base = Generator::vincze_lecam();
        for t in [-6.0, -4.0, -2.5, -1.0, -0.25] {
            let tilde = e.eval_fstar(t);
            let oracle = conjugate_numeric(&base, t, 1e-9) + 1e-7;
            assert!(tilde <= oracle, "at {t}: {tilde} vs {oracle}");
        }
    }

    #[test]
    fn extended_generator_is_quadratic_on_negatives() {
        let e = Generator::vincze_lecam().extended().unwrap();
        // f(0) = 2, f'(0) = -4, f''(0) = 8.
        let expected = |x: f64| 2.0 - 4.0 * x + 4.0 * x * x;
        for x in [-0.1, -1.0, -3.0] {
            assert!((e.eval_f(x).raw() - expected(x)).abs() < 1e-12);
        }
        assert!((e.eval_f(2.0).raw() - Generator::vincze_lecam().eval_f(2.0).raw()).abs() < 1e-15);
    }

    #[test]
    fn extension_rejects_unsuitable_generators() {
        assert!(Generator::kl().extended().is_err());
        assert!(Generator::total_variation().extended().is_err());
        assert!(Generator::power(3.0).unwrap().extended().is_err());
        assert!(Generator::pearson_chi2().extended().is_ok());
    }

    #[test]
    fn affine_transform_conjugate_identity() {
        // (a f + c f_delta)*(t) = a f*((t - c)/a) + c.
        let base = Generator::kl();
        let g = base.affine(0.5, 1.25);
        for t in [-2.0, 0.0, 1.0, 3.0] {
            let direct = g.eval_fstar(t).raw();
            let expected = 0.5 * base.eval_fstar((t - 1.25) / 0.5).raw() + 1.25;
            assert!((direct - expected).abs() < 1e-12);
        }
        let num = conjugate_numeric(&g, 0.7, 1e-10).raw();
        assert!((num - g.eval_fstar(0.7).raw()).abs() < 1e-7);
    }

    #[test]
    fn parse_round_trips_catalog_identifiers() {
        for spec in [
            "kl",
            "power:1.5",
            "power:-1",
            "pearson_chi2",
            "total_variation",
            "squared_hellinger",
            "reverse_kl",
            "reverse_pearson",
            "lin:0.3",
            "jensen_shannon",
            "vincze_lecam",
            "delta",
        ] {
            let g = Generator::parse(spec).unwrap();
            assert_eq!(Generator::parse(&g.name()).unwrap().name(), g.name());
        }
    }

    #[test]
    fn parse_rejects_bad_parameters() {
        assert!(Generator::parse("power:0").is_err());
        assert!(Generator::parse("power:1").is_err());
        assert!(Generator::parse("lin:0").is_err());
        assert!(Generator::parse("lin:1").is_err());
        assert!(Generator::parse("lin:1.5").is_err());
        assert!(Generator::parse("no_such_generator").is_err());
        assert!(Generator::parse("power:abc").is_err());
    }

    #[test]
    fn in_fc_flags_match_the_catalog() {
        assert!(Generator::kl().in_fc());
        assert!(Generator::power(1.5).unwrap().in_fc());
        assert!(Generator::power(2.0).unwrap().in_fc());
        assert!(Generator::pearson_chi2().in_fc());
        assert!(Generator::pearson_chi2().scaled(3.0).in_fc());
        assert!(!Generator::power(2.5).unwrap().in_fc());
        assert!(!Generator::power(0.5).unwrap().in_fc());
        assert!(!Generator::total_variation().in_fc());
        assert!(!Generator::squared_hellinger().in_fc());
        assert!(!Generator::jensen_shannon().in_fc());
    }

    #[test]
    fn lin_fstar_matches_jensen_shannon_at_half() {
        let lin = Generator::lin(0.5).unwrap();
        let js = Generator::jensen_shannon();
        for t in [-3.0, -1.0, -0.2, 0.1, 0.3] {
            assert_eq!(lin.eval_fstar(t), js.eval_fstar(t));
        }
        // Closed form at theta = 1/2 is -log(2 - e^{2t}) / 2.
        let t: f64 = -0.4;
        let expected = -0.5 * (2.0 - (2.0 * t).exp()).ln();
        assert!((js.eval_fstar(t).raw() - expected).abs() < 1e-14);
        assert!(js.eval_fstar(0.5 * LN_2).is_pos_inf());
    }

    #[test]
    fn custom_generator_runs_through_numeric_conjugate() {
        // Pearson in disguise.
        let f: GeneratorFn = Arc::new(|x| ExtReal::finite(x * x - 1.0));
        let g = Generator::custom("quadratic", f, true, true);
        assert!((g.eval_fstar(2.0).raw() - 2.0).abs() < 1e-7);
        assert!((g.eval_fstar_prime(2.0).raw() - 1.0).abs() < 1e-6);
        assert!(g.fprime_at_zero().raw().abs() < 1e-6);
        assert!(g.fprime_at_inf().is_pos_inf());
    }
}
