//! The Gaussian-approximation nonlinearity φ and its inverse.
//!
//! Under the Gaussian approximation a subchannel LLR is modelled as
//! `N(m, 2m)`, so a single mean `m` describes it. The check-node update of
//! density evolution then reduces to the scalar function
//!
//! ```text
//! φ(m) = 1 − E[tanh(u/2)],   u ~ N(m, 2m),   φ(0) = 1
//! ```
//!
//! Four variants are provided (see [`PhiKind`]):
//!
//! * `GaExact`: the integral above, by Gauss–Hermite quadrature.
//! * `GaClosedForm`: the classic three-piece closed-form approximation.
//! * `PgaExact`: the piecewise variant where `tanh` is replaced by a clamped
//!   double exponential ([`PgaConstants`]).
//! * `PgaClosedForm`: the three-piece closed form of the piecewise variant.
//!
//! Every variant is strictly decreasing on `(0, ∞)` (up to the small jumps
//! of the closed forms at their breakpoints), so [`phi_inverse`] can find
//! preimages with a bracketing bisection.

use std::f64::consts::PI;
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use gauss_quad::hermite::GaussHermite;
use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower breakpoint of both three-piece closed forms.
pub const CLOSED_FORM_BREAK_LOW: f64 = 0.867861;
/// Upper breakpoint of both three-piece closed forms.
pub const CLOSED_FORM_BREAK_HIGH: f64 = 10.0;

/// Above this mean the exact GA integral is continued by the asymptotic tail.
const GA_EXACT_TAIL_START: f64 = 100.0;

/// Which formula evaluates φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhiKind {
    /// Integral GA by quadrature.
    #[serde(rename = "ga-exact")]
    GaExact,
    /// Closed-form GA approximation.
    #[serde(rename = "ga-approx")]
    GaClosedForm,
    /// Integral piecewise GA by quadrature.
    #[serde(rename = "pga-exact")]
    PgaExact,
    /// Closed-form piecewise GA.
    #[serde(rename = "pga-approx")]
    PgaClosedForm,
}

impl PhiKind {
    pub const ALL: [PhiKind; 4] = [
        PhiKind::GaExact,
        PhiKind::GaClosedForm,
        PhiKind::PgaExact,
        PhiKind::PgaClosedForm,
    ];

    /// Command-line / file name of the kind.
    pub fn name(self) -> &'static str {
        match self {
            PhiKind::GaExact => "ga-exact",
            PhiKind::GaClosedForm => "ga-approx",
            PhiKind::PgaExact => "pga-exact",
            PhiKind::PgaClosedForm => "pga-approx",
        }
    }

    /// True for the variants evaluated by numerical integration.
    pub fn is_integral(self) -> bool {
        matches!(self, PhiKind::GaExact | PhiKind::PgaExact)
    }
}

impl fmt::Display for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhiKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PhiKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "unknown method '{s}' (expected ga-exact, ga-approx, pga-exact or pga-approx)"
                ))
            })
    }
}

/// Constants of the clamped double exponential that replaces `tanh` in the
/// piecewise integral:
///
/// ```text
/// f(v) = a·e^(b·v) + c·e^(d·v)   for |v| ≤ clamp
/// f(v) = ±1                      for ±v > clamp
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgaConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub clamp: f64,
}

impl Default for PgaConstants {
    /// The published (rounded) values. Note `a + c = 1e6`, so `f(0)` is far
    /// from the zero crossing of `tanh`.
    fn default() -> Self {
        PgaConstants {
            a: 1.9e7,
            b: 8.4e-9,
            c: -1.8e7,
            d: -8.5e-9,
            clamp: 3.1,
        }
    }
}

impl PgaConstants {
    pub fn new(a: f64, b: f64, c: f64, d: f64, clamp: f64) -> Result<Self> {
        if !(clamp > 0.0 && clamp.is_finite()) {
            return Err(Error::domain("PGA clamp", clamp));
        }
        for v in [a, b, c, d] {
            if !v.is_finite() {
                return Err(Error::domain("PGA constant", v));
            }
        }
        Ok(PgaConstants { a, b, c, d, clamp })
    }

    /// The inner function `f`.
    pub fn inner(&self, v: f64) -> f64 {
        if v > self.clamp {
            1.0
        } else if v < -self.clamp {
            -1.0
        } else {
            // (a + c) + a(e^{bv} - 1) + c(e^{dv} - 1): with |b|, |d| ~ 1e-8 the
            // naive sum cancels two ~1e7 terms.
            (self.a + self.c) + self.a * (self.b * v).exp_m1() + self.c * (self.d * v).exp_m1()
        }
    }
}

/// Quadrature scheme used by the integral variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureScheme {
    GaussHermite,
}

/// Quadrature rule with precomputed nodes.
///
/// `GaExact` integrates with Gauss–Hermite after the substitution
/// `u = m + 2√m·t`. `PgaExact` has a discontinuous integrand (the clamp of
/// `f`), so its two constant tails are integrated analytically and the
/// smooth middle section with a Gauss–Legendre rule of the same size.
#[derive(Clone)]
pub struct QuadratureSpec {
    inner: Arc<QuadratureRules>,
}

struct QuadratureRules {
    node_count: usize,
    hermite: Vec<(f64, f64)>,
    legendre: GaussLegendre,
    /// Quadrature value of the GA integral at the tail start.
    ga_tail_anchor: f64,
}

impl fmt::Debug for QuadratureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadratureSpec")
            .field("node_count", &self.inner.node_count)
            .field("scheme", &QuadratureScheme::GaussHermite)
            .finish()
    }
}

impl QuadratureSpec {
    /// Default number of nodes. 256 Gauss–Hermite nodes keep the GA integral
    /// within 1e-10 of an adaptive reference for m ≤ 100.
    pub const DEFAULT_NODES: usize = 256;
    /// Smallest node count accepted.
    pub const MIN_NODES: usize = 16;

    pub fn new(node_count: usize) -> Result<Self> {
        if node_count < Self::MIN_NODES {
            return Err(Error::InvalidSpec(format!(
                "quadrature needs at least {} nodes, got {node_count}",
                Self::MIN_NODES
            )));
        }
        let degree = NonZeroUsize::new(node_count).expect("checked above");
        let hermite: Vec<(f64, f64)> = GaussHermite::new(degree)
            .as_node_weight_pairs()
            .iter()
            .map(|&(t, w)| (t, w / PI.sqrt()))
            .collect();
        let legendre = GaussLegendre::new(degree);
        let mut rules = QuadratureRules {
            node_count,
            hermite,
            legendre,
            ga_tail_anchor: 0.0,
        };
        rules.ga_tail_anchor = rules.ga_integral(GA_EXACT_TAIL_START);
        Ok(QuadratureSpec {
            inner: Arc::new(rules),
        })
    }

    pub fn node_count(&self) -> usize {
        self.inner.node_count
    }

    pub fn scheme(&self) -> QuadratureScheme {
        QuadratureScheme::GaussHermite
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        static DEFAULT: OnceLock<QuadratureSpec> = OnceLock::new();
        DEFAULT
            .get_or_init(|| QuadratureSpec::new(Self::DEFAULT_NODES).expect("valid node count"))
            .clone()
    }
}

impl QuadratureRules {
    /// `E[1 − tanh(u/2)]` for `u ~ N(m, 2m)`, written as `E[2/(1+e^u)]` so the
    /// small result is not the difference of two numbers close to one.
    fn ga_integral(&self, m: f64) -> f64 {
        let scale = 2.0 * m.sqrt();
        self.hermite
            .iter()
            .map(|&(t, w)| w * 2.0 / (1.0 + (m + scale * t).exp()))
            .sum()
    }

    fn pga_integral(&self, m: f64, consts: &PgaConstants) -> f64 {
        let sigma = (2.0 * m).sqrt();
        let edge = 2.0 * consts.clamp;
        // u/2 beyond ±clamp: f is ±1 there.
        let upper = 0.5 * libm::erfc((edge - m) / (sigma * std::f64::consts::SQRT_2));
        let lower = 0.5 * libm::erfc((edge + m) / (sigma * std::f64::consts::SQRT_2));
        let lo = (-edge).max(m - 12.0 * sigma);
        let hi = edge.min(m + 12.0 * sigma);
        let middle = if lo < hi {
            let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
            self.legendre.integrate(lo, hi, |u| {
                let z = (u - m) / sigma;
                consts.inner(0.5 * u) * norm * (-0.5 * z * z).exp()
            })
        } else {
            0.0
        };
        1.0 - (upper - lower + middle)
    }
}

/// Parameters of the bracketing bisection used by [`phi_inverse`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionSpec {
    /// Number of bisection steps after bracketing.
    pub iteration_times: u32,
    /// Multiplicative shrink applied while bracketing below 1.
    pub coarse_down_factor: f64,
    /// Additive step applied while bracketing above 1.
    pub coarse_up_step: f64,
}

impl Default for BisectionSpec {
    fn default() -> Self {
        BisectionSpec {
            iteration_times: 20,
            coarse_down_factor: 0.1,
            coarse_up_step: 10.0,
        }
    }
}

impl BisectionSpec {
    /// Upper limit on bracketing steps before giving up.
    const MAX_BRACKET_STEPS: usize = 100_000;

    pub fn validate(&self) -> Result<()> {
        if self.iteration_times == 0 {
            return Err(Error::InvalidSpec(
                "bisection needs at least one iteration".into(),
            ));
        }
        if !(self.coarse_down_factor > 0.0 && self.coarse_down_factor < 1.0) {
            return Err(Error::domain("coarse_down_factor", self.coarse_down_factor));
        }
        if !(self.coarse_up_step > 0.0 && self.coarse_up_step.is_finite()) {
            return Err(Error::domain("coarse_up_step", self.coarse_up_step));
        }
        Ok(())
    }
}

fn check_mean(x: f64) -> Result<()> {
    if x >= 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::domain("mean LLR", x))
    }
}

/// The three-piece tail `√(π/m)·e^{−m/4}·(1 − 10/(7m))` of the GA closed form.
fn ga_tail(x: f64) -> f64 {
    (PI / x).sqrt() * (-x / 4.0).exp() * (1.0 - 10.0 / (7.0 * x))
}

/// Exact GA φ by quadrature.
///
/// For `x > 100` the integral is below 1e-11 and the quadrature loses
/// relative accuracy, so the value is continued by the asymptotic tail of the
/// closed form, scaled to agree with the quadrature at `x = 100`.
pub fn phi_exact(x: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_mean(x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    let rules = &quad.inner;
    if x > GA_EXACT_TAIL_START {
        let log_ratio = ga_tail(x).ln() - ga_tail(GA_EXACT_TAIL_START).ln();
        return Ok(rules.ga_tail_anchor * log_ratio.exp());
    }
    Ok(rules.ga_integral(x))
}

/// Piecewise GA φ in integral form.
pub fn phi_p_exact(x: f64, consts: &PgaConstants, quad: &QuadratureSpec) -> Result<f64> {
    check_mean(x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(quad.inner.pga_integral(x, consts))
}

/// Closed-form piecewise GA φ.
pub fn phi_p_closed(x: f64) -> Result<f64> {
    check_mean(x)?;
    Ok(if x < CLOSED_FORM_BREAK_LOW {
        (-0.0484 * x * x - 0.3258 * x).exp()
    } else if x < CLOSED_FORM_BREAK_HIGH {
        (-0.4777 * x.powf(0.8512) + 0.1094).exp()
    } else {
        (PI / x).sqrt() * (1.0 - 1.509 / x) * (-x / 3.936).exp()
    })
}

/// Closed-form GA φ (three-piece approximation).
pub fn phi_ga_closed(x: f64) -> Result<f64> {
    check_mean(x)?;
    Ok(if x < CLOSED_FORM_BREAK_LOW {
        (0.0564 * x * x - 0.48560 * x).exp()
    } else if x < CLOSED_FORM_BREAK_HIGH {
        (-0.4527 * x.powf(0.86) + 0.0218).exp()
    } else {
        ga_tail(x)
    })
}

/// A fully configured φ: kind plus whatever data that kind needs.
#[derive(Debug, Clone)]
pub struct Phi {
    kind: PhiKind,
    consts: PgaConstants,
    quad: QuadratureSpec,
}

impl Phi {
    pub fn new(kind: PhiKind) -> Self {
        Phi {
            kind,
            consts: PgaConstants::default(),
            quad: QuadratureSpec::default(),
        }
    }

    pub fn with_constants(mut self, consts: PgaConstants) -> Self {
        self.consts = consts;
        self
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    pub fn constants(&self) -> &PgaConstants {
        &self.consts
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.kind {
            PhiKind::GaExact => phi_exact(x, &self.quad),
            PhiKind::GaClosedForm => phi_ga_closed(x),
            PhiKind::PgaExact => phi_p_exact(x, &self.consts, &self.quad),
            PhiKind::PgaClosedForm => phi_p_closed(x),
        }
    }

    pub fn inverse(&self, y: f64, spec: &BisectionSpec) -> Result<f64> {
        phi_inverse(y, self, spec)
    }
}

/// Inverts φ by coarse bracketing followed by a fixed number of bisections.
///
/// Starting from `aux = 1`, a target at or above `φ(1)` is bracketed by
/// repeatedly shrinking `aux` by `coarse_down_factor`, and a target below it
/// by stepping `aux` up by `coarse_up_step`. The bracket is then halved
/// exactly `iteration_times` times and the last midpoint is returned.
/// `y = 0` maps to `0`.
pub fn phi_inverse(y: f64, phi: &Phi, spec: &BisectionSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::domain("phi value", y));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let mut aux = 1.0;
    let mut base = phi.eval(aux)?;
    let (mut lo, mut hi);
    if y >= base {
        let mut steps = 0;
        while y > base {
            aux *= spec.coarse_down_factor;
            base = phi.eval(aux)?;
            steps += 1;
            if steps > BisectionSpec::MAX_BRACKET_STEPS {
                return Err(Error::NoBracket(y));
            }
        }
        lo = aux;
        hi = aux / spec.coarse_down_factor;
    } else {
        let mut steps = 0;
        while y < base {
            aux += spec.coarse_up_step;
            base = phi.eval(aux)?;
            steps += 1;
            if steps > BisectionSpec::MAX_BRACKET_STEPS {
                return Err(Error::NoBracket(y));
            }
        }
        lo = aux - spec.coarse_up_step;
        hi = aux;
    }
    let mut x = lo;
    for _ in 0..spec.iteration_times {
        x = 0.5 * (lo + hi);
        if y >= phi.eval(x)? {
            hi = x;
        } else {
            lo = x;
        }
    }
    Ok(x)
}
