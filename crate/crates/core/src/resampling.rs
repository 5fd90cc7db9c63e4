//! Self-resampling procedures.
//!
//! A procedure maps a bid `b` and a seed to a pair `(x, y)`: `x` is the bid the
//! allocation rule sees, `y` the point at which the rebate is priced. With
//! probability `1 - mu` both equal `b`; otherwise `x <= y < b` and `y` is drawn
//! from the procedure's distribution function `F(·, b)`.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::seed::ResampleSource;
use libm::{pow, sqrt};

/// Hard cap on the recursive procedure's loop. Termination is geometric with
/// mean `1 / (1 - mu)` iterations; hitting the cap means a broken stream.
pub const MAX_RECURSION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResamplePair {
    /// Allocation bid.
    pub x: f64,
    /// Pricing bid.
    pub y: f64,
    /// Input bid.
    pub original: f64,
    pub modified: bool,
}

impl ResamplePair {
    fn unmodified(b: f64) -> Self {
        ResamplePair {
            x: b,
            y: b,
            original: b,
            modified: false,
        }
    }
}

pub fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidMu(mu))
    }
}

fn check_canonical_bid(b: f64) -> Result<()> {
    if b.is_finite() && b >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfSupport {
            bid: b,
            support: Interval::NON_NEGATIVE,
        })
    }
}

/// Recursive canonical procedure, run as a loop.
///
/// Each level consumes one coin and, when the coin fails, one uniform; the
/// first failed level fixes `y`, the last level fixes `x`.
pub fn canonical_resample<S: ResampleSource + ?Sized>(
    b: f64,
    mu: f64,
    src: &mut S,
) -> Result<ResamplePair> {
    check_mu(mu)?;
    check_canonical_bid(b)?;
    let keep = 1.0 - mu;
    if src.coin(keep) {
        return Ok(ResamplePair::unmodified(b));
    }
    let y = b * src.uniform();
    let mut x = y;
    let mut levels = 1;
    while !src.coin(keep) {
        levels += 1;
        if levels > MAX_RECURSION {
            return Err(Error::RecursionLimit(MAX_RECURSION));
        }
        x *= src.uniform();
    }
    Ok(ResamplePair {
        x,
        y,
        original: b,
        modified: y < b,
    })
}

/// Non-recursive canonical procedure: one coin and two uniforms.
pub fn canonical_resample_explicit<S: ResampleSource + ?Sized>(
    b: f64,
    mu: f64,
    src: &mut S,
) -> Result<ResamplePair> {
    check_mu(mu)?;
    check_canonical_bid(b)?;
    if src.coin(1.0 - mu) {
        return Ok(ResamplePair::unmodified(b));
    }
    let g1 = src.uniform();
    let g2 = src.uniform();
    let shrink = pow(g1, 1.0 / (1.0 - mu));
    let price = pow(g2, 1.0 / mu);
    let x = b * shrink;
    let y = b * if shrink > price { shrink } else { price };
    Ok(ResamplePair {
        x,
        y,
        original: b,
        modified: y < b,
    })
}

/// Which form of the canonical procedure to run. Both produce the same joint
/// law of `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CanonicalForm {
    #[default]
    Recursive,
    Explicit,
}

impl CanonicalForm {
    pub fn resample<S: ResampleSource + ?Sized>(
        self,
        b: f64,
        mu: f64,
        src: &mut S,
    ) -> Result<ResamplePair> {
        match self {
            CanonicalForm::Recursive => canonical_resample(b, mu, src),
            CanonicalForm::Explicit => canonical_resample_explicit(b, mu, src),
        }
    }
}

/// Canonical distribution function derivative: `F(a, b) = a / b`, so
/// `∂F/∂a = 1 / b` for `0 <= a < b`.
pub fn canonical_distribution_prime(a: f64, b: f64) -> Result<f64> {
    if a >= 0.0 && a < b && b.is_finite() {
        Ok(1.0 / b)
    } else {
        Err(Error::InvalidDerivativeArgs { a, b })
    }
}

/// Change of variables `h: (0, 1] × I → I` that carries the canonical procedure
/// on input 1 to a procedure supported on `I`.
///
/// Implementations must have `h(1, b) = b`, be strictly increasing in both
/// arguments and satisfy `inf_z h(z, b) = inf I`. `distribution` is the unique
/// `F` with `h(F(a, b), b) = a`.
pub trait SupportMap {
    fn interval(&self) -> Interval;
    fn h(&self, z: f64, b: f64) -> f64;
    fn distribution(&self, a: f64, b: f64) -> f64;
    /// `∂F(a, b)/∂a`, without argument checks.
    fn distribution_prime_unchecked(&self, a: f64, b: f64) -> f64;
}

/// `h(z, b) = b · z` on `(0, ∞)`; reproduces the canonical procedure.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScaleMap;

impl SupportMap for ScaleMap {
    fn interval(&self) -> Interval {
        Interval::POSITIVE
    }
    fn h(&self, z: f64, b: f64) -> f64 {
        b * z
    }
    fn distribution(&self, a: f64, b: f64) -> f64 {
        a / b
    }
    fn distribution_prime_unchecked(&self, _a: f64, b: f64) -> f64 {
        1.0 / b
    }
}

/// `h(z, b) = b / √z` on `(-∞, 0)`, for cost-type agents.
///
/// `F(a, b) = b² / a²` and `∂F/∂a = -2 b² / a³`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NegativeSqrtMap;

impl SupportMap for NegativeSqrtMap {
    fn interval(&self) -> Interval {
        Interval::NEGATIVE
    }
    fn h(&self, z: f64, b: f64) -> f64 {
        b / sqrt(z)
    }
    fn distribution(&self, a: f64, b: f64) -> f64 {
        (b * b) / (a * a)
    }
    fn distribution_prime_unchecked(&self, a: f64, b: f64) -> f64 {
        -2.0 * b * b / (a * a * a)
    }
}

/// Checked `∂F/∂a` for an `h`-canonical procedure.
pub fn h_distribution_prime<M: SupportMap + ?Sized>(map: &M, a: f64, b: f64) -> Result<f64> {
    let support = map.interval();
    if support.contains(a) && support.contains(b) && a < b {
        Ok(map.distribution_prime_unchecked(a, b))
    } else {
        Err(Error::InvalidDerivativeArgs { a, b })
    }
}

/// `h`-canonical procedure: run the canonical procedure on input 1 and push
/// both outputs through `h(·, b)`.
pub fn h_resample<M: SupportMap + ?Sized, S: ResampleSource + ?Sized>(
    map: &M,
    form: CanonicalForm,
    b: f64,
    mu: f64,
    src: &mut S,
) -> Result<ResamplePair> {
    let support = map.interval();
    if !support.contains(b) {
        return Err(Error::OutOfSupport { bid: b, support });
    }
    let unit = form.resample(1.0, mu, src)?;
    if !unit.modified {
        return Ok(ResamplePair::unmodified(b));
    }
    let x = map.h(unit.x, b);
    let y = map.h(unit.y, b);
    Ok(ResamplePair {
        x,
        y,
        original: b,
        modified: y < b,
    })
}

/// A self-resampling procedure as the mechanism consumes it.
pub trait SelfResampler {
    fn support(&self) -> Interval;
    fn resample<S: ResampleSource + ?Sized>(
        &self,
        b: f64,
        mu: f64,
        src: &mut S,
    ) -> Result<ResamplePair>;
    /// `∂F(a, b)/∂a` of the procedure's distribution function.
    fn distribution_prime(&self, a: f64, b: f64) -> Result<f64>;
}

/// The canonical procedure with support `[0, ∞)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Canonical {
    pub form: CanonicalForm,
}

impl Canonical {
    pub const fn new(form: CanonicalForm) -> Self {
        Canonical { form }
    }
}

impl SelfResampler for Canonical {
    fn support(&self) -> Interval {
        Interval::NON_NEGATIVE
    }
    fn resample<S: ResampleSource + ?Sized>(
        &self,
        b: f64,
        mu: f64,
        src: &mut S,
    ) -> Result<ResamplePair> {
        self.form.resample(b, mu, src)
    }
    fn distribution_prime(&self, a: f64, b: f64) -> Result<f64> {
        canonical_distribution_prime(a, b)
    }
}

/// The `h`-canonical procedure for a given support map.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HCanonical<M> {
    pub map: M,
    pub form: CanonicalForm,
}

impl<M: SupportMap> HCanonical<M> {
    pub const fn new(map: M, form: CanonicalForm) -> Self {
        HCanonical { map, form }
    }
}

impl<M: SupportMap> SelfResampler for HCanonical<M> {
    fn support(&self) -> Interval {
        self.map.interval()
    }
    fn resample<S: ResampleSource + ?Sized>(
        &self,
        b: f64,
        mu: f64,
        src: &mut S,
    ) -> Result<ResamplePair> {
        h_resample(&self.map, self.form, b, mu, src)
    }
    fn distribution_prime(&self, a: f64, b: f64) -> Result<f64> {
        h_distribution_prime(&self.map, a, b)
    }
}

/// Runtime choice between the procedures shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnyResampler {
    Canonical(Canonical),
    NegativeSqrt(HCanonical<NegativeSqrtMap>),
}

impl AnyResampler {
    pub const fn canonical() -> Self {
        AnyResampler::Canonical(Canonical::new(CanonicalForm::Recursive))
    }
    pub const fn negative_sqrt() -> Self {
        AnyResampler::NegativeSqrt(HCanonical::new(NegativeSqrtMap, CanonicalForm::Recursive))
    }
}

impl SelfResampler for AnyResampler {
    fn support(&self) -> Interval {
        match self {
            AnyResampler::Canonical(r) => r.support(),
            AnyResampler::NegativeSqrt(r) => r.support(),
        }
    }
    fn resample<S: ResampleSource + ?Sized>(
        &self,
        b: f64,
        mu: f64,
        src: &mut S,
    ) -> Result<ResamplePair> {
        match self {
            AnyResampler::Canonical(r) => r.resample(b, mu, src),
            AnyResampler::NegativeSqrt(r) => r.resample(b, mu, src),
        }
    }
    fn distribution_prime(&self, a: f64, b: f64) -> Result<f64> {
        match self {
            AnyResampler::Canonical(r) => r.distribution_prime(a, b),
            AnyResampler::NegativeSqrt(r) => r.distribution_prime(a, b),
        }
    }
}

/// A law on an interval given by its quantile function and density.
pub trait InvertibleLaw {
    fn quantile(&self, u: f64) -> f64;
    fn density(&self, y: f64) -> f64;
}

/// Uniform law on `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformLaw {
    pub lo: f64,
    pub hi: f64,
}

impl InvertibleLaw for UniformLaw {
    fn quantile(&self, u: f64) -> f64 {
        self.lo + u * (self.hi - self.lo)
    }
    fn density(&self, _y: f64) -> f64 {
        1.0 / (self.hi - self.lo)
    }
}

/// Law of the pricing bid of an `h`-canonical procedure given that it was
/// modified: `F(·, b)` on `I ∩ (-∞, b)`, with quantile `u ↦ h(u, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalLaw<M> {
    pub map: M,
    pub b: f64,
}

impl<M: SupportMap> InvertibleLaw for ConditionalLaw<M> {
    fn quantile(&self, u: f64) -> f64 {
        self.map.h(u, self.b)
    }
    fn density(&self, y: f64) -> f64 {
        self.map.distribution_prime_unchecked(y, self.b)
    }
}

/// User-supplied quantile and density.
pub struct FnLaw<Q, D> {
    pub quantile: Q,
    pub density: D,
}

impl<Q: Fn(f64) -> f64, D: Fn(f64) -> f64> InvertibleLaw for FnLaw<Q, D> {
    fn quantile(&self, u: f64) -> f64 {
        (self.quantile)(u)
    }
    fn density(&self, y: f64) -> f64 {
        (self.density)(y)
    }
}

/// One-sample estimate of `∫ g` over the law's support: draw `Y` by inverse
/// transform and return `g(Y) / F'(Y)`.
pub fn estimate_integral<G, L, S>(g: G, law: &L, src: &mut S) -> f64
where
    G: Fn(f64) -> f64,
    L: InvertibleLaw + ?Sized,
    S: ResampleSource + ?Sized,
{
    let y = law.quantile(src.uniform());
    g(y) / law.density(y)
}
