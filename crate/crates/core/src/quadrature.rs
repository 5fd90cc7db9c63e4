//! Adaptive Simpson quadrature for allocation curves.
//!
//! Allocation curves are step functions or have kinks, so the integrator
//! starts from a fixed panel split and refines each panel independently until
//! the Richardson error estimate falls under its share of the tolerance or the
//! panel shrinks below the minimum width.

use crate::error::{Error, Result};
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute error target for the whole integral.
    pub tolerance: f64,
    /// Panels narrower than this are accepted as is.
    pub min_width: f64,
    /// Farthest distance below the bid the lower-tail scan may reach before
    /// the integral is declared divergent.
    pub max_extent: f64,
    /// Initial number of panels.
    pub panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tolerance: 1e-8,
            min_width: 1e-12,
            max_extent: 1e12,
            panels: 16,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// `∫_a^b f` over a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = cfg.panels.max(1);
    let width = (b - a) / panels as f64;
    let panel_tol = cfg.tolerance / panels as f64;
    let mut stack: Vec<Segment> = Vec::with_capacity(64);
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + width * k as f64;
        let hi = if k + 1 == panels { b } else { lo + width };
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        stack.push(Segment {
            a: lo,
            b: hi,
            fa,
            fm,
            fb,
            whole: simpson(lo, hi, fa, fm, fb),
            tol: panel_tol,
        });
        while let Some(seg) = stack.pop() {
            let m = 0.5 * (seg.a + seg.b);
            let lm = 0.5 * (seg.a + m);
            let rm = 0.5 * (m + seg.b);
            let flm = f(lm);
            let frm = f(rm);
            let left = simpson(seg.a, m, seg.fa, flm, seg.fm);
            let right = simpson(m, seg.b, seg.fm, frm, seg.fb);
            let delta = left + right - seg.whole;
            if delta.abs() <= 15.0 * seg.tol || seg.b - seg.a <= cfg.min_width {
                total += left + right + delta / 15.0;
            } else {
                stack.push(Segment {
                    a: seg.a,
                    b: m,
                    fa: seg.fa,
                    fm: flm,
                    fb: seg.fm,
                    whole: left,
                    tol: seg.tol * 0.5,
                });
                stack.push(Segment {
                    a: m,
                    b: seg.b,
                    fa: seg.fm,
                    fm: frm,
                    fb: seg.fb,
                    whole: right,
                    tol: seg.tol * 0.5,
                });
            }
        }
    }
    total
}

/// `∫_lo^b f` where `lo` may be `-∞`.
///
/// An infinite lower end is truncated by scanning outward: the window below `b`
/// doubles until two consecutive doublings change the integral by less than the
/// tolerance. Exceeding `max_extent` reports divergence.
pub fn integrate_below<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if lo.is_finite() {
        return Ok(integrate(&f, lo, b, cfg));
    }
    let mut width = if b.abs() > 1.0 { b.abs() } else { 1.0 };
    let mut prev = integrate(&f, b - width, b, cfg);
    let mut quiet = 0;
    while width <= cfg.max_extent {
        // Only the newly added slab needs integrating.
        let slab = integrate(&f, b - 2.0 * width, b - width, cfg);
        let next = prev + slab;
        if (next - prev).abs() < cfg.tolerance {
            quiet += 1;
            if quiet == 2 {
                return Ok(next);
            }
        } else {
            quiet = 0;
        }
        prev = next;
        width *= 2.0;
    }
    Err(Error::Divergent(b - width))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|z| 3.0 * z * z, 0.0, 1.0, &cfg);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_function() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|u| if u > 1.0 { 1.0 } else { 0.0 }, 0.0, 3.0, &cfg);
        assert!((v - 2.0).abs() < 1e-8, "{v}");
        // step that falls between all initial sample points
        let v = integrate(|u| if u > 0.123_456 { 1.0 } else { 0.0 }, 0.0, 1.0, &cfg);
        assert!((v - (1.0 - 0.123_456)).abs() < 1e-8, "{v}");
    }

    #[test]
    fn infinite_lower_end() {
        let cfg = QuadratureConfig::default();
        let v = integrate_below(libm::exp, f64::NEG_INFINITY, 0.0, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-7, "{v}");
        let v = integrate_below(
            |u| if u > -2.0 { 1.0 } else { 0.0 },
            f64::NEG_INFINITY,
            -1.0,
            &cfg,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn divergence_is_reported() {
        let cfg = QuadratureConfig {
            max_extent: 1e6,
            ..QuadratureConfig::default()
        };
        assert!(matches!(
            integrate_below(|_| 1.0, f64::NEG_INFINITY, 0.0, &cfg),
            Err(Error::Divergent(_))
        ));
    }
}
