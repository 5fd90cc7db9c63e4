use alloc2mech_core::resampling::{
    canonical_resample, canonical_resample_explicit, estimate_integral, h_resample, CanonicalForm,
    NegativeSqrtMap, ScaleMap, SupportMap, UniformLaw,
};
use alloc2mech_core::seed::UniformStream;
use alloc2mech_core::{ResampleSeed, ResampleSource};
use proptest::prelude::*;

fn forms() -> [CanonicalForm; 2] {
    [CanonicalForm::Recursive, CanonicalForm::Explicit]
}

struct Moments {
    n: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn new() -> Self {
        Moments {
            n: 0.0,
            sum: 0.0,
            sum_sq: 0.0,
        }
    }
    fn push(&mut self, v: f64) {
        self.n += 1.0;
        self.sum += v;
        self.sum_sq += v * v;
    }
    fn mean(&self) -> f64 {
        self.sum / self.n
    }
    fn stderr(&self) -> f64 {
        let m = self.mean();
        ((self.sum_sq / self.n - m * m) * self.n / (self.n - 1.0) / self.n).sqrt()
    }
}

fn sup_distance_to(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let f = cdf(v);
            (f - k as f64 / n).abs().max((f - (k + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample sup distance between empirical CDFs; handles ties and atoms.
fn sup_distance_between(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() || j < b.len() {
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn grid_monotonicity_hundred_bids_thousand_seeds() {
    let bids: Vec<f64> = (0..100).map(|k| 0.05 * k as f64).collect();
    for form in forms() {
        for seed in 0..1000u64 {
            let s = ResampleSeed::new(seed);
            let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &b in &bids {
                let p = form.resample(b, 0.4, &mut s.streams()).unwrap();
                assert!(p.x >= prev.0 && p.y >= prev.1, "seed {seed} bid {b}");
                prev = (p.x, p.y);
            }
        }
    }
}

#[test]
fn negative_map_grid_monotonicity() {
    for seed in 0..1000u64 {
        let s = ResampleSeed::new(seed);
        let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for k in 0..100 {
            let b = -5.0 + 0.049 * k as f64;
            let p = h_resample(
                &NegativeSqrtMap,
                CanonicalForm::Recursive,
                b,
                0.3,
                &mut s.streams(),
            )
            .unwrap();
            assert!(p.x >= prev.0 && p.y >= prev.1, "seed {seed} bid {b}");
            prev = (p.x, p.y);
        }
    }
}

proptest! {
    #[test]
    fn pair_invariants_canonical(b in 0.0f64..100.0, mu in 0.01f64..0.99, seed: u64) {
        for form in forms() {
            let p = form.resample(b, mu, &mut ResampleSeed::new(seed).streams()).unwrap();
            prop_assert_eq!(p.original, b);
            if p.modified {
                prop_assert!(0.0 <= p.x && p.x <= p.y && p.y < b);
            } else {
                prop_assert_eq!((p.x, p.y), (b, b));
            }
            let again = form.resample(b, mu, &mut ResampleSeed::new(seed).streams()).unwrap();
            prop_assert_eq!(p, again);
        }
    }

    #[test]
    fn pair_invariants_negative(b in -100.0f64..-1e-6, mu in 0.01f64..0.49, seed: u64) {
        let p = h_resample(&NegativeSqrtMap, CanonicalForm::Explicit, b, mu,
            &mut ResampleSeed::new(seed).streams()).unwrap();
        if p.modified {
            prop_assert!(p.x <= p.y && p.y < b);
            prop_assert!(p.x < 0.0);
        } else {
            prop_assert_eq!((p.x, p.y), (b, b));
        }
    }

    #[test]
    fn seedwise_monotone(b1 in 0.0f64..10.0, db in 0.0f64..10.0, mu in 0.05f64..0.95, seed: u64) {
        for form in forms() {
            let s = ResampleSeed::new(seed);
            let lo = form.resample(b1, mu, &mut s.streams()).unwrap();
            let hi = form.resample(b1 + db, mu, &mut s.streams()).unwrap();
            prop_assert!(lo.x <= hi.x && lo.y <= hi.y);
        }
    }

    #[test]
    fn h_map_inverts_distribution(z in 1e-6f64..1.0, b in -50.0f64..-0.01) {
        let a = NegativeSqrtMap.h(z, b);
        let f = NegativeSqrtMap.distribution(a, b);
        prop_assert!((f - z).abs() <= 1e-12 * z.max(1.0), "{f} vs {z}");
        prop_assert_eq!(NegativeSqrtMap.h(1.0, b), b);
    }

    #[test]
    fn scale_map_inverts_distribution(z in 1e-6f64..1.0, b in 0.01f64..50.0) {
        let a = ScaleMap.h(z, b);
        prop_assert!((ScaleMap.distribution(a, b) - z).abs() <= 1e-12);
    }
}

#[test]
fn identity_frequency_is_one_minus_mu() {
    let trials = 1_000_000u64;
    for (mu, form) in [
        (0.3, CanonicalForm::Recursive),
        (0.7, CanonicalForm::Explicit),
    ] {
        let mut m = Moments::new();
        for seed in 0..trials {
            let p = form
                .resample(1.0, mu, &mut ResampleSeed::new(seed).streams())
                .unwrap();
            m.push(if p.modified { 0.0 } else { 1.0 });
        }
        assert!(
            (m.mean() - (1.0 - mu)).abs() <= 3.0 * m.stderr(),
            "{}",
            m.mean()
        );
    }
}

#[test]
fn expected_x_shrink_factor() {
    let mu = 0.3;
    let mut m = Moments::new();
    for seed in 0..400_000u64 {
        let p = canonical_resample(2.0, mu, &mut ResampleSeed::new(seed).streams()).unwrap();
        m.push(p.x);
    }
    let want = (1.0 - mu / (2.0 - mu)) * 2.0;
    assert!(
        (m.mean() - want).abs() <= 3.0 * m.stderr(),
        "{} vs {want}",
        m.mean()
    );
}

#[test]
fn conditional_y_is_uniform_below_bid() {
    let b = 3.0;
    for form in forms() {
        let mut ys: Vec<f64> = (0..1_000_000u64)
            .filter_map(|seed| {
                let p = form
                    .resample(b, 0.5, &mut ResampleSeed::new(seed).streams())
                    .unwrap();
                p.modified.then_some(p.y)
            })
            .collect();
        ys.sort_by(f64::total_cmp);
        let d = sup_distance_to(&ys, |a| (a / b).clamp(0.0, 1.0));
        assert!(d <= 0.01, "{form:?}: sup distance {d}");
    }
}

#[test]
fn conditional_x_given_y_is_self_similar() {
    // Given y = u, x / u has the law of x under input 1.
    let mu = 0.5;
    let reference: Vec<f64> = {
        let mut v: Vec<f64> = (0..200_000u64)
            .map(|s| {
                canonical_resample_explicit(1.0, mu, &mut ResampleSeed::new(1 << 40 | s).streams())
                    .unwrap()
                    .x
            })
            .collect();
        v.sort_by(f64::total_cmp);
        v
    };
    // geometric bins of y
    let edges = [0.05, 0.1, 0.2, 0.4, 0.8];
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); edges.len() - 1];
    for seed in 0..1_000_000u64 {
        let p = canonical_resample(1.0, mu, &mut ResampleSeed::new(seed).streams()).unwrap();
        if !p.modified {
            continue;
        }
        for k in 0..edges.len() - 1 {
            if p.y >= edges[k] && p.y < edges[k + 1] {
                bins[k].push(p.x / p.y);
            }
        }
    }
    for (k, mut ratios) in bins.into_iter().enumerate() {
        assert!(ratios.len() > 10_000, "bin {k} too small");
        ratios.sort_by(f64::total_cmp);
        let d = sup_distance_between(&ratios, &reference);
        assert!(d <= 0.02, "bin {k}: {d}");
    }
}

#[test]
fn estimator_cubic_integral() {
    let law = UniformLaw { lo: 0.0, hi: 1.0 };
    let mut src = UniformSource(UniformStream::new(17));
    let mut m = Moments::new();
    for _ in 0..100_000 {
        m.push(estimate_integral(|z| 3.0 * z * z, &law, &mut src));
    }
    assert!((m.mean() - 1.0).abs() <= 3.0 * m.stderr(), "{}", m.mean());
}

struct UniformSource(UniformStream);

impl ResampleSource for UniformSource {
    fn coin(&mut self, p: f64) -> bool {
        self.0.next_unit() <= p
    }
    fn uniform(&mut self) -> f64 {
        self.0.next_unit()
    }
}
