use std::f64::consts::PI;

use lame_mt::quad::gl_panels;
use lame_mt::weights::{
    counterexample_ladder, counterexample_report, maximal_lower_1d, RadialWeight,
};
use proptest::prelude::*;

fn families() -> Vec<RadialWeight> {
    vec![
        RadialWeight::indicator(1.0).unwrap(),
        RadialWeight::gaussian(1.0).unwrap(),
        RadialWeight::power_tail(0.5).unwrap(),
        RadialWeight::step_train(1.0 / 64.0, 1.0 / 512.0).unwrap(),
        RadialWeight::tabulated(vec![(0.0, 1.0), (0.5, 0.8), (1.5, 0.2), (2.0, 0.0)]).unwrap(),
        // non-monotone table: no closed form, sup found by search
        RadialWeight::tabulated(vec![(0.5, 0.0), (1.0, 2.0), (1.4, 0.5), (3.0, 0.0)]).unwrap(),
    ]
}

#[test]
fn scaling_law_all_families() {
    for w in families() {
        let base = w.mt_norm().unwrap().mt_norm;
        for omega in [0.25, 0.5, 2.0, 4.0, 8.0] {
            let scaled = w.scale(omega).mt_norm().unwrap().mt_norm;
            assert!(
                ((scaled - omega * base) / (omega * base)).abs() < 1e-8,
                "{w} omega={omega}: {scaled} vs {}",
                omega * base
            );
        }
    }
}

#[test]
fn xray_twice_profile_and_norm_is_sup() {
    for w in families() {
        let rep = w.mt_norm().unwrap();
        assert!(
            (rep.xray_norm - 2.0 * rep.mt_norm).abs() <= 1e-7 * rep.mt_norm,
            "{w}: xray {} mt {}",
            rep.xray_norm,
            rep.mt_norm
        );
        for i in 0..40 {
            let mu = 3.0 * i as f64 / 40.0;
            let x = w.xray_line(mu).unwrap();
            assert!(x / 2.0 <= rep.mt_norm * (1.0 + 1e-9), "{w} mu={mu}");
            let (num, err) = w.mt_profile_numeric(mu).unwrap();
            assert!((x - 2.0 * num).abs() <= 1e-9 * x.max(1e-3) + 2.0 * err, "{w} mu={mu}");
        }
    }
}

#[test]
fn indicator_profile_closed_form() {
    let w = RadialWeight::indicator(1.0).unwrap();
    for i in 0..=10 {
        let mu = i as f64 / 10.0;
        let want = (1.0 - mu * mu).max(0.0).sqrt();
        assert!((w.mt_profile(mu).unwrap() - want).abs() < 1e-15);
    }
}

#[test]
fn panel_halving_converges() {
    // fixed-panel Gauss–Legendre on smooth pieces: one halving moves the result < 1e−8
    let g = RadialWeight::gaussian(1.0).unwrap();
    let p = RadialWeight::power_tail(0.5).unwrap();
    for (w, end) in [(&g, 6.4), (&p, 50.0)] {
        for mu in [0.0, 0.7, 2.0] {
            let f = |s: f64| w.eval((mu * mu + s * s).sqrt());
            let a = gl_panels(f, 0.0, end, 16, 20);
            let b = gl_panels(f, 0.0, end, 32, 20);
            assert!(((a - b) / b).abs() < 1e-8, "{w} mu={mu}");
        }
    }
}

#[test]
fn maximal_examples() {
    let w = RadialWeight::indicator(1.0).unwrap();
    assert!((maximal_lower_1d(&w, 2.0).unwrap() - 0.25).abs() < 1e-12);
    assert!((maximal_lower_1d(&w, 0.5).unwrap() - 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn maximal_dominates_every_window(rho in 0.05f64..4.0, frac in 0.001f64..0.999, which in 0usize..4) {
        let w = &families()[which];
        let s = frac * rho;
        let avg = (w.antiderivative(rho + s) - w.antiderivative(rho - s)) / (2.0 * s);
        let m = maximal_lower_1d(w, rho).unwrap();
        prop_assert!(m >= avg - 1e-9, "m={} avg={}", m, avg);
        prop_assert!(m <= w.sup_value() + 1e-12);
    }

    #[test]
    fn scaling_random_omega(omega in 0.1f64..10.0, sigma in 0.2f64..3.0) {
        let w = RadialWeight::gaussian(sigma).unwrap();
        let a = w.scale(omega).mt_norm().unwrap().mt_norm;
        let b = omega * w.mt_norm().unwrap().mt_norm;
        prop_assert!(((a - b) / b).abs() < 1e-12);
    }
}

#[test]
fn counterexample_examples() {
    let eta: f64 = 1.0 / 64.0;
    let r = counterexample_report(eta, eta.powf(1.5)).unwrap();
    assert!((r.log_eta_over_delta - 0.5 * 64f64.ln()).abs() < 1e-12);
    let r2 = counterexample_report(eta, eta.powf(1.5) / 2.0).unwrap();
    assert!(r2.ratio - r.ratio >= 0.3, "increment {}", r2.ratio - r.ratio);
}

#[test]
fn counterexample_norm_scales_like_delta_over_eta() {
    // δ = η^{3/2}/4 needs η ≤ 1/256 to respect δ ≥ 4η²
    let eta: f64 = 1.0 / 256.0;
    let consts: Vec<f64> = [1.0, 0.5, 0.25]
        .iter()
        .map(|f| {
            let d = f * eta.powf(1.5);
            counterexample_report(eta, d).unwrap().norm_f * eta / d
        })
        .collect();
    let (lo, hi) = consts
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
    assert!(hi / lo < 2.0, "{consts:?}");
}

#[test]
fn ladder_growth() {
    let lad = counterexample_ladder(1.0 / 64.0, 4).unwrap();
    for r in &lad.reports {
        eprintln!(
            "delta={:.4e} L={:.4} norm={:.6e} lower={:.6e} ratio={:.6} argmax={:.5}",
            r.delta, r.log_eta_over_delta, r.norm_f, r.lower_mf, r.ratio, r.lower_argmax_mu
        );
    }
    eprintln!("slope={} C in [{}, {}]", lad.slope, lad.norm_const_min, lad.norm_const_max);
    assert!(lad.strictly_increasing);
    assert!(lad.slope >= 0.2 && lad.slope <= 3.0, "slope {}", lad.slope);
    assert!(lad.norm_const_max / lad.norm_const_min < 2.0);
    let _ = PI;
}
