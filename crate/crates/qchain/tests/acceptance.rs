//! Acceptance suite: one test per acceptance criterion, at the stated
//! tolerances and instance counts. Each test prints a `[criterion N]`
//! PASS line (visible with `--nocapture`); the test name itself carries
//! the criterion number for the default harness output.

use std::time::Instant;

use qchain::channel_div::{channel_divergence, regularized_sequence, ChannelDivOpts};
use qchain::divergence::{
    classical_renyi, geometric, measured, renyi_entropy, sandwiched, DivKind, Distribution,
    MeasuredOpts, RenyiOrder,
};
use qchain::numkernel::{loewner_geq, psd_power, ComplexMatrix};
use qchain::quantum::random::{
    random_channel_rng, random_mixed_unitary_channel, random_state_gapped, random_state_rng,
    random_unitary_rng, substream_rng,
};
use qchain::quantum::{
    pinch, spectrum, state_tensor_power, DensityOperator, PositiveMapRep, DEFAULT_CLUSTER_TOL,
};
use qchain::reverse_test::{build_reverse_test, verify_reverse_test};
use qchain::verify::{
    check_meta_chain, check_pinching_bound, check_sandwiched_chain, check_unital_entropy,
};

use num_complex::Complex64;
use rand::Rng;

const ACCEPT_SEED: u64 = 0x5eed_ac0e;

fn plus_state() -> DensityOperator {
    DensityOperator::pure_state(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap()
}

#[test]
fn criterion_01_matsumoto_achievement() {
    let orders = [
        RenyiOrder::Finite(0.5),
        RenyiOrder::Finite(0.9),
        RenyiOrder::One,
        RenyiOrder::Finite(1.5),
        RenyiOrder::Finite(2.0),
    ];
    let started = Instant::now();
    let mut worst_gap = 0.0f64;
    let mut worst_residual = 0.0f64;
    for dim in [2usize, 3, 4] {
        for trial in 0..200u64 {
            let mut rng = substream_rng(ACCEPT_SEED, &[1, dim as u64, trial]);
            let rho = random_state_gapped(dim, &mut rng, 1e4, 1e-3);
            let sigma = random_state_gapped(dim, &mut rng, 1e4, 1e-3);
            let rt = build_reverse_test(&rho, &sigma, DEFAULT_CLUSTER_TOL).unwrap();
            let report = verify_reverse_test(&rt, &rho, &sigma, &orders).unwrap();
            worst_residual = worst_residual
                .max(report.gamma_p_residual)
                .max(report.gamma_q_residual);
            for gap in &report.order_gaps {
                worst_gap = worst_gap.max(gap.gap);
                assert!(
                    gap.gap <= 1e-7,
                    "dim {dim} trial {trial} order {}: gap {}",
                    gap.order,
                    gap.gap
                );
            }
            assert!(
                report.gamma_p_residual <= 1e-8 && report.gamma_q_residual <= 1e-8,
                "dim {dim} trial {trial}: residuals {} {}",
                report.gamma_p_residual,
                report.gamma_q_residual
            );
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed <= 60.0, "runtime {elapsed:.1}s exceeds 60s");
    println!(
        "[criterion 1] PASS matsumoto achievement: worst gap {worst_gap:.2e}, worst residual {worst_residual:.2e}, runtime {elapsed:.1}s"
    );
}

#[test]
fn criterion_02_pinching_inequality() {
    let mut worst = f64::INFINITY;
    for dim in [2usize, 3, 4] {
        for trial in 0..200u64 {
            let mut rng = substream_rng(ACCEPT_SEED, &[2, dim as u64, trial]);
            let rho = random_state_rng(dim, dim, &mut rng);
            let sigma = random_state_gapped(dim, &mut rng, 1e4, 1e-3);
            let spec = spectrum(&sigma, DEFAULT_CLUSTER_TOL);
            let pinched = pinch(&sigma, &rho).unwrap();
            let scaled = pinched.matrix().scale_re(spec.count as f64);
            let (ok, lmin) = loewner_geq(&scaled, rho.matrix(), 1e-9).unwrap();
            worst = worst.min(lmin);
            assert!(ok, "dim {dim} trial {trial}: λ_min {lmin}");
        }
    }
    println!("[criterion 2] PASS pinching inequality: worst λ_min {worst:.2e}");
}

#[test]
fn criterion_03_pinched_quasi_value_bound() {
    let orders = [
        RenyiOrder::Finite(0.6),
        RenyiOrder::Finite(2.0),
        RenyiOrder::Infinity,
    ];
    let mut worst = f64::INFINITY;
    for transpose in [false, true] {
        for &order in &orders {
            for trial in 0..200u64 {
                let dim = if trial % 2 == 0 { 2 } else { 3 };
                let mut rng =
                    substream_rng(ACCEPT_SEED, &[3, transpose as u64, trial, trial % 2]);
                let e0 = random_channel_rng(dim, dim, dim * dim, &mut rng).unwrap();
                let f0 = random_channel_rng(dim, dim, dim * dim, &mut rng).unwrap();
                let (e, f) = if transpose {
                    (e0.with_pre_transpose(), f0.with_pre_transpose())
                } else {
                    (e0, f0)
                };
                let rho = random_state_rng(dim, dim, &mut rng);
                let sigma = random_state_gapped(dim, &mut rng, 1e4, 1e-3);
                let r = check_pinching_bound(&e, &f, &rho, &sigma, order).unwrap();
                worst = worst.min(r.slack);
                assert!(
                    r.slack >= -1e-8,
                    "transpose {transpose} {order:?} trial {trial}: slack {}",
                    r.slack
                );
            }
        }
    }
    println!("[criterion 3] PASS pinched quasi-value bound: worst slack {worst:.2e}");
}

#[test]
fn criterion_04_meta_chain_rule() {
    let cells: Vec<(DivKind, RenyiOrder)> = vec![
        (DivKind::Sandwiched, RenyiOrder::Finite(1.5)),
        (DivKind::Sandwiched, RenyiOrder::Finite(2.0)),
        (DivKind::Sandwiched, RenyiOrder::Finite(4.0)),
        (DivKind::Sandwiched, RenyiOrder::Infinity),
        (DivKind::Geometric, RenyiOrder::Finite(0.5)),
        (DivKind::Geometric, RenyiOrder::One),
        (DivKind::Geometric, RenyiOrder::Finite(1.5)),
        (DivKind::Geometric, RenyiOrder::Finite(2.0)),
    ];
    let mut worst_proof = f64::INFINITY;
    let mut worst_statement = f64::INFINITY;
    for dim in [2usize, 3] {
        for (ci, &(kind, order)) in cells.iter().enumerate() {
            for trial in 0..200u64 {
                let mut rng = substream_rng(ACCEPT_SEED, &[4, dim as u64, ci as u64, trial]);
                let e = random_channel_rng(dim, dim, dim * dim, &mut rng).unwrap();
                let f = random_channel_rng(dim, dim, dim * dim, &mut rng).unwrap();
                let rho = random_state_rng(dim, dim, &mut rng);
                let sigma = random_state_gapped(dim, &mut rng, 1e4, 1e-3);
                let opts = ChannelDivOpts::quick(1, 0, rng.gen());
                let out = check_meta_chain(&e, &f, &rho, &sigma, order, kind, &opts).unwrap();
                worst_proof = worst_proof.min(out.proof.slack);
                worst_statement = worst_statement.min(out.statement.slack);
                assert!(
                    out.proof.slack >= -1e-7,
                    "proof {kind:?} {order:?} dim {dim} trial {trial}: slack {}",
                    out.proof.slack
                );
                assert!(
                    out.statement.slack >= -1e-7,
                    "statement {kind:?} {order:?} dim {dim} trial {trial}: slack {}",
                    out.statement.slack
                );
            }
        }
    }
    println!(
        "[criterion 4] PASS meta chain rule: worst proof slack {worst_proof:.2e}, worst statement slack {worst_statement:.2e}"
    );
}

#[test]
fn criterion_05_sandwiched_chain_rule() {
    let orders = [
        RenyiOrder::Finite(1.5),
        RenyiOrder::Finite(2.0),
        RenyiOrder::Finite(4.0),
        RenyiOrder::Infinity,
    ];
    let mut worst = f64::INFINITY;
    for dim in [2usize, 3] {
        for (oi, &order) in orders.iter().enumerate() {
            for trial in 0..200u64 {
                let mut rng = substream_rng(ACCEPT_SEED, &[5, dim as u64, oi as u64, trial]);
                let e = random_channel_rng(dim, dim, dim * dim, &mut rng).unwrap();
                let f = random_channel_rng(dim, dim, dim * dim, &mut rng).unwrap();
                let rho = random_state_rng(dim, dim, &mut rng);
                let sigma = random_state_gapped(dim, &mut rng, 1e4, 1e-3);
                let r = check_sandwiched_chain(&e, &f, &rho, &sigma, order).unwrap();
                worst = worst.min(r.slack);
                assert!(
                    r.slack >= -1e-7,
                    "dim {dim} {order:?} trial {trial}: slack {}",
                    r.slack
                );
                // per-copy spectrum term strictly shrinks from n=1 to n=2
                let factor = match order {
                    RenyiOrder::Finite(a) => a / (a - 1.0),
                    _ => 1.0,
                };
                let count1 = spectrum(&sigma, DEFAULT_CLUSTER_TOL).count as f64;
                let sigma2 = state_tensor_power(&sigma, 2).unwrap();
                let count2 = spectrum(&sigma2, DEFAULT_CLUSTER_TOL).count as f64;
                let term1 = factor * count1.log2();
                let term2 = factor * count2.log2() / 2.0;
                assert!(
                    term2 < term1,
                    "dim {dim} trial {trial}: per-copy spectrum term {term2} !< {term1}"
                );
            }
        }
    }
    println!("[criterion 5] PASS sandwiched chain rule: worst slack {worst:.2e}");
}

#[test]
fn criterion_06_ordering_and_dpi() {
    let orders = [
        RenyiOrder::Finite(0.6),
        RenyiOrder::One,
        RenyiOrder::Finite(1.5),
        RenyiOrder::Finite(2.0),
        RenyiOrder::Finite(4.0),
        RenyiOrder::Infinity,
    ];
    let mut worst_ord = f64::INFINITY;
    let mut worst_dpi = f64::INFINITY;
    for dim in [2usize, 3] {
        for (oi, &order) in orders.iter().enumerate() {
            for trial in 0..100u64 {
                let mut rng = substream_rng(ACCEPT_SEED, &[6, dim as u64, oi as u64, trial]);
                let rho = random_state_rng(dim, dim, &mut rng);
                let sigma = random_state_gapped(dim, &mut rng, 1e4, 1e-3);
                let s = sandwiched(&rho, &sigma, order).unwrap().bits();
                if DivKind::Sandwiched.order_in_dpi_range(order) {
                    let opts = MeasuredOpts {
                        restarts: 2,
                        refine_iters: 60,
                        seed: rng.gen(),
                    };
                    let m = measured(&rho, &sigma, order, &opts).unwrap().value.bits();
                    worst_ord = worst_ord.min(s - m);
                    assert!(m <= s + 1e-9, "measured {m} > sandwiched {s} at {order:?}");
                }
                if DivKind::Geometric.order_in_dpi_range(order) {
                    let g = geometric(&rho, &sigma, order).unwrap().bits();
                    worst_ord = worst_ord.min(g - s);
                    assert!(s <= g + 1e-9, "sandwiched {s} > geometric {g} at {order:?}");
                }
                // data processing under a random CPTP map
                let ch = random_channel_rng(dim, dim, dim * dim, &mut rng).unwrap();
                let e_rho = ch.apply_to_state(&rho).unwrap();
                let e_sigma = ch.apply_to_state(&sigma).unwrap();
                if DivKind::Sandwiched.order_in_dpi_range(order) {
                    let after = sandwiched(&e_rho, &e_sigma, order).unwrap().bits();
                    worst_dpi = worst_dpi.min(s - after);
                    assert!(after <= s + 1e-8, "sandwiched DPI at {order:?}");
                }
                if DivKind::Geometric.order_in_dpi_range(order) {
                    let g = geometric(&rho, &sigma, order).unwrap().bits();
                    let after = geometric(&e_rho, &e_sigma, order).unwrap().bits();
                    worst_dpi = worst_dpi.min(g - after);
                    assert!(after <= g + 1e-8, "geometric DPI at {order:?}");
                }
            }
        }
    }
    println!(
        "[criterion 6] PASS ordering and DPI: worst ordering slack {worst_ord:.2e}, worst DPI slack {worst_dpi:.2e}"
    );
}

#[test]
fn criterion_07_classical_reduction() {
    let orders = [
        RenyiOrder::Finite(0.6),
        RenyiOrder::One,
        RenyiOrder::Finite(1.5),
        RenyiOrder::Finite(2.0),
        RenyiOrder::Finite(4.0),
        RenyiOrder::Infinity,
    ];
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let dim = if trial % 2 == 0 { 2 } else { 3 };
        let mut rng = substream_rng(ACCEPT_SEED, &[7, trial]);
        let u = random_unitary_rng(dim, &mut rng);
        let draw = |rng: &mut rand_chacha::ChaCha12Rng| -> Vec<f64> {
            let raw: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() + 0.1).collect();
            let t: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / t).collect()
        };
        let pv = draw(&mut rng);
        let qv = draw(&mut rng);
        let build = |vals: &[f64]| {
            let m = u
                .matmul(&ComplexMatrix::diag(vals))
                .unwrap()
                .matmul(&u.adjoint())
                .unwrap()
                .hermitize();
            DensityOperator::new(m).unwrap()
        };
        let rho = build(&pv);
        let sigma = build(&qv);
        let p = Distribution::new(pv).unwrap();
        let q = Distribution::new(qv).unwrap();
        for &order in &orders {
            let reference = classical_renyi(&p, &q, order).unwrap().bits();
            let s = sandwiched(&rho, &sigma, order).unwrap().bits();
            let g = geometric(&rho, &sigma, order).unwrap().bits();
            let opts = MeasuredOpts {
                restarts: 2,
                refine_iters: 60,
                seed: rng.gen(),
            };
            let m = measured(&rho, &sigma, order, &opts).unwrap().value.bits();
            for (label, v) in [("sandwiched", s), ("geometric", g), ("measured", m)] {
                let gap = (v - reference).abs();
                worst = worst.max(gap);
                assert!(
                    gap <= 1e-9,
                    "trial {trial} {order:?} {label}: {v} vs classical {reference}"
                );
            }
        }
    }
    println!("[criterion 7] PASS classical reduction: worst gap {worst:.2e}");
}

#[test]
fn criterion_08_closed_form_spot_values() {
    // grid oracle over pure qubit witnesses for the identity-vs-depolarizing
    // channel divergence at order ∞
    let mixed = DensityOperator::maximally_mixed(2);
    let mut oracle = f64::NEG_INFINITY;
    let steps = 60;
    for ti in 0..=steps {
        let theta = std::f64::consts::PI * ti as f64 / steps as f64;
        for pi in 0..steps {
            let phi = 2.0 * std::f64::consts::PI * pi as f64 / steps as f64;
            let psi = DensityOperator::pure_state(&[
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ])
            .unwrap();
            oracle = oracle.max(sandwiched(&psi, &mixed, RenyiOrder::Infinity).unwrap().bits());
        }
    }
    let id = PositiveMapRep::identity(2);
    let dep = PositiveMapRep::depolarizing(2);
    let est = channel_divergence(
        &id,
        &dep,
        RenyiOrder::Infinity,
        DivKind::Sandwiched,
        &ChannelDivOpts::quick(4, 50, 0),
    )
    .unwrap();
    assert!(
        (est.value_bits - 1.0).abs() <= 1e-3,
        "channel estimate {}",
        est.value_bits
    );
    assert!(
        (est.value_bits - oracle).abs() <= 1e-3,
        "estimate {} vs grid oracle {}",
        est.value_bits,
        oracle
    );
    let plus = plus_state();
    let s2 = sandwiched(&plus, &mixed, RenyiOrder::Finite(2.0)).unwrap().bits();
    let g2 = geometric(&plus, &mixed, RenyiOrder::Finite(2.0)).unwrap().bits();
    let sinf = sandwiched(&plus, &mixed, RenyiOrder::Infinity).unwrap().bits();
    for (label, v) in [("sandwiched-2", s2), ("geometric-2", g2), ("max-div", sinf)] {
        assert!((v - 1.0).abs() <= 1e-9, "{label}: {v}");
    }
    println!(
        "[criterion 8] PASS closed-form spot values: channel estimate {:.6}, oracle {:.6}",
        est.value_bits, oracle
    );
}

#[test]
fn criterion_09_regularized_sequence() {
    let mut worst = f64::INFINITY;
    for trial in 0..20u64 {
        let mut rng = substream_rng(ACCEPT_SEED, &[9, trial]);
        let e = random_channel_rng(2, 2, 4, &mut rng).unwrap();
        let f = random_channel_rng(2, 2, 4, &mut rng).unwrap();
        for order in [RenyiOrder::Finite(2.0), RenyiOrder::Infinity] {
            let opts = ChannelDivOpts::quick(2, 40, rng.gen());
            let levels =
                regularized_sequence(&e, &f, order, DivKind::Sandwiched, 2, &opts).unwrap();
            let f1 = levels[0].f_n;
            let f2 = levels[1].f_n;
            worst = worst.min(f2 - f1);
            assert!(f2 >= f1 - 1e-8, "trial {trial} {order:?}: f2 {f2} < f1 {f1}");
            assert!(
                f2 >= 0.5 * f1 - 1e-8,
                "trial {trial} {order:?}: f2 {f2} < f1/2 {}",
                0.5 * f1
            );
        }
    }
    println!("[criterion 9] PASS regularized sequence: worst f2−f1 {worst:.2e}");
}

#[test]
fn criterion_10_unital_entropy_bound() {
    let orders = [RenyiOrder::One, RenyiOrder::Finite(2.0), RenyiOrder::Infinity];
    let mut worst = f64::INFINITY;
    for (oi, &order) in orders.iter().enumerate() {
        for trial in 0..200u64 {
            let dim = if trial % 2 == 0 { 2 } else { 3 };
            let mut rng = substream_rng(ACCEPT_SEED, &[10, oi as u64, trial]);
            let e = random_mixed_unitary_channel(dim, dim * dim, &mut rng);
            let f = random_mixed_unitary_channel(dim, dim * dim, &mut rng);
            let rho = random_state_rng(dim, dim, &mut rng);
            let r = check_unital_entropy(&e, &f, &rho, order).unwrap();
            worst = worst.min(r.slack);
            assert!(r.slack >= -1e-7, "{order:?} trial {trial}: slack {}", r.slack);
            // with F = E the bound recovers entropy monotonicity
            let h_in = renyi_entropy(&rho, order);
            let h_out = renyi_entropy(&e.apply_to_state(&rho).unwrap(), order);
            assert!(
                h_out >= h_in - 1e-9,
                "{order:?} trial {trial}: entropy decreased {h_in} -> {h_out}"
            );
        }
    }
    println!("[criterion 10] PASS unital entropy bound: worst slack {worst:.2e}");
}

// Deterministic fixtures with degenerate supports: the conditioning edge
// cases excluded from the random campaigns, pinned explicitly here.
#[test]
fn degenerate_support_fixtures() {
    let plus = plus_state();
    let mixed = DensityOperator::maximally_mixed(2);
    let zero = DensityOperator::basis_state(2, 0).unwrap();
    // ρ ⋠ σ: geometric infinite at every order, sandwiched infinite above 1
    for order in [RenyiOrder::Finite(0.6), RenyiOrder::One, RenyiOrder::Finite(2.0)] {
        assert!(geometric(&mixed, &zero, order).unwrap().is_infinite());
    }
    assert!(sandwiched(&mixed, &zero, RenyiOrder::Finite(2.0)).unwrap().is_infinite());
    assert!(!sandwiched(&mixed, &zero, RenyiOrder::Finite(0.6)).unwrap().is_infinite());
    // reverse test on a rank-deficient ratio keeps the zero letter
    let rt = build_reverse_test(&plus, &mixed, DEFAULT_CLUSTER_TOL).unwrap();
    assert_eq!(rt.alphabet_len(), 2);
    assert!(rt.lambdas.iter().any(|&l| l.abs() < 1e-12));
    // generalized inverse on the support
    let m = ComplexMatrix::diag(&[4.0, 0.0]);
    let inv = psd_power(&m, -0.5).unwrap();
    assert!((inv.get(0, 0).re - 0.5).abs() < 1e-12);
    assert_eq!(inv.get(1, 1).re, 0.0);
    println!("[fixtures] PASS degenerate-support fixtures");
}
