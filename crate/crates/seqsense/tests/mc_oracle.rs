use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqsense::oracle::mc::{
    run_fixed, run_network, run_sequential, sample_increment, McConfig, NetworkScheme,
};
use seqsense_core::censoring::FixedSizeDesign;
use seqsense_core::{Hypothesis, SensorProfile, SequentialDesign};

fn sample_mean(h: Hypothesis, gamma: f64, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n).map(|_| sample_increment(h, gamma, &mut rng)).collect();
    let m = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (m, (var / n as f64).sqrt())
}

#[test]
fn increment_means() {
    let (m0, se0) = sample_mean(Hypothesis::H0, 1.0, 1_000_000, 11);
    assert!((m0 - 2.0).abs() <= 3.0 * se0, "{m0} ± {se0}");
    let (m1, se1) = sample_mean(Hypothesis::H1, 1.0, 1_000_000, 12);
    assert!((m1 - 4.0).abs() <= 3.0 * se1, "{m1} ± {se1}");
    for x in [m0, m1] {
        assert!(x > 0.0);
    }
}

#[test]
fn first_draw_is_fixed_by_the_seed() {
    let a = sample_increment(Hypothesis::H0, 1.0, &mut ChaCha8Rng::seed_from_u64(5));
    let b = sample_increment(Hypothesis::H0, 1.0, &mut ChaCha8Rng::seed_from_u64(5));
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn unreachable_upper_boundary_always_censors() {
    let d = SequentialDesign::relaxed(6, 1e6, 1.5).unwrap();
    let e = run_sequential(&d, Hypothesis::H1, 1.0, &McConfig::new(20_000, 3));
    assert_eq!(e.censored.mean, 1.0);
    assert_eq!(e.stop_time.mean, 6.0);
    assert_eq!(e.decide_zero.mean, 0.0);
}

#[test]
fn single_step_crossing_rate() {
    let d = SequentialDesign::relaxed(1, 2.0, 1.5).unwrap();
    let e = run_sequential(&d, Hypothesis::H0, 1.0, &McConfig::new(1_000_000, 4));
    let target = (-1.75f64).exp();
    assert!(e.decide_one.z_rate(target).abs() <= 3.0, "{:?}", e.decide_one);
}

#[test]
fn fixed_rule_examples() {
    let mc = McConfig::new(1_000_000, 8);
    let never = FixedSizeDesign::new(4, 0.0, f64::INFINITY).unwrap();
    assert_eq!(run_fixed(&never, Hypothesis::H1, 1.0, &mc).censored.mean, 1.0);

    let one = FixedSizeDesign::upper_only(1, 2.0 * std::f64::consts::LN_10).unwrap();
    let e = run_fixed(&one, Hypothesis::H0, 1.0, &mc);
    assert!(e.send_one.z_rate(0.1).abs() <= 3.0, "{:?}", e.send_one);

    let three = FixedSizeDesign::new(10, 2.0, 25.0).unwrap();
    let e = run_fixed(&three, Hypothesis::H1, 1.0, &McConfig::new(100_000, 9));
    // tallies are integer counts over the same denominator
    let total = (e.send_one.mean + e.send_zero.mean + e.censored.mean) * 100_000.0;
    assert_eq!(total.round(), 100_000.0);
    assert!((total - 100_000.0).abs() < 1e-6);
}

#[test]
fn network_examples() {
    let mc = McConfig::new(1_000_000, 21);
    let single = FixedSizeDesign::upper_only(1, 2.0 * std::f64::consts::LN_10).unwrap();
    let scheme = NetworkScheme::Fixed(single);
    let profiles = SensorProfile::new(1.0, 1.0, 10.0).unwrap().replicate(5);

    let net = run_network(&scheme, &profiles[..1], &mc);
    let local = run_fixed(&single, Hypothesis::H0, 1.0, &McConfig { paired: false, ..mc });
    assert!(net.qf.z_rate(0.1).abs() <= 3.0);
    assert!(local.send_one.z_rate(0.1).abs() <= 3.0);

    let net = run_network(&scheme, &profiles, &mc);
    let target = 1.0 - 0.9f64.powi(5);
    assert!((target - 0.40951).abs() < 1e-12);
    assert!(net.qf.z_rate(target).abs() <= 3.0, "{:?}", net.qf);

    let saturating = NetworkScheme::Fixed(FixedSizeDesign::upper_only(3, 1e-9).unwrap());
    assert_eq!(run_network(&saturating, &profiles, &McConfig::new(10_000, 2)).qd.mean, 1.0);
}

#[test]
fn estimates_ignore_the_worker_count() {
    let d = SequentialDesign::new(8, -5.0, 2.0, 1.5).unwrap();
    let mc = McConfig::new(300_000, 99);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_sequential(&d, Hypothesis::H1, 1.0, &mc))
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a, b);
    assert_eq!(a.stop_time.mean.to_bits(), b.stop_time.mean.to_bits());
}

#[test]
fn antithetic_mode_keeps_the_target() {
    let d = SequentialDesign::relaxed(5, 2.0, 1.5).unwrap();
    let mc = McConfig { antithetic: true, ..McConfig::new(400_000, 13) };
    let e = run_sequential(&d, Hypothesis::H0, 1.0, &mc);
    let pf = seqsense_core::relaxed::local_pf_seq(&d).unwrap();
    assert!(e.decide_one.z_rate(pf).abs() <= 3.0, "{:?} vs {pf}", e.decide_one);
    assert_eq!(e.decide_one.trials, 400_000);
}
