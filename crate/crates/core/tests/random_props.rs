use hamcover::random::{expander_params_for_gnp, sample_gnp, ExpanderParams, RngSeed};
use proptest::prelude::*;

#[test]
fn identical_seeds_give_identical_edge_lists() {
    for stream in 0..5 {
        let seed = RngSeed::new(1234, stream);
        let a = sample_gnp(300, 0.07, seed).unwrap();
        let b = sample_gnp(300, 0.07, seed).unwrap();
        let (mut wa, mut wb) = (Vec::new(), Vec::new());
        a.write_edge_list(&mut wa).unwrap();
        b.write_edge_list(&mut wb).unwrap();
        assert_eq!(wa, wb);
    }
}

#[test]
fn mean_edge_count_over_200_seeds() {
    let (n, p) = (256usize, 0.3);
    let pairs = (n * (n - 1) / 2) as f64;
    let counts: Vec<f64> = (0..200)
        .map(|s| sample_gnp(n, p, RngSeed::new(s, 0)).unwrap().m() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let sd_one = (pairs * p * (1.0 - p)).sqrt();
    let se = sd_one / (counts.len() as f64).sqrt();
    assert!((mean - pairs * p).abs() <= 3.0 * se, "mean {mean} vs {}", pairs * p);
}

#[test]
fn gnp_parameters_use_the_fifth_root() {
    let prm = expander_params_for_gnp(1000, 0.5).unwrap();
    assert!((prm.s - 500f64.powf(0.2)).abs() < 1e-12);
    assert!((prm.alpha - prm.s.ln() / 1000f64.ln()).abs() < 1e-12);
}

proptest! {
    // g = 4 n ln s / (s ln n) decreases in s only for s >= e
    #[test]
    fn boundary_and_frame_are_monotone_in_s(
        n in 16usize..100_000,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let e = std::f64::consts::E;
        let top = n as f64;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        let s1 = e + lo * (top - e);
        let s2 = e + hi * (top - e);
        let p1 = ExpanderParams::for_expansion(n, s1).unwrap();
        let p2 = ExpanderParams::for_expansion(n, s2).unwrap();
        prop_assert!(p1.g > p2.g);
        prop_assert!(p1.l_raw < p2.l_raw);
    }
}
