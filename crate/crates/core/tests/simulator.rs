use cascade_core::discrete::{AuxiliarySystem, DistortionTable, SourceSpec};
use cascade_core::prob::{CondPmf, DeterministicMap};
use cascade_core::sim::{build_cascade_code, run_simulation, scheme_rates, TypicalityParams};

fn bsc(p: f64) -> CondPmf {
    CondPmf::from_fn(vec![2], 2, |i, o| if i[0] == o { 1.0 - p } else { p }).unwrap()
}

/// Binary `Y = X`, constant `Z`, Hamming distortions.
fn copy_source() -> SourceSpec {
    SourceSpec::from_chain(
        &[0.5, 0.5],
        &bsc(0.0),
        &CondPmf::constant(vec![2], &[1.0]).unwrap(),
        DistortionTable::hamming(2),
        DistortionTable::hamming(2),
        None,
    )
    .unwrap()
}

fn test_channel(cross: f64) -> AuxiliarySystem {
    AuxiliarySystem {
        p_u: Some(CondPmf::from_fn(vec![2, 2], 2, |i, o| if i[0] == o { 1.0 - cross } else { cross }).unwrap()),
        p_xhat1: Some(CondPmf::from_fn(vec![2, 2, 2], 2, |i, o| (i[0] == o) as u8 as f64).unwrap()),
        g2: Some(DeterministicMap::from_fn(vec![2, 1], 2, |i| i[0]).unwrap()),
        ..Default::default()
    }
}

#[test]
fn runs_are_reproducible() {
    let (src, aux) = (copy_source(), test_channel(0.11));
    let tp = TypicalityParams::new(0.4, 12).unwrap();
    let a = run_simulation(&src, &aux, tp, 0.15, 200, 42).unwrap();
    let b = run_simulation(&src, &aux, tp, 0.15, 200, 42).unwrap();
    assert_eq!(a.event_counts, b.event_counts);
    assert_eq!(a.d2, b.d2);
    let c = run_simulation(&src, &aux, tp, 0.15, 200, 43).unwrap();
    assert_ne!((a.event_counts, a.d2.mean), (c.event_counts, c.d2.mean));
}

#[test]
fn uninformative_auxiliary_gives_best_guess_distortion() {
    let src = copy_source();
    let aux = AuxiliarySystem {
        p_u: Some(CondPmf::constant(vec![2, 2], &[1.0]).unwrap()),
        p_xhat1: Some(CondPmf::constant(vec![2, 2, 1], &[0.5, 0.5]).unwrap()),
        g2: Some(DeterministicMap::constant(vec![1, 1], 2, 1).unwrap()),
        ..Default::default()
    };
    let rates = scheme_rates(&src, &aux, 0.0).unwrap();
    assert!(rates.r_l.abs() < 1e-12 && rates.r_2.abs() < 1e-12);
    let r = run_simulation(&src, &aux, TypicalityParams::new(0.5, 16).unwrap(), 0.0, 400, 5).unwrap();
    assert_eq!(r.sizes.l, 0);
    // the lone codeword fails at node 1 exactly when y itself is atypical
    assert_eq!(r.event_counts[4], r.event_counts[0]);
    assert_eq!(r.event_counts[5], 0);
    assert!((r.d2.mean - 0.5).abs() <= r.d2.half_width + 1e-12);
}

#[test]
fn codewords_follow_the_auxiliary_marginal() {
    let (src, aux) = (copy_source(), test_channel(0.11));
    let tp = TypicalityParams::new(0.75, 12).unwrap();
    let code = build_cascade_code(&src, &aux, tp, 0.1, 11).unwrap();
    assert_eq!(code.num_codewords(), 256);
    let typical = (0..code.num_codewords())
        .filter(|&l| {
            let ones = code.codeword(l).iter().filter(|&&s| s == 1).count() as f64;
            // p(u) is uniform here
            (ones - 6.0).abs() <= 0.75 * 6.0 + 1e-9
        })
        .count();
    assert!(typical as f64 >= 0.95 * 256.0, "{typical} of 256");
}

/// Wilson-Hilferty approximation to the chi-square quantile.
fn chi_square_critical(df: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

#[test]
fn bin_assignments_are_independent() {
    // U = X on a copy source with constant Z: both partitions are random
    let src = SourceSpec::from_chain(
        &[0.5, 0.5],
        &bsc(0.0),
        &bsc(0.0),
        DistortionTable::hamming(2),
        DistortionTable::hamming(2),
        None,
    )
    .unwrap();
    let aux = AuxiliarySystem {
        p_u: Some(CondPmf::from_fn(vec![2, 2], 2, |i, o| (i[0] == o) as u8 as f64).unwrap()),
        p_xhat1: Some(CondPmf::from_fn(vec![2, 2, 2], 2, |i, o| (i[0] == o) as u8 as f64).unwrap()),
        g2: Some(DeterministicMap::from_fn(vec![2, 2], 2, |i| i[0]).unwrap()),
        ..Default::default()
    };
    let code = build_cascade_code(&src, &aux, TypicalityParams::new(0.5, 12).unwrap(), 0.25, 3).unwrap();
    let s = code.sizes();
    assert_eq!((s.l, s.b10, s.b2), (15, 6, 6));
    let k = 1usize << 6;
    let mut table = vec![0f64; k * k];
    for l in 0..code.num_codewords() {
        table[code.bin1(l) as usize * k + code.bin2(l) as usize] += 1.0;
    }
    let expected = code.num_codewords() as f64 / (k * k) as f64;
    let stat: f64 = table.iter().map(|o| (o - expected).powi(2) / expected).sum();
    let crit = chi_square_critical(((k - 1) * (k - 1)) as f64, 2.326);
    assert!(stat < crit, "chi-square {stat} against {crit}");
}

#[test]
#[ignore = "slow: the full trend check lives in the acceptance target"]
fn error_rates_fall_with_blocklength() {
    let (src, aux) = (copy_source(), test_channel(0.11));
    let runs: Vec<_> = [8, 12, 16, 20]
        .iter()
        .map(|&n| run_simulation(&src, &aux, TypicalityParams::new(0.4, n).unwrap(), 0.15, 2000, 2024).unwrap())
        .collect();
    for w in runs.windows(2) {
        for k in [1, 4, 5] {
            let (a, b) = (w[0].event_rates[k], w[1].event_rates[k]);
            assert!(b.mean - b.half_width <= a.mean + a.half_width, "E{k} at n = {}", w[1].n);
        }
    }
}
