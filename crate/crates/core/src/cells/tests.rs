use super::*;
use crate::engines::lcs_scalar_length;
use alloc::vec::Vec;
use proptest::prelude::*;

const EX_X: [u32; 12] = [1, 1, 2, 1, 2, 1, 1, 2, 1, 1, 3, 1];
const EX_Y: [u32; 12] = [2, 1, 1, 3, 2, 3, 1, 2, 1, 1, 1, 1];

fn lcg_word(state: &mut u64, len: usize, m: u32) -> Vec<u32> {
    (0..len)
        .map(|_| {
            *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*state >> 33) % m as u64) as u32
        })
        .collect()
}

/// Every optimal breakpoint vector, by enumeration of nondecreasing vectors.
fn all_optimal(x: &[u32], y: &[u32], v: usize) -> Vec<Vec<usize>> {
    let n = x.len();
    let d = n / v;
    let lcs = lcs_scalar_length(x, y);
    let mut out = Vec::new();
    let mut r = vec![0usize; d + 1];
    fn rec(x: &[u32], y: &[u32], v: usize, k: usize, r: &mut Vec<usize>, lcs: usize, out: &mut Vec<Vec<usize>>) {
        let d = r.len() - 1;
        let n = y.len();
        if k == d {
            r[d] = n;
            let s: usize = (0..d)
                .map(|i| lcs_scalar_length(&x[i * v..(i + 1) * v], &y[r[i]..r[i + 1]]))
                .sum();
            if s == lcs {
                out.push(r.clone());
            }
            return;
        }
        for next in r[k - 1]..=n {
            r[k] = next;
            rec(x, y, v, k + 1, r, lcs, out);
        }
    }
    if d == 0 {
        return vec![vec![0]];
    }
    rec(x, y, v, 1, &mut r, lcs, &mut out);
    out
}

fn params(eps: f64) -> GenericityParams {
    GenericityParams::new(0.5, 0.5, 2.0, 0.1, 1.0).unwrap().with_epsilon(eps)
}

#[test]
fn example_breakpoints_score_eight_but_are_not_optimal() {
    let dec = CellDecomposition::from_breakpoints(&EX_X, &EX_Y, 3, vec![0, 5, 5, 9, 12]).unwrap();
    assert_eq!(dec.block_scores(), &[3, 0, 3, 2]);
    assert_eq!(dec.total_score(), 8);
    assert_eq!(dec.lcs(), 9);
    assert!(!dec.is_optimal());
}

#[test]
fn example_canonical_decomposition() {
    let dec = decompose(&EX_X, &EX_Y, 3).unwrap();
    assert!(dec.is_optimal());
    assert_eq!(dec.total_score(), 9);
    let all = all_optimal(&EX_X, &EX_Y, 3);
    assert_eq!(dec.breakpoints(), all.iter().min().unwrap().as_slice());
}

#[test]
fn example_delta_tilde() {
    let dec = CellDecomposition::from_breakpoints(&EX_X, &EX_Y, 3, vec![0, 5, 5, 9, 12]).unwrap();
    assert_eq!(dec.cell_of(8).unwrap(), 2);
    let cell = dec.cells(&EX_X, &EX_Y)[2];
    assert_eq!(cell.x_part, &[1, 2, 1]);
    assert_eq!(cell.y_part, &[3, 1, 2, 1]);
    assert_eq!(delta_tilde(&EX_X, &EX_Y, &dec, 8, 3).unwrap(), 1);
    assert_eq!(delta_tilde(&EX_X, &EX_Y, &dec, 8, 2).unwrap(), 0);
    // x coordinates 4..=6 sit in the cell with empty y part.
    assert_eq!(delta_tilde(&EX_X, &EX_Y, &dec, 5, 7).unwrap(), 0);
}

#[test]
fn identical_words_cut_on_the_diagonal() {
    let mut s = 3;
    let x = lcg_word(&mut s, 24, 4);
    for v in [1, 2, 3, 4, 6, 8, 12, 24] {
        let dec = decompose(&x, &x, v).unwrap();
        let diag: Vec<usize> = (0..=24 / v).map(|k| k * v).collect();
        assert_eq!(dec.breakpoints(), diag.as_slice());
        assert!(dec.block_scores().iter().all(|&s| s == v));
        assert!(check_event_e(&x, &x, &dec, &params(0.0)).unwrap().holds || v == 1);
    }
}

#[test]
fn diagonal_event_e_with_unit_alphabet_gaps() {
    let x: Vec<u32> = (0..16).collect();
    let dec = decompose(&x, &x, 4).unwrap();
    let rep = check_event_e(&x, &x, &dec, &params(0.0)).unwrap();
    assert!(rep.holds);
    assert_eq!(rep.mode, EventMode::Exhaustive);
    assert_eq!(rep.good_cells, 4);
}

#[test]
fn crossing_blocks_force_an_empty_cell() {
    let x = [1, 1, 0, 0];
    let y = [0, 0, 1, 1];
    let dec = decompose(&x, &y, 2).unwrap();
    assert!(dec.cells(&x, &y).iter().any(|c| c.y_part.is_empty()));
    for r in all_optimal(&x, &y, 2) {
        assert!(r.windows(2).any(|w| w[0] == w[1]));
    }
    let rep = check_event_e(&x, &y, &dec, &params(0.0)).unwrap();
    assert!(!rep.holds);
    assert_eq!(rep.good_cells, 1);
}

#[test]
fn bad_block_width_is_rejected() {
    assert!(matches!(decompose(&[0; 6], &[0; 6], 4), Err(Error::BlockWidth { .. })));
    assert!(matches!(decompose(&[0; 6], &[0; 6], 0), Err(Error::BlockWidth { .. })));
    assert!(matches!(decompose(&[0; 6], &[0; 5], 3), Err(Error::LengthMismatch { .. })));
    assert!(CellDecomposition::from_breakpoints(&[0; 4], &[0; 4], 2, vec![0, 3, 2]).is_err());
    assert!(CellDecomposition::from_breakpoints(&[0; 4], &[0; 4], 2, vec![0, 2, 3]).is_err());
}

#[test]
fn unbound_params_are_rejected() {
    let p = GenericityParams::new(0.5, 0.5, 2.0, 0.1, 1.0).unwrap();
    let dec = decompose(&[0; 4], &[0; 4], 2).unwrap();
    assert!(check_event_e(&[0; 4], &[0; 4], &dec, &p).is_err());
    assert!(check_event_h(&Alignment::default(), &p, 4).is_err());
}

#[test]
fn canonical_matches_enumeration_and_exhaustive_minimum() {
    let mut s = 11;
    for trial in 0..300 {
        let n = [4, 6, 8][trial % 3];
        let v = if n == 6 { [1, 2, 3][trial % 3] } else { [1, 2, 4][trial % 3] };
        let m = 2 + (trial % 3) as u32;
        let x = lcg_word(&mut s, n, m);
        let y = lcg_word(&mut s, n, m);
        let dec = decompose(&x, &y, v).unwrap();
        let all = all_optimal(&x, &y, v);
        assert_eq!(dec.breakpoints(), all.iter().min().unwrap().as_slice(), "{x:?} {y:?} v={v}");
        assert!(dec.is_optimal());
        let p = params(0.0);
        let brute = all
            .iter()
            .map(|r| r.windows(2).filter(|w| is_good(w[1] - w[0], v, p.s1, p.s2)).count())
            .min()
            .unwrap();
        assert_eq!(min_good_cells(&x, &y, &dec, &p).unwrap(), brute, "{x:?} {y:?} v={v}");
    }
}

#[test]
fn ragged_tail_is_absorbed() {
    let mut s = 5;
    let x = lcg_word(&mut s, 23, 3);
    let y = lcg_word(&mut s, 23, 3);
    let dec = decompose_ragged(&x, &y, 4).unwrap();
    assert_eq!(dec.d(), 5);
    assert_eq!(dec.x_bounds(), &[0, 4, 8, 12, 16, 23]);
    assert!(dec.is_optimal());
    assert_eq!(decompose_ragged(&x[..3], &y[..3], 4).unwrap().d(), 1);
    assert_eq!(decompose_ragged(&[], &[], 4).unwrap().d(), 0);
}

#[test]
fn cell_count_follows_block_width() {
    for (n, alpha, d) in [(256usize, 0.75, 4usize), (10_000, 0.5, 100), (4096, 0.5, 64), (1 << 12, 0.75, 8)] {
        let v = block_width(n, alpha);
        let x = vec![0u32; n];
        assert_eq!(decompose_ragged(&x, &x, v).unwrap().d(), d);
    }
}

#[test]
fn epsilon_values() {
    assert!((epsilon_for(1, 0.5, 1.0).unwrap() - 1.301_210).abs() < 1e-5);
    assert!((epsilon_for(256, 0.75, 1.0).unwrap() - 0.284_341).abs() < 1e-5);
    assert_eq!(epsilon_for(100, 0.5, 0.0).unwrap(), 0.0);
    assert!(epsilon_for(0, 0.5, 1.0).is_err());
    assert!(epsilon_for(10, 1.0, 1.0).is_err());
    let p = GenericityParams::new(0.75, 0.5, 2.0, 0.1, 1.0).unwrap().bind(256).unwrap();
    assert_eq!(p.epsilon, Some(epsilon_for(256, 0.75, 1.0).unwrap()));
}

#[test]
fn hm_bound_values() {
    assert_eq!(hm_bound(100.0, 10.0, 0.1, 0.1), 0.0);
    let v: f64 = 50.0;
    let entropy = (1.0 + (v + 1.0).ln()) / v;
    let eps = (32.0 * entropy).sqrt() / 1.0;
    // delta = 1: delta^2 eps^2 / 16 = 2 entropy.
    let b = hm_bound(v, v, 1.0, eps);
    assert!((b - (1.0 - (-(1.0 + (v + 1.0).ln())).exp())).abs() < 1e-12);

    let (n, alpha, delta) = (1.0e4_f64, 0.75, 0.2);
    let c1 = (32.0_f64).sqrt() / delta;
    let eps = epsilon_for(n as usize, alpha, c1).unwrap();
    let v = n.powf(alpha);
    let expected = 1.0 - (-(n.powf(1.0 - alpha)) * (1.0 + (v + 1.0).ln())).exp();
    assert!((hm_bound(n, v, delta, eps) - expected).abs() < 1e-12);
}

#[test]
fn event_h_and_k_examples() {
    let p = GenericityParams::new(0.5, 0.5, 1.01, 0.1, 1.0).unwrap().with_epsilon(0.01);
    let n = 400;
    assert!(check_event_h(&Alignment::default(), &p, n).unwrap());
    assert!(check_event_k(&Alignment::default(), &p, n).unwrap());
    let diag = Alignment::new((1..=n).map(|i| (i, i)).collect());
    assert!(check_event_h(&diag, &p, n).unwrap());
    assert!(check_event_k(&diag, &p, n).unwrap());
    let far = Alignment::new(vec![(1, n)]);
    assert!(!check_event_h(&far, &p, n).unwrap());
    assert!(!check_event_k(&far, &p, n).unwrap());
}

#[test]
fn delta_full_examples() {
    assert_eq!(delta_full(&[1, 1], &[1, 1], 1, 2).unwrap(), 1);
    assert_eq!(delta_full(&[1, 1], &[1, 1], 3, 1).unwrap(), 0);
    assert!(delta_full(&[1, 1], &[1, 1], 5, 1).is_err());
    assert!(delta_full(&[1, 1], &[1, 1], 0, 1).is_err());
}

#[test]
fn global_increment_never_exceeds_restricted_one() {
    // Replacing a letter changes f(W) by at least what its cell loses, since the
    // other cells still contribute their old scores: Delta <= Delta tilde.
    let x = [1, 2];
    let y = [2, 1];
    let dec = decompose(&x, &y, 1).unwrap();
    assert_eq!(dec.breakpoints(), &[0, 0, 2]);
    assert_eq!(delta_full(&x, &y, 2, 3).unwrap(), 0);
    assert_eq!(delta_tilde(&x, &y, &dec, 2, 3).unwrap(), 1);

    let mut s = 99;
    for _ in 0..2000 {
        let x = lcg_word(&mut s, 12, 3);
        let y = lcg_word(&mut s, 12, 3);
        let dec = decompose(&x, &y, 3).unwrap();
        let coord = 1 + (lcg_word(&mut s, 1, 24)[0] as usize);
        let c = lcg_word(&mut s, 1, 4)[0];
        let full = delta_full(&x, &y, coord, c).unwrap();
        let restricted = delta_tilde(&x, &y, &dec, coord, c).unwrap();
        assert!(full <= restricted);
        assert!(full.abs() <= 1);
    }
}

#[test]
fn genericity_on_diagonal_instances() {
    let x: Vec<u32> = (0..256).map(|i| i % 7).collect();
    let p = GenericityParams::new(0.75, 0.5, 2.0, 0.1, 1.0).unwrap();
    let rep = evaluate_genericity(&x, &x, &p).unwrap();
    assert_eq!(rep.v, 64);
    assert_eq!(rep.d, 4);
    assert!(rep.event_e.holds && rep.event_h && rep.event_k);
}

#[test]
fn genericity_shortcut_agrees_with_full_alignment() {
    let mut s = 17;
    let p = GenericityParams::new(0.5, 0.9, 1.05, 0.1, 0.05).unwrap();
    for _ in 0..200 {
        let x = lcg_word(&mut s, 64, 2);
        let y = lcg_word(&mut s, 64, 2);
        let rep = evaluate_genericity(&x, &y, &p).unwrap();
        let dec = decompose(&x, &y, 8).unwrap();
        let a = decomposition_alignment(&x, &y, &dec);
        a.validate(&x, &y).unwrap();
        assert_eq!(a.len(), dec.lcs());
        let bound = p.bind(64).unwrap();
        assert_eq!(rep.event_h, check_event_h(&a, &bound, 64).unwrap());
        assert_eq!(rep.event_k, check_event_k(&a, &bound, 64).unwrap());
        if rep.event_h {
            assert!(rep.event_k);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decompositions_are_valid(
        x in proptest::collection::vec(0u32..3, 1..120),
        seed in any::<u64>(),
        v in 1usize..12,
    ) {
        let mut s = seed;
        let y = lcg_word(&mut s, x.len(), 3);
        let dec = decompose_ragged(&x, &y, v).unwrap();
        let r = dec.breakpoints();
        prop_assert_eq!(r[0], 0);
        prop_assert_eq!(*r.last().unwrap(), x.len());
        prop_assert!(r.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(dec.total_score(), lcs_scalar_length(&x, &y));
        let cells = dec.cells(&x, &y);
        let xs: Vec<u32> = cells.iter().flat_map(|c| c.x_part.iter().copied()).collect();
        let ys: Vec<u32> = cells.iter().flat_map(|c| c.y_part.iter().copied()).collect();
        prop_assert_eq!(xs, x.clone());
        prop_assert_eq!(ys, y.clone());
        for (c, &sc) in cells.iter().zip(dec.block_scores()) {
            prop_assert_eq!(lcs_scalar_length(c.x_part, c.y_part), sc);
        }
    }

    #[test]
    fn restricted_increment_bounds(
        x in proptest::collection::vec(0u32..3, 16),
        y in proptest::collection::vec(0u32..3, 16),
        coord in 1usize..=32,
        c in 0u32..4,
    ) {
        let dec = decompose(&x, &y, 4).unwrap();
        let t = delta_tilde(&x, &y, &dec, coord, c).unwrap();
        let f = delta_full(&x, &y, coord, c).unwrap();
        prop_assert!((-1..=1).contains(&t));
        prop_assert!((-1..=1).contains(&f));
        prop_assert!(f <= t);
    }
}

#[test]
#[ignore]
fn timing_biased_binary_large() {
    use crate::models::{sample_word, LetterDistribution, SeedSpec};
    let dist = LetterDistribution::biased_binary(0.95).unwrap();
    let p = GenericityParams::new(0.75, 0.5, 2.0, 0.1, 1.0).unwrap();
    let t = std::time::Instant::now();
    let mut holds = 0;
    for rep in 0..10 {
        let x = sample_word(&dist, 10_000, SeedSpec::new(rep, 1));
        let y = sample_word(&dist, 10_000, SeedSpec::new(rep, 2));
        let r = evaluate_genericity(x.letters(), y.letters(), &p).unwrap();
        holds += r.event_e.holds as usize;
        std::println!("{:?} {} {}", r.event_e, r.event_h, r.event_k);
    }
    std::println!("{holds}/10 in {:?}", t.elapsed());
}
