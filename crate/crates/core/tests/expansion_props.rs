mod common;

use common::{floyd_warshall_diameter, gnp};
use hamcover::expansion::{
    diameter_bound, diameter_bound_check, large_expansion_witness_search, peel_non_expanding,
    small_expansion_witness_search, witness_is_valid, Verdict, Witness,
};
use hamcover::graph::VertexSet;
use hamcover::random::RngSeed;
use hamcover::verify::exhaustive_expansion_check;

#[test]
fn violated_witnesses_recheck_from_scratch() {
    let mut violations = 0;
    for i in 0..300u64 {
        let n = 8 + (i as usize % 40);
        let p = [0.05, 0.1, 0.2, 0.4][i as usize % 4];
        let g = gnp(n, p, i);
        let s = 1.0 + (i % 5) as f64 * 0.5;
        let r = small_expansion_witness_search(&g, s, (n / 3) as f64, 50, RngSeed::new(i, 1)).unwrap();
        if r.verdict == Verdict::Violated {
            violations += 1;
            assert!(witness_is_valid(&g, &r));
            let Some(Witness::Set(a)) = &r.witness else { panic!() };
            // neighborhood recomputed by a direct scan
            let mut nb = vec![false; n];
            for &v in a {
                for &w in g.neighbors(v) {
                    nb[w] = true;
                }
            }
            for &v in a {
                nb[v] = false;
            }
            let size = nb.iter().filter(|&&b| b).count();
            assert!((size as f64) < s * a.len() as f64);
        }
        let l = 1.0 + (i % 4) as f64;
        let r = large_expansion_witness_search(&g, l, 50, RngSeed::new(i, 2)).unwrap();
        if r.verdict == Verdict::Violated {
            violations += 1;
            assert!(witness_is_valid(&g, &r));
        }
    }
    assert!(violations > 50, "fuzz corpus should exercise violations ({violations})");
}

#[test]
fn peeled_remainder_has_min_degree_half_s() {
    for i in 0..100u64 {
        let n = 20 + (i as usize % 60);
        let g = gnp(n, 0.15, i);
        let removed = VertexSet::from_vertices(n, (0..n).filter(|v| v % 7 == (i as usize % 7)));
        let s = 2.0 + (i % 6) as f64;
        let r = peel_non_expanding(&g, &removed, s);
        for u in r.remainder.iter() {
            let inside = g.neighbors(u).iter().filter(|&&w| r.remainder.contains(w)).count();
            assert!(inside as f64 >= s / 2.0);
        }
        assert!(r.peeled.is_disjoint(&removed));
        assert_eq!(r.peeled.len() + r.remainder.len() + removed.len(), n);
    }
}

#[test]
fn diameter_check_matches_floyd_warshall() {
    for i in 0..100u64 {
        let n = 5 + (i as usize % 30);
        let g = gnp(n, 0.1 + (i % 5) as f64 * 0.1, 500 + i);
        let s = 1.5 + (i % 3) as f64;
        let check = diameter_bound_check(&g, s).unwrap();
        let fw = floyd_warshall_diameter(&g);
        assert_eq!(check.diameter.finite(), fw);
        assert_eq!(check.ok, fw.is_some_and(|d| d as f64 <= diameter_bound(n, s)));
    }
}

#[test]
fn sampled_search_agrees_with_exhaustive_oracle() {
    let mut violated_cases = 0;
    let mut found = 0;
    for i in 0..150u64 {
        let n = 6 + (i as usize % 9);
        let g = gnp(n, [0.2, 0.35, 0.5, 0.7][i as usize % 4], 900 + i);
        let s = [1.0, 1.5, 2.0][i as usize % 3];
        let bound = 1.0 + (i % 4) as f64;
        let l = 1.0 + (i % 3) as f64;
        let exact = exhaustive_expansion_check(&g, s, bound, l).unwrap();
        let trials = 1usize << n;
        let small = small_expansion_witness_search(&g, s, bound, trials, RngSeed::new(i, 5)).unwrap();
        let large = large_expansion_witness_search(&g, l, trials, RngSeed::new(i, 6)).unwrap();
        if exact.small_holds {
            assert_ne!(small.verdict, Verdict::Violated, "instance {i}");
        } else {
            assert_ne!(small.verdict, Verdict::Holds, "instance {i}");
            violated_cases += 1;
            found += (small.verdict == Verdict::Violated) as usize;
        }
        if exact.large_holds {
            assert_ne!(large.verdict, Verdict::Violated, "instance {i}");
        } else {
            assert_ne!(large.verdict, Verdict::Holds, "instance {i}");
            violated_cases += 1;
            found += (large.verdict == Verdict::Violated) as usize;
        }
    }
    assert!(violated_cases > 20);
    assert!(found as f64 >= 0.95 * violated_cases as f64, "{found}/{violated_cases}");
}
