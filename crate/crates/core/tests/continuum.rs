mod common;

use carleson_core::continuum::*;
use carleson_core::geometry::test_cube_family;
use carleson_core::random::{rng, FieldSpec};
use carleson_core::*;
use proptest::prelude::*;
use rand::Rng;

fn grid(seed: u64, depth: usize) -> GridFunction {
    suite_spec(seed)
        .grid_function(TreeConfig::new(1, depth).unwrap(), 2, seed)
        .unwrap()
}

/// A random box inside the data domain and a cover of it by `pieces` boxes
/// cut along random coordinates, each then enlarged at random.
fn random_cover(seed: u64, u: &GridFunction) -> (Region, Vec<Region>) {
    let mut r = rng(seed);
    let domain = u.data_domain();
    let pick = |r: &mut rand_chacha::ChaCha8Rng, (lo, hi): (f64, f64)| {
        let a = r.random_range(lo..hi);
        let b = r.random_range(lo..hi);
        if a < b { (a, b) } else { (b, a) }
    };
    let t = pick(&mut r, domain.t);
    let x: Vec<(f64, f64)> = domain.x.iter().map(|&iv| pick(&mut r, iv)).collect();
    let region = Region::new(t, x.clone()).unwrap();
    let pieces = r.random_range(1..=6usize);
    let mut cuts: Vec<f64> = (1..pieces).map(|_| r.random_range(t.0..t.1)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut edges = vec![t.0];
    edges.extend(cuts);
    edges.push(t.1);
    let cover = edges
        .windows(2)
        .map(|w| {
            let grow = r.random_range(0.0..0.1);
            let xs = x.iter().map(|&(lo, hi)| (lo - grow, hi + grow)).collect();
            Region::new(((w[0] - grow).max(1e-9), w[1] + grow), xs).unwrap()
        })
        .collect();
    (region, cover)
}

fn clipped(u: &GridFunction, r: &Region) -> f64 {
    r.intersect(&u.data_domain()).map_or(0.0, |r| r.volume())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn big_mean_on_random_covers(seed in 0u64..1_000_000) {
        let u = grid(seed, 3);
        let (region, cover) = random_cover(seed ^ 0x5eed, &u);
        let base = clipped(&u, &region);
        prop_assume!(base > 0.0);
        let c = cover.iter().map(|r| clipped(&u, r)).fold(0.0, f64::max) / base;
        let out = big_mean_witness(&u, &region, &cover, c).unwrap();
        prop_assert!(out.holds, "{out:?}");
        prop_assert!(out.best_mean >= out.bound * (1.0 - 1e-12));
    }

    #[test]
    fn denser_family_only_raises_carleson(seed in 0u64..10_000, pp in prop_oneof![Just(2.0), Just(f64::INFINITY)]) {
        let g = grid(seed, 4);
        let geo = GeometryConfig::default();
        let sparse = test_cube_family(g.tree(), 4).unwrap();
        let dense = test_cube_family(g.tree(), 2).unwrap();
        let a = compare_carleson_norms(&g, pp, 2.0, &geo, &sparse).unwrap();
        let b = compare_carleson_norms(&g, pp, 2.0, &geo, &dense).unwrap();
        prop_assert!(a.continuum <= b.continuum * (1.0 + 1e-13));
        prop_assert_eq!(a.dyadic, b.dyadic);
        prop_assert!(a.nodes < b.nodes);
    }

    #[test]
    fn comparisons_are_scale_invariant(seed in 0u64..10_000, s in 0.1f64..10.0) {
        let g = grid(seed, 3);
        let geo = GeometryConfig::default();
        let family = test_cube_family(g.tree(), 2).unwrap();
        let a = compare_nt_norms(&g, 2.0, 2.0, &geo).unwrap();
        let b = compare_nt_norms(&g.scaled(s), 2.0, 2.0, &geo).unwrap();
        prop_assert!((a.ratio.unwrap() - b.ratio.unwrap()).abs() <= 1e-12 * a.ratio.unwrap());
        let a = tent_space_check(&g, 4.0, &family, &geo).unwrap();
        let b = tent_space_check(&g.scaled(s), 4.0, &family, &geo).unwrap();
        prop_assert!((a.ratio.unwrap() - b.ratio.unwrap()).abs() <= 1e-12 * a.ratio.unwrap());
    }
}

#[test]
fn big_mean_rejects_oversized_pieces() {
    let u = grid(1, 2);
    let region = Region::new((0.5, 1.0), vec![(0.0, 0.5)]).unwrap();
    let cover = vec![Region::new((0.25, 1.0), vec![(0.0, 1.0)]).unwrap()];
    assert!(big_mean_witness(&u, &region, &cover, 1.0).is_err());
    assert!(big_mean_witness(&u, &region, &cover, 3.0).unwrap().holds);
    assert!(big_mean_witness(&u, &region, &[], 3.0).is_err());
}

#[test]
fn equivalence_cases_are_deterministic_and_bounded() {
    let settings = EquivalenceSettings::default();
    for seed in 0..6 {
        let a = equivalence_case(seed, 4, 2.0, 2.0, &settings).unwrap();
        let b = equivalence_case(seed, 4, 2.0, 2.0, &settings).unwrap();
        assert_eq!(a, b);
        for cmp in [&a.nt, &a.nt_refined, &a.carleson, &a.carleson_refined, &a.carleson_dense] {
            let r = cmp.ratio.unwrap();
            assert!(r.is_finite() && r > 0.05 && r < 20.0, "{r}");
        }
        assert!(a.carleson.continuum <= a.carleson_dense.continuum * (1.0 + 1e-13));
    }
}

#[test]
fn tent_check_requires_large_exponent() {
    let g = grid(2, 3);
    let family = test_cube_family(g.tree(), 1).unwrap();
    let geo = GeometryConfig::default();
    assert!(tent_space_check(&g, 2.0, &family, &geo).is_err());
    let zero = GridFunction::zeros(*g.tree(), 2).unwrap();
    assert!(tent_space_check(&zero, 4.0, &family, &geo).unwrap().ratio.is_none());
    let delta = FieldSpec::Delta(DyadicCube::new(2, vec![1]))
        .grid_function(*g.tree(), 2, 0)
        .unwrap();
    let report = tent_space_check(&delta, 4.0, &family, &geo).unwrap();
    assert!(report.ratio.unwrap() > 0.0);
}

#[test]
fn envelope_and_relative_change() {
    let settings = EquivalenceSettings::default();
    let cases: Vec<_> = (0..4).map(|s| equivalence_case(s, 4, 1.0, 2.0, &settings).unwrap()).collect();
    let (lo, hi) = envelope(cases.iter().map(|c| &c.nt)).unwrap();
    assert!(lo <= hi);
    for c in &cases {
        let r = c.nt.ratio.unwrap();
        assert!(lo <= r && r <= hi);
        assert!(relative_change(&c.nt, &c.nt).unwrap() == 0.0);
    }
    assert!(envelope(std::iter::empty()).is_none());
}
