use ergoblock::core1d::{profile, word_from_index, Alphabet, Block};
use ergoblock::decompose::decompose_window;
use ergoblock::density::{lower_estimate, lower_estimate_2d, upper_estimate, CoordinateSet, PointSet2D};
use ergoblock::grid2d::{
    barycenter_2d, concatenation_correction_2d, core, d_star_2d_exact, invariance_defect, modification_distance,
    profile2d, rect_shape, tiles_in_window, GridTilingSystem, MeasureSpec2D, Pattern, Point, Rect, Shape,
};
use ergoblock::metric::{d_star_exact, MeasureSpec};
use ergoblock::rational::{int, ratio, Rational};
use ergoblock::reference::{naive_frequency, naive_greedy, naive_profile2d_counts};
use ergoblock::{frequency, Region};
use num::{One, Signed, Zero};
use proptest::prelude::*;

fn block(q: u16, max: usize) -> impl Strategy<Value = Block> {
    prop::collection::vec(0..q, 1..=max).prop_map(move |data| {
        let labels: Vec<String> = (0..q).map(|i| i.to_string()).collect();
        Block::new(Alphabet::new(labels).unwrap(), data).unwrap()
    })
}

fn shape(max_side: i64) -> impl Strategy<Value = Shape> {
    prop::collection::btree_set((0..max_side, 0..max_side), 1..=(max_side * max_side) as usize)
        .prop_map(|pts| Shape::new(pts.into_iter().map(|(x, y)| Point::new(x, y))))
}

fn small_set() -> impl Strategy<Value = Shape> {
    prop::collection::btree_set((-2i64..=2, -2i64..=2), 1..=4)
        .prop_map(|pts| Shape::new(pts.into_iter().map(|(x, y)| Point::new(x, y))))
}

fn field(side: usize) -> impl Strategy<Value = Pattern> {
    prop::collection::vec(0u16..2, side * side)
        .prop_map(move |v| Pattern::from_rect(Alphabet::binary(), Rect::square(0, 0, side), v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn d_star_symmetric_and_triangle(a in block(2, 120), b in block(2, 120), c in block(2, 120)) {
        let depth = 5;
        let (pa, pb, pc) = (profile(&a, depth).unwrap(), profile(&b, depth).unwrap(), profile(&c, depth).unwrap());
        let ab = d_star_exact(&pa, &pb, depth).unwrap();
        prop_assert_eq!(&ab, &d_star_exact(&pb, &pa, depth).unwrap());
        let ac = d_star_exact(&pa, &pc, depth).unwrap();
        let bc = d_star_exact(&pb, &pc, depth).unwrap();
        prop_assert!(ac <= ab + bc);
        prop_assert!(d_star_exact(&pa, &pa, depth).unwrap().is_zero());
    }

    #[test]
    fn frequencies_sum_to_covered_fraction(b in block(3, 80), len in 1usize..5) {
        let q = 3usize;
        let total: Rational = (0..q.pow(len as u32))
            .map(|i| {
                let w = Block::new(b.alphabet().clone(), word_from_index(i, len, q)).unwrap();
                frequency(&b, &w).unwrap()
            })
            .sum();
        let covered = b.len().saturating_sub(len - 1) as u64;
        prop_assert_eq!(total, ratio(covered, b.len() as u64));
    }

    #[test]
    fn frequency_matches_naive(b in block(2, 60), w in prop::collection::vec(0u16..2, 1..4)) {
        let word = Block::new(b.alphabet().clone(), w.clone()).unwrap();
        prop_assert_eq!(frequency(&b, &word).unwrap(), naive_frequency(b.symbols(), &w));
    }

    #[test]
    fn density_identities(
        a in prop::collection::btree_set(0usize..160, 0..160),
        b in prop::collection::btree_set(0usize..160, 0..160),
        lo in 0usize..40,
        size in 1usize..120,
        h in 1usize..120,
    ) {
        let h = h.min(size);
        let window = lo..lo + size;
        let a = CoordinateSet::from_unsorted(a.into_iter().collect());
        let b = CoordinateSet::from_unsorted(b.into_iter().collect());
        let ab = a.union(&b);
        let up = |s: &CoordinateSet| upper_estimate(s, h, window.clone()).unwrap().value;
        let low = |s: &CoordinateSet| lower_estimate(s, h, window.clone()).unwrap().value;
        prop_assert_eq!(up(&a) + low(&a.complement(window.clone())), Rational::one());
        prop_assert!(up(&ab) <= up(&a) + up(&b));
        prop_assert!(up(&a) <= up(&ab));
        prop_assert!(low(&a) <= low(&ab));
        prop_assert!(low(&a) <= up(&a));
    }

    #[test]
    fn greedy_matches_brute_force(
        x in block(2, 120),
        m in 1usize..10,
        extra in prop::option::of(0usize..20),
        lo in 0u64..=10,
        width in 0u64..=10,
        min_length in 1usize..5,
    ) {
        let hi = (lo + width).min(10);
        let r = Region::frequency_window("0", ratio(lo, 10), ratio(hi, 10), min_length).unwrap();
        let n = extra.map(|e| m + e);
        let fast = decompose_window(&x, 0..x.len(), m, n, &r).unwrap();
        fast.validate().unwrap();
        prop_assert_eq!(fast.segments, naive_greedy(&x, m, n, &r).unwrap());
    }

    #[test]
    fn invariance_of_sets_and_points(f in shape(7), k in small_set()) {
        // |F △ KF| / |F| is at most the sum of the single-point defects, and
        // each single-point defect is at most twice the set defect.
        let dk = invariance_defect(&f, &k).unwrap();
        let singles: Vec<Rational> = k
            .points()
            .iter()
            .map(|&g| invariance_defect(&f, &Shape::new([g])).unwrap())
            .collect();
        let sum: Rational = singles.iter().cloned().sum();
        prop_assert!(dk <= sum);
        for d in &singles {
            prop_assert!(*d <= &dk * int(2));
        }
    }

    #[test]
    fn core_fraction_bound(f in shape(8), k in small_set()) {
        let defect = invariance_defect(&f, &k).unwrap();
        let kept = ratio(core(&f, &k).len() as u64, f.len() as u64);
        let floor = Rational::one() - &defect * int(k.len() as i64);
        if defect.is_zero() {
            prop_assert!(kept >= floor);
        } else {
            prop_assert!(kept > floor);
        }
    }

    #[test]
    fn modification_moves_frequencies_little(x in field(12), f in shape(10), h in shape(10), l in 1usize..6) {
        let pf = profile2d(&x.restrict(&f).unwrap(), l).unwrap();
        let ph = profile2d(&x.restrict(&h).unwrap(), l).unwrap();
        let diff: Rational = pf
            .counts(l)
            .iter()
            .zip(ph.counts(l))
            .map(|(&a, &b)| (ratio(a, f.len() as u64) - ratio(b, h.len() as u64)).abs())
            .sum();
        let (w, hgt) = rect_shape(l);
        let bound = modification_distance(&h, &f).unwrap() * int((w * hgt + 1) as i64);
        prop_assert!(diff <= bound);
        let eps = modification_distance(&h, &f).unwrap();
        if !eps.is_zero() {
            prop_assert!(d_star_2d_exact(&pf, &ph, l).unwrap() < eps);
        }
    }

    #[test]
    fn profile2d_matches_naive(x in field(9), sub in shape(9), l in 1usize..7) {
        let p = x.restrict(&sub).unwrap();
        let prof = profile2d(&p, l).unwrap();
        let naive = naive_profile2d_counts(&p, l);
        prop_assert_eq!(prof.counts(l), naive.as_slice());
    }

    #[test]
    fn tiled_coverage_gives_lower_density(
        mask in prop::collection::vec(any::<bool>(), 32 * 32),
        eps_tenths in 1u64..8,
        c in 2usize..4,
    ) {
        // Tiles of side 4; a window of side c * 4 always holds (c - 1)^2 whole tiles.
        let sys = GridTilingSystem::default();
        let bounds = Rect::square(0, 0, 32);
        let mut set = PointSet2D::empty(bounds);
        for (i, &keep) in mask.iter().enumerate() {
            if keep {
                set.insert((i % 32) as i64, (i / 32) as i64);
            }
        }
        let eps = ratio(eps_tenths, 10);
        for t in tiles_in_window(&sys, 2, bounds) {
            let r = t.rect(&sys);
            let have = r.points().filter(|p| set.contains(p.x, p.y)).count();
            let needed: usize = ((Rational::one() - &eps) * int(16)).ceil().to_integer().try_into().unwrap();
            let missing: Vec<Point> = r.points().filter(|p| !set.contains(p.x, p.y)).collect();
            for p in missing.into_iter().take(needed.saturating_sub(have)) {
                set.insert(p.x, p.y);
            }
            let now = r.points().filter(|p| set.contains(p.x, p.y)).count();
            prop_assert!(ratio(now as u64, 16) >= Rational::one() - &eps);
        }
        let lower = lower_estimate_2d(&set, 4 * c, bounds).unwrap().value;
        let bound = ratio(((c - 1) * (c - 1)) as u64, (c * c) as u64) * (Rational::one() - eps);
        prop_assert!(lower >= bound);
    }

    #[test]
    fn planar_concatenation_bound(
        x in field(12),
        split in 2i64..10,
        p0 in 0u64..=4,
        p1 in 0u64..=4,
    ) {
        let depth = 4;
        let left = Rect::new(0, 0, split as usize, 12).to_shape();
        let right = Rect::new(split, 0, 12 - split as usize, 12).to_shape();
        let specs = [
            MeasureSpec2D::product(Alphabet::binary(), &[ratio(p0, 4), ratio(4 - p0, 4)], depth).unwrap(),
            MeasureSpec2D::product(Alphabet::binary(), &[ratio(p1, 4), ratio(4 - p1, 4)], depth).unwrap(),
        ];
        let parts = [left, right];
        let weights: Vec<Rational> = parts.iter().map(|s| ratio(s.len() as u64, 144)).collect();
        let mut rhs = concatenation_correction_2d(&parts, depth).unwrap();
        for ((part, spec), w) in parts.iter().zip(&specs).zip(&weights) {
            let prof = profile2d(&x.restrict(part).unwrap(), depth).unwrap();
            rhs += w * d_star_2d_exact(&prof, spec, depth).unwrap();
        }
        let mix = barycenter_2d(&weights, &specs).unwrap();
        let lhs = d_star_2d_exact(&profile2d(&x, depth).unwrap(), &mix, depth).unwrap();
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn one_dimensional_concatenation_bound(a in block(2, 80), b in block(2, 80), p in 0u64..=4, s in 0u64..=4) {
        let depth = 5;
        let joined = ergoblock::concat(&[a.clone(), b.clone()]).unwrap();
        let specs = [
            MeasureSpec::bernoulli_binary(ratio(p, 4), depth).unwrap(),
            MeasureSpec::bernoulli_binary(ratio(s, 4), depth).unwrap(),
        ];
        let total = joined.len() as u64;
        let weights = [ratio(a.len() as u64, total), ratio(b.len() as u64, total)];
        let mix = ergoblock::metric::barycenter(&weights, &specs).unwrap();
        let lhs = d_star_exact(&profile(&joined, depth).unwrap(), &mix, depth).unwrap();
        let rhs = &weights[0] * d_star_exact(&profile(&a, depth).unwrap(), &specs[0], depth).unwrap()
            + &weights[1] * d_star_exact(&profile(&b, depth).unwrap(), &specs[1], depth).unwrap()
            + ergoblock::metric::concatenation_correction(&[a.len(), b.len()]).unwrap();
        prop_assert!(lhs <= rhs);
    }
}
