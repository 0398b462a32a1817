use proptest::prelude::*;
use walshlab_core::dyadic::IntervalTable;
use walshlab_core::haar::{haar_forward, haar_inverse};
use walshlab_core::multiplier::tile_partition;
use walshlab_core::orlicz::luxemburg;
use walshlab_core::sparse::{check_sparseness, stopping_family, AverageKind};
use walshlab_core::walsh::{walsh_forward, walsh_inverse};
use walshlab_core::{
    DyadicInterval, FrequencyInterval, MultiplierSymbol, OrliczFunction, Resolution, Signal,
};

fn signal(max_level: u32) -> impl Strategy<Value = Signal> {
    (1..=max_level).prop_flat_map(|n| {
        prop::collection::vec(-100.0..100.0f64, 1usize << n)
            .prop_map(move |v| Signal::new(Resolution::new(n).unwrap(), v).unwrap())
    })
}

/// A signal with a tall bump, so stopping families are usually nonempty.
fn spiky(level: u32) -> impl Strategy<Value = Signal> {
    let cells = 1usize << level;
    (
        prop::collection::vec(-1.0..1.0f64, cells),
        0..cells,
        1..=level,
        5.0..80.0f64,
    )
        .prop_map(move |(mut v, at, width_level, h)| {
            let width = cells >> width_level;
            let start = (at / width.max(1)) * width.max(1);
            for x in &mut v[start..start + width.max(1)] {
                *x += h;
            }
            Signal::new(Resolution::new(level).unwrap(), v).unwrap()
        })
}

fn frequency_pieces(cells: usize) -> impl Strategy<Value = Vec<(FrequencyInterval, f64)>> {
    prop::collection::btree_set(0..=cells, 2..12).prop_map(|cuts| {
        let cuts: Vec<usize> = cuts.into_iter().collect();
        cuts.chunks_exact(2)
            .map(|c| (FrequencyInterval::new(c[0], c[1]).unwrap(), 1.0))
            .collect()
    })
}

proptest! {
    #[test]
    fn walsh_round_trip_and_parseval(f in signal(10)) {
        let norm = f.norm2().max(1e-300);
        let spec = walsh_forward(&f);
        prop_assert!((spec.energy().sqrt() - f.norm2()).abs() <= 1e-12 * norm);
        let back = walsh_inverse(&spec);
        prop_assert!(back.sub(&f).unwrap().norm2() <= 1e-12 * norm);
    }

    #[test]
    fn haar_round_trip_and_parseval(f in signal(10)) {
        let norm = f.norm2().max(1e-300);
        let h = haar_forward(&f);
        prop_assert!((h.energy().sqrt() - f.norm2()).abs() <= 1e-12 * norm);
        prop_assert!((h.mean() - f.integral()).abs() <= 1e-12 * norm);
        prop_assert!(haar_inverse(&h).sub(&f).unwrap().norm2() <= 1e-12 * norm);
    }

    #[test]
    fn lp_averages_increase_with_p(f in signal(7), p in 1.0..6.0f64, dp in 0.0..4.0f64) {
        for interval in f.resolution().intervals().take(15) {
            let lo = f.average(&interval, p).unwrap();
            let hi = f.average(&interval, p + dp).unwrap();
            prop_assert!(lo <= hi * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn luxemburg_is_homogeneous(f in signal(6), c in 0.01..50.0f64) {
        let unit = DyadicInterval::unit();
        for psi in [OrliczFunction::Psi2, OrliczFunction::ExpL2] {
            let a = luxemburg(&f, &unit, psi).unwrap();
            let b = luxemburg(&f.map(|v| -c * v), &unit, psi).unwrap();
            prop_assert!((b - c * a).abs() <= 1e-8 * (c * a).max(1e-12));
        }
    }

    #[test]
    fn multipliers_are_linear(f in signal(8), pieces in frequency_pieces(64)) {
        let res = f.resolution();
        prop_assume!(res.cells() >= 64);
        let m = MultiplierSymbol::new(pieces).unwrap();
        let g = f.map(|v| v.sin());
        let lhs = m.apply(&f.add(&g.map(|v| 3.0 * v)).unwrap()).unwrap();
        let rhs = m.apply(&f).unwrap().add(&m.apply(&g).unwrap().map(|v| 3.0 * v)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-9 * (1.0 + f.sup_norm()));
        // Indicator symbols are orthogonal projections.
        let tf = m.apply(&f).unwrap();
        prop_assert!(m.apply(&tf).unwrap().max_abs_diff(&tf).unwrap() <= 1e-9 * (1.0 + f.sup_norm()));
    }

    #[test]
    fn jump_tiles_are_few(pieces in frequency_pieces(256), level in 0..=8u32, index in 0usize..256) {
        let res = Resolution::new(8).unwrap();
        let interval = DyadicInterval::new(level, index % (1usize << level)).unwrap();
        let part = tile_partition(&pieces, &interval, res).unwrap();
        prop_assert_eq!(part.jump.len() + part.clean.len(), interval.cell_count(res).unwrap());
        // Each interval of the representation has two endpoints.
        prop_assert!(part.jump.len() <= 2 * pieces.len());
    }

    #[test]
    fn stopping_family_is_maximal(f in spiky(8), threshold in 1.5..6.0f64) {
        let root = DyadicInterval::unit();
        let tables: Vec<IntervalTable<f64>> = [AverageKind::Psi2, AverageKind::Lp(1.5)]
            .iter()
            .map(|k| k.table(&f).unwrap())
            .collect();
        let refs: Vec<&IntervalTable<f64>> = tables.iter().collect();
        let family = stopping_family(&refs, &root, threshold).unwrap();
        let exceeds = |i: &DyadicInterval| {
            tables.iter().any(|t| *t.get(i).unwrap() > threshold * *t.get(&root).unwrap())
        };
        let members = family.intervals();
        for (k, a) in members.iter().enumerate() {
            prop_assert!(root.strictly_contains(a));
            prop_assert!(exceeds(a));
            for b in &members[k + 1..] {
                prop_assert!(!a.intersects(b));
            }
        }
        for i in f.resolution().intervals().filter(|i| root.strictly_contains(i)) {
            let covered = members.iter().any(|m| m.contains(&i));
            if exceeds(&i) {
                prop_assert!(covered, "{:?} exceeds but is not covered", i);
            }
            if members.iter().any(|m| i.strictly_contains(m)) {
                prop_assert!(!exceeds(&i), "{:?} is a non-maximal ancestor", i);
            }
        }
        let report = check_sparseness(members, 0.5);
        prop_assert!(report.margins.iter().all(|(_, m)| (0.0..=1.0).contains(m)));
    }
}
