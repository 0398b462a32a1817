//! Seeded test families. Each member is drawn at a fixed base resolution and
//! refined, so a family is the same function at every `N ≥ BASE_LEVEL`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walshlab_core::experiments::{rademacher_sum, spike};
use walshlab_core::{DyadicInterval, Resolution, Signal};

/// Bumped whenever a family changes, so stored reports stay comparable.
pub const FAMILY_VERSION: u32 = 1;

/// Resolution at which random members are drawn.
pub const BASE_LEVEL: u32 = 8;

pub type Family = Vec<(String, Signal)>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform noise plus a few tall bumps on small dyadic intervals, so that
/// stopping families are nonempty.
pub fn spiky_signal(res: Resolution, rng: &mut ChaCha8Rng) -> Signal {
    let mut f = Signal::from_fn(res, |_| rng.gen_range(-1.0..1.0));
    let bumps = rng.gen_range(1..=4);
    for _ in 0..bumps {
        let level = rng.gen_range(2..=res.level());
        let index = rng.gen_range(0..1usize << level);
        let height = rng.gen_range(5.0..60.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let bump = DyadicInterval::new(level, index).expect("level within resolution");
        f.add_assign(&Signal::indicator(res, &bump, height).expect("inside"))
            .expect("same resolution");
    }
    f
}

fn base(res: Resolution) -> Resolution {
    Resolution::new(BASE_LEVEL.min(res.level())).expect("valid level")
}

fn refined(f: Signal, res: Resolution) -> Signal {
    f.refine(res).expect("refining to a finer resolution")
}

/// Random members drawn at the base resolution.
pub fn random_members(res: Resolution, seed: u64, count: usize, mean_zero: bool) -> Family {
    let b = base(res);
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let mut f = spiky_signal(b, &mut rng);
            if mean_zero {
                let m = f.integral();
                f = f.map(|v| v - m);
            }
            (format!("random-{seed}-{i}"), refined(f, res))
        })
        .collect()
}

/// Spikes `2^n 1_{[0,2^{-n})}`, Rademacher sums with seeded signs and
/// random members, all defined at the base resolution.
pub fn standard_family(res: Resolution, seed: u64, random: usize) -> Family {
    let b = base(res);
    let mut out: Family = Vec::new();
    for n in 0..=b.level() {
        out.push((
            format!("spike-{n}"),
            refined(spike(b, n).expect("n ≤ level"), res),
        ));
    }
    let mut r = rng(seed ^ 0x5eed);
    for n in 1..=b.level() {
        let signs: u64 = r.gen();
        out.push((
            format!("rademacher-{n}"),
            refined(rademacher_sum(b, n, signs).expect("n ≤ level"), res),
        ));
    }
    out.extend(random_members(res, seed, random, false));
    out
}

/// Mean-zero members: Rademacher sums and centred random signals.
pub fn mean_zero_family(res: Resolution, seed: u64, random: usize) -> Family {
    let b = base(res);
    let mut out: Family = Vec::new();
    let mut r = rng(seed ^ 0x5eed);
    for n in 1..=b.level() {
        let signs: u64 = r.gen();
        out.push((
            format!("rademacher-{n}"),
            refined(rademacher_sum(b, n, signs).expect("n ≤ level"), res),
        ));
    }
    out.extend(random_members(res, seed, random, true));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_resolution_independent() {
        let a = standard_family(Resolution::new(8).unwrap(), 3, 4);
        let b = standard_family(Resolution::new(10).unwrap(), 3, 4);
        assert_eq!(a.len(), b.len());
        for ((na, fa), (nb, fb)) in a.iter().zip(&b) {
            assert_eq!(na, nb);
            assert_eq!(&fa.refine(fb.resolution()).unwrap(), fb);
        }
    }

    #[test]
    fn mean_zero_members_are_centred() {
        for (_, f) in mean_zero_family(Resolution::new(9).unwrap(), 1, 5) {
            assert!(f.integral().abs() < 1e-12);
        }
    }
}
