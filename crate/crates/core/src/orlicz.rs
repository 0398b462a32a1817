//! Local Luxemburg norms for `L(log L)^{1/2}` and `exp(L^2)`.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::dyadic::{DyadicInterval, Signal};
use crate::error::Result;

/// Relative stopping tolerance of the Luxemburg bisection.
pub const LUXEMBURG_TOL: f64 = 1e-10;
const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrliczFunction {
    /// `ψ₂(x) = |x| (log(2 + |x|))^{1/2}`.
    Psi2,
    /// `e^{x^2} - 1`.
    ExpL2,
}

impl OrliczFunction {
    pub fn eval(self, x: f64) -> f64 {
        let x = x.abs();
        match self {
            OrliczFunction::Psi2 => x * (2.0 + x).ln().sqrt(),
            OrliczFunction::ExpL2 => (x * x).exp_m1(),
        }
    }

    /// The `x > 0` with `ψ(x) = 1`.
    pub fn inverse_at_one(self) -> f64 {
        match self {
            OrliczFunction::ExpL2 => core::f64::consts::LN_2.sqrt(),
            OrliczFunction::Psi2 => {
                // ψ₂(1) = √ln 3 > 1 and ψ₂(1/2) < 1.
                let (mut lo, mut hi) = (0.5, 1.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid) > 1.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }
}

/// `inf{λ > 0 : |I|^{-1} ∫_I ψ(|f|/λ) ≤ 1}`; zero when `f` vanishes on `I`.
pub fn luxemburg(f: &Signal, interval: &DyadicInterval, psi: OrliczFunction) -> Result<f64> {
    let cells = interval.cells(f.resolution())?;
    Ok(luxemburg_slice(&f.values()[cells], psi))
}

/// Luxemburg norm of the values with respect to normalized counting measure.
pub fn luxemburg_slice(values: &[f64], psi: OrliczFunction) -> f64 {
    let count = values.len() as f64;
    let sup = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if sup == 0.0 {
        return 0.0;
    }
    let mean = values.iter().map(|v| v.abs()).sum::<f64>() / count;
    let modular = |lambda: f64| values.iter().map(|v| psi.eval(v / lambda)).sum::<f64>() / count;
    let at_one = psi.inverse_at_one();
    // Jensen gives the lower end, ψ(‖f‖_∞/λ) ≤ 1 the upper one. Both are
    // widened so that rounding in ψ^{-1}(1) cannot leave the root outside.
    let mut lo = mean / at_one;
    let mut hi = sup / at_one;
    while modular(lo) <= 1.0 {
        lo *= 0.5;
    }
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    for _ in 0..MAX_ITER {
        if hi / lo - 1.0 <= LUXEMBURG_TOL {
            break;
        }
        let mid = (lo * hi).sqrt();
        // An overflowing modular is +inf, which correctly counts as > 1.
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Largest `p` used for the supremum over `L^p` averages.
pub const P_MAX: f64 = 64.0;
/// Number of grid points for each side of the comparison.
pub const GRID_POINTS: usize = 40;

/// Moment characterizations of the two Orlicz averages compared with the
/// Luxemburg values.
#[derive(Debug, Clone, PartialEq)]
pub struct SupInfReport {
    /// `sup_{1<p≤P_MAX} p^{-1/2} ⟨f⟩_{I,p}` on the grid.
    pub sup_moment: f64,
    /// Exponent attaining `sup_moment`.
    pub sup_at: f64,
    /// `inf_{1<q≤2} (q-1)^{-1/2} ⟨f⟩_{I,q}` on the grid.
    pub inf_moment: f64,
    pub inf_at: f64,
    pub exp_l2: f64,
    pub psi2: f64,
    /// `exp_l2 / sup_moment`.
    pub exp_ratio: f64,
    /// `psi2 / inf_moment`.
    pub psi_ratio: f64,
}

pub fn p_grid() -> Vec<f64> {
    (1..=GRID_POINTS)
        .map(|i| P_MAX.powf(i as f64 / GRID_POINTS as f64))
        .collect()
}

/// `q - 1` log-spaced over `[10^{-3}, 1]`.
pub fn q_grid() -> Vec<f64> {
    (0..GRID_POINTS)
        .map(|i| 1.0 + 10f64.powf(-3.0 + 3.0 * i as f64 / (GRID_POINTS - 1) as f64))
        .collect()
}

pub fn supinf_comparison(f: &Signal, interval: &DyadicInterval) -> Result<SupInfReport> {
    let mut sup = (0.0f64, f64::NAN);
    for p in p_grid() {
        let v = f.average(interval, p)? / p.sqrt();
        if v > sup.0 || sup.1.is_nan() {
            sup = (v, p);
        }
    }
    let mut inf = (f64::INFINITY, f64::NAN);
    for q in q_grid() {
        let v = f.average(interval, q)? / (q - 1.0).sqrt();
        if v < inf.0 {
            inf = (v, q);
        }
    }
    let exp_l2 = luxemburg(f, interval, OrliczFunction::ExpL2)?;
    let psi2 = luxemburg(f, interval, OrliczFunction::Psi2)?;
    Ok(SupInfReport {
        sup_moment: sup.0,
        sup_at: sup.1,
        inf_moment: inf.0,
        inf_at: inf.1,
        exp_l2,
        psi2,
        exp_ratio: ratio(exp_l2, sup.0),
        psi_ratio: ratio(psi2, inf.0),
    })
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else {
        a / b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Resolution;
    use crate::walsh::walsh_function;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn res(n: u32) -> Resolution {
        Resolution::new(n).unwrap()
    }

    fn random(r: Resolution, seed: u64) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Signal::from_fn(r, |_| {
            rng.gen_range(-3.0..3.0) * rng.gen_range(0.0f64..1.0).powi(3)
        })
    }

    #[test]
    fn inverse_at_one() {
        for psi in [OrliczFunction::Psi2, OrliczFunction::ExpL2] {
            assert!((psi.eval(psi.inverse_at_one()) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constants() {
        let r = res(5);
        for psi in [OrliczFunction::Psi2, OrliczFunction::ExpL2] {
            let f = Signal::constant(r, -2.5);
            let v = luxemburg(&f, &DyadicInterval::unit(), psi).unwrap();
            let expected = 2.5 / psi.inverse_at_one();
            assert!((v / expected - 1.0).abs() < 2e-10);
        }
        assert_eq!(
            luxemburg(
                &Signal::zeros(r),
                &DyadicInterval::unit(),
                OrliczFunction::Psi2
            )
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn indicator_solves_scalar_equation() {
        let r = res(8);
        for n in [1u32, 3, 6] {
            let delta = 0.5f64.powi(n as i32);
            let f = Signal::indicator(r, &DyadicInterval::new(n, 0).unwrap(), 1.0).unwrap();
            let v = luxemburg(&f, &DyadicInterval::unit(), OrliczFunction::Psi2).unwrap();
            // Independent oracle: plain bisection on δ ψ₂(1/λ) = 1.
            let g = |l: f64| delta * (1.0 / l) * (2.0 + 1.0 / l).ln().sqrt() - 1.0;
            let (mut lo, mut hi) = (1e-9, 10.0);
            for _ in 0..300 {
                let mid = 0.5 * (lo + hi);
                if g(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((v / lo - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn homogeneous_and_monotone() {
        let r = res(8);
        for seed in 0..10 {
            let f = random(r, seed);
            for psi in [OrliczFunction::Psi2, OrliczFunction::ExpL2] {
                let a = luxemburg(&f, &DyadicInterval::unit(), psi).unwrap();
                let b = luxemburg(&f.scale(-3.5), &DyadicInterval::unit(), psi).unwrap();
                assert!((b / (3.5 * a) - 1.0).abs() < 1e-9);
                let doubled = f.map(|x| 2.0 * x + x.signum() * 0.1);
                let c = luxemburg(&doubled, &DyadicInterval::unit(), psi).unwrap();
                assert!(c >= 2.0 * a * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn psi2_dominates_scaled_l1() {
        let r = res(9);
        let scale = core::f64::consts::LN_2.sqrt();
        for seed in 0..20 {
            let f = random(r, 100 + seed);
            for interval in [DyadicInterval::unit(), DyadicInterval::new(3, 5).unwrap()] {
                let l1 = f.average(&interval, 1.0).unwrap();
                let psi = luxemburg(&f, &interval, OrliczFunction::Psi2).unwrap();
                assert!(psi >= scale * l1 * (1.0 - 1e-9));
                let l2 = f.average(&interval, 2.0).unwrap();
                assert!(psi <= 2.0 * l2);
            }
        }
    }

    #[test]
    fn huge_values_do_not_break_exp_l2() {
        let r = res(6);
        let f = Signal::from_fn(r, |i| if i == 0 { 1e6 } else { 1.0 });
        let v = luxemburg(&f, &DyadicInterval::unit(), OrliczFunction::ExpL2).unwrap();
        assert!(v.is_finite() && v > 1.0);
    }

    #[test]
    fn constant_comparison() {
        let r = res(6);
        let rep = supinf_comparison(&Signal::constant(r, 1.0), &DyadicInterval::unit()).unwrap();
        assert!(rep.exp_ratio > 0.25 && rep.exp_ratio < 4.0);
        assert!(rep.psi_ratio > 0.25 && rep.psi_ratio < 4.0);
    }

    #[test]
    fn rademacher_sums_grow_like_sqrt_n() {
        for n in [4u32, 8, 12] {
            let r = res(n);
            let mut f = Signal::zeros(r);
            for k in 0..n {
                f.add_assign(&walsh_function(r, 1 << k).unwrap()).unwrap();
            }
            let rep = supinf_comparison(&f, &DyadicInterval::unit()).unwrap();
            let norm = rep.exp_l2 / (n as f64).sqrt();
            assert!(norm > 0.25 && norm < 4.0, "n={n}: {norm}");
            assert!(rep.exp_ratio > 1.0 / 16.0 && rep.exp_ratio < 16.0);
        }
    }

    #[test]
    fn random_comparison_within_sixteen() {
        let r = res(8);
        for seed in 0..20 {
            let f = random(r, 200 + seed);
            let rep = supinf_comparison(&f, &DyadicInterval::unit()).unwrap();
            for v in [rep.exp_ratio, rep.psi_ratio] {
                assert!(v > 1.0 / 16.0 && v < 16.0, "{rep:?}");
            }
        }
    }
}
