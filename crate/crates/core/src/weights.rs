//! Dyadic Muckenhoupt characteristics and weighted norm-ratio scans.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::dyadic::{interval_sums, DyadicInterval, IntervalTable, Resolution, Signal};
use crate::error::{Error, Result};
use crate::multiplier::MultiplierSymbol;
use crate::square::s_lambda;

/// A strictly positive signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight(Signal);

impl Weight {
    pub fn new(w: Signal) -> Result<Self> {
        if let Some(v) = w.values().iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "weight value {v} is not positive"
            )));
        }
        Ok(Weight(w))
    }

    /// `w(x) = x_c^α` with `x_c` the midpoint of the cell containing `x`.
    pub fn power(res: Resolution, alpha: f64) -> Self {
        let h = res.cell_width();
        Weight(Signal::from_fn(res, |i| ((i as f64 + 0.5) * h).powf(alpha)))
    }

    pub fn signal(&self) -> &Signal {
        &self.0
    }

    pub fn resolution(&self) -> Resolution {
        self.0.resolution()
    }

    /// `w^s`, again a weight.
    pub fn pow(&self, s: f64) -> Weight {
        Weight(self.0.map(|v| v.powf(s)))
    }

    fn means(&self) -> IntervalTable<f64> {
        means_of(&self.0)
    }
}

fn means_of(f: &Signal) -> IntervalTable<f64> {
    let res = f.resolution();
    let sums = interval_sums(res, f.values());
    IntervalTable::from_fn(res, |i| {
        sums[&i] / i.cell_count(res).expect("interval from the table") as f64
    })
}

fn sup_over<F: Fn(DyadicInterval) -> f64>(res: Resolution, f: F) -> (f64, DyadicInterval) {
    res.intervals()
        .map(|i| (f(i), i))
        .fold((f64::NEG_INFINITY, DyadicInterval::unit()), |a, b| {
            if b.0 > a.0 {
                b
            } else {
                a
            }
        })
}

fn check_above_one(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `sup_I ⟨w⟩_I ⟨w^{1-p'}⟩_I^{p-1}` over dyadic `I`.
pub fn ap_characteristic(w: &Weight, p: f64) -> Result<f64> {
    check_above_one(p)?;
    let dual = w.pow(-1.0 / (p - 1.0));
    let (a, b) = (w.means(), dual.means());
    Ok(sup_over(w.resolution(), |i| a[&i] * b[&i].powf(p - 1.0)).0)
}

/// `sup_I ⟨w⟩_I / inf_I w`.
pub fn a1_characteristic(w: &Weight) -> f64 {
    let res = w.resolution();
    let means = w.means();
    let mins = minima(w.signal());
    sup_over(res, |i| means[&i] / mins[&i]).0
}

fn minima(f: &Signal) -> IntervalTable<f64> {
    let res = f.resolution();
    IntervalTable::from_fn(res, |i| {
        let cells = i.cells(res).expect("interval from the table");
        f.values()[cells]
            .iter()
            .fold(f64::INFINITY, |a, v| a.min(*v))
    })
}

/// `sup_I ⟨w⟩_{I,q} / ⟨w⟩_I`.
pub fn rh_characteristic(w: &Weight, q: f64) -> Result<f64> {
    check_above_one(q)?;
    let high = means_of(&w.pow(q).0);
    let means = w.means();
    Ok(sup_over(w.resolution(), |i| high[&i].powf(1.0 / q) / means[&i]).0)
}

/// Operators whose weighted bounds are scanned.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightedOperator {
    SLambda(usize),
    Multiplier(MultiplierSymbol),
}

impl WeightedOperator {
    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        match self {
            WeightedOperator::SLambda(lambda) => s_lambda(f, *lambda),
            WeightedOperator::Multiplier(m) => m.apply(f),
        }
    }

    /// Exponent `e` in the ceiling `C [w]_{A_p}^e`.
    pub fn ceiling_exponent(&self, p: f64) -> f64 {
        match self {
            WeightedOperator::Multiplier(_) => 1.5 * (1.0 / (p - 1.0)).max(1.0),
            WeightedOperator::SLambda(_) => (1.5 / (p - 1.0)).max(1.0),
        }
    }

    pub fn name(&self) -> String {
        match self {
            WeightedOperator::SLambda(l) => format!("S_{l}"),
            WeightedOperator::Multiplier(_) => String::from("T_m"),
        }
    }
}

/// `(∫ |f|^p w)^{1/p}`.
pub fn weighted_norm(f: &Signal, w: &Weight, p: f64) -> Result<f64> {
    f.resolution().check_same(w.resolution())?;
    let h = f.resolution().cell_width();
    let s: f64 = f
        .values()
        .iter()
        .zip(w.signal().values())
        .map(|(a, b)| a.abs().powf(p) * b)
        .sum();
    Ok((s * h).powf(1.0 / p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRatioReport {
    pub operator: String,
    pub p: f64,
    pub characteristic: f64,
    /// `max_f ‖op f‖_{L^p(w)} / ‖f‖_{L^p(w)}` over the family.
    pub max_ratio: f64,
    /// Name of the family member attaining `max_ratio`.
    pub argmax: String,
    pub ceiling_exponent: f64,
    /// `[w]^{ceiling_exponent}`, without the constant.
    pub predicted: f64,
}

pub fn weighted_norm_ratio(
    op: &WeightedOperator,
    w: &Weight,
    p: f64,
    family: &[(String, Signal)],
) -> Result<WeightedRatioReport> {
    check_above_one(p)?;
    let characteristic = ap_characteristic(w, p)?;
    let mut best = (0.0f64, String::new());
    for (name, f) in family {
        let denom = weighted_norm(f, w, p)?;
        if denom == 0.0 {
            continue;
        }
        let ratio = weighted_norm(&op.apply(f)?, w, p)? / denom;
        if ratio > best.0 {
            best = (ratio, name.clone());
        }
    }
    let e = op.ceiling_exponent(p);
    Ok(WeightedRatioReport {
        operator: op.name(),
        p,
        characteristic,
        max_ratio: best.0,
        argmax: best.1,
        ceiling_exponent: e,
        predicted: characteristic.powf(e),
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
