//! Recursive sparse certificates.
//!
//! Every node re-runs the stopping selection and the key decomposition, checks
//! the identities that make the recursion exact, and records the realized
//! constants. Failed checks become [`Violation`]s; the run always completes.

use alloc::string::ToString;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use super::decomposition::{
    key_decomposition, key_decomposition_unadapted, stopping_family, DecompositionMode,
    DecompositionReport, StoppingCollection, STOPPING_THRESHOLD,
};
use super::{check_sparseness, AverageKind, SparseCertificate, SparseEntry, Violation};
use crate::dyadic::{DyadicInterval, IntervalTable, Signal};
use crate::error::{Error, Result};
use crate::multiplier::{atomize_marcinkiewicz, AtomRq1, MultiplierSymbol};
use crate::square::{
    composition_collection, reduce_s_lambda, s_good, s_lambda, s_martingale, GoodCollection,
    LambdaReduction, MartingaleGrid,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    /// Selection ratio of the stopping family.
    pub threshold: f64,
    /// Required sparseness margin.
    pub sparseness: f64,
    /// Relative tolerance for identities that hold exactly.
    pub tolerance: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            threshold: STOPPING_THRESHOLD,
            sparseness: 0.5,
            tolerance: 1e-9,
        }
    }
}

/// What one node of the recursion observed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeReport {
    pub interval: Option<DyadicInterval>,
    pub children: usize,
    /// `|∪ children| / |I_0|`.
    pub child_measure: f64,
    /// The quantity being dominated, computed directly at this node.
    pub pairing: f64,
    /// Its good-part term.
    pub local: f64,
    /// `|local| / (normalization · |I_0| ⟨f⟩^r ⟨g⟩)`.
    pub local_constant: f64,
    /// Largest error in the identities passing a child to its own node.
    pub identity_error: f64,
    /// Cross terms (multipliers) or oscillation on children (square functions).
    pub cross_error: f64,
    /// Multipliers: `|pairing - local - Σ(children + crosses)|`.
    /// Square functions: excess of `pairing` over `c_r (local + Σ children)`.
    pub recursion_error: f64,
    /// Square functions: worst pointwise excess of the subadditivity with
    /// constant one. Diagnostic only.
    pub literal_excess: f64,
    pub stopping_f: f64,
    pub stopping_g: f64,
    pub linf_constant: f64,
    pub l2_constant: f64,
    pub square_constant: f64,
    pub max_block_jump_tiles: usize,
}

impl NodeReport {
    fn absorb(&mut self, d: &DecompositionReport) {
        self.linf_constant = self.linf_constant.max(d.linf_constant);
        self.l2_constant = self.l2_constant.max(d.l2_constant);
        self.square_constant = self.square_constant.max(d.square_constant);
        self.max_block_jump_tiles = self.max_block_jump_tiles.max(d.max_block_jump_tiles);
        self.identity_error = self
            .identity_error
            .max(d.transfer_error)
            .max(d.reconstruction_error)
            .max(d.orthogonality);
    }
}

struct Recorder {
    config: CertifyConfig,
    /// Absolute tolerance for scalar identities.
    tol: f64,
    /// Absolute tolerance for pointwise identities.
    tol_pointwise: f64,
    entries: Vec<SparseEntry>,
    nodes: Vec<NodeReport>,
    violations: Vec<Violation>,
}

impl Recorder {
    fn new(config: CertifyConfig, scalar_scale: f64, pointwise_scale: f64) -> Self {
        Recorder {
            config,
            tol: config.tolerance * scalar_scale.max(1e-300),
            tol_pointwise: config.tolerance * pointwise_scale.max(1e-300),
            entries: Vec::new(),
            nodes: Vec::new(),
            violations: Vec::new(),
        }
    }

    fn flag(&mut self, interval: DyadicInterval, check: &str, observed: f64, allowed: f64) {
        if observed.is_nan() || observed > allowed {
            self.violations.push(Violation {
                interval,
                check: check.to_string(),
                observed,
                allowed,
            });
        }
    }

    fn stopping(
        &mut self,
        tables: &[&IntervalTable<f64>],
        root: &DyadicInterval,
    ) -> Result<StoppingCollection> {
        let s = stopping_family(tables, root, self.config.threshold)?;
        self.flag(*root, "stopping measure", s.relative_measure(), 0.5);
        Ok(s)
    }

    fn finish(mut self, pairing: f64, r: f64, normalization: f64) -> SparseCertificate {
        let intervals: Vec<DyadicInterval> = self.entries.iter().map(|e| e.interval).collect();
        let report = check_sparseness(&intervals, self.config.sparseness);
        for entry in self.entries.iter_mut() {
            entry.margin = report
                .margins
                .iter()
                .find(|(i, _)| *i == entry.interval)
                .map_or(1.0, |(_, m)| *m);
        }
        for entry in &self.entries {
            if entry.margin < self.config.sparseness {
                self.violations.push(Violation {
                    interval: entry.interval,
                    check: "sparseness".to_string(),
                    observed: entry.margin,
                    allowed: self.config.sparseness,
                });
            }
        }
        let form: f64 = self
            .entries
            .iter()
            .map(|e| e.interval.length() * e.f_avg.powf(r) * e.g_avg)
            .sum();
        SparseCertificate {
            collection: self.entries,
            pairing,
            form,
            normalization,
            ratio: ratio(pairing.abs(), normalization * form),
            nodes: self.nodes,
            violations: self.violations,
        }
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// `Σ s^r g` over the cells of the domain.
fn power_pairing(s: &Signal, r: f64, g: &Signal) -> f64 {
    let w = s.resolution().cell_width();
    s.values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a.powf(r) * b)
        .sum::<f64>()
        * w
}

fn oscillation(s: &Signal, interval: &DyadicInterval) -> f64 {
    let cells = interval
        .cells(s.resolution())
        .expect("inside the resolution");
    let slice = &s.values()[cells];
    let hi = slice.iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v));
    let lo = slice.iter().fold(f64::INFINITY, |a, v| a.min(*v));
    hi - lo
}

/// Records the literal excess in `node` and returns the worst excess of the
/// plain triangle inequality on `root`.
fn pointwise_excesses(
    s_full: &Signal,
    literal: &Signal,
    split: &Signal,
    root: &DyadicInterval,
    r: f64,
    node: &mut NodeReport,
) -> f64 {
    let scale = s_full.sup_norm().powf(r).max(1e-300);
    let mut triangle = f64::NEG_INFINITY;
    for c in root
        .cells(s_full.resolution())
        .expect("inside the resolution")
    {
        let lhs = s_full.values()[c];
        node.literal_excess = node
            .literal_excess
            .max((lhs.powf(r) - literal.values()[c]) / scale);
        triangle = triangle.max(lhs - split.values()[c]);
    }
    triangle
}

fn check_square_exponent(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 2.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "r = {r} must lie in (0, 2]"
        )));
    }
    Ok(())
}

/// `max(1, 2^{r-1})`, the constant in `(a + b)^r ≤ c_r (a^r + b^r)`.
fn split_constant(r: f64) -> f64 {
    2f64.powf(r - 1.0).max(1.0)
}

// ---------------------------------------------------------------------------
// Multipliers

struct MultiplierRun<'a> {
    rec: Recorder,
    tf: &'a IntervalTable<f64>,
    tphi: &'a IntervalTable<f64>,
    q: f64,
    normalization: f64,
}

impl MultiplierRun<'_> {
    /// Returns `⟨T_m f, φ⟩` for `f, φ` supported on `root`.
    fn node(
        &mut self,
        root: DyadicInterval,
        atom: &AtomRq1,
        f: &Signal,
        phi: &Signal,
    ) -> Result<f64> {
        let (fa, pa) = (self.tf[&root], self.tphi[&root]);
        if fa == 0.0 || pa == 0.0 {
            return Ok(0.0);
        }
        self.rec.entries.push(SparseEntry {
            interval: root,
            f_avg: fa,
            g_avg: pa,
            margin: 1.0,
        });
        let direct = atom.apply(f)?.inner(phi)?;
        let stopping = self.rec.stopping(&[self.tf, self.tphi], &root)?;
        let df = key_decomposition(f, atom, &stopping, DecompositionMode::Psi2)?;
        let dphi = key_decomposition(phi, atom, &stopping, DecompositionMode::Lq(self.q))?;
        let mut node = NodeReport {
            interval: Some(root),
            children: stopping.intervals().len(),
            child_measure: stopping.relative_measure(),
            pairing: direct,
            stopping_f: df.report.stopping.total,
            stopping_g: dphi.report.stopping.total,
            ..NodeReport::default()
        };
        node.absorb(&df.report);
        node.absorb(&dphi.report);

        let f_good = df.good_part();
        let phi_good = dphi.good_part();
        let tf_good = atom.apply(&f_good)?;
        let local = tf_good.inner(&phi_good)?;
        node.local = local;
        node.local_constant = local.abs() / (self.normalization * root.length() * fa * pa);

        let mut diagonals = Vec::with_capacity(df.parts.len());
        let mut crosses = 0.0;
        for (pf, pp) in df.parts.iter().zip(&dphi.parts) {
            let t_clean = atom.apply(&pf.clean)?;
            let c1 = t_clean.inner(&phi_good)?;
            let c2 = tf_good.inner(&pp.clean)?;
            node.cross_error = node.cross_error.max(c1.abs()).max(c2.abs());
            crosses += c1 + c2;
            diagonals.push(t_clean.inner(&pp.clean)?);
        }
        let intervals: Vec<DyadicInterval> = stopping.intervals().to_vec();
        drop((df, dphi, f_good, phi_good, tf_good));

        let mut children_total = 0.0;
        for (i, diag) in intervals.iter().zip(diagonals) {
            let child = self.node(*i, &atom.induce(i), &f.restrict(i)?, &phi.restrict(i)?)?;
            node.identity_error = node.identity_error.max((diag - child).abs());
            children_total += child;
        }
        node.recursion_error = (direct - local - crosses - children_total).abs();

        let tol = self.rec.tol;
        self.rec.flag(root, "cross terms", node.cross_error, tol);
        self.rec.flag(root, "identities", node.identity_error, tol);
        self.rec.flag(root, "recursion", node.recursion_error, tol);
        self.rec.nodes.push(node);
        Ok(direct)
    }
}

/// Sparse certificate for `⟨T_m f, φ⟩` with an `R_{q,1}` atom:
/// `|⟨T_m f, φ⟩| ≤ C (q-1)^{-1/2} Σ_S |I| ⟨f⟩_{I,ψ₂} ⟨φ⟩_{I,q}`.
pub fn certify_multiplier(
    f: &Signal,
    phi: &Signal,
    atom: &AtomRq1,
    config: &CertifyConfig,
) -> Result<SparseCertificate> {
    let q = atom.q();
    if q <= 1.0 {
        return Err(Error::InvalidExponent(q));
    }
    f.resolution().check_same(phi.resolution())?;
    atom.check_within(f.resolution())?;
    let tf = AverageKind::Psi2.table(f)?;
    let tphi = AverageKind::Lp(q).table(phi)?;
    certify_multiplier_with_tables(f, phi, atom, &tf, &tphi, config)
}

fn certify_multiplier_with_tables(
    f: &Signal,
    phi: &Signal,
    atom: &AtomRq1,
    tf: &IntervalTable<f64>,
    tphi: &IntervalTable<f64>,
    config: &CertifyConfig,
) -> Result<SparseCertificate> {
    let q = atom.q();
    let normalization = 1.0 / (q - 1.0).sqrt();
    let mut run = MultiplierRun {
        rec: Recorder::new(*config, f.norm2() * phi.norm2(), 0.0),
        tf,
        tphi,
        q,
        normalization,
    };
    let pairing = run.node(DyadicInterval::unit(), atom, f, phi)?;
    Ok(run.rec.finish(pairing, 1.0, normalization))
}

/// Certificate for a Marcinkiewicz multiplier through its atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct MarcinkiewiczCertificate {
    pub marcinkiewicz_norm_bound: f64,
    /// Sum of the atom weights, at most twice the Marcinkiewicz norm.
    pub total_weight: f64,
    pub atoms: Vec<SparseCertificate>,
    /// `⟨T_m f, φ⟩`.
    pub pairing: f64,
    /// `Σ weight · |pairing_a|`, an upper bound for `|pairing|`.
    pub atomic_pairing: f64,
    /// `(q-1)^{-1/2} Σ weight · form_a`.
    pub bound: f64,
    pub ratio: f64,
    pub violations: Vec<Violation>,
}

/// Atomizes `m` into single-jump atoms, certifies each with exponent `q`, and
/// combines them. Single-jump atoms have height one for every `q`.
pub fn certify_marcinkiewicz(
    f: &Signal,
    phi: &Signal,
    m: &MultiplierSymbol,
    q: f64,
    config: &CertifyConfig,
) -> Result<MarcinkiewiczCertificate> {
    if !(q > 1.0 && q <= 2.0) {
        return Err(Error::InvalidExponent(q));
    }
    let res = f.resolution();
    res.check_same(phi.resolution())?;
    m.check_within(res)?;
    let tf = AverageKind::Psi2.table(f)?;
    let tphi = AverageKind::Lp(q).table(phi)?;
    let pairing = m.apply(f)?.inner(phi)?;
    let weighted = atomize_marcinkiewicz(m);
    let mut atoms = Vec::with_capacity(weighted.len());
    let (mut total_weight, mut atomic, mut bound) = (0.0, 0.0, 0.0);
    let mut violations = Vec::new();
    for w in &weighted {
        let atom = AtomRq1::new(q, 1, w.atom.blocks().to_vec())?;
        let cert = certify_multiplier_with_tables(f, phi, &atom, &tf, &tphi, config)?;
        total_weight += w.weight;
        atomic += w.weight * cert.pairing.abs();
        bound += w.weight * cert.normalization * cert.form;
        violations.extend(cert.violations.iter().cloned());
        atoms.push(cert);
    }
    Ok(MarcinkiewiczCertificate {
        marcinkiewicz_norm_bound: crate::multiplier::marcinkiewicz_norm(m),
        total_weight,
        atoms,
        pairing,
        atomic_pairing: atomic,
        bound,
        ratio: ratio(pairing.abs(), bound),
        violations,
    })
}

// ---------------------------------------------------------------------------
// Square functions over good collections

struct GoodRun<'a> {
    rec: Recorder,
    tf: &'a IntervalTable<f64>,
    tg: &'a IntervalTable<f64>,
    r: f64,
}

impl GoodRun<'_> {
    /// Returns `⟨(S_Ω f)^r, g⟩` for `f, g ≥ 0` supported on `root`.
    fn node(
        &mut self,
        root: DyadicInterval,
        omega: &GoodCollection,
        f: &Signal,
        g: &Signal,
    ) -> Result<f64> {
        let (fa, ga) = (self.tf[&root], self.tg[&root]);
        if fa == 0.0 || ga == 0.0 {
            return Ok(0.0);
        }
        let r = self.r;
        self.rec.entries.push(SparseEntry {
            interval: root,
            f_avg: fa,
            g_avg: ga,
            margin: 1.0,
        });
        let s_full = s_good(f, omega)?;
        let direct = power_pairing(&s_full, r, g);
        let stopping = self.rec.stopping(&[self.tf, self.tg], &root)?;
        let d = key_decomposition_unadapted(
            f,
            &omega.representation(),
            1,
            &stopping,
            DecompositionMode::Psi2,
        )?;
        let mut node = NodeReport {
            interval: Some(root),
            children: stopping.intervals().len(),
            child_measure: stopping.relative_measure(),
            pairing: direct,
            stopping_f: d.report.stopping.total,
            ..NodeReport::default()
        };
        node.absorb(&d.report);

        let s_good_part = s_good(&d.good_part(), omega)?;
        node.local = power_pairing(&s_good_part, r, g);
        node.local_constant = node.local / (root.length() * fa.powf(r) * ga);

        // Pointwise: S f ≤ S f̃ + S f'_I on I, and S f ≤ S f̃ off the children.
        let mut literal = s_good_part.map(|v| v.powf(r));
        let mut split = s_good_part.clone();
        let mut induced = Vec::with_capacity(d.parts.len());
        for part in &d.parts {
            let i = part.interval;
            node.cross_error = node.cross_error.max(oscillation(&s_good_part, &i));
            let omega_i = omega.induce(&i)?;
            let s_clean = s_good(&part.clean, omega)?;
            let s_local = s_good(&f.restrict(&i)?, &omega_i)?.restrict(&i)?;
            node.identity_error = node.identity_error.max(s_clean.max_abs_diff(&s_local)?);
            for c in i.cells(f.resolution())? {
                let extra = s_clean.values()[c];
                literal.values_mut()[c] += extra.powf(r);
                split.values_mut()[c] += extra;
            }
            induced.push((i, omega_i));
        }
        drop(d);
        let triangle = pointwise_excesses(&s_full, &literal, &split, &root, r, &mut node);
        self.rec
            .flag(root, "pointwise triangle", triangle, self.rec.tol_pointwise);

        let mut children_total = 0.0;
        for (i, omega_i) in &induced {
            children_total += self.node(*i, omega_i, &f.restrict(i)?, &g.restrict(i)?)?;
        }
        node.recursion_error = direct - split_constant(r) * (node.local + children_total);

        let (tol, tolp) = (self.rec.tol, self.rec.tol_pointwise);
        self.rec
            .flag(root, "constant on children", node.cross_error, tolp);
        self.rec.flag(root, "identities", node.identity_error, tolp);
        self.rec.flag(root, "recursion", node.recursion_error, tol);
        self.rec.nodes.push(node);
        Ok(direct)
    }
}

/// `⟨(S_Ω f)^r, |g|⟩ ≤ C Σ_S |I| ⟨f⟩_{I,ψ₂}^r ⟨g⟩_{I,1}` for a `[0,1)`-good `Ω`.
pub fn certify_good(
    f: &Signal,
    g: &Signal,
    omega: &GoodCollection,
    r: f64,
    config: &CertifyConfig,
) -> Result<SparseCertificate> {
    check_square_exponent(r)?;
    f.resolution().check_same(g.resolution())?;
    omega.check_within(f.resolution())?;
    if omega.base() != DyadicInterval::unit() {
        return Err(Error::NotGood(
            "the collection must be good for [0, 1)".into(),
        ));
    }
    let g = g.map(f64::abs);
    let tf = AverageKind::Psi2.table(f)?;
    let tg = AverageKind::Lp(1.0).table(&g)?;
    certify_good_with_tables(f, &g, omega, r, &tf, &tg, config)
}

fn certify_good_with_tables(
    f: &Signal,
    g_abs: &Signal,
    omega: &GoodCollection,
    r: f64,
    tf: &IntervalTable<f64>,
    tg: &IntervalTable<f64>,
    config: &CertifyConfig,
) -> Result<SparseCertificate> {
    let pointwise = f.norm2() * (f.resolution().cells() as f64).sqrt();
    let scalar = pointwise.powf(r) * g_abs.integral();
    let mut run = GoodRun {
        rec: Recorder::new(*config, scalar, pointwise),
        tf,
        tg,
        r,
    };
    let pairing = run.node(DyadicInterval::unit(), omega, f, g_abs)?;
    Ok(run.rec.finish(pairing, r, 1.0))
}

// ---------------------------------------------------------------------------
// Martingale square functions

struct MartingaleRun<'a> {
    rec: Recorder,
    tf: &'a IntervalTable<f64>,
    tg: &'a IntervalTable<f64>,
    r: f64,
}

impl MartingaleRun<'_> {
    fn node(
        &mut self,
        root: DyadicInterval,
        mu: &MartingaleGrid,
        f: &Signal,
        g: &Signal,
    ) -> Result<f64> {
        let (fa, ga) = (self.tf[&root], self.tg[&root]);
        if fa == 0.0 || ga == 0.0 {
            return Ok(0.0);
        }
        let r = self.r;
        let res = f.resolution();
        self.rec.entries.push(SparseEntry {
            interval: root,
            f_avg: fa,
            g_avg: ga,
            margin: 1.0,
        });
        let s_full = s_martingale(f, mu)?;
        let direct = power_pairing(&s_full, r, g);
        let stopping = self.rec.stopping(&[self.tf, self.tg], &root)?;
        let mut node = NodeReport {
            interval: Some(root),
            children: stopping.intervals().len(),
            child_measure: stopping.relative_measure(),
            pairing: direct,
            ..NodeReport::default()
        };

        // Calderón–Zygmund split: constant averages on the children.
        let mut good = f.clone();
        let mut means = Vec::with_capacity(stopping.intervals().len());
        for i in stopping.intervals() {
            let mean = f.mean_on(i)?;
            for c in i.cells(res)? {
                good.values_mut()[c] = mean;
            }
            means.push(mean);
        }
        node.linf_constant = good.sup_norm() / fa;
        let s_good_part = s_martingale(&good, mu)?;
        node.local = power_pairing(&s_good_part, r, g);
        node.local_constant = node.local / (root.length() * fa.powf(r) * ga);

        let mut literal = s_good_part.map(|v| v.powf(r));
        let mut split = s_good_part.clone();
        let mut grids = Vec::with_capacity(means.len());
        for (i, mean) in stopping.intervals().iter().zip(means) {
            node.cross_error = node.cross_error.max(oscillation(&s_good_part, i));
            let local_f = f.restrict(i)?;
            let bad = local_f.sub(&Signal::indicator(res, i, mean)?)?;
            let mu_i = mu.truncate(i);
            let s_bad = s_martingale(&bad, mu)?;
            let s_local = s_martingale(&local_f, &mu_i)?.restrict(i)?;
            node.identity_error = node.identity_error.max(s_bad.max_abs_diff(&s_local)?);
            for c in i.cells(res)? {
                let extra = s_bad.values()[c];
                literal.values_mut()[c] += extra.powf(r);
                split.values_mut()[c] += extra;
            }
            grids.push(mu_i);
        }
        let triangle = pointwise_excesses(&s_full, &literal, &split, &root, r, &mut node);
        self.rec
            .flag(root, "pointwise triangle", triangle, self.rec.tol_pointwise);

        let mut children_total = 0.0;
        for (i, mu_i) in stopping.intervals().iter().zip(&grids) {
            children_total += self.node(*i, mu_i, &f.restrict(i)?, &g.restrict(i)?)?;
        }
        node.recursion_error = direct - split_constant(r) * (node.local + children_total);

        let (tol, tolp) = (self.rec.tol, self.rec.tol_pointwise);
        self.rec
            .flag(root, "constant on children", node.cross_error, tolp);
        self.rec.flag(root, "identities", node.identity_error, tolp);
        self.rec.flag(root, "recursion", node.recursion_error, tol);
        self.rec.nodes.push(node);
        Ok(direct)
    }
}

/// `⟨(S_μ f)^r, |g|⟩ ≤ C Σ_S |I| ⟨f⟩_{I,1}^r ⟨g⟩_{I,1}`.
pub fn certify_martingale(
    f: &Signal,
    g: &Signal,
    mu: &MartingaleGrid,
    r: f64,
    config: &CertifyConfig,
) -> Result<SparseCertificate> {
    check_square_exponent(r)?;
    f.resolution().check_same(g.resolution())?;
    let g = g.map(f64::abs);
    let tf = AverageKind::Lp(1.0).table(f)?;
    let tg = AverageKind::Lp(1.0).table(&g)?;
    let res = f.resolution();
    for c in mu.cells() {
        c.check_within(res)?;
    }
    let pointwise = f.norm2() * (res.cells() as f64).sqrt();
    let mut run = MartingaleRun {
        rec: Recorder::new(*config, pointwise.powf(r) * g.integral(), pointwise),
        tf: &tf,
        tg: &tg,
        r,
    };
    let pairing = run.node(
        DyadicInterval::unit(),
        &mu.truncate(&DyadicInterval::unit()),
        f,
        &g,
    )?;
    Ok(run.rec.finish(pairing, r, 1.0))
}

/// Certificate for `⟨(S_2 T_m f)^r, |g|⟩` with `m = Σ σ_k 1_{[2^k, ν_k)}`,
/// run on the good collection `{[2^k, ν_k)}` after checking `S_2 T_m f = S_Ω f`.
pub fn certify_composition(
    f: &Signal,
    g: &Signal,
    m: &MultiplierSymbol,
    r: f64,
    config: &CertifyConfig,
) -> Result<SparseCertificate> {
    let (omega, _) = composition_collection(m)?;
    let lhs = s_lambda(&m.apply(f)?, 2)?;
    let rhs = s_good(f, &omega)?;
    let mut cert = certify_good(f, g, &omega, r, config)?;
    let err = lhs.max_abs_diff(&rhs)?;
    let allowed = config.tolerance * lhs.sup_norm().max(1.0);
    if err > allowed {
        cert.violations.push(Violation {
            interval: DyadicInterval::unit(),
            check: "composition identity".to_string(),
            observed: err,
            allowed,
        });
    }
    Ok(cert)
}

/// Certificate for `⟨(S_λ f)^r, |g|⟩` through the reduction to a martingale
/// square function and two good collections.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaCertificate {
    pub reduction: LambdaReduction,
    pub martingale: SparseCertificate,
    pub right: SparseCertificate,
    pub left: SparseCertificate,
    /// `|f̂(0)|^r ⟨|g|⟩_{[0,1)}`.
    pub dc_term: f64,
    pub pairing: f64,
    /// `κ^{r/2} (dc_term + Σ part pairings)`.
    pub dominated: f64,
    /// `κ^{r/2} (dc_term + Σ part forms)`.
    pub form: f64,
    pub ratio: f64,
    /// Largest `S_λ f^2 - κ · dominator` over cells.
    pub pointwise_excess: f64,
    pub violations: Vec<Violation>,
}

impl LambdaCertificate {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// The union of the three sparse collections with their own margins.
    pub fn collection(&self) -> Vec<SparseEntry> {
        let mut out = self.martingale.collection.clone();
        out.extend(self.right.collection.iter().cloned());
        out.extend(self.left.collection.iter().cloned());
        out
    }
}

pub fn certify_s_lambda(
    f: &Signal,
    g: &Signal,
    lambda: usize,
    r: f64,
    config: &CertifyConfig,
) -> Result<LambdaCertificate> {
    check_square_exponent(r)?;
    let res = f.resolution();
    res.check_same(g.resolution())?;
    let reduction = reduce_s_lambda(lambda, res)?;
    let g_abs = g.map(f64::abs);
    let kappa = reduction.kappa as f64;

    let s = s_lambda(f, lambda)?;
    let dominator = reduction.dominator_energy(f)?;
    let pointwise_excess = s
        .values()
        .iter()
        .zip(&dominator)
        .map(|(v, d)| v * v - kappa * d)
        .fold(f64::NEG_INFINITY, f64::max);

    let martingale = certify_martingale(f, &g_abs, &reduction.grid, r, config)?;
    let tf = AverageKind::Psi2.table(f)?;
    let tg = AverageKind::Lp(1.0).table(&g_abs)?;
    let right = certify_good_with_tables(f, &g_abs, &reduction.right, r, &tf, &tg, config)?;
    let left = certify_good_with_tables(f, &g_abs, &reduction.left, r, &tf, &tg, config)?;

    let dc_term = f.integral().abs().powf(r) * g_abs.integral();
    let factor = kappa.powf(r / 2.0);
    let pairing = power_pairing(&s, r, &g_abs);
    let dominated = factor * (dc_term + martingale.pairing + right.pairing + left.pairing);
    let form = factor * (dc_term + martingale.form + right.form + left.form);

    let mut violations = Vec::new();
    let unit = DyadicInterval::unit();
    let tolp = config.tolerance * s.sup_norm().powi(2).max(1e-300);
    if pointwise_excess > tolp {
        violations.push(Violation {
            interval: unit,
            check: "pointwise reduction".to_string(),
            observed: pointwise_excess,
            allowed: tolp,
        });
    }
    let tol = config.tolerance * dominated.max(1e-300);
    if pairing - dominated > tol {
        violations.push(Violation {
            interval: unit,
            check: "reduction pairing".to_string(),
            observed: pairing - dominated,
            allowed: tol,
        });
    }
    for part in [&martingale, &right, &left] {
        violations.extend(part.violations.iter().cloned());
    }
    Ok(LambdaCertificate {
        reduction,
        martingale,
        right,
        left,
        dc_term,
        pairing,
        dominated,
        form,
        ratio: ratio(pairing, form),
        pointwise_excess,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{FrequencyInterval, Resolution};
    use crate::multiplier::{atom_block_range, AtomBlock};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::vec;

    fn res(n: u32) -> Resolution {
        Resolution::new(n).unwrap()
    }

    fn spiky(r: Resolution, rng: &mut ChaCha8Rng) -> Signal {
        Signal::from_fn(r, |_| {
            let base = rng.gen_range(-1.0..1.0);
            if rng.gen_bool(0.05) {
                base * 30.0
            } else {
                base
            }
        })
    }

    fn random_atom(rng: &mut ChaCha8Rng, n: u32, jumps: usize, q: f64) -> AtomRq1 {
        let mut blocks = Vec::new();
        for k in 0..=n {
            let range = atom_block_range(k);
            let mut cuts: Vec<usize> = (0..2 * rng.gen_range(0..=jumps))
                .map(|_| rng.gen_range(range.start()..=range.end()))
                .collect();
            cuts.sort();
            cuts.dedup();
            let intervals = cuts
                .chunks_exact(2)
                .map(|c| FrequencyInterval::new(c[0], c[1]).unwrap())
                .collect();
            blocks.push(AtomBlock { k, intervals });
        }
        AtomRq1::new(q, jumps, blocks).unwrap()
    }

    fn random_good(r: Resolution, rng: &mut ChaCha8Rng) -> GoodCollection {
        let mut intervals = Vec::new();
        for k in 0..r.level() {
            if rng.gen_bool(0.6) {
                let s = 1usize << k;
                intervals.push(FrequencyInterval::new(s, rng.gen_range(s + 1..=2 * s)).unwrap());
            }
        }
        GoodCollection::new(DyadicInterval::unit(), intervals).unwrap()
    }

    #[test]
    fn multiplier_certificates_hold() {
        let r = res(8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let config = CertifyConfig::default();
        let mut deepest = 0;
        for trial in 0..6 {
            let f = spiky(r, &mut rng);
            let phi = spiky(r, &mut rng);
            let atom = random_atom(&mut rng, 8, 1 + trial % 3, 1.25 + 0.25 * (trial % 3) as f64);
            let cert = certify_multiplier(&f, &phi, &atom, &config).unwrap();
            assert!(cert.passed(), "{:?}", cert.violations);
            let direct = atom.apply(&f).unwrap().inner(&phi).unwrap();
            assert!((cert.pairing - direct).abs() < 1e-12);
            assert!(
                cert.ratio.is_finite() && cert.ratio < 10.0,
                "{}",
                cert.ratio
            );
            assert!(cert
                .nodes
                .iter()
                .all(|n| n.max_block_jump_tiles <= 2 * atom.jumps()));
            deepest = deepest.max(
                cert.collection
                    .iter()
                    .map(|e| e.interval.level())
                    .max()
                    .unwrap(),
            );
        }
        assert!(deepest >= 3, "recursion never left the root: {deepest}");
    }

    #[test]
    fn marcinkiewicz_combination_bounds_the_pairing() {
        let r = res(7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let values: Vec<f64> = (0..r.cells()).map(|n| ((n as f64) * 0.1).sin()).collect();
        let m = MultiplierSymbol::from_values(&values).unwrap();
        let f = spiky(r, &mut rng);
        let phi = spiky(r, &mut rng);
        let cert = certify_marcinkiewicz(&f, &phi, &m, 1.5, &CertifyConfig::default()).unwrap();
        assert!(cert.violations.is_empty());
        assert!(cert.total_weight <= 2.0 * cert.marcinkiewicz_norm_bound + 1e-9);
        assert!(cert.pairing.abs() <= cert.atomic_pairing + 1e-9);
    }

    #[test]
    fn good_certificates_hold() {
        let r = res(8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let config = CertifyConfig::default();
        for trial in 0..6 {
            let f = spiky(r, &mut rng);
            let g = spiky(r, &mut rng);
            let omega = random_good(r, &mut rng);
            let exponent = [1.0, 2.0, 0.5][trial % 3];
            let cert = certify_good(&f, &g, &omega, exponent, &config).unwrap();
            assert!(cert.passed(), "{:?}", cert.violations);
            assert!(cert.collection.len() > 3);
            assert!(cert.ratio < 10.0, "{}", cert.ratio);
        }
    }

    #[test]
    fn martingale_certificates_hold() {
        let r = res(8);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let config = CertifyConfig::default();
        for grid in [
            vec![1, 4, 8, 64],
            vec![2, 16, 256],
            MartingaleGrid::dyadic(r).points().to_vec(),
        ] {
            let mu = MartingaleGrid::new(grid).unwrap();
            let f = spiky(r, &mut rng);
            let g = spiky(r, &mut rng);
            let cert = certify_martingale(&f, &g, &mu, 1.5, &config).unwrap();
            assert!(cert.passed(), "{:?}", cert.violations);
        }
    }

    #[test]
    fn composition_and_lambda_certificates_hold() {
        let r = res(8);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let config = CertifyConfig::default();
        let m = MultiplierSymbol::new(vec![
            (FrequencyInterval::new(1, 2).unwrap(), 1.0),
            (FrequencyInterval::new(4, 7).unwrap(), -1.0),
            (FrequencyInterval::new(32, 50).unwrap(), 1.0),
        ])
        .unwrap();
        let f = spiky(r, &mut rng);
        let g = spiky(r, &mut rng);
        let cert = certify_composition(&f, &g, &m, 2.0, &config).unwrap();
        assert!(cert.passed(), "{:?}", cert.violations);
        for lambda in [3, 5, 6] {
            let cert = certify_s_lambda(&f, &g, lambda, 2.0, &config).unwrap();
            assert!(cert.passed(), "{:?}", cert.violations);
            assert!(cert.pairing <= cert.dominated * (1.0 + 1e-9));
        }
    }

    #[test]
    fn zero_inputs_give_empty_certificates() {
        let r = res(5);
        let f = Signal::zeros(r);
        let g = Signal::constant(r, 1.0);
        let cert = certify_good(
            &f,
            &g,
            &GoodCollection::empty(DyadicInterval::unit()),
            1.0,
            &CertifyConfig::default(),
        )
        .unwrap();
        assert!(cert.collection.is_empty());
        assert_eq!(cert.ratio, 0.0);
    }
}
