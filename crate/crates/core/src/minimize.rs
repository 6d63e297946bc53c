//! Radial and `Z_t`-sector minimizers of `J_λ`, the `λ`-sweep for the onset of
//! symmetry breaking, and the multiplicity comparison in `n = 2`.
//!
//! The descent works on `h = r^{n/2-s} u` in `t = ln r`, where
//! `J_λ = Σ_ℓ ⟨h_ℓ, (Φ_ℓ+λ) h_ℓ⟩ / (∫ mean_θ |h|^q)^{2/q}` and the operator is diagonal
//! in the Mellin variable. Each step moves toward `v = (Φ+λ)^{-1}|h|^{q-2}h`,
//! normalised in `L^q`. At `α = 1` this cannot increase `J` (Hölder plus
//! Cauchy–Schwarz in the `Φ+λ` inner product); longer steps are tried first
//! and kept only when `J` does not go up.

use crate::energy::{el_residual_signed, energy_report, polar_energy_by_mode, EnergyReport};
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::perturb::{certify, BreakingCertificate, Verdict};
use crate::special::sphere_area;
use crate::spectral::mellin::{FftPair, ModeOperator};
use crate::spectral::{trig_basis, Field, GridSpec, PolarField, RadialGrid, RadialProfile};
use crate::spherical::{eigenpair_degree, GroupKind, SphericalEigenpair, SymmetryGroup};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Descent settings. `grid = None` picks a grid from the decay rate at `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeConfig {
    pub grid: Option<GridSpec>,
    /// First step length tried; halved down to 1 until `J` does not increase.
    pub step: f64,
    pub step_shrink: f64,
    pub max_iterations: usize,
    pub el_tol: f64,
    /// Stop when a full step lowers `J` by less than this, relative.
    pub descent_tol: f64,
    pub seed: u64,
    /// Sector runs keep modes up to `mode_factor · t`.
    pub mode_factor: usize,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        Self {
            grid: None,
            step: 2.0,
            step_shrink: 0.5,
            max_iterations: 3000,
            el_tol: 1e-6,
            descent_tol: 1e-15,
            seed: 0,
            mode_factor: 8,
        }
    }
}

impl MinimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.el_tol > 0.0 && self.descent_tol >= 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !(self.step >= 1.0 && self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::InvalidParameter("step must be >= 1 and step_shrink in (0, 1)".into()));
        }
        if self.max_iterations == 0 || self.mode_factor == 0 {
            return Err(Error::InvalidParameter("max_iterations and mode_factor must be positive".into()));
        }
        Ok(())
    }

    /// Symmetric grid of `10^{±D}` with `D` chosen so `r^{n/2-s}` falls to about `1e-12`.
    pub fn grid_for(&self, params: &ProblemParams) -> Result<RadialGrid> {
        if let Some(g) = self.grid {
            return g.build();
        }
        let rate = params.n as f64 / 2.0 - params.s;
        let decades = (12.0 / rate).clamp(8.0, 40.0).ceil();
        RadialGrid::new(10f64.powf(-decades), 10f64.powf(decades), crate::spectral::default_nodes())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub field: Field,
    pub report: EnergyReport,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub group: SymmetryGroup,
    /// `J_λ` of every accepted iterate.
    pub j_history: Vec<f64>,
    pub seed: u64,
    pub config: MinimizeConfig,
}

impl MinimizeResult {
    pub fn j(&self) -> f64 {
        self.report.j_lambda
    }

    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { iterations: self.iterations, residual: self.residual })
        }
    }
}

/// Diagonal operator data and collocation tables for one mode set.
///
/// `h` is stored as a `len × modes` matrix, one column per angular mode.
struct Engine {
    n: usize,
    s: f64,
    q: f64,
    lambda: f64,
    grid: RadialGrid,
    modes: Vec<usize>,
    ops: Vec<ModeOperator>,
    fft: FftPair,
    /// `modes × angles`; a single one for radial runs.
    basis: DMatrix<f64>,
    area: f64,
}

impl Engine {
    fn new(params: &ProblemParams, grid: &RadialGrid, modes: Vec<usize>, angles: Vec<f64>) -> Self {
        let len = grid.len();
        let ops = modes.iter().map(|&l| ModeOperator::new(len, grid.dt(), params.n, params.s, l)).collect();
        let basis = DMatrix::from_fn(modes.len(), angles.len(), |i, j| trig_basis(modes[i], angles[j]));
        Self {
            n: params.n,
            s: params.s,
            q: params.q,
            lambda: params.lambda,
            grid: grid.clone(),
            modes,
            ops,
            fft: FftPair::new(len),
            basis,
            area: sphere_area(params.n),
        }
    }

    fn angles(&self) -> usize {
        self.basis.ncols()
    }

    fn samples(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        h * &self.basis
    }

    fn project(&self, samples: &DMatrix<f64>) -> DMatrix<f64> {
        samples * self.basis.transpose() / self.angles() as f64
    }

    /// `mean_θ |h|^q` at every node.
    fn mean_pow(&self, samples: &DMatrix<f64>) -> Vec<f64> {
        let m = self.angles() as f64;
        samples.row_iter().map(|row| row.iter().map(|v| v.abs().powf(self.q)).sum::<f64>() / m).collect()
    }

    fn lq(&self, h: &DMatrix<f64>) -> f64 {
        self.area * self.grid.dt() * self.mean_pow(&self.samples(h)).iter().sum::<f64>()
    }

    fn quad(&self, h: &DMatrix<f64>) -> f64 {
        self.area
            * h.column_iter()
                .zip(&self.ops)
                .map(|(c, op)| op.quadratic_form_spec(&self.fft.forward(c.as_slice()), self.lambda))
                .sum::<f64>()
    }

    /// `J_λ(h)`, then rescale `h` to unit `L^q` norm.
    fn normalize(&self, h: &mut DMatrix<f64>) -> f64 {
        let lq = self.lq(h);
        let j = self.quad(h) / lq.powf(2.0 / self.q);
        *h *= lq.powf(-1.0 / self.q);
        j
    }

    /// `(Φ+λ)^{-1} P(|h|^{q-2}h)`, mode by mode.
    fn inverse_step(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        let q = self.q;
        let nl = self.samples(h).map(|v| v.abs().powf(q - 2.0) * v);
        let mut out = self.project(&nl);
        for (mut c, op) in out.column_iter_mut().zip(&self.ops) {
            let mut spec = self.fft.forward(c.as_slice());
            op.scale_spec(&mut spec, self.lambda, -1.0);
            c.copy_from_slice(&self.fft.inverse_real(spec));
        }
        out
    }

    /// Cyclic shift by whole nodes that puts the `|h|^q` centroid mid-grid; `J` is unchanged.
    fn recenter(&self, h: &mut DMatrix<f64>) {
        let len = self.grid.len();
        let w = self.mean_pow(&self.samples(h));
        let total: f64 = w.iter().sum();
        let centroid = w.iter().enumerate().map(|(i, v)| i as f64 * v).sum::<f64>() / total;
        let shift = (len as f64 / 2.0 - centroid).round() as i64;
        if shift.unsigned_abs() as usize > len / 20 {
            let k = shift.rem_euclid(len as i64) as usize;
            for mut c in h.column_iter_mut() {
                c.as_mut_slice().rotate_right(k);
            }
        }
    }

    fn to_field(&self, h: &DMatrix<f64>, t: Option<usize>) -> Result<Field> {
        let p = self.n as f64 / 2.0 - self.s;
        let nodes = self.grid.nodes();
        let to_u = |c: &[f64]| -> Vec<f64> { c.iter().zip(nodes).map(|(v, r)| v * r.powf(-p)).collect() };
        match t {
            None => Ok(Field::Radial(RadialProfile::new(self.grid.clone(), self.n, to_u(h.column(0).as_slice()))?)),
            Some(t) => {
                let mut f = PolarField::zeros(&self.grid, t, *self.modes.last().expect("nonempty"))?;
                for (&l, c) in self.modes.iter().zip(h.column_iter()) {
                    f.set_mode(l, to_u(c.as_slice()))?;
                }
                Ok(Field::Polar(f))
            }
        }
    }

    fn h_of(&self, field: &Field) -> DMatrix<f64> {
        let p = self.n as f64 / 2.0 - self.s;
        let nodes = self.grid.nodes();
        let comps = field.components();
        let mut h = DMatrix::zeros(nodes.len(), self.modes.len());
        for (mut col, l) in h.column_iter_mut().zip(&self.modes) {
            if let Some((_, c)) = comps.iter().find(|(m, _)| m == l) {
                for ((dst, v), r) in col.iter_mut().zip(c.iter()).zip(nodes) {
                    *dst = v * r.powf(p);
                }
            }
        }
        h
    }
}

struct Descent {
    h: DMatrix<f64>,
    history: Vec<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

const CHECK_EVERY: usize = 5;

fn descend(
    engine: &Engine,
    params: &ProblemParams,
    config: &MinimizeConfig,
    mut h: DMatrix<f64>,
    t: Option<usize>,
) -> Result<Descent> {
    if h.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateStart);
    }
    let radial = t.is_none();
    if radial {
        h.apply(|v| *v = v.abs());
    }
    let mut j = engine.normalize(&mut h);
    let mut history = vec![j];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let residual_of = |h: &DMatrix<f64>| -> Result<f64> { Ok(el_residual_signed(&engine.to_field(h, t)?, params, None)?.residual) };
    loop {
        if iterations % CHECK_EVERY == 0 || iterations == config.max_iterations {
            residual = residual_of(&h)?;
            if residual <= config.el_tol {
                converged = true;
                break;
            }
        }
        if iterations == config.max_iterations {
            break;
        }
        iterations += 1;
        let v = engine.inverse_step(&h);
        let mut alpha = config.step;
        let accepted = loop {
            let mut cand = &h + (&v - &h) * alpha;
            if radial {
                cand.apply(|x| *x = x.abs());
            }
            let jc = engine.normalize(&mut cand);
            if jc <= j {
                break Some((cand, jc));
            }
            if alpha <= 1.0 {
                break None;
            }
            alpha = (alpha * config.step_shrink).max(1.0);
        };
        let Some((mut cand, jc)) = accepted else {
            residual = residual_of(&h)?;
            converged = residual <= config.el_tol;
            break;
        };
        engine.recenter(&mut cand);
        let drop = j - jc;
        h = cand;
        j = jc;
        history.push(j);
        if drop <= config.descent_tol * j {
            residual = residual_of(&h)?;
            converged = residual <= config.el_tol;
            break;
        }
    }
    Ok(Descent { h, history, iterations, residual, converged })
}

/// `r^α (1+r²)^{-β}` with `α ∈ [0, 1)` and `β` large enough for `h` to decay.
pub fn radial_guess(params: &ProblemParams, grid: &RadialGrid, seed: u64) -> Result<RadialProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha: f64 = rng.gen_range(0.0..1.0);
    let p = params.n as f64 / 2.0 - params.s;
    let beta = (p + alpha) / 2.0 + rng.gen_range(0.5..2.0);
    RadialProfile::from_fn(grid, params.n, |r| r.powf(alpha) * (1.0 + r * r).powf(-beta))
}

fn finish(
    engine: &Engine,
    params: &ProblemParams,
    config: &MinimizeConfig,
    d: Descent,
    t: Option<usize>,
    group: SymmetryGroup,
) -> Result<MinimizeResult> {
    let field = engine.to_field(&d.h, t)?;
    let report = energy_report(&field, params)?;
    Ok(MinimizeResult {
        field,
        report,
        residual: d.residual,
        iterations: d.iterations,
        converged: d.converged,
        group,
        j_history: d.history,
        seed: config.seed,
        config: *config,
    })
}

/// Radial minimizer from the seeded guess.
pub fn minimize_radial(params: &ProblemParams, config: &MinimizeConfig) -> Result<MinimizeResult> {
    config.validate()?;
    let grid = config.grid_for(params)?;
    let start = radial_guess(params, &grid, config.seed)?;
    minimize_radial_from(params, config, &start)
}

pub fn minimize_radial_from(params: &ProblemParams, config: &MinimizeConfig, start: &RadialProfile) -> Result<MinimizeResult> {
    config.validate()?;
    if start.n != params.n {
        return Err(Error::Incompatible(format!("start lives in n = {}, parameters have n = {}", start.n, params.n)));
    }
    let engine = Engine::new(params, &start.grid, vec![0], vec![0.0]);
    let h0 = DMatrix::from_column_slice(start.len(), 1, &start.h_values(params.s));
    let d = descend(&engine, params, config, h0, None)?;
    let group = SymmetryGroup::new(GroupKind::FullOrthogonal, params.n, 1)?;
    finish(&engine, params, config, d, None, group)
}

fn sector_group(t: usize) -> Result<SymmetryGroup> {
    if t == 1 {
        Ok(SymmetryGroup::trivial(2))
    } else {
        SymmetryGroup::new(GroupKind::CyclicSector(t), 2, 1)
    }
}

fn sector_engine(params: &ProblemParams, grid: &RadialGrid, t: usize, max_mode: usize) -> Result<Engine> {
    let shape = PolarField::zeros(grid, t, max_mode)?;
    Ok(Engine::new(params, grid, shape.modes().to_vec(), shape.collocation_angles()))
}

/// `Z_t`-invariant minimizer in `n = 2`, modes `0, t, 2t, …, mode_factor·t`.
pub fn minimize_sector(params: &ProblemParams, t: usize, config: &MinimizeConfig) -> Result<MinimizeResult> {
    config.validate()?;
    if params.n != 2 {
        return Err(Error::Incompatible(format!("sector minimization needs n = 2, got n = {}", params.n)));
    }
    let grid = config.grid_for(params)?;
    let base = radial_guess(params, &grid, config.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let amp = 0.1 * rng.gen_range(0.5..1.0);
    let mut start = PolarField::from_radial(&base, t, config.mode_factor * t)?;
    start.set_mode(t, base.values().iter().map(|v| amp * v).collect())?;
    minimize_sector_from(params, config, &start)
}

pub fn minimize_sector_from(params: &ProblemParams, config: &MinimizeConfig, start: &PolarField) -> Result<MinimizeResult> {
    config.validate()?;
    if params.n != 2 {
        return Err(Error::Incompatible(format!("sector minimization needs n = 2, got n = {}", params.n)));
    }
    let t = start.t;
    let engine = sector_engine(params, &start.grid, t, start.max_mode())?;
    let h0 = engine.h_of(&Field::Polar(start.clone()));
    let d = descend(&engine, params, config, h0, Some(t))?;
    let res = finish(&engine, params, config, d, Some(t), sector_group(t)?)?;
    if let Field::Polar(f) = &res.field {
        let energy = polar_energy_by_mode(f, params.s);
        let total: f64 = energy.iter().map(|(_, e)| e).sum();
        let fraction = energy.last().map_or(0.0, |(_, e)| e / total);
        if fraction > 1e-6 {
            return Err(Error::ModeTruncationError { fraction });
        }
    }
    Ok(res)
}

/// Bisection-refined onset of instability over a `λ` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
    /// Stop bisecting once the bracket is this narrow.
    pub bisect_tol: f64,
    /// Degrees also tested at every point, to report the lowest unstable one.
    pub scan_degrees: Vec<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { lambda_min: 0.0, lambda_max: 13.0, points: 14, bisect_tol: 1e-2, scan_degrees: vec![1, 2, 3] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub j: f64,
    pub residual: f64,
    pub converged: bool,
    pub certificate: Option<BreakingCertificate>,
    /// `(degree, verdict)` for every scanned degree.
    pub scan: Vec<(usize, Verdict)>,
}

impl SweepRow {
    pub fn verdict(&self) -> Verdict {
        self.certificate.map_or(Verdict::Inconclusive, |c| c.verdict)
    }

    pub fn lowest_unstable_degree(&self) -> Option<usize> {
        self.scan.iter().filter(|(_, v)| *v == Verdict::Unstable).map(|(d, _)| *d).min()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Grid and bisection points, sorted by `λ`.
    pub rows: Vec<SweepRow>,
    /// Last stable and first unstable `λ`.
    pub bracket: Option<(f64, f64)>,
    /// Set when an inconclusive certificate stopped the bisection early.
    pub flagged: bool,
    /// `−H_s + c_μ/(q−2)` when `ĉ` is available.
    pub threshold: Option<f64>,
    pub within_threshold: Option<bool>,
    /// Stable verdicts above an unstable one.
    pub anomalies: Vec<f64>,
}

impl SweepResult {
    pub fn lambda_hat(&self) -> Option<f64> {
        self.bracket.map(|b| b.1)
    }
}

fn sweep_point(params: &ProblemParams, lambda: f64, eigen: &SphericalEigenpair, config: &MinimizeConfig, degrees: &[usize]) -> Result<SweepRow> {
    let p = params.with_lambda(lambda)?;
    let r = minimize_radial(&p, config)?;
    let mut row = SweepRow { lambda, j: r.j(), residual: r.residual, converged: r.converged, certificate: None, scan: vec![] };
    if !r.converged {
        return Ok(row);
    }
    row.certificate = Some(certify(&r.field, &p, eigen)?);
    for &d in degrees {
        let e = eigenpair_degree(params.n, d)?;
        row.scan.push((d, certify(&r.field, &p, &e)?.verdict));
    }
    Ok(row)
}

/// Radial minimizer and certificate at each `λ`, then bisection on the first stable/unstable pair.
pub fn lambda_sweep(
    params: &ProblemParams,
    sweep: &SweepConfig,
    eigen: &SphericalEigenpair,
    config: &MinimizeConfig,
) -> Result<SweepResult> {
    if sweep.points < 2 || !(sweep.lambda_max > sweep.lambda_min) || !(sweep.bisect_tol > 0.0) {
        return Err(Error::InvalidParameter("sweep needs points >= 2, lambda_max > lambda_min, bisect_tol > 0".into()));
    }
    let step = (sweep.lambda_max - sweep.lambda_min) / (sweep.points - 1) as f64;
    let lambdas: Vec<f64> = (0..sweep.points).map(|i| sweep.lambda_min + step * i as f64).collect();
    let mut rows: Vec<SweepRow> = lambdas
        .par_iter()
        .map(|&l| sweep_point(params, l, eigen, config, &sweep.scan_degrees))
        .collect::<Result<_>>()?;
    if rows.iter().all(|r| r.verdict() == Verdict::Inconclusive) {
        return Err(Error::SweepInconclusive);
    }
    let mut flagged = false;
    let mut bracket = None;
    if let Some(first) = rows.iter().position(|r| r.verdict() == Verdict::Unstable) {
        let hi = rows[first].lambda;
        let stable_below = rows[..first].iter().rposition(|r| r.verdict() == Verdict::Stable);
        if let Some(k) = stable_below {
            flagged |= k + 1 != first;
            let (mut lo, mut hi) = (rows[k].lambda, hi);
            while hi - lo > sweep.bisect_tol {
                let mid = 0.5 * (lo + hi);
                let row = sweep_point(params, mid, eigen, config, &sweep.scan_degrees)?;
                let v = row.verdict();
                rows.push(row);
                match v {
                    Verdict::Unstable => hi = mid,
                    Verdict::Stable => lo = mid,
                    Verdict::Inconclusive => {
                        flagged = true;
                        break;
                    }
                }
            }
            bracket = Some((lo, hi));
        } else {
            // unstable from the first point on: nothing to bisect against
            flagged = true;
            bracket = Some((f64::NEG_INFINITY, hi));
        }
    }
    rows.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let mut anomalies = vec![];
    let mut seen_unstable = false;
    for r in &rows {
        match r.verdict() {
            Verdict::Unstable => seen_unstable = true,
            Verdict::Stable if seen_unstable => anomalies.push(r.lambda),
            _ => {}
        }
    }
    let threshold = params
        .c_hat
        .map(|_| crate::perturb::threshold(params, crate::perturb::ThresholdSource::Eigen(eigen)).map(|b| b.lambda_bound))
        .transpose()?;
    let within_threshold = match (threshold, bracket) {
        (Some(t), Some((_, hi))) => Some(hi <= t),
        _ => None,
    };
    Ok(SweepResult { rows, bracket, flagged, threshold, within_threshold, anomalies })
}

/// `J_λ(u_t) ≤ J_λ(v_t) < J_λ(u_T)` with `T = h·t` and `v_t(r, θ) = u_T(r, θ/h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorComparison {
    pub t: usize,
    pub big_t: usize,
    pub lambda: f64,
    pub j_t: f64,
    pub j_vt: f64,
    pub j_big_t: f64,
    /// Relative change of `∫|x|^{-2s}|·|²` and `∫|x|^{-bq}|·|^q` under the dilation.
    pub hardy_change: f64,
    pub lq_change: f64,
    pub seminorm_big_t: f64,
    pub seminorm_vt: f64,
    pub error_estimate: f64,
    pub minimal: bool,
    pub strict: bool,
}

impl SectorComparison {
    pub fn minimality_margin(&self) -> f64 {
        self.j_vt - self.j_t
    }

    pub fn strict_margin(&self) -> f64 {
        self.j_big_t - self.j_vt
    }
}

fn coarse_j(field: &PolarField, params: &ProblemParams) -> Result<f64> {
    let g = &field.grid;
    let len = g.len();
    let last = if len % 2 == 0 { len - 2 } else { len - 1 };
    let coarse = RadialGrid::new(g.r_min, g.nodes()[last], last / 2 + 1)?;
    let mut out = PolarField::zeros(&coarse, field.t, field.max_mode())?;
    for (idx, &l) in field.modes().iter().enumerate() {
        out.set_mode(l, field.coeffs(idx).iter().step_by(2).take(last / 2 + 1).copied().collect())?;
    }
    Ok(energy_report(&Field::Polar(out), params)?.j_lambda)
}

fn nonradial_fraction(f: &PolarField, s: f64) -> (f64, f64) {
    let e = polar_energy_by_mode(f, s);
    let total: f64 = e.iter().map(|(_, v)| v).sum();
    let top = e.last().map_or(0.0, |(_, v)| v / total);
    (e.iter().filter(|(l, _)| *l != 0).map(|(_, v)| v).sum::<f64>() / total, top)
}

pub fn sector_compare(params: &ProblemParams, t: usize, h: usize, config: &MinimizeConfig) -> Result<SectorComparison> {
    if h < 2 {
        return Err(Error::InvalidParameter(format!("dilation factor h = {h} must be at least 2")));
    }
    let big_t = h * t;
    let u_big = minimize_sector(params, big_t, config)?.require_converged()?;
    let Field::Polar(fb) = &u_big.field else { unreachable!("sector runs return polar fields") };
    let (off_axis, top_big) = nonradial_fraction(fb, params.s);
    if off_axis < 1e-8 {
        return Err(Error::RadialCollapse);
    }
    let v = fb.angular_dilation(h)?;
    let v_field = Field::Polar(v.clone());
    let rv = energy_report(&v_field, params)?;
    let u_t = minimize_sector_from(params, config, &v)?.require_converged()?;
    let Field::Polar(ft) = &u_t.field else { unreachable!("sector runs return polar fields") };
    let (_, top_t) = nonradial_fraction(ft, params.s);
    let rb = &u_big.report;
    let rt = &u_t.report;
    let grid_err = (coarse_j(fb, params)? - rb.j_lambda).abs() + (coarse_j(ft, params)? - rt.j_lambda).abs();
    let error_estimate = rb.j_lambda * (u_big.residual.powi(2) + rb.truncation_residual + top_big)
        + rt.j_lambda * (u_t.residual.powi(2) + rt.truncation_residual + top_t)
        + rv.j_lambda * rv.truncation_residual
        + grid_err;
    let j_t = rt.j_lambda;
    let j_vt = rv.j_lambda;
    let j_big_t = rb.j_lambda;
    Ok(SectorComparison {
        t,
        big_t,
        lambda: params.lambda,
        j_t,
        j_vt,
        j_big_t,
        hardy_change: (rv.hardy - rb.hardy).abs() / rb.hardy,
        lq_change: (rv.lq - rb.lq).abs() / rb.lq,
        seminorm_big_t: rb.seminorm,
        seminorm_vt: rv.seminorm,
        error_estimate,
        minimal: j_t <= j_vt + error_estimate,
        strict: j_big_t - j_vt > error_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RawParams;

    fn params(n: usize, q: f64, lambda: f64) -> ProblemParams {
        RawParams::new(n, 0.5, q, lambda).validate().unwrap()
    }

    #[test]
    fn radial_converges_and_descends() {
        let p = params(4, 2.5, 5.0);
        let r = minimize_radial(&p, &MinimizeConfig::default()).unwrap();
        assert!(r.converged, "residual {} after {}", r.residual, r.iterations);
        assert!(r.j_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.j(), r.report.j_lambda);
        assert!(r.field.components()[0].1.iter().all(|v| *v >= 0.0));
        assert!(r.report.seminorm >= p.hardy() * r.report.hardy * (1.0 - 1e-6));
    }

    #[test]
    fn radial_value_increases_with_lambda() {
        let c = MinimizeConfig::default();
        let js: Vec<f64> = [0.0, 2.0, 4.0].iter().map(|&l| minimize_radial(&params(4, 2.5, l), &c).unwrap().j()).collect();
        assert!(js.windows(2).all(|w| w[0] < w[1]), "{js:?}");
    }

    #[test]
    fn zero_start_is_rejected() {
        let p = params(4, 2.5, 0.0);
        let g = RadialGrid::new(1e-6, 1e6, 256).unwrap();
        let zero = RadialProfile::from_fn(&g, 4, |_| 0.0).unwrap();
        assert_eq!(minimize_radial_from(&p, &MinimizeConfig::default(), &zero), Err(Error::DegenerateStart));
    }

    #[test]
    fn config_validation() {
        let bad = MinimizeConfig { step: 0.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = MinimizeConfig { el_tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let e = eigenpair_degree(4, 1).unwrap();
        let sweep = SweepConfig { points: 1, ..Default::default() };
        assert!(lambda_sweep(&params(4, 2.5, 0.0), &sweep, &e, &MinimizeConfig::default()).is_err());
    }

    #[test]
    fn sector_needs_plane() {
        let r = minimize_sector(&params(4, 2.5, 0.0), 2, &MinimizeConfig::default());
        assert!(matches!(r, Err(Error::Incompatible(_))));
    }

    #[test]
    fn sector_at_zero_lambda_is_radial() {
        let p = params(2, 3.0, 0.0);
        let c = MinimizeConfig { mode_factor: 4, ..Default::default() };
        let rad = minimize_radial(&p, &c).unwrap();
        let sec = minimize_sector(&p, 1, &c).unwrap();
        assert!(sec.converged);
        assert!((sec.j() - rad.j()).abs() < 1e-8 * rad.j());
        assert!(sec.j_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn seeds_reproduce() {
        let p = params(4, 2.5, 1.0);
        let c = MinimizeConfig { seed: 7, ..Default::default() };
        let a = minimize_radial(&p, &c).unwrap();
        let b = minimize_radial(&p, &c).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
