//! Normalized iteration of vector-valued functions under a Lipschitz map,
//! Hölder-exponent estimation, and Green classes of torus automorphisms.

use nalgebra::{Complex as C64, DMatrix};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use crate::arith::{Field, Gq};
use crate::cohomology::{torus_action, TorusAutomorphism};
use crate::degrees::cesaro_class_limit;
use crate::error::{Error, Result};
use crate::jordan::{dominant_components, eigen_structure, subsequential_limit, JordanData, ThetaGroup};
use crate::matrix::{vec_norm_inf, ExactMatrix};
use crate::rate::{fit_rate, linear_fit, RateFit};

/// Deviations below this are rounding noise of the `f64` grid iteration.
pub const GRID_FLOOR: f64 = 1e-12;

/// Uniform grid `{i/res}^dim` on the real torus `ℝ^dim/ℤ^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TorusGrid {
    pub dim: usize,
    pub res: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, res: usize) -> Self {
        TorusGrid { dim, res }
    }

    /// `2^14` points in dimension 1, `2^7` per axis in dimension 2.
    pub fn default_for(dim: usize) -> Self {
        let res = match dim {
            1 => 1 << 14,
            2 => 1 << 7,
            _ => 1 << 4,
        };
        TorusGrid { dim, res }
    }

    pub fn len(&self) -> usize {
        self.res.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self, idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim];
        let mut r = idx;
        for a in (0..self.dim).rev() {
            c[a] = r % self.res;
            r /= self.res;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.res + c % self.res)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.coords(idx).iter().map(|&c| c as f64 / self.res as f64).collect()
    }

    /// Index map of `x ↦ Gx mod 1`, exact on the grid.
    pub fn affine_map(&self, g: &[Vec<i64>]) -> Vec<usize> {
        let r = self.res as i64;
        (0..self.len())
            .map(|idx| {
                let c = self.coords(idx);
                let img: Vec<usize> = g
                    .iter()
                    .map(|row| row.iter().zip(&c).map(|(a, &x)| a * x as i64).sum::<i64>().rem_euclid(r) as usize)
                    .collect();
                self.index(&img)
            })
            .collect()
    }

    /// Shift by `s` cells along `axis`.
    pub fn shift(&self, idx: usize, axis: usize, s: usize) -> usize {
        let mut c = self.coords(idx);
        c[axis] = (c[axis] + s) % self.res;
        self.index(&c)
    }
}

/// Vector-valued samples on a grid, `values[point][component]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValues {
    pub grid: TorusGrid,
    pub values: Vec<Vec<C64<f64>>>,
}

impl GridValues {
    pub fn sample(grid: TorusGrid, f: impl Fn(&[f64]) -> Vec<C64<f64>> + Sync) -> Self {
        let values = (0..grid.len()).into_par_iter().map(|i| f(&grid.point(i))).collect();
        GridValues { grid, values }
    }

    pub fn components(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.par_iter().map(|v| v.iter().map(|z| z.norm()).fold(0.0, f64::max)).reduce(|| 0.0, f64::max)
    }

    pub fn sup_distance(&self, o: &GridValues) -> f64 {
        self.values
            .par_iter()
            .zip(&o.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }

    /// One component as a scalar function.
    pub fn component(&self, c: usize) -> GridValues {
        GridValues { grid: self.grid, values: self.values.iter().map(|v| vec![v[c]]).collect() }
    }
}

/// Operator max-norm (max row sum) of an integer matrix.
pub fn max_row_sum(g: &[Vec<i64>]) -> f64 {
    g.iter().map(|r| r.iter().map(|a| a.unsigned_abs() as f64).sum::<f64>()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct IterationSetup {
    pub grid: TorusGrid,
    /// Integer matrix `G` of `g(x) = Gx mod 1`.
    pub g: Vec<Vec<i64>>,
    /// Lipschitz constant of `g`, the max-norm of `G`.
    pub lipschitz: f64,
    pub u: GridValues,
    /// Hölder exponent of `u`.
    pub nu: f64,
    pub lambda_matrix: ExactMatrix,
    pub jordan: JordanData,
}

impl IterationSetup {
    pub fn new(g: Vec<Vec<i64>>, u: GridValues, nu: f64, lambda_matrix: ExactMatrix, prec: u32) -> Result<Self> {
        let grid = u.grid;
        if g.len() != grid.dim || g.iter().any(|r| r.len() != grid.dim) {
            return Err(Error::DimensionMismatch(format!("G must be {0}×{0}", grid.dim)));
        }
        if u.components() != lambda_matrix.rows() || !lambda_matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "u has {} components, Λ is {}×{}",
                u.components(),
                lambda_matrix.rows(),
                lambda_matrix.cols()
            )));
        }
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::Invalid(format!("Hölder exponent {nu} outside (0, 1]")));
        }
        let lipschitz = max_row_sum(&g);
        if lipschitz <= 1.0 {
            return Err(Error::HypothesisViolated(format!("Lipschitz constant M = {lipschitz} ≤ 1")));
        }
        let jordan = eigen_structure(&lambda_matrix, prec)?;
        if jordan.spectral_radius <= 1 {
            return Err(Error::HypothesisViolated(format!(
                "spectral radius of Λ is {} ≤ 1",
                jordan.spectral_radius.to_f64()
            )));
        }
        Ok(IterationSetup { grid, g, lipschitz, u, nu, lambda_matrix, jordan })
    }

    pub fn lambda(&self) -> f64 {
        self.jordan.spectral_radius.to_f64()
    }

    /// `min(ν, log λ / log M)`.
    pub fn admissible_bound(&self) -> f64 {
        self.nu.min(self.lambda().ln() / self.lipschitz.ln())
    }
}

#[derive(Debug, Clone)]
pub struct IterationReport {
    pub n_values: Vec<u64>,
    /// `‖exp(−inθ)v_n − v‖∞`, twisted on each dominant spectral component.
    pub twisted_deviation: Vec<f64>,
    /// `‖w_N − w‖∞`.
    pub averaged_deviation: Vec<f64>,
    pub twisted_rate: RateFit,
    pub averaged_rate: RateFit,
    pub v: GridValues,
    pub w: GridValues,
    pub v_last: GridValues,
    pub w_last: GridValues,
    /// `n` used for the Richardson extrapolation of `v`.
    pub extrapolation_n: u64,
}

struct Twist {
    projectors: Vec<DMatrix<C64<f64>>>,
    thetas: Vec<f64>,
    zero_angle: Vec<bool>,
    rest: DMatrix<C64<f64>>,
}

impl Twist {
    fn new(setup: &IterationSetup, prec: u32) -> Self {
        let e = setup.lambda_matrix.rows();
        let comps = dominant_components(&setup.lambda_matrix, &setup.jordan, prec);
        let to_f = |c: &crate::matrix::CMatrix| {
            DMatrix::from_fn(e, e, |i, j| {
                let z = c.get(i, j);
                C64::new(z.real().to_f64(), z.imag().to_f64())
            })
        };
        let projectors: Vec<_> = comps.iter().map(|c| to_f(&c.projector)).collect();
        let mut rest = DMatrix::identity(e, e);
        for p in &projectors {
            rest -= p;
        }
        Twist {
            thetas: comps.iter().map(|c| c.theta.to_f64()).collect(),
            zero_angle: comps.iter().map(|c| c.order == Some(1)).collect(),
            projectors,
            rest,
        }
    }

    fn at(&self, n: u64) -> DMatrix<C64<f64>> {
        let mut acc = self.rest.clone();
        for (p, t) in self.projectors.iter().zip(&self.thetas) {
            let a = -(n as f64) * t;
            acc += p * C64::new(a.cos(), a.sin());
        }
        acc
    }

    fn dominant(&self) -> DMatrix<C64<f64>> {
        let e = self.rest.nrows();
        self.projectors.iter().fold(DMatrix::zeros(e, e), |a, p| a + p)
    }

    fn averaged(&self) -> DMatrix<C64<f64>> {
        let e = self.rest.nrows();
        self.projectors.iter().zip(&self.zero_angle).filter(|(_, z)| **z).fold(DMatrix::zeros(e, e), |a, (p, _)| a + p)
    }
}

fn apply(m: &DMatrix<C64<f64>>, f: &[Vec<C64<f64>>]) -> Vec<Vec<C64<f64>>> {
    f.par_iter().map(|v| (m * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec()).collect()
}

/// Runs `T_{n+1} = (Λ/λ)(u∘g^n/λ^n + T_n)`, so that `v_n = T_n / n^{m−1}`,
/// calling `visit(n, v_n)` for `n = 1..=n_max`.
fn iterate(setup: &IterationSetup, n_max: u64, mut visit: impl FnMut(u64, &[Vec<C64<f64>>])) {
    let e = setup.lambda_matrix.rows();
    let lam = setup.lambda();
    let m = setup.jordan.multiplicity as i32;
    let scaled = DMatrix::from_fn(e, e, |i, j| {
        let z = setup.lambda_matrix.get(i, j).to_complex(64);
        C64::new(z.real().to_f64() / lam, z.imag().to_f64() / lam)
    });
    let gmap = setup.grid.affine_map(&setup.g);
    let npts = setup.grid.len();
    let mut pos: Vec<usize> = (0..npts).collect();
    let mut t = vec![vec![C64::new(0.0, 0.0); e]; npts];
    let mut lam_pow = 1.0f64;
    for n in 0..n_max {
        t = t
            .par_iter()
            .zip(&pos)
            .map(|(tv, &p)| {
                let x = nalgebra::DVector::from_fn(e, |c, _| setup.u.values[p][c] / lam_pow + tv[c]);
                (&scaled * x).as_slice().to_vec()
            })
            .collect();
        pos = pos.par_iter().map(|&p| gmap[p]).collect();
        lam_pow *= lam;
        let k = n + 1;
        let norm = (k as f64).powi(m - 1);
        let vn: Vec<Vec<C64<f64>>> = t.par_iter().map(|v| v.iter().map(|z| z / norm).collect()).collect();
        visit(k, &vn);
    }
}

/// `v_n = (n^{m−1}λ^n)^{-1} Σ_{j=1}^n Λ^j ∘ u ∘ g^{n−j}` and `w_N = N^{-1} Σ v_n`.
/// The limit `v` is extrapolated from `n = 2n_ext` and `4n_ext`, with
/// `n_ext = max(n_max, N_max)`, and `w` keeps the components of `v` with `θ = 0`.
pub fn holder_iteration(setup: &IterationSetup, n_max: u64, big_n_max: u64, prec: u32) -> Result<IterationReport> {
    if n_max < 20 {
        return Err(Error::Invalid("n_max must be at least 20".into()));
    }
    let twist = Twist::new(setup, prec);
    let grid = setup.grid;
    let n_ext = n_max.max(big_n_max);
    let (lo, hi) = (2 * n_ext, 4 * n_ext);
    let mut t_lo = Vec::new();
    let mut t_hi = Vec::new();
    iterate(setup, hi, |n, vn| {
        if n == lo {
            t_lo = apply(&twist.at(n), vn);
        } else if n == hi {
            t_hi = apply(&twist.at(n), vn);
        }
    });
    let rich: Vec<Vec<C64<f64>>> =
        t_hi.iter().zip(&t_lo).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * 2.0 - y).collect()).collect();
    let v = GridValues { grid, values: apply(&twist.dominant(), &rich) };
    let w = GridValues { grid, values: apply(&twist.averaged(), &v.values) };

    let e = setup.lambda_matrix.rows();
    let mut ns = Vec::new();
    let mut tw = Vec::new();
    let mut av = Vec::new();
    let mut sum = vec![vec![C64::new(0.0, 0.0); e]; grid.len()];
    let mut v_last = None;
    let mut w_last = None;
    iterate(setup, n_ext, |n, vn| {
        for (s, x) in sum.iter_mut().zip(vn) {
            for (a, b) in s.iter_mut().zip(x) {
                *a += b;
            }
        }
        let wn = GridValues { grid, values: sum.iter().map(|s| s.iter().map(|z| z / n as f64).collect()).collect() };
        let tn = GridValues { grid, values: apply(&twist.at(n), vn) };
        ns.push(n);
        tw.push(if n <= n_max { tn.sup_distance(&v) } else { f64::NAN });
        av.push(if n <= big_n_max { wn.sup_distance(&w) } else { f64::NAN });
        if n == n_max {
            v_last = Some(GridValues { grid, values: vn.to_vec() });
        }
        if n == big_n_max {
            w_last = Some(wn);
        }
    });
    let take = |lim: u64, d: &[f64]| -> (Vec<u64>, Vec<f64>) {
        ns.iter().zip(d).filter(|(n, _)| **n <= lim).map(|(n, x)| (*n, *x)).unzip()
    };
    let (tn, td) = take(n_max, &tw);
    let (an, ad) = take(big_n_max, &av);
    let fit_slice = |n: &[u64], d: &[f64]| -> (Vec<u64>, Vec<f64>) {
        n.iter().zip(d).filter(|(n, _)| **n >= 20).map(|(n, x)| (*n, *x)).unzip()
    };
    let (tfn, tfd) = fit_slice(&tn, &td);
    let (afn, afd) = fit_slice(&an, &ad);
    let twisted_rate = fit_rate(&tfn, &tfd, (20, 50), (51, n_max), false, GRID_FLOOR);
    let averaged_rate = fit_rate(&afn, &afd, (20, 50), (51, big_n_max), true, GRID_FLOOR);
    Ok(IterationReport {
        n_values: tn,
        twisted_deviation: td,
        averaged_deviation: ad,
        twisted_rate,
        averaged_rate,
        v,
        w,
        v_last: v_last.expect("n_max ≥ 1"),
        w_last: w_last.expect("N_max ≥ 1"),
        extrapolation_n: hi,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderEstimate {
    pub exponent: f64,
    pub constant: f64,
    pub pairs_used: usize,
    /// Separations `h` used, in units of the torus period.
    pub scales: Vec<f64>,
    /// `ω(h) = sup_{|x−y| ≤ h} |v(x) − v(y)|` at each scale.
    pub oscillations: Vec<f64>,
    pub admissible_bound: Option<f64>,
}

/// Dyadic exponents `j` (separations `2^{-j}`) from `max(3, j_max − 7)` up to the
/// finest scale that keeps at least 4 grid cells.
pub fn default_scales(grid: TorusGrid) -> Vec<u32> {
    let jmax = (grid.res as f64).log2().floor() as u32 - 2;
    (jmax.saturating_sub(7).max(3)..=jmax).collect()
}

/// Regression slope of `log ω(h)` against `log h` over dyadic `h = 2^{-j}`,
/// where `ω(h) = sup_{0 < |x−y| ≤ h} |v(x)−v(y)|` along each coordinate axis.
pub fn holder_exponent_estimate(v: &GridValues, scales: &[u32], admissible_bound: Option<f64>) -> Result<HolderEstimate> {
    let grid = v.grid;
    let usable: Vec<(u32, usize)> = scales
        .iter()
        .filter_map(|&j| grid.res.checked_shr(j).filter(|&c| c >= 1 && c << j == grid.res).map(|c| (j, c)))
        .collect();
    let max_cells = usable.iter().map(|&(_, c)| c).max().unwrap_or(0);
    // sup over the grid of |v(x + δ e_axis) − v(x)| for δ = 1..=max_cells cells
    let shift_sup: Vec<f64> = (1..=max_cells)
        .into_par_iter()
        .map(|d| {
            let mut o = 0.0f64;
            for axis in 0..grid.dim {
                for i in 0..grid.len() {
                    let k = grid.shift(i, axis, d);
                    for (a, b) in v.values[i].iter().zip(&v.values[k]) {
                        o = o.max((a - b).norm());
                    }
                }
            }
            o
        })
        .collect();
    let mut hs = Vec::new();
    let mut osc = Vec::new();
    for &(j, cells) in &usable {
        hs.push(2f64.powi(-(j as i32)));
        osc.push(shift_sup[..cells].iter().cloned().fold(0.0, f64::max));
    }
    let pairs = max_cells * grid.len() * grid.dim;
    if hs.len() < 3 {
        return Err(Error::Invalid(format!("only {} usable dyadic scales; need at least 3", hs.len())));
    }
    let scale = v.sup_norm().max(1.0);
    if osc.iter().all(|&o| o <= 1e-12 * scale) {
        return Err(Error::DegenerateFunction);
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = osc.iter().map(|o| o.max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, intercept, _) = linear_fit(&xs, &ys);
    Ok(HolderEstimate {
        exponent: slope.min(1.0),
        constant: intercept.exp(),
        pairs_used: pairs,
        scales: hs,
        oscillations: osc,
        admissible_bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissiblePower {
    pub n: u32,
    /// `M_n = ‖G^n‖`.
    pub lipschitz: f64,
    /// `n log λ / log M_n`.
    pub ratio: f64,
}

/// Smallest `n` with `ν < n log λ / log ‖G^n‖`, i.e. the power of the map for
/// which the requested exponent becomes admissible.
pub fn smallest_admissible_power(g: &ExactMatrix, lambda: f64, nu: f64, n_cap: u32) -> Result<AdmissiblePower> {
    if lambda <= 1.0 {
        return Err(Error::HypothesisViolated(format!("λ = {lambda} ≤ 1")));
    }
    let prec = 128;
    let mut pw = g.clone();
    for n in 1..=n_cap {
        if n > 1 {
            pw = pw.mul(g);
        }
        let m = pw
            .to_complex(None, prec)
            .to_f64()
            .chunks(g.cols())
            .map(|r| r.iter().map(|(a, b)| a.hypot(*b)).sum::<f64>())
            .fold(0.0, f64::max);
        let ratio = if m <= 1.0 { f64::INFINITY } else { n as f64 * lambda.ln() / m.ln() };
        if nu < ratio {
            return Ok(AdmissiblePower { n, lipschitz: m, ratio });
        }
    }
    Err(Error::HypothesisViolated(format!("no power up to {n_cap} makes ν = {nu} admissible")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GreenMode {
    PlainLimit,
    CesaroOnly,
}

#[derive(Debug, Clone)]
pub struct SubsequentialSample {
    pub n: u64,
    /// Target angle along the first non-trivial direction.
    pub target: f64,
    pub class: Vec<Complex>,
    /// `(f^n)*ω / (n^{l−1} d_1^n)` computed exactly, when within the digit budget.
    pub observed: Option<Vec<Complex>>,
}

#[derive(Debug, Clone)]
pub struct GreenTorusReport {
    pub mode: GreenMode,
    pub d1: Float,
    pub multiplicity: usize,
    pub theta_group: ThetaGroup,
    /// Plain limit, or the Cesàro limit in `CesaroOnly` mode.
    pub limit_class: Vec<Complex>,
    /// Hermitian matrix `H` with `limit = Σ H_ij b[i;j]`.
    pub coefficient_matrix: Vec<Vec<(f64, f64)>>,
    pub coefficient_eigenvalues: Vec<f64>,
    pub hermitian_defect: f64,
    /// `‖f*·limit − d_1·limit‖∞`.
    pub eigen_residual: f64,
    pub n_values: Vec<u64>,
    /// Plain deviations in `PlainLimit` mode, Cesàro deviations otherwise.
    pub deviations: Vec<f64>,
    pub rate: RateFit,
    pub samples: Vec<SubsequentialSample>,
    /// Largest distance between two sampled subsequential limits.
    pub sample_separation: f64,
    /// Largest distance between two observed normalized classes.
    pub observed_separation: Option<f64>,
}

pub const SAMPLE_TARGETS: usize = 8;
pub const SAMPLE_WINDOW: f64 = 1e-3;

fn circle_dist(a: f64, b: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let d = (a - b).rem_euclid(t);
    d.min(t - d)
}

fn max_pairwise(cs: &[&Vec<Complex>], prec: u32) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in cs.iter().enumerate() {
        for b in &cs[i + 1..] {
            let d: Vec<Complex> = a.iter().zip(b.iter()).map(|(x, y)| Complex::with_val(prec, x - y)).collect();
            best = best.max(vec_norm_inf(&d).to_f64());
        }
    }
    best
}

/// Green class of `(f^n)*ω` on a complex torus: the plain limit when Θ is
/// trivial, otherwise the Cesàro limit plus sampled subsequential limits.
pub fn green_limit_torus(t: &TorusAutomorphism, n_max: u64, budget: usize, prec: u32) -> Result<GreenTorusReport> {
    let action = torus_action(t)?;
    let b = &action.blocks[1];
    let j = eigen_structure(b, prec)?;
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    if Float::with_val(prec, &j.spectral_radius - 1u32).abs() <= tol {
        return Err(Error::NoExpansion);
    }
    let wp = prec + 32;
    let k = t.k();
    let omega = &action.kahler_class[1];
    let comps = dominant_components(b, &j, prec);
    let l = j.multiplicity;
    let d = Float::with_val(wp, &j.spectral_radius);
    let normalized = |n: u64, v: &[Gq]| -> Vec<Complex> {
        let denom = Float::with_val(wp, d.clone().pow(n as u32)) * Float::with_val(wp, n).pow(l as u32 - 1);
        v.iter().map(|x| Complex::with_val(wp, x.to_complex(wp) / &denom)).collect()
    };
    let mode = if j.theta_group == ThetaGroup::Trivial { GreenMode::PlainLimit } else { GreenMode::CesaroOnly };
    let omega_c: Vec<Complex> = omega.iter().map(|x| x.to_complex(wp)).collect();

    let (limit, ns, devs, rate, eigen_residual) = match mode {
        GreenMode::PlainLimit => {
            let zero = vec![Float::with_val(prec, 0); comps.len()];
            let lim = subsequential_limit(&comps, &zero, b.rows(), prec).mul_vec(&omega_c);
            let mut ns = Vec::new();
            let mut devs = Vec::new();
            let mut v = omega.clone();
            for n in 1..=n_max {
                v = b.mul_vec(&v);
                let digits = v.iter().map(Gq::digit_size).max().unwrap_or(0);
                if digits > budget {
                    return Err(Error::Overflow { digits, budget });
                }
                let dev: Vec<Complex> =
                    normalized(n, &v).iter().zip(&lim).map(|(a, b)| Complex::with_val(wp, a - b)).collect();
                ns.push(n);
                devs.push(vec_norm_inf(&dev).to_f64());
            }
            let fit = (20.min(n_max), 50.min(n_max));
            let rate = fit_rate(&ns, &devs, fit, (fit.1 + 1, n_max), false, crate::jordan::rounding_floor(prec));
            let img = b.to_complex(None, wp).mul_vec(&lim);
            let res: Vec<Complex> =
                img.iter().zip(&lim).map(|(x, y)| Complex::with_val(wp, x - Complex::with_val(wp, y * &d))).collect();
            (lim, ns, devs, rate, vec_norm_inf(&res).to_f64())
        }
        GreenMode::CesaroOnly => {
            let rep = cesaro_class_limit(&action, 1, omega, n_max, budget, prec)?;
            (rep.limit, rep.n_values, rep.deviations, rep.rate, rep.eigen_residual)
        }
    };

    let mut samples = Vec::new();
    if mode == GreenMode::CesaroOnly {
        let lead = comps.iter().position(|c| c.order != Some(1)).expect("non-trivial Θ");
        let theta = comps[lead].theta.to_f64();
        let reachable = |q: usize| match comps[lead].order {
            Some(o) => (q * o as usize).is_multiple_of(SAMPLE_TARGETS),
            None => true,
        };
        for q in (0..SAMPLE_TARGETS).filter(|&q| reachable(q)) {
            let target = std::f64::consts::TAU * q as f64 / SAMPLE_TARGETS as f64;
            let Some(n) = (1..=1_000_000u64).find(|&n| circle_dist(n as f64 * theta, target) < SAMPLE_WINDOW) else {
                continue;
            };
            let angles: Vec<Float> = comps.iter().map(|c| Float::with_val(wp, &c.theta) * n).collect();
            let class = subsequential_limit(&comps, &angles, b.rows(), prec).mul_vec(&omega_c);
            samples.push(SubsequentialSample { n, target, class, observed: None });
        }
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by_key(|&i| samples[i].n);
        let mut v = omega.clone();
        let mut cur = 0;
        for i in order {
            let n = samples[i].n;
            let mut ok = true;
            while cur < n {
                v = b.mul_vec(&v);
                cur += 1;
                if v.iter().map(Gq::digit_size).max().unwrap_or(0) > budget {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
            samples[i].observed = Some(normalized(n, &v));
        }
    }
    let sample_separation = max_pairwise(&samples.iter().map(|s| &s.class).collect::<Vec<_>>(), wp);
    let observed: Vec<&Vec<Complex>> = samples.iter().filter_map(|s| s.observed.as_ref()).collect();
    let observed_separation = (observed.len() >= 2).then(|| max_pairwise(&observed, wp));

    let h = DMatrix::from_fn(k, k, |r, c| {
        let z = &limit[r * k + c];
        C64::new(z.real().to_f64(), z.imag().to_f64())
    });
    let hermitian_defect = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let herm = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut eig: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok(GreenTorusReport {
        mode,
        d1: Float::with_val(prec, &j.spectral_radius),
        multiplicity: l,
        theta_group: j.theta_group,
        coefficient_matrix: (0..k).map(|r| (0..k).map(|c| (h[(r, c)].re, h[(r, c)].im)).collect()).collect(),
        coefficient_eigenvalues: eig,
        hermitian_defect,
        limit_class: limit,
        eigen_residual,
        n_values: ns,
        deviations: devs,
        rate,
        samples,
        sample_separation,
        observed_separation,
    })
}

#[derive(Debug, Clone)]
pub struct RecurrenceReport {
    /// Number of independent classes `[ω], …, [(f^{m−1})*ω]`.
    pub m: usize,
    /// `a_0, …, a_{m−1}` with `[(f^m)*ω] = Σ a_j [(f^j)*ω]`.
    pub coefficients: Vec<Gq>,
    pub companion: ExactMatrix,
    pub companion_radius: Float,
    pub block_radius: Float,
    pub companion_multiplicity: usize,
    pub block_multiplicity: usize,
    pub radius_matches: bool,
    /// Whether the companion polynomial is the full characteristic polynomial.
    pub full_char_poly: bool,
}

/// Coordinates of `target` in the span of the independent `cols`, if it lies there.
fn coordinates_in_span(cols: &[Vec<Gq>], target: &[Gq]) -> Option<Vec<Gq>> {
    let mut all = cols.to_vec();
    all.push(target.to_vec());
    let (r, pivots) = ExactMatrix::from_columns(&all).rref();
    if pivots.contains(&cols.len()) {
        return None;
    }
    Some((0..cols.len()).map(|c| r.get(pivots.iter().position(|&p| p == c).expect("independent"), cols.len()).clone()).collect())
}

/// Krylov relation of `[ω]` under `f*` on `H^{1,1}` and its companion matrix
/// with `1`s on the subdiagonal and `a_0, …, a_{m−1}` in the last column.
pub fn recurrence_machinery(action: &crate::cohomology::GradedCohomologyAction, prec: u32) -> Result<RecurrenceReport> {
    if action.k < 1 {
        return Err(Error::Invalid("no H^{1,1}".into()));
    }
    let b = &action.blocks[1];
    let mut cols = vec![action.kahler_class[1].clone()];
    let coefficients = loop {
        let next = b.mul_vec(cols.last().expect("nonempty"));
        if let Some(c) = coordinates_in_span(&cols, &next) {
            break c;
        }
        cols.push(next);
    };
    let m = cols.len();
    let mut companion = ExactMatrix::zeros(m, m);
    for i in 1..m {
        companion.set(i, i - 1, Gq::one());
    }
    for (i, a) in coefficients.iter().enumerate() {
        companion.set(i, m - 1, a.clone());
    }
    let jc = eigen_structure(&companion, prec)?;
    let jb = eigen_structure(b, prec)?;
    let diff = Float::with_val(prec, &jc.spectral_radius - &jb.spectral_radius).abs();
    let radius_matches = diff <= Float::with_val(prec, &jb.spectral_radius * Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2)));
    Ok(RecurrenceReport {
        m,
        full_char_poly: jc.char_poly == jb.char_poly,
        coefficients,
        companion,
        companion_radius: jc.spectral_radius.clone(),
        block_radius: jb.spectral_radius.clone(),
        companion_multiplicity: jc.multiplicity,
        block_multiplicity: jb.multiplicity,
        radius_matches,
    })
}
