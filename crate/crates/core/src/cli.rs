//! Command dispatch and result emission for the `kahlerdyn` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use nalgebra::Complex as C64;
use rug::{Complex, Float};
use serde_json::{json, Map, Value};

use crate::arith::Gq;
use crate::cohomology::{mazur_action, mazur_involutions, raw_action, torus_action, CupProduct, GradedCohomologyAction, RawModel, TorusAutomorphism};
use crate::config::{matrix_from, parse_config, vector_from, ClassKind, Command, Format, ModelConfig, RunConfig, TrigTerm};
use crate::degrees::{
    cesaro_class_limit, cesaro_kernel_basis, check_concavity, degree_chain_check, degree_sequence, dominant_eigenclass,
    dynamical_degrees, mass_bound_check, relative_degrees, submultiplicativity_check, EigenClass,
};
use crate::equilibrium::{
    default_resolution, ergodic_average_check, grid_correlation, haar_character_correlation, trig_correlation, MixingContext, TrigPoly,
};
use crate::error::{Error, Result};
use crate::green::{
    default_scales, green_limit_torus, holder_exponent_estimate, holder_iteration, recurrence_machinery, smallest_admissible_power,
    GridValues, IterationSetup, TorusGrid,
};
use crate::jordan::{eigen_structure, lambda_infinity, power_asymptotics, LimitOptions};
use crate::matrix::{CMatrix, ExactMatrix};
use crate::rate::RateFit;

/// Environment variable holding the number of worker threads.
pub const THREADS_ENV: &str = "KAHLERDYN_THREADS";

#[derive(Debug, clap::Parser)]
#[command(name = "kahlerdyn", version, about = "Cohomological dynamics of Kähler automorphisms")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub precision: Option<u32>,
}

/// A plot-ready table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(io)?).map_err(io)
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Result of one command before it is written anywhere.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub table: Table,
    pub warnings: Vec<String>,
}

impl Outcome {
    /// The JSON document: command, resolved config, result and warnings.
    pub fn document(&self, cfg: &RunConfig) -> Value {
        json!({
            "command": cfg.command.map(|c| c.name()),
            "config": serde_json::to_value(cfg).expect("config serializes"),
            "result": self.result,
            "warnings": self.warnings,
        })
    }
}

fn digits_for(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).floor() as usize
}

/// A high-precision real as `{decimal, f64, precision_bits}`.
pub fn hp(x: &Float, bits: u32) -> Value {
    let r = Float::with_val(bits, x);
    json!({
        "decimal": r.to_string_radix(10, Some(digits_for(bits))),
        "f64": finite(r.to_f64()),
        "precision_bits": bits,
    })
}

fn hpc(z: &Complex, bits: u32) -> Value {
    json!({ "re": hp(z.real(), bits), "im": hp(z.imag(), bits) })
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn f64s(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| finite(x)).collect())
}

fn cmatrix(m: &CMatrix) -> Value {
    let row = |i| (0..m.cols).map(move |j| {
        let z = m.get(i, j);
        json!([finite(z.real().to_f64()), finite(z.imag().to_f64())])
    });
    Value::Array((0..m.rows).map(|i| Value::Array(row(i).collect())).collect())
}

fn exact_matrix(m: &ExactMatrix) -> Value {
    json!(m.to_strings())
}

fn exact_vec(v: &[Gq]) -> Value {
    json!(v.iter().map(Gq::to_string).collect::<Vec<_>>())
}

fn rate(r: &RateFit) -> Value {
    json!({
        "shape": r.shape,
        "constant": finite(r.constant),
        "fit_range": [r.fit_range.0, r.fit_range.1],
        "validate_range": [r.validate_range.0, r.validate_range.1],
        "worst_ratio": finite(r.worst_ratio),
        "holds": r.holds,
        "slope": finite(r.slope),
        "kind": r.kind,
    })
}

fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

fn build_action(model: &ModelConfig) -> Result<GradedCohomologyAction> {
    match model {
        ModelConfig::Torus { a } => torus_action(&TorusAutomorphism::new(matrix_from(a)?)?),
        ModelConfig::Mazur { k, word } => mazur_action(&mazur_involutions(*k)?.with_word(word.clone())),
        ModelConfig::Raw { blocks, kahler_class, pushforward_blocks, cup } => {
            let blocks: Vec<ExactMatrix> = blocks.iter().map(matrix_from).collect::<Result<_>>()?;
            let cup = match cup {
                None => None,
                Some(entries) => {
                    let mut c = CupProduct::new(blocks.iter().map(ExactMatrix::rows).collect());
                    for e in entries {
                        if e.p > e.q || (e.p == e.q && e.i > e.j) {
                            return Err(Error::ValidationError(format!(
                                "cup entry ({},{})×({},{}) must list the smaller index pair first",
                                e.p, e.i, e.q, e.j
                            )));
                        }
                        c.insert(e.p, e.i, e.q, e.j, &vector_from(&e.product)?);
                    }
                    Some(c)
                }
            };
            raw_action(&RawModel {
                blocks,
                kahler_class: kahler_class.iter().map(|v| vector_from(v)).collect::<Result<_>>()?,
                pushforward_blocks: pushforward_blocks
                    .as_ref()
                    .map(|bs| bs.iter().map(matrix_from).collect::<Result<Vec<_>>>())
                    .transpose()?,
                cup,
            })
        }
    }
}

fn need_model(cfg: &RunConfig) -> Result<&ModelConfig> {
    cfg.model.as_ref().ok_or_else(|| Error::ValidationError("this command needs a [model] section".into()))
}

fn need_torus(cfg: &RunConfig) -> Result<TorusAutomorphism> {
    match need_model(cfg)? {
        ModelConfig::Torus { a } => TorusAutomorphism::new(matrix_from(a)?),
        _ => Err(Error::ValidationError("this command needs a torus model".into())),
    }
}

/// Fit and validation ranges scaled to `n_max`, matching `[20, 50]` and `[51, n_max]` at `n_max ≥ 100`.
pub fn rate_ranges(n_max: u64) -> ((u64, u64), (u64, u64)) {
    if n_max >= 100 {
        ((20, 50), (51, n_max))
    } else {
        let a = (n_max / 5).max(1);
        let b = (n_max / 2).max(a);
        ((a, b), ((b + 1).min(n_max), n_max))
    }
}

fn trig(terms: &[TrigTerm], dim: usize) -> Result<TrigPoly> {
    let mut out = Vec::new();
    for t in terms {
        if t.freq.len() != dim {
            return Err(Error::DimensionMismatch(format!("frequency {:?} is not of length {dim}", t.freq)));
        }
        let (re, im) = t.coeff.to_gq()?.to_f64_pair();
        out.push((t.freq.clone(), C64::new(re, im)));
    }
    Ok(TrigPoly { dim, terms: out })
}

/// Runs the configured command; no I/O.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let command = cfg.command.ok_or_else(|| Error::ValidationError("no command given".into()))?;
    match command {
        Command::Degrees => cmd_degrees(cfg),
        Command::Jordan => cmd_jordan(cfg),
        Command::Relative => cmd_relative(cfg),
        Command::Cesaro => cmd_cesaro(cfg),
        Command::Green => cmd_green(cfg),
        Command::Iterate => cmd_iterate(cfg),
        Command::Mixing => cmd_mixing(cfg),
        Command::Chain => cmd_chain(cfg),
    }
}

fn cmd_degrees(cfg: &RunConfig) -> Result<Outcome> {
    let bits = cfg.precision_bits;
    let action = build_action(need_model(cfg)?)?;
    let profile = dynamical_degrees(&action, bits)?;
    let mut warnings = action.warnings.clone();
    let mut result = Map::new();
    result.insert("k".into(), json!(profile.k));
    result.insert("model".into(), json!(profile.model_tag));
    result.insert("sublattice".into(), json!(profile.sublattice));
    result.insert("dimensions".into(), json!(action.dims()));
    result.insert("degrees".into(), Value::Array(profile.degrees.iter().map(|d| hp(d, bits)).collect()));
    result.insert("multiplicities".into(), json!(profile.multiplicities));
    result.insert("entropy".into(), hp(&profile.entropy, bits));
    result.insert("plateau".into(), json!([profile.plateau.0, profile.plateau.1]));
    result.insert("concavity".into(), serde_json::to_value(check_concavity(&profile)).expect("serializes"));
    let mut table = Table::new(&["p", "degree", "multiplicity", "inverse_degree"]);
    match action.inverse().and_then(|inv| dynamical_degrees(&inv, bits)) {
        Ok(inv) => {
            let k = profile.k;
            let dual: Vec<f64> = (0..=k)
                .map(|p| Float::with_val(bits, &inv.degrees[k - p] - &profile.degrees[p]).abs().to_f64() / profile.degrees[p].to_f64().max(1.0))
                .collect();
            let ent = Float::with_val(bits, &inv.entropy - &profile.entropy).abs().to_f64();
            result.insert(
                "inverse".into(),
                json!({
                    "degrees": inv.degrees.iter().map(|d| hp(d, bits)).collect::<Vec<_>>(),
                    "entropy": hp(&inv.entropy, bits),
                    "entropy_difference": finite(ent),
                    "duality_defects": f64s(&dual),
                }),
            );
            for p in 0..=k {
                table.push(vec![
                    p.to_string(),
                    profile.degrees[p].to_string_radix(10, Some(digits_for(bits))),
                    profile.multiplicities[p].to_string(),
                    inv.degrees[p].to_string_radix(10, Some(digits_for(bits))),
                ]);
            }
        }
        Err(e) => {
            warnings.push(format!("inverse action unavailable: {e}"));
            for p in 0..=profile.k {
                table.push(vec![
                    p.to_string(),
                    profile.degrees[p].to_string_radix(10, Some(digits_for(bits))),
                    profile.multiplicities[p].to_string(),
                    String::new(),
                ]);
            }
        }
    }
    if let Some(p) = cfg.degrees.as_ref().and_then(|d| d.sequence_p) {
        let ns: Vec<u64> = (1..=cfg.n_max).collect();
        let seq = degree_sequence(&action, p, &ns, cfg.digit_budget, bits)?;
        result.insert(
            "sequence".into(),
            json!({
                "p": seq.p,
                "n_values": seq.n_values,
                "values": seq.values.iter().map(|v| hp(v, bits)).collect::<Vec<_>>(),
                "normalized": seq.normalized.iter().map(|v| finite(v.to_f64())).collect::<Vec<_>>(),
                "roots": f64s(&seq.roots),
                "fitted_limit": finite(seq.fitted_limit),
            }),
        );
    }
    Ok(Outcome { result: Value::Object(result), table, warnings })
}

fn cmd_jordan(cfg: &RunConfig) -> Result<Outcome> {
    let bits = cfg.precision_bits;
    let section = cfg.jordan.clone().unwrap_or_default();
    let m = match &section.matrix {
        Some(rows) => matrix_from(rows)?,
        None => {
            let action = build_action(need_model(cfg)?)?;
            let b = section.block.unwrap_or(1);
            action
                .blocks
                .get(b)
                .cloned()
                .ok_or_else(|| Error::ValidationError(format!("block {b} does not exist; k = {}", action.k)))?
        }
    };
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("matrix is {}×{}", m.rows(), m.cols())));
    }
    let j = eigen_structure(&m, bits)?;
    let (fit, validate) = rate_ranges(cfg.n_max);
    let mut warnings = Vec::new();
    let mut result = Map::new();
    result.insert("dim".into(), json!(j.dim));
    result.insert("matrix".into(), exact_matrix(&m));
    result.insert("char_poly".into(), json!(j.char_poly.to_string()));
    result.insert(
        "factors".into(),
        Value::Array(j.factors.iter().map(|(p, e)| json!({"factor": p.to_string(), "multiplicity": e})).collect()),
    );
    result.insert(
        "eigenvalues".into(),
        Value::Array(
            j.eigenvalues
                .iter()
                .map(|e| json!({"value": hpc(&e.value, bits), "modulus": hp(&e.modulus, bits), "real": e.is_real, "block_sizes": e.block_sizes}))
                .collect(),
        ),
    );
    result.insert("spectral_radius".into(), hp(&j.spectral_radius, bits));
    result.insert("lambda".into(), hp(&j.spectral_radius, bits));
    result.insert("m".into(), json!(j.multiplicity));
    result.insert("nu".into(), json!(j.nu()));
    result.insert("theta".into(), Value::Array(j.theta.iter().map(|t| hp(t, bits)).collect()));
    result.insert("theta_orders".into(), json!(j.theta_orders));
    result.insert("theta_group".into(), json!(j.theta_group));
    result.insert("dim_f_prime".into(), json!(j.strictly_dominant_dim()));
    let mut table = Table::new(&["n", "twisted_deviation", "averaged_deviation"]);
    if j.spectral_radius >= 1 {
        let opts = LimitOptions { n_max: cfg.n_max, fit_range: fit, validate_range: validate, request_plain: false, digit_budget: cfg.digit_budget };
        let lim = lambda_infinity(&m, &j, &opts)?;
        warnings.extend(lim.warnings.iter().cloned());
        let ns: Vec<u64> = (fit.0..=cfg.n_max).collect();
        let asym = power_asymptotics(&m, &j, &ns, cfg.digit_budget)?;
        let (lo, hi, inside) = asym.band_check(fit, 0.5);
        result.insert(
            "limit".into(),
            json!({
                "lambda_infinity": cmatrix(&lim.lambda_infinity),
                "averaged": cmatrix(&lim.averaged),
                "averaged_rank": lim.averaged_rank,
                "twisted_rate": rate(&lim.twisted_rate),
                "averaged_rate": rate(&lim.averaged_rate),
            }),
        );
        result.insert(
            "asymptotics".into(),
            json!({
                "n_values": asym.n_values,
                "normalized_norms": asym.normalized_norms.iter().map(|v| finite(v.to_f64())).collect::<Vec<_>>(),
                "band": [finite(lo), finite(hi)],
                "inside_band": inside,
                "fitted_rate": finite(asym.fitted_rate),
                "rate_kind": asym.rate_kind,
            }),
        );
        for (i, n) in lim.n_values.iter().enumerate() {
            table.push(vec![n.to_string(), fmt_f64(lim.twisted_deviation[i]), fmt_f64(lim.averaged_deviation[i])]);
        }
    } else {
        warnings.push("spectral radius < 1: no normalized limit".into());
    }
    Ok(Outcome { result: Value::Object(result), table, warnings })
}

fn cmd_relative(cfg: &RunConfig) -> Result<Outcome> {
    let bits = cfg.precision_bits;
    let action = build_action(need_model(cfg)?)?;
    let section = cfg.relative.clone().ok_or_else(|| Error::ValidationError("relative needs a [relative] section".into()))?;
    let t = match section.class {
        ClassKind::Fundamental => EigenClass::fundamental(),
        ClassKind::Dominant => dominant_eigenclass(&action, section.s, bits)?,
        ClassKind::Explicit => EigenClass::exact(
            section.s,
            &vector_from(section.coords.as_deref().unwrap_or_default())?,
            &section.eigenvalue.as_ref().expect("validated").to_gq()?,
        ),
    };
    let rel = relative_degrees(&action, &t, bits)?;
    let tol = cfg.tolerances.check;
    let mut subm = Vec::new();
    for p1 in 1..=rel.max_p() {
        for p2 in p1..=rel.max_p() - p1 {
            subm.push(serde_json::to_value(submultiplicativity_check(&rel, p1, p2, tol)?).expect("serializes"));
        }
    }
    let mass = mass_bound_check(&rel, tol);
    let mut table = Table::new(&["p", "relative_degree", "multiplicity", "kernel_dim", "quotient_dim"]);
    for i in 0..rel.relative_degrees.len() {
        table.push(vec![
            (i + 1).to_string(),
            rel.relative_degrees[i].to_string_radix(10, Some(digits_for(bits))),
            rel.relative_multiplicities[i].to_string(),
            rel.kernel_dims[i].to_string(),
            rel.quotient_dims[i].to_string(),
        ]);
    }
    let result = json!({
        "s": rel.s,
        "class": rel.t_class.iter().map(|z| hpc(z, bits)).collect::<Vec<_>>(),
        "class_is_rational": t.is_rational(),
        "lambda_t": hp(&rel.lambda_t, bits),
        "p_values": (1..=rel.max_p()).collect::<Vec<_>>(),
        "relative_degrees": rel.relative_degrees.iter().map(|d| hp(d, bits)).collect::<Vec<_>>(),
        "multiplicities": rel.relative_multiplicities,
        "kernel_dims": rel.kernel_dims,
        "quotient_dims": rel.quotient_dims,
        "exact": rel.exact,
        "submultiplicativity": subm,
        "mass_bound": serde_json::to_value(mass).expect("serializes"),
    });
    Ok(Outcome { result, table, warnings: action.warnings.clone() })
}

fn cmd_cesaro(cfg: &RunConfig) -> Result<Outcome> {
    let bits = cfg.precision_bits;
    let action = build_action(need_model(cfg)?)?;
    let section = cfg.cesaro.clone().ok_or_else(|| Error::ValidationError("cesaro needs a [cesaro] section".into()))?;
    let s = section.s;
    if s > action.k {
        return Err(Error::ValidationError(format!("s = {s} exceeds k = {}", action.k)));
    }
    let class = match &section.class {
        Some(v) => vector_from(v)?,
        None => action.kahler_class[s].clone(),
    };
    let rep = cesaro_class_limit(&action, s, &class, cfg.n_max, cfg.digit_budget, bits)?;
    let kernel = cesaro_kernel_basis(&action, s, bits)?;
    let mut table = Table::new(&["n", "deviation"]);
    for (n, d) in rep.n_values.iter().zip(&rep.deviations) {
        table.push(vec![n.to_string(), fmt_f64(*d)]);
    }
    let result = json!({
        "s": rep.s,
        "class": exact_vec(&class),
        "degree": hp(&rep.degree, bits),
        "multiplicity": rep.multiplicity,
        "limit": rep.limit.iter().map(|z| hpc(z, bits)).collect::<Vec<_>>(),
        "last_average": rep.last_average.iter().map(|z| hpc(z, bits)).collect::<Vec<_>>(),
        "rate": rate(&rep.rate),
        "eigen_residual": finite(rep.eigen_residual),
        "rational_kernel": kernel.iter().map(|v| exact_vec(v)).collect::<Vec<_>>(),
    });
    Ok(Outcome { result, table, warnings: action.warnings.clone() })
}

fn cmd_green(cfg: &RunConfig) -> Result<Outcome> {
    let bits = cfg.precision_bits;
    let t = need_torus(cfg)?;
    let rep = green_limit_torus(&t, cfg.n_max, cfg.digit_budget, bits)?;
    let action = torus_action(&t)?;
    let rec = recurrence_machinery(&action, bits)?;
    let mut table = Table::new(&["n", "deviation"]);
    for (n, d) in rep.n_values.iter().zip(&rep.deviations) {
        table.push(vec![n.to_string(), fmt_f64(*d)]);
    }
    let samples: Vec<Value> = rep
        .samples
        .iter()
        .map(|s| {
            json!({
                "n": s.n,
                "target": finite(s.target),
                "class": s.class.iter().map(|z| hpc(z, bits)).collect::<Vec<_>>(),
                "observed": s.observed.as_ref().map(|o| o.iter().map(|z| hpc(z, bits)).collect::<Vec<_>>()),
            })
        })
        .collect();
    let result = json!({
        "mode": rep.mode,
        "d1": hp(&rep.d1, bits),
        "multiplicity": rep.multiplicity,
        "theta_group": rep.theta_group,
        "limit_class": rep.limit_class.iter().map(|z| hpc(z, bits)).collect::<Vec<_>>(),
        "coefficient_matrix": rep.coefficient_matrix.iter().map(|r| r.iter().map(|(a, b)| json!([finite(*a), finite(*b)])).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "coefficient_eigenvalues": f64s(&rep.coefficient_eigenvalues),
        "hermitian_defect": finite(rep.hermitian_defect),
        "eigen_residual": finite(rep.eigen_residual),
        "rate": rate(&rep.rate),
        "samples": samples,
        "sample_separation": finite(rep.sample_separation),
        "observed_separation": rep.observed_separation.map(finite),
        "separation_tolerance": cfg.tolerances.separation,
        "diverges": rep.sample_separation >= cfg.tolerances.separation,
        "recurrence": {
            "m": rec.m,
            "coefficients": exact_vec(&rec.coefficients),
            "companion": exact_matrix(&rec.companion),
            "companion_radius": hp(&rec.companion_radius, bits),
            "block_radius": hp(&rec.block_radius, bits),
            "companion_multiplicity": rec.companion_multiplicity,
            "block_multiplicity": rec.block_multiplicity,
            "radius_matches": rec.radius_matches,
            "full_char_poly": rec.full_char_poly,
        },
    });
    Ok(Outcome { result, table, warnings: action.warnings.clone() })
}

fn cmd_iterate(cfg: &RunConfig) -> Result<Outcome> {
    let bits = cfg.precision_bits;
    let it = cfg.iterate.clone().ok_or_else(|| Error::ValidationError("iterate needs an [iterate] section".into()))?;
    let dim = it.g.len();
    if dim == 0 {
        return Err(Error::ValidationError("iterate.g is empty".into()));
    }
    let grid = match cfg.grid.resolution {
        Some(r) => TorusGrid::new(dim, r),
        None => TorusGrid::default_for(dim),
    };
    let us: Vec<TrigPoly> = it.u.iter().map(|terms| trig(terms, dim)).collect::<Result<_>>()?;
    let u = GridValues::sample(grid, |x| us.iter().map(|p| p.eval(x)).collect());
    let lambda = matrix_from(&it.lambda)?;
    let setup = IterationSetup::new(it.g.clone(), u, it.nu, lambda, bits)?;
    let rep = holder_iteration(&setup, cfg.n_max, cfg.big_n_max, bits)?;
    let mut warnings = Vec::new();
    if it.holder_component >= rep.v.components() {
        return Err(Error::ValidationError(format!("holder_component {} ≥ {} components", it.holder_component, rep.v.components())));
    }
    let holder = match holder_exponent_estimate(&rep.v.component(it.holder_component), &default_scales(grid), Some(setup.admissible_bound())) {
        Ok(h) => serde_json::to_value(h).expect("serializes"),
        Err(e @ Error::DegenerateFunction) => {
            warnings.push(format!("{}: {e}", e.code()));
            Value::Null
        }
        Err(e) => return Err(e),
    };
    let gm = ExactMatrix::from_rows(it.g.iter().map(|r| r.iter().map(|&x| Gq::int(x)).collect()).collect());
    let power = match smallest_admissible_power(&gm, setup.lambda(), it.nu, 64) {
        Ok(p) => serde_json::to_value(p).expect("serializes"),
        Err(e) => {
            warnings.push(e.to_string());
            Value::Null
        }
    };
    let comps = rep.v.components();
    let mut header: Vec<String> = (0..dim).map(|a| format!("x{a}")).collect();
    for name in ["v", "w"] {
        for c in 0..comps {
            header.push(format!("{name}{c}_re"));
            header.push(format!("{name}{c}_im"));
        }
    }
    let mut table = Table { header, rows: Vec::with_capacity(grid.len()) };
    for i in 0..grid.len() {
        let mut row: Vec<String> = grid.point(i).iter().map(|x| x.to_string()).collect();
        for vals in [&rep.v.values[i], &rep.w.values[i]] {
            for z in vals {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
        }
        table.push(row);
    }
    let result = json!({
        "grid": grid,
        "lipschitz": finite(setup.lipschitz),
        "lambda": finite(setup.lambda()),
        "m": setup.jordan.multiplicity,
        "theta_group": setup.jordan.theta_group,
        "admissible_bound": finite(setup.admissible_bound()),
        "n_values": rep.n_values,
        "twisted_deviation": f64s(&rep.twisted_deviation),
        "averaged_deviation": f64s(&rep.averaged_deviation),
        "twisted_rate": rate(&rep.twisted_rate),
        "averaged_rate": rate(&rep.averaged_rate),
        "v_sup_norm": finite(rep.v.sup_norm()),
        "w_sup_norm": finite(rep.w.sup_norm()),
        "extrapolation_n": rep.extrapolation_n,
        "holder": holder,
        "admissible_power": power,
    });
    Ok(Outcome { result, table, warnings })
}

fn cmd_mixing(cfg: &RunConfig) -> Result<Outcome> {
    let bits = cfg.precision_bits;
    let t = need_torus(cfg)?;
    let mx = cfg.mixing.clone().ok_or_else(|| Error::ValidationError("mixing needs a [mixing] section".into()))?;
    let ctx = MixingContext::new(&t, bits)?;
    let range = mx.n_range.map_or((1, cfg.n_max), |[a, b]| (a, b));
    let mut result = Map::new();
    result.insert("hyperbolic".into(), json!(ctx.hyperbolic));
    result.insert("real_dim".into(), json!(ctx.dim()));
    let mut warnings = Vec::new();
    let mut table = Table::new(&["source", "n", "re", "im"]);
    let push_series = |table: &mut Table, src: &str, ns: &[u64], vals: &[[f64; 2]]| {
        for (n, v) in ns.iter().zip(vals) {
            table.push(vec![src.to_string(), n.to_string(), fmt_f64(v[0]), fmt_f64(v[1])]);
        }
    };
    if let (Some(m), Some(mp)) = (&mx.m, &mx.m_prime) {
        let rep = haar_character_correlation(&ctx, m, mp, range)?;
        push_series(&mut table, "characters", &rep.n_values, &rep.values);
        warnings.extend(rep.warnings.iter().cloned());
        result.insert("characters".into(), serde_json::to_value(&rep).expect("serializes"));
        let erg = ergodic_average_check(&ctx, &TrigPoly::character(m.clone()), &TrigPoly::character(mp.clone()), cfg.n_max)?;
        result.insert("character_ergodic".into(), serde_json::to_value(&erg).expect("serializes"));
    }
    if let (Some(phi), Some(psi)) = (&mx.phi, &mx.psi) {
        let phi = trig(phi, ctx.dim())?;
        let psi = trig(psi, ctx.dim())?;
        let exact = trig_correlation(&ctx, &phi, &psi, range)?;
        let res = cfg.grid.resolution.unwrap_or_else(|| default_resolution(ctx.dim()));
        let grid = grid_correlation(&ctx, &phi, &psi, range, res)?;
        let erg = ergodic_average_check(&ctx, &phi, &psi, cfg.n_max)?;
        push_series(&mut table, "exact", &exact.n_values, &exact.values);
        push_series(&mut table, "grid", &grid.n_values, &grid.values);
        let agree = grid
            .n_values
            .iter()
            .zip(&grid.values)
            .filter_map(|(n, g)| exact.n_values.iter().position(|m| m == n).map(|i| exact.values[i] == *g))
            .all(|b| b);
        warnings.extend(grid.warnings.iter().cloned());
        result.insert("functions".into(), serde_json::to_value(&exact).expect("serializes"));
        result.insert("grid".into(), serde_json::to_value(&grid).expect("serializes"));
        result.insert("grid_resolution".into(), json!(res));
        result.insert("grid_agrees".into(), json!(agree));
        result.insert("ergodic".into(), serde_json::to_value(&erg).expect("serializes"));
    }
    if result.len() == 2 {
        return Err(Error::ValidationError("mixing needs m/m_prime or phi/psi".into()));
    }
    Ok(Outcome { result: Value::Object(result), table, warnings })
}

fn cmd_chain(cfg: &RunConfig) -> Result<Outcome> {
    let bits = cfg.precision_bits;
    let action = build_action(need_model(cfg)?)?;
    let profile = dynamical_degrees(&action, bits)?;
    let chain = degree_chain_check(&profile);
    let mut table = Table::new(&["s", "lower_bound", "holds"]);
    for e in &chain.entries {
        table.push(vec![e.s.to_string(), fmt_f64(e.lower_bound), e.holds.to_string()]);
    }
    let result = json!({
        "degrees": profile.degrees.iter().map(|d| hp(d, bits)).collect::<Vec<_>>(),
        "chain": serde_json::to_value(&chain).expect("serializes"),
    });
    Ok(Outcome { result, table, warnings: action.warnings.clone() })
}

/// Configures the global thread pool from [`THREADS_ENV`].
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::ValidationError(format!("{THREADS_ENV} = {v:?} is not a positive integer")))?;
    // A pool that is already built (e.g. in tests) is left alone.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn error_record(e: &Error) -> String {
    let mut s = serde_json::to_string_pretty(&json!({"error": {"code": e.code(), "message": e.to_string()}})).expect("serializes");
    s.push('\n');
    s
}

/// Exit status for an error: 2 for configuration and I/O problems, 1 for failed computations.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ParseError { .. } | Error::ValidationError(_) | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Loads, resolves and validates the configuration named by `args`.
pub fn load(args: &Args) -> Result<RunConfig> {
    let text = fs::read_to_string(&args.config).map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    parse_config(&text)?.resolve(
        args.command,
        args.output.as_ref().map(|p| p.display().to_string()),
        args.format,
        args.precision,
    )
}

/// Renders the primary artifact in the configured format.
pub fn render(cfg: &RunConfig, out: &Outcome) -> Result<String> {
    match cfg.output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.document(cfg)).map_err(io)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => out.table.to_csv(),
    }
}

fn write_artifacts(cfg: &RunConfig, body: &str, status: &str, started: u64) -> Result<()> {
    match &cfg.output.path {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(p) => {
            let path = Path::new(p);
            fs::write(path, body).map_err(|e| Error::Io(format!("{p}: {e}")))?;
            fs::write(sidecar(path, ".resolved.toml"), cfg.to_toml()).map_err(io)?;
            let finished = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            let log = format!(
                "started_unix = {started}\nfinished_unix = {finished}\ncommand = {}\nstatus = {status}\nthreads = {}\n",
                cfg.command.map_or("none", |c| c.name()),
                rayon::current_num_threads()
            );
            fs::write(sidecar(path, ".log"), log).map_err(io)
        }
    }
}

/// Runs the binary end to end and returns the process exit status.
pub fn run(args: &Args) -> i32 {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let fail = |e: Error, cfg: Option<&RunConfig>| {
        eprintln!("error [{}]: {e}", e.code());
        let record = error_record(&e);
        let target = cfg.and_then(|c| c.output.path.clone()).or_else(|| args.output.as_ref().map(|p| p.display().to_string()));
        match target {
            Some(p) => {
                let _ = fs::write(&p, &record);
            }
            None => print!("{record}"),
        }
        exit_code(&e)
    };
    if let Err(e) = init_threads() {
        return fail(e, None);
    }
    let cfg = match load(args) {
        Ok(c) => c,
        Err(e) => return fail(e, None),
    };
    let out = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            if let Some(p) = &cfg.output.path {
                let _ = fs::write(sidecar(Path::new(p), ".resolved.toml"), cfg.to_toml());
            }
            return fail(e, Some(&cfg));
        }
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match render(&cfg, &out).and_then(|body| write_artifacts(&cfg, &body, "ok", started)) {
        Ok(()) => 0,
        Err(e) => fail(e, Some(&cfg)),
    }
}
