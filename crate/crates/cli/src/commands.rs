//! One function per subcommand; each returns the files to write and whether a
//! verdict was reached.

use std::f64::consts::PI;

use anyhow::Result;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use mflat::assoc_fn::{admissibility_check, proximate_order_check, ADMISSIBILITY_TOL};
use mflat::gevrey_type::{interior_grid, type_profile};
use mflat::indices::{default_window, index_report, DEFAULT_TOL};
use mflat::maergoiz::{default_z_grid, mv_bounds, property_i_check, property_ii_check, property_iii_to_v_check};
use mflat::propagation::{
    extension_experiment, fit_flat_type, geometric_radii, pl_numeric_check, predicted_type_bound, proof_recipe,
    propagation_experiment, trace_ray, wasow_demo, FlatVerdict, MvInput, DEFAULT_RAY_POINTS, DEFAULT_RAY_RATIO,
};
use mflat::quasi::{classify, ClassKind, QuasiOptions, Verdict};
use mflat::report::{fmt_num, svg_line_plot, svg_polar_plot, Csv, Series};
use mflat::scalar::{geomspace, linspace};
use mflat::{condition_report, AssociatedFunctionF64, ProximateOrderSpecF64};

use crate::args::{omega_of, FamilyKind, FunctionArgs, KernelArgs, OutputArgs, SectorArgs, SequenceArgs};
use crate::UsageError;

/// Everything a subcommand produces.
pub struct Outcome {
    pub json: serde_json::Value,
    pub csv: Vec<(String, String)>,
    pub svg: Vec<(String, String)>,
    pub decided: bool,
    pub summary: String,
}

impl Outcome {
    fn new(json: serde_json::Value, decided: bool, summary: String) -> Self {
        Self { json, csv: Vec::new(), svg: Vec::new(), decided, summary }
    }

    fn csv(mut self, name: &str, body: String) -> Self {
        self.csv.push((name.to_string(), body));
        self
    }

    fn svg(mut self, name: &str, body: String) -> Self {
        self.svg.push((name.to_string(), body));
        self
    }
}

fn positive(v: f64, flag: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(UsageError(format!("--{flag} must be positive, got {v}")).into())
    }
}

fn at_least(n: usize, min: usize, flag: &str) -> Result<usize> {
    if n >= min {
        Ok(n)
    } else {
        Err(UsageError(format!("--{flag} must be at least {min}, got {n}")).into())
    }
}

fn radii(r0: Option<f64>) -> Result<Vec<f64>> {
    let r0 = positive(r0.unwrap_or(1.0), "r0")?;
    Ok(geometric_radii(r0, DEFAULT_RAY_RATIO, DEFAULT_RAY_POINTS))
}

// ---------------------------------------------------------------- diagnose

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DiagnoseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SequenceArgs,
    /// Tail window for liminf/limsup estimates (default horizon/10)
    #[arg(long)]
    pub window: Option<usize>,
    /// Relative tolerance of the regular-variation test
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Check admissibility against the proximate order rho + b log log t / log t
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho_b: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

pub fn diagnose(a: &DiagnoseArgs) -> Result<Outcome> {
    let w = a.seq.build(None, 100_000)?;
    let window = a.window.unwrap_or_else(|| default_window(w.horizon()));
    let tol = positive(a.tol.unwrap_or(DEFAULT_TOL), "tol")?;
    let conditions = condition_report(&w)?;
    let indices = index_report(&w, window, tol)?;
    let mut json = json!({ "conditions": conditions, "indices": indices });
    let mut decided = !indices.inconclusive();
    let mut csv = vec![("regvar.csv".to_string(), indices.regvar_table.to_csv())];
    if let Some(rho) = a.rho {
        let spec = ProximateOrderSpecF64::ClosedForm { rho, b: a.rho_b.unwrap_or(0.0) };
        let assoc = AssociatedFunctionF64::new(&w)?;
        let t_hi = assoc.max_log_t().exp();
        if t_hi <= 1e2 {
            return Err(mflat::Error::Range(format!("horizon too small for an admissibility grid (t max {t_hi})")).into());
        }
        let grid = geomspace(1e1, t_hi, 64);
        let adm = admissibility_check(&assoc, &spec, &grid, ADMISSIBILITY_TOL)?;
        let po = proximate_order_check(&spec, &grid, ADMISSIBILITY_TOL)?;
        decided &= adm.bounded;
        csv.push(("admissibility.csv".into(), adm.to_csv()));
        json["admissibility"] = json!(adm);
        json["proximate_order"] = json!(po);
    }
    let summary = format!(
        "{}: lc={} mg bounded={} snq bounded={} omega={} stable={}",
        conditions.family,
        conditions.lc.holds_up_to_horizon,
        conditions.mg.bounded_trend,
        conditions.snq.bounded_trend,
        fmt_num(indices.omega_estimate),
        indices.omega_stable
    );
    let series = Series::new(
        "tail liminf of log m_p / log p",
        indices.omega_window_series.iter().map(|&(h, v)| (h as f64, v)).collect(),
    );
    let mut out = Outcome::new(json, decided, summary)
        .svg("omega.svg", svg_line_plot("omega window series", "horizon", "estimate", &[series]));
    out.csv = csv;
    Ok(out)
}

// ---------------------------------------------------------------- quasi

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassArg {
    Salinas,
    Uniform,
    Regions,
    All,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct QuasiArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SequenceArgs,
    /// Sector opening parameter gamma (opening pi*gamma)
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Function class to classify
    #[arg(long, value_enum)]
    pub class: Option<ClassArg>,
    /// Half-width of the band treated as gamma = omega
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Classify on a bounded sector
    #[arg(long)]
    pub bounded_sector: bool,
    /// Skip the regular-variation prerequisite of the regions class
    #[arg(long)]
    pub assume_admissible: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

pub fn quasi(a: &QuasiArgs) -> Result<Outcome> {
    let gamma = a.gamma.ok_or_else(|| UsageError("--gamma is required".into()))?;
    positive(gamma, "gamma")?;
    let w = a.seq.build(None, 100_000)?;
    let opts = QuasiOptions {
        tol: positive(a.tol.unwrap_or(DEFAULT_TOL), "tol")?,
        bounded_sector: a.bounded_sector,
        assume_admissible: a.assume_admissible,
    };
    let classes = match a.class.unwrap_or(ClassArg::All) {
        ClassArg::Salinas => vec![ClassKind::Salinas],
        ClassArg::Uniform => vec![ClassKind::Uniform],
        ClassArg::Regions => vec![ClassKind::Regions],
        ClassArg::All => vec![ClassKind::Salinas, ClassKind::Uniform, ClassKind::Regions],
    };
    let results = classes
        .into_iter()
        .map(|c| classify(&w, c, gamma, &opts))
        .collect::<mflat::Result<Vec<_>>>()?;
    let decided = results.iter().all(|r| r.verdict != Verdict::Inconclusive);
    let summary = results
        .iter()
        .map(|r| format!("{:?}: {:?} ({})", r.class, r.verdict, r.reason))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome::new(json!({ "sequence": w.family().name(), "results": results }), decided, summary))
}

// ---------------------------------------------------------------- type-profile

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TypeProfileArgs {
    /// Gevrey order parameter: asymptotics of order 1/k
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub sector: SectorArgs,
    /// Direction with known type (defaults to the bisecting direction)
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    /// Type known in direction theta0
    #[arg(long, allow_negative_numbers = true)]
    pub r0: Option<f64>,
    /// Number of directions sampled strictly inside the sector
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

pub fn type_profile_cmd(a: &TypeProfileArgs) -> Result<Outcome> {
    let sector = a.sector.build(None, None)?;
    let k = positive(a.k.unwrap_or(1.0), "k")?;
    let n = at_least(a.n.unwrap_or(181), 1, "n")?;
    let grid = interior_grid(&sector, n);
    let p = type_profile(k, sector, a.theta0.unwrap_or(sector.d), a.r0.unwrap_or(1.0), &grid)?;
    let polar: Vec<(f64, f64)> = p.samples.iter().map(|s| (s.theta, s.r)).collect();
    let summary = format!(
        "R0 = {} on [{}, {}], {} directions",
        fmt_num(p.r0),
        fmt_num(p.alpha_p),
        fmt_num(p.beta_p),
        p.samples.len()
    );
    Ok(Outcome::new(json!(p), true, summary)
        .csv("type_profile.csv", p.to_csv())
        .svg("type_profile.svg", svg_polar_plot("type profile R(theta)", &polar)))
}

// ---------------------------------------------------------------- maergoiz

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MaergoizArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Largest r used for the homogeneity check (I)
    #[arg(long, allow_negative_numbers = true)]
    pub r_max: Option<f64>,
    /// Optional weight sequence: adds the band A V(t) <= M(t) <= B V(t)
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SequenceArgs,
    /// Lower end of the t grid for the M/V band
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

pub fn maergoiz(a: &MaergoizArgs) -> Result<Outcome> {
    let v = a.kernel.build(1.0)?;
    let r_max = positive(a.r_max.unwrap_or(1e8), "r-max")?;
    if r_max <= 1e2 {
        return Err(UsageError("--r-max must exceed 100".into()).into());
    }
    let z_grid = default_z_grid(9, 9);
    let r_seq = geomspace(1e2, r_max, 7);
    let p1 = property_i_check(&v, &z_grid, &r_seq)?;
    let p2 = property_ii_check(&v, &z_grid)?;
    let shape = property_iii_to_v_check(&v, &geomspace(1e-3, 1e6, 64))?;
    let mut json = json!({ "kernel": v.name(), "property_i": p1, "property_ii_deviation": p2, "shape": shape });
    if a.seq.given() {
        let w = a.seq.build(None, 100_000)?;
        let assoc = AssociatedFunctionF64::new(&w)?;
        let t_hi = assoc.max_log_t().exp();
        let t0 = positive(a.t0.unwrap_or(1e2), "t0")?;
        if t_hi <= 2.0 * t0 {
            return Err(mflat::Error::Range(format!("horizon reaches only t = {t_hi}, below 2 t0")).into());
        }
        json["mv_band"] = json!(mv_bounds(&assoc, &v, &geomspace(t0, t_hi, 64), t0)?);
    }
    let summary = format!(
        "{}: (I) deviation {} at r = {}, (II) {}, (IV) convex={}, (V) concave in r={}",
        v.name(),
        fmt_num(p1.deviation),
        fmt_num(r_max),
        fmt_num(p2),
        shape.convex,
        shape.concave_in_r
    );
    let decay = Series::new("max deviation", p1.decay.iter().map(|&(r, d)| (r.log10(), d)).collect());
    Ok(Outcome::new(json, true, summary)
        .csv("property_i.csv", p1.to_csv())
        .svg("property_i.svg", svg_line_plot("homogeneity deviation", "log10 r", "deviation", &[decay])))
}

// ---------------------------------------------------------------- propagate

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PropagateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SequenceArgs,
    /// Sector opening parameter gamma (opening pi*gamma)
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Direction of known flatness (default pi*gamma/2)
    #[arg(long, allow_negative_numbers = true)]
    pub flat_direction: Option<f64>,
    /// Number of offsets delta from the lower edge
    #[arg(long)]
    pub n_deltas: Option<usize>,
    /// Number of directions for the per-ray fits
    #[arg(long)]
    pub n_dirs: Option<usize>,
    /// Largest radius of each ray
    #[arg(long, allow_negative_numbers = true)]
    pub r0: Option<f64>,
    /// Lower end of the t grid for the M/V band
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

pub fn propagate(a: &PropagateArgs) -> Result<Outcome> {
    let gamma = positive(a.gamma.unwrap_or(0.9), "gamma")?;
    let w = a.seq.build(Some(FamilyKind::Gevrey), 2000)?;
    let omega = omega_of(&w)?;
    let v = a.kernel.build(1.0 / omega)?;
    let f = a.function.build(v);
    let assoc = AssociatedFunctionF64::new(&w)?;
    let radii = radii(a.r0)?;
    let t0 = positive(a.t0.unwrap_or(1e2), "t0")?;
    let t_hi = assoc.max_log_t().exp();
    if t_hi <= 2.0 * t0 {
        return Err(mflat::Error::Range(format!("horizon reaches only t = {t_hi}, below 2 t0")).into());
    }
    let band = mv_bounds(&assoc, &v, &geomspace(t0, t_hi, 40), t0)?;
    let mv = MvInput { a_est: band.a_est, b_est: band.b_est, omega };
    let opening = PI * gamma;
    let deltas = geomspace(1e-2, opening, at_least(a.n_deltas.unwrap_or(12), 2, "n-deltas")?);
    let flat_direction = a.flat_direction.unwrap_or(opening / 2.0);
    let table = propagation_experiment(&f, &assoc, gamma, flat_direction, &deltas, &mv, &radii)?;

    let half = opening / 2.0;
    let dirs = linspace(-0.9 * half, 0.9 * half, at_least(a.n_dirs.unwrap_or(9), 2, "n-dirs")?);
    let traces = dirs.iter().map(|&t| trace_ray(&f, t, &radii)).collect::<mflat::Result<Vec<_>>>()?;
    let fits = traces.iter().map(|t| fit_flat_type(t, &assoc)).collect::<mflat::Result<Vec<_>>>()?;

    let mut csv = Csv::new(&["delta", "direction", "k2_fitted", "k2_predicted_bound", "satisfied"]);
    for r in &table.rows {
        csv.row(&[
            fmt_num(r.delta),
            fmt_num(r.direction),
            fmt_num(r.k2_fitted),
            fmt_num(r.k2_predicted_bound),
            r.satisfied.to_string(),
        ]);
    }
    let k2 = Series::new("fitted k2", table.rows.iter().map(|r| (r.delta, r.k2_fitted.log10())).collect());
    let bound = Series::new(
        "predicted bound",
        deltas.iter().map(|&d| (d, predicted_type_bound(&mv, d, table.flat_fit.c2).log10())).collect(),
    );
    let rays: Vec<Series> = traces
        .iter()
        .map(|t| Series::new(format!("theta = {:.3}", t.theta), t.radii.iter().zip(&t.log_abs).map(|(r, l)| (1.0 / r, *l)).collect()))
        .collect();
    let satisfied = table.rows.iter().filter(|r| r.satisfied).count();
    let summary = format!("{}: {satisfied}/{} rows within the predicted bound", f.name(), table.rows.len());
    Ok(Outcome::new(json!({ "function": f.name(), "mv_band": band, "table": table, "fits": fits }), true, summary)
        .csv("propagate.csv", csv.finish())
        .svg("propagate_k2.svg", svg_line_plot("type degradation", "delta", "log10 k2", &[k2, bound]))
        .svg("propagate_rays.svg", svg_line_plot("log|f| along rays", "1/r", "log|f|", &rays)))
}

// ---------------------------------------------------------------- wasow

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WasowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SequenceArgs,
    /// Largest radius of the fitting ray
    #[arg(long, allow_negative_numbers = true)]
    pub r0: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

pub fn wasow(a: &WasowArgs) -> Result<Outcome> {
    let w = a.seq.build(Some(FamilyKind::Gevrey), 2000)?;
    let v = a.kernel.build(1.0 / omega_of(&w)?)?;
    let assoc = AssociatedFunctionF64::new(&w)?;
    let demo = wasow_demo(&v, &geomspace(0.5, 0.05, 256), &radii(a.r0)?, &assoc)?;
    let mut csv = Csv::new(&["subsequence", "n", "r", "derivative_abs", "envelope"]);
    for (name, s) in [("cos_zero", &demo.cos_zero), ("sin_zero", &demo.sin_zero)] {
        for x in s {
            csv.row(&[name.into(), x.n.to_string(), fmt_num(x.r), fmt_num(x.derivative_abs), fmt_num(x.envelope)]);
        }
    }
    let deriv = Series::new("f'(r)", demo.derivative_samples.iter().map(|&(r, d)| (r, d)).collect());
    let c2 = demo.flat_fit_on_axis.fit().map(|f| fmt_num(f.c2)).unwrap_or_else(|| "none".into());
    let summary = format!(
        "flat on the axis with c2 = {c2}; oscillation_detected={}, cos-zero derivatives to 0={}, sin-zero derivatives unbounded={}",
        demo.oscillation_detected, demo.cos_zero_to_zero, demo.sin_zero_unbounded
    );
    Ok(Outcome::new(json!(demo), true, summary)
        .csv("wasow.csv", csv.finish())
        .svg("wasow.svg", svg_line_plot("derivative on the positive axis", "r", "f'(r)", &[deriv])))
}

// ---------------------------------------------------------------- pl-check

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PlCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sector: SectorArgs,
    /// Multiply f by e^{V(a/z)} with a chosen by the flatness-extension recipe
    #[arg(long)]
    pub recipe: bool,
    /// Offset delta used by the recipe (default pi*gamma/2)
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SequenceArgs,
    #[arg(long)]
    pub boundary_n: Option<usize>,
    #[arg(long)]
    pub interior_n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

pub fn pl_check(a: &PlCheckArgs) -> Result<Outcome> {
    let sector = a.sector.build(Some(0.9), Some(0.5))?;
    let boundary_n = a.boundary_n.unwrap_or(1000);
    let interior_n = a.interior_n.unwrap_or(10_000);
    let mut json = json!({});
    let f = if a.recipe {
        let w = a.seq.build(Some(FamilyKind::Gevrey), 2000)?;
        let omega = omega_of(&w)?;
        let v = a.kernel.build(1.0 / omega)?;
        let inner = a.function.build(v);
        let assoc = AssociatedFunctionF64::new(&w)?;
        let flat_dir = PI * sector.gamma / 2.0;
        let c2 = match fit_flat_type(&trace_ray(&inner, flat_dir, &radii(None)?)?, &assoc)? {
            FlatVerdict::Flat(fit) => fit.c2,
            FlatVerdict::NotFlat { reason, .. } => {
                return Err(mflat::Error::Domain(format!("recipe needs f flat at {flat_dir}: {reason}")).into())
            }
        };
        let t_hi = assoc.max_log_t().exp();
        let band = mv_bounds(&assoc, &v, &geomspace(1e2, t_hi, 40), 1e2)?;
        let delta = positive(a.delta.unwrap_or(flat_dir), "delta")?;
        let recipe = proof_recipe(omega, sector.gamma, delta, c2, band.a_est)?;
        let kernel = a.kernel.build(1.0 / omega)?;
        json["recipe"] = json!(recipe);
        recipe.corrected(inner, kernel)
    } else {
        a.function.build(a.kernel.build(1.0)?)
    };
    let check = pl_numeric_check(&f, &sector, boundary_n, interior_n)?;
    let summary = format!(
        "{}: boundary max {}, interior max {}, satisfied={}",
        f.name(),
        fmt_num(check.max_boundary),
        fmt_num(check.max_interior),
        check.satisfied
    );
    json["function"] = json!(f.name());
    json["check"] = json!(check);
    Ok(Outcome::new(json, true, summary))
}

// ---------------------------------------------------------------- extend

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExtendArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SequenceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sector: SectorArgs,
    /// Direction with a known expansion (default: bisecting direction)
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    /// Directions in the fan
    #[arg(long)]
    pub n_dirs: Option<usize>,
    /// Highest order p checked (default: horizon)
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub r0: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

pub fn extend(a: &ExtendArgs) -> Result<Outcome> {
    let region = a.sector.build(Some(0.9), None)?;
    let w = a.seq.build(Some(FamilyKind::Gevrey), 4000)?;
    let omega = omega_of(&w)?;
    let f = a.function.build(a.kernel.build(1.0 / omega)?);
    let p_max = a.p_max.unwrap_or(w.horizon());
    let coeffs = a.function.coefficients(p_max)?;
    let half = region.half_opening();
    let fan = linspace(region.d - 0.9 * half, region.d + 0.9 * half, at_least(a.n_dirs.unwrap_or(5), 2, "n-dirs")?);
    let table =
        extension_experiment(&f, &coeffs, &w, &region, a.theta0.unwrap_or(region.d), &fan, &radii(a.r0)?, p_max)?;
    let mut csv = Csv::new(&["theta", "C", "A", "p_max"]);
    for row in &table.rows {
        match row.fit.fit() {
            Some(fit) => csv.row(&[fmt_num(row.theta), fmt_num(fit.c), fmt_num(fit.a), fit.p_max.to_string()]),
            None => csv.row(&[fmt_num(row.theta), "none".into(), "none".into(), p_max.to_string()]),
        }
    }
    let summary = format!(
        "{}: expansion fitted in {}/{} directions",
        f.name(),
        table.fits().len(),
        table.rows.len()
    );
    Ok(Outcome::new(json!({ "function": f.name(), "table": table }), table.success, summary)
        .csv("extend.csv", csv.finish()))
}
