use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context as _, Result};
use serde::Serialize;

use powerwl::curve::{DensityCurve, Grid, LawId};
use powerwl::finite::{self, EnsembleParams};
use powerwl::macrolaw::{self, ScalingParams};
use powerwl::microlaw::{self, MicroParams};
use powerwl::sampler::stats::{self, Rescaling};
use powerwl::sampler::{self, Method, Sampler};
use powerwl::specfit::{self, FitMethod};
use powerwl::surmise::{self, SpacingParams};
use powerwl::{Exec, Variant};

use crate::args::*;

/// Resolved run settings echoed into every artifact.
pub struct Context {
    pub exec: Exec,
    pub format: Format,
    /// `powerwl <subcommand> --flag value ...` with every resolved value.
    pub command_line: String,
    pub config: serde_json::Value,
}

impl Context {
    pub fn new<T: Serialize>(name: &str, args: &T, exec: Exec, format: Format) -> Result<Self> {
        let config = serde_json::to_value(args)?;
        let mut command_line = format!("powerwl {name}");
        if let serde_json::Value::Object(map) = &config {
            for (k, v) in map {
                match v {
                    serde_json::Value::Null | serde_json::Value::Bool(false) => {}
                    serde_json::Value::Bool(true) => {
                        let _ = write!(command_line, " --{k}");
                    }
                    serde_json::Value::String(s) => {
                        let _ = write!(command_line, " --{k} {s}");
                    }
                    other => {
                        let _ = write!(command_line, " --{k} {other}");
                    }
                }
            }
        }
        Ok(Self { exec, format, command_line, config })
    }

    fn meta(&self) -> Vec<(&'static str, String)> {
        vec![("command", self.command_line.clone()), ("config", self.config.to_string())]
    }

    fn curve(&self, curve: &DensityCurve) -> Result<String> {
        match self.format {
            Format::Csv => Ok(curve.to_csv(&self.meta())),
            Format::Json => self.json(curve),
        }
    }

    fn json<T: Serialize>(&self, payload: &T) -> Result<String> {
        let doc = serde_json::json!({
            "powerwl": env!("CARGO_PKG_VERSION"),
            "command": self.command_line,
            "config": self.config,
            "result": payload,
        });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    fn csv_header(&self) -> String {
        let mut s = format!("# powerwl {}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in self.meta() {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s
    }
}

fn grid(spec: &str) -> Result<Vec<f64>> {
    Ok(spec.parse::<Grid>()?.points())
}

fn require_alpha(alpha: Option<f64>, variant: VariantArg) -> Result<f64> {
    match (alpha, variant) {
        (Some(a), _) => Ok(a),
        (None, VariantArg::Standard) => Ok(1.0), // unused by the undeformed laws
        (None, VariantArg::Generalized) => {
            Err(powerwl::Error::Domain("--alpha is required for the generalized law".into()).into())
        }
    }
}

fn ensemble(e: &EnsembleArgs) -> Result<EnsembleParams> {
    let p = match (e.alpha, e.gamma) {
        (Some(a), None) => EnsembleParams::from_alpha(e.beta, e.n_size, e.nu, e.n, a)?,
        (None, Some(g)) => EnsembleParams::new(e.beta, e.n_size, e.nu, e.n, g)?,
        (None, None) => return Err(powerwl::Error::Domain("give --alpha or --gamma".into()).into()),
        (Some(_), Some(_)) => return Err(powerwl::Error::Domain("give only one of --alpha and --gamma".into()).into()),
    };
    Ok(p)
}

pub fn density_macro(a: &MacroArgs, ctx: &Context) -> Result<String> {
    let xs = grid(&a.grid)?;
    let curve = match a.variant {
        VariantArg::Standard => {
            if !(a.c > 0.0 && a.c <= 1.0) {
                return Err(powerwl::Error::Domain(format!("c must lie in (0, 1], got {}", a.c)).into());
            }
            if a.kind != MacroKind::Density {
                bail!(powerwl::Error::Domain("asymptotes are defined for the generalized law only".into()));
            }
            let c = a.c;
            DensityCurve::tabulate(LawId::MarchenkoPastur, serde_json::json!({"c": c}), &xs, ctx.exec, |x| {
                Ok(macrolaw::mp_density(x, c))
            })?
        }
        VariantArg::Generalized => {
            let p = ScalingParams::new(require_alpha(a.alpha, a.variant)?, a.c)?;
            let params = serde_json::to_value(p)?;
            match a.kind {
                MacroKind::Density => {
                    DensityCurve::tabulate(LawId::GeneralizedMp, params, &xs, ctx.exec, |x| macrolaw::gen_density(x, &p))?
                }
                MacroKind::TailAsymptote => DensityCurve::tabulate(LawId::TailAsymptote, params, &xs, ctx.exec, |x| {
                    macrolaw::tail_asymptote(x, &p)
                })?,
                MacroKind::SmallXAsymptote => {
                    DensityCurve::tabulate(LawId::SmallXAsymptote, params, &xs, ctx.exec, |x| {
                        macrolaw::small_x_asymptote(x, &p)
                    })?
                }
            }
        }
    };
    ctx.curve(&curve)
}

fn micro_params(a: &MicroArgs) -> Result<MicroParams> {
    Ok(MicroParams::new(require_alpha(a.alpha, a.variant)?, a.nu, a.beta)?)
}

pub fn density_micro(a: &MicroArgs, ctx: &Context) -> Result<String> {
    let p = micro_params(a)?;
    let v: Variant = a.variant.into();
    let curve = DensityCurve::tabulate(LawId::MicroDensity, serde_json::to_value(p)?, &grid(&a.grid)?, ctx.exec, |y| {
        microlaw::micro_density(y, &p, v)
    })?;
    ctx.curve(&curve)
}

pub fn first_eig(a: &MicroArgs, ctx: &Context) -> Result<String> {
    let p = micro_params(a)?;
    let v: Variant = a.variant.into();
    let curve =
        DensityCurve::tabulate(LawId::FirstEigenvalue, serde_json::to_value(p)?, &grid(&a.grid)?, ctx.exec, |y| {
            microlaw::first_eigenvalue_pdf(y, &p, v)
        })?;
    ctx.curve(&curve)
}

pub fn gap(a: &GapArgs, ctx: &Context) -> Result<String> {
    let v: Variant = a.variant.into();
    let xs = grid(&a.grid)?;
    let curve = match a.mode {
        GapMode::Micro => {
            let p = MicroParams::new(require_alpha(a.ensemble.alpha, a.variant)?, a.ensemble.nu, a.ensemble.beta)?;
            DensityCurve::tabulate(LawId::GapProbability, serde_json::to_value(p)?, &xs, ctx.exec, |y| {
                microlaw::gap_probability_micro(y, &p, v)
            })?
        }
        GapMode::Finite => {
            let p = ensemble(&a.ensemble)?;
            DensityCurve::tabulate(LawId::GapProbability, serde_json::to_value(p)?, &xs, ctx.exec, |s| {
                microlaw::gap_probability_finite(s, &p, v)
            })?
        }
    };
    ctx.curve(&curve)
}

pub fn spacing(a: &SpacingArgs, ctx: &Context) -> Result<String> {
    let nubar = match (a.nu, a.nubar) {
        (_, Some(nb)) => nb,
        (nu, None) => 0.5 * a.beta as f64 * (nu.unwrap_or(0) as f64 + 1.0) - 1.0,
    };
    let gamma = match (a.gamma, a.varpi, a.variant) {
        (Some(g), _, _) => g,
        (None, Some(w), _) => w + a.beta as f64 + 2.0 * nubar + 2.0,
        (None, None, VariantArg::Standard) => f64::INFINITY,
        (None, None, VariantArg::Generalized) => {
            return Err(powerwl::Error::Domain("give --gamma or --varpi for the generalized law".into()).into())
        }
    };
    let mut p = SpacingParams::with_nubar(a.beta, nubar, a.n, gamma)?;
    if a.nubar.is_none() {
        p = match gamma.is_finite() {
            true => SpacingParams::new(a.beta, a.nu.unwrap_or(0), a.n, gamma)?,
            false => SpacingParams { nu: Some(a.nu.unwrap_or(0)), ..p },
        };
    }
    let v: Variant = a.variant.into();
    let (law, rescaled) = if a.rescaled { (LawId::RescaledSpacing, true) } else { (LawId::Spacing, false) };
    let curve = DensityCurve::tabulate(law, serde_json::to_value(p)?, &grid(&a.grid)?, ctx.exec, |s| {
        if rescaled {
            surmise::rescaled_spacing_pdf(s, &p, v)
        } else {
            surmise::spacing_pdf(s, &p, v)
        }
    })?;
    ctx.curve(&curve)
}

pub fn finite_n(a: &FiniteArgs, ctx: &Context) -> Result<String> {
    let p = ensemble(&a.ensemble)?;
    let xs = grid(&a.grid)?;
    let params = serde_json::to_value(p)?;
    let curve = match (a.kind, a.variant) {
        (FiniteKind::Density, VariantArg::Generalized) => {
            DensityCurve::tabulate(LawId::FiniteDensity, params, &xs, ctx.exec, |l| finite::gen_finite_density(l, &p))?
        }
        // the undeformed ensemble is the ξ = γ member of the mixture
        (FiniteKind::Density, VariantArg::Standard) => DensityCurve::tabulate(LawId::FiniteDensity, params, &xs, ctx.exec, |l| {
            finite::finite_density_xi(l, &p, p.gamma)
        })?,
        (FiniteKind::Theta, VariantArg::Generalized) => DensityCurve::tabulate(LawId::FiniteMacroTheta, params, &xs, ctx.exec, |x| {
            finite::rescaled_macro_theta(x, &p)
        })?,
        (FiniteKind::Theta, VariantArg::Standard) => {
            bail!(powerwl::Error::Domain("the theta rescaling is provided for the generalized law only".into()))
        }
    };
    ctx.curve(&curve)
}

pub fn sample(a: &SampleArgs, ctx: &Context) -> Result<String> {
    let p = ensemble(&a.ensemble)?;
    let method = match a.method {
        MethodArg::Dense => Method::Dense,
        MethodArg::Bidiagonal => Method::Bidiagonal,
    };
    let s = Sampler::new(p)?.method(method).exec(ctx.exec).sample(a.draws, a.seed)?;
    let rescaling = match a.rescaling {
        RescalingArg::Raw => Rescaling::Raw,
        RescalingArg::MeanScaled => Rescaling::MeanScaled,
        RescalingArg::Micro => Rescaling::Micro,
        RescalingArg::SpacingScaled => Rescaling::SpacingScaled,
    };
    let values = match a.stat {
        StatArg::Eigenvalues => {
            if rescaling != Rescaling::Raw {
                bail!(powerwl::Error::Domain("eigenvalue export is always raw; use --stat histogram to rescale".into()));
            }
            return match ctx.format {
                Format::Csv => {
                    // keep the sample file's own header first so read_csv sees it unchanged
                    let body = sampler::write_csv(&s)?;
                    let (first, rest) = body.split_once('\n').unwrap_or((&body, ""));
                    let mut out = format!("{first}\n");
                    for (k, v) in ctx.meta() {
                        let _ = writeln!(out, "# {k}: {v}");
                    }
                    Ok(out + rest)
                }
                Format::Json => ctx.json(&s),
            };
        }
        StatArg::Histogram => {
            let h = stats::spectrum_histogram(&s, rescaling, a.bins)?;
            return ctx.curve(&h);
        }
        StatArg::Smallest => stats::smallest(&s, rescaling)?,
        StatArg::Spacings => stats::spacings(&s, rescaling)?,
    };
    match ctx.format {
        Format::Csv => {
            let mut out = ctx.csv_header();
            out.push_str("index,value\n");
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(out, "{i},{v:.16e}");
            }
            Ok(out)
        }
        Format::Json => ctx.json(&values),
    }
}

pub fn fit(a: &FitArgs, ctx: &Context) -> Result<String> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(powerwl::Error::from)
        .with_context(|| format!("cannot read {}", a.input.display()))?;
    let rows = specfit::parse_table(&text)?;
    let single_column = rows.iter().all(|r| r.len() == 1);
    let as_list = match a.input_kind {
        InputKind::Auto => single_column,
        InputKind::Eigenvalues => true,
        InputKind::Table => false,
    };
    let spectrum = if as_list {
        if !single_column {
            return Err(powerwl::Error::Parse("an eigenvalue list needs one value per line".into()).into());
        }
        specfit::from_eigenvalues(&rows.iter().map(|r| r[0]).collect::<Vec<_>>())?
    } else {
        specfit::ingest_timeseries(&rows)?
    };
    let method = match a.method {
        FitMethodArg::Mle => FitMethod::Mle,
        FitMethodArg::LeastSquares => FitMethod::LeastSquares,
    };
    let report = specfit::fit_alpha(&spectrum, a.c, method, ctx.exec)?;
    match ctx.format {
        Format::Json => ctx.json(&report),
        Format::Csv => Ok(ctx.csv_header() + &specfit::overlay_csv(&spectrum, &report)?),
    }
}

/// Maps an error to the process exit code: 2 for usage and parameter-domain
/// problems, 1 for failures of the computation itself.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<powerwl::Error>()) {
        Some(
            powerwl::Error::Domain(_)
            | powerwl::Error::Convergence(_)
            | powerwl::Error::MomentDivergence(_)
            | powerwl::Error::Unsupported(_)
            | powerwl::Error::Parse(_),
        ) => 2,
        Some(_) => 1,
        None => 2,
    }
}

pub fn ensure_written(path: &std::path::Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| anyhow!(powerwl::Error::from(e))).with_context(|| format!("cannot write {}", path.display()))
}
