//! Subcommand implementations. Each returns the full text to emit.

use std::path::Path;

use bn_core::fit::{asymptotic_ci_alpha, mle_fixed_point, mle_newton, FitConfig, Init};
use bn_core::process::{check_triangular_conditions, ergodicity_report, pqd_gap, triangular_sum_experiment};
use bn_core::{rng, BbnParams, BnParams, Dependence, ModeKind, ProcessSpec, TimeFunction, TriangularArraySpec};
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::format::{fmt17, number, render_record};
use crate::mc::{rows_to_csv, run_mc_study, McStudyConfig};

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Eval(a) => eval(a, cli.format.unwrap_or(Format::Json)),
        Command::Sample(a) => sample(a, cli.seed, cli.format.unwrap_or(Format::Csv)),
        Command::Fit(a) => fit(a, cli.format.unwrap_or(Format::Json)),
        Command::McStudy(a) => mc_study(a, cli.seed, cli.workers.unwrap_or_else(default_workers), cli.format),
        Command::Bivar(a) => bivar(a, cli.seed, cli.format),
        Command::Process(a) => process(a, cli.seed, cli.format.unwrap_or(Format::Csv)),
    }
}

fn params(p: &BnArgs) -> CliResult<BnParams> {
    Ok(BnParams::new(p.mu, p.sigma, p.alpha)?)
}

fn record(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn params_json(p: &BnParams) -> Value {
    json!({ "mu": number(p.mu), "sigma": number(p.sigma), "alpha": number(p.alpha) })
}

fn need(v: Option<f64>, flag: &str, what: &str) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for {what}")))
}

pub fn eval(a: &EvalArgs, format: Format) -> CliResult<String> {
    let p = params(&a.params)?;
    let mut rec = record(vec![("what", Value::from(format!("{:?}", a.what).to_lowercase())), ("params", params_json(&p))]);
    let point = |name: &str| need(a.x, "x", name);
    match a.what {
        EvalWhat::Pdf => {
            let x = point("pdf")?;
            rec.insert("x".into(), number(x));
            rec.insert("value".into(), number(p.pdf(x)));
        }
        EvalWhat::Logpdf => {
            let x = point("logpdf")?;
            rec.insert("x".into(), number(x));
            rec.insert("value".into(), number(p.log_pdf(x)));
        }
        EvalWhat::Cdf => {
            let x = point("cdf")?;
            rec.insert("x".into(), number(x));
            rec.insert("value".into(), number(p.cdf(x)));
        }
        EvalWhat::Hazard => {
            let x = point("hazard")?;
            rec.insert("x".into(), number(x));
            rec.insert("value".into(), number(p.hazard(x)?));
        }
        EvalWhat::Quantile => {
            let q = need(a.q, "q", "quantile")?;
            if !(q > 0.0 && q < 1.0) {
                return Err(CliError::Usage(format!("--q must lie in (0, 1), got {q}")));
            }
            rec.insert("q".into(), number(q));
            rec.insert("value".into(), number(p.quantile(q)?));
        }
        EvalWhat::Modes => {
            let m = p.modes();
            let kind = match m.kind {
                ModeKind::Unimodal => "unimodal",
                ModeKind::Bimodal => "bimodal",
            };
            rec.insert("kind".into(), kind.into());
            rec.insert("modes".into(), Value::Array(m.modes.iter().map(|&v| number(v)).collect()));
            rec.insert("antimode".into(), m.antimode.map_or(Value::Null, number));
        }
        EvalWhat::Moments => {
            let raw: Vec<Value> = (1..=8).map(|k| p.raw_moment(k).map(number)).collect::<Result<_, _>>()?;
            rec.insert("mean".into(), number(p.mean()));
            rec.insert("variance".into(), number(p.variance()));
            rec.insert("skewness".into(), number(p.skewness()));
            rec.insert("kurtosis".into(), number(p.std_moment(4)));
            rec.insert("mad".into(), number(p.mad()));
            rec.insert("entropy".into(), number(p.entropy()));
            rec.insert("raw_moments".into(), Value::Array(raw));
        }
    }
    Ok(render_record(&rec, format))
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 output")
}

pub fn sample(a: &SampleArgs, seed: u64, format: Format) -> CliResult<String> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let p = params(&a.params)?;
    let xs = p.sample(&mut rng::stream(seed, &[]), a.n);
    Ok(match format {
        Format::Csv => csv_string(&["x"], xs.iter().map(|&x| vec![fmt17(x)])),
        Format::Json => {
            let mut s = serde_json::to_string(&xs).expect("finite samples");
            s.push('\n');
            s
        }
    })
}

/// Reads the `x` column of a CSV file.
pub fn read_sample(path: &Path) -> CliResult<Vec<f64>> {
    let io_err = |e: std::io::Error| CliError::Io { path: path.display().to_string(), source: e };
    let text = std::fs::read_to_string(path).map_err(io_err)?;
    if text.trim().is_empty() {
        return Err(CliError::Usage(format!("{} is empty", path.display())));
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let col = headers
        .iter()
        .position(|h| h.trim() == "x")
        .ok_or_else(|| CliError::Data(format!("{} has no column named `x`", path.display())))?;
    let mut xs = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let field = rec.get(col).unwrap_or("").trim();
        let x: f64 = field
            .parse()
            .map_err(|_| CliError::Data(format!("{}: row {}: `{field}` is not a number", path.display(), line + 1)))?;
        xs.push(x);
    }
    if xs.is_empty() {
        return Err(CliError::Usage(format!("{} has no observations", path.display())));
    }
    Ok(xs)
}

pub fn fit(a: &FitArgs, format: Format) -> CliResult<String> {
    let data = read_sample(&a.input)?;
    let mut config = FitConfig {
        init: match a.init {
            InitArg::Moment => Init::MomentMatch,
            InitArg::Grid => Init::GridScan,
        },
        max_iter: a.max_iter,
        tol: a.tol,
        ..FitConfig::default()
    };
    for &(index, value) in &a.fix {
        config = config.with_fixed(index, value);
    }
    config.validate()?;
    let result = match a.solver {
        Solver::Newton => mle_newton(&data, &config),
        Solver::FixedPoint => mle_fixed_point(&data, &config),
    };
    let fit = match result {
        Ok(f) => f,
        Err(e @ (bn_core::Error::DegenerateData(_) | bn_core::Error::EmptyData)) => {
            let rec = record(vec![
                ("converged", Value::Bool(false)),
                ("n", Value::from(data.len())),
                ("error", Value::from(e.to_string())),
            ]);
            return Err(CliError::Reported { output: render_record(&rec, format), message: e.to_string(), code: 3 });
        }
        Err(e) => return Err(e.into()),
    };
    let Value::Object(mut rec) = serde_json::to_value(&fit).expect("fit result serializes") else {
        unreachable!("fit result is a JSON object")
    };
    rec.insert("n".into(), Value::from(fit.n));
    let ci = if config.estimate_mask[2] { asymptotic_ci_alpha(fit.theta_hat.alpha, fit.n, a.level).ok() } else { None };
    rec.insert("ci_level".into(), number(a.level));
    rec.insert("ci_alpha_lower".into(), ci.map_or(Value::Null, |c| number(c.0)));
    rec.insert("ci_alpha_upper".into(), ci.map_or(Value::Null, |c| number(c.1)));
    Ok(render_record(&rec, format))
}

pub fn mc_study(a: &McStudyArgs, seed: u64, workers: usize, format: Option<Format>) -> CliResult<String> {
    let config = McStudyConfig {
        n_values: a.n_values.clone(),
        mu: a.mu,
        sigma: a.sigma,
        alpha_values: a.alpha_values.clone(),
        replications: a.replications,
        master_seed: seed,
        workers,
    };
    let rows = run_mc_study(&config)?;
    match format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(rows_to_csv(&rows)),
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "alpha_true": number(r.alpha_true), "n": r.n,
                        "bias_mu": number(r.bias_mu), "bias_sigma": number(r.bias_sigma), "bias_alpha": number(r.bias_alpha),
                        "rmse_mu": number(r.rmse_mu), "rmse_sigma": number(r.rmse_sigma), "rmse_alpha": number(r.rmse_alpha),
                        "n_converged": r.n_converged,
                    })
                })
                .collect();
            Ok(serde_json::to_string_pretty(&arr).expect("JSON values serialize") + "\n")
        }
    }
}

pub fn bivar(a: &BivarArgs, seed: u64, format: Option<Format>) -> CliResult<String> {
    let p = BbnParams::new(a.mu1, a.mu2, a.sigma1, a.sigma2, a.alpha, a.rho)?;
    let rec = match a.what {
        BivarWhat::Pdf2 => {
            let (x1, x2) = (need(a.x1, "x1", "pdf2")?, need(a.x2, "x2", "pdf2")?);
            record(vec![("x1", number(x1)), ("x2", number(x2)), ("value", number(p.pdf2(x1, x2)))])
        }
        BivarWhat::Cov => {
            let (d, q) = (p.covariance(), p.covariance_published());
            record(vec![("covariance", number(d)), ("published", number(q)), ("discrepancy", number(d - q))])
        }
        BivarWhat::Corr => {
            let (d, q) = (p.correlation(), p.correlation_published());
            record(vec![("correlation", number(d)), ("published", number(q)), ("discrepancy", number(d - q))])
        }
        BivarWhat::Condmean => {
            let x2 = need(a.x2, "x2", "condmean")?;
            record(vec![
                ("x2", number(x2)),
                ("value", number(p.conditional_mean_x1_given_x2(x2))),
                ("published", number(p.conditional_mean_x1_given_x2_published(x2))),
            ])
        }
        BivarWhat::Marginals => record(vec![
            ("x1", params_json(&p.marginal_x1())),
            ("x2", params_json(&p.marginal_x2())),
            ("x1_published", params_json(&p.marginal_x1_published())),
        ]),
        BivarWhat::Sample2 => {
            let n = a.n.ok_or_else(|| CliError::Usage("--n is required for sample2".into()))?;
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let pairs = p.sample2(&mut rng::stream(seed, &[]), n)?;
            return Ok(match format.unwrap_or(Format::Csv) {
                Format::Csv => csv_string(&["x1", "x2"], pairs.iter().map(|&(u, v)| vec![fmt17(u), fmt17(v)])),
                Format::Json => serde_json::to_string(&pairs).expect("finite samples") + "\n",
            });
        }
    };
    Ok(render_record(&rec, format.unwrap_or(Format::Json)))
}

struct ReportRows(Vec<(&'static str, String, f64)>);

impl ReportRows {
    fn push(&mut self, experiment: &'static str, param: String, value: f64) {
        self.0.push((experiment, param, value));
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => csv_string(
                &["experiment", "param", "value"],
                self.0.iter().map(|(e, p, v)| vec![e.to_string(), p.clone(), fmt17(*v)]),
            ),
            Format::Json => {
                let arr: Vec<Value> =
                    self.0.iter().map(|(e, p, v)| json!({ "experiment": e, "param": p, "value": number(*v) })).collect();
                serde_json::to_string_pretty(&arr).expect("JSON values serialize") + "\n"
            }
        }
    }
}

pub fn process(a: &ProcessArgs, seed: u64, format: Format) -> CliResult<String> {
    let dependence: Dependence = a.dependence.into();
    let mut out = ReportRows(Vec::new());
    match a.experiment {
        Experiment::Ergodicity => {
            let sigma_fn = match a.sigma_fn {
                SigmaFn::Gauss => TimeFunction::Gaussian { scale: 1.0 },
                SigmaFn::Const => TimeFunction::Constant(1.0),
            };
            let spec = ProcessSpec::new(TimeFunction::Constant(a.mu), sigma_fn, a.alpha, dependence)?;
            let report = ergodicity_report(&spec, &a.t_values, a.rho, a.paths, a.step, seed)?;
            for (k, &t) in report.t_values.iter().enumerate() {
                let key = |stat: &str| format!("{stat}@T={}", fmt17(t));
                out.push("ergodicity", key("var_temporal_mean"), report.var_temporal_mean[k]);
                out.push("ergodicity", key("closed_form"), report.closed_form_values[k]);
                out.push("ergodicity", key("var_temporal_variance"), report.var_temporal_variance[k]);
                out.push("ergodicity", key("step"), report.steps[k]);
            }
        }
        Experiment::Pqd => {
            if dependence != Dependence::Comonotone {
                return Err(CliError::Usage("the quadrant-dependence gap is defined for --dependence comonotone".into()));
            }
            if !(a.grid_step > 0.0 && a.grid_hi > a.grid_lo) {
                return Err(CliError::Usage("need grid-step > 0 and grid-hi > grid-lo".into()));
            }
            let px = BnParams::new(a.mu, 1.0, a.alpha)?;
            let py = BnParams::new(a.mu_y, a.sigma_y, a.alpha)?;
            let steps = ((a.grid_hi - a.grid_lo) / a.grid_step).round() as usize;
            let grid: Vec<f64> = (0..=steps).map(|i| a.grid_lo + a.grid_step * i as f64).collect();
            let (mut min, mut max, mut at) = (f64::INFINITY, f64::NEG_INFINITY, (0.0, 0.0));
            for &x in &grid {
                for &y in &grid {
                    let h = pqd_gap(&px, &py, x, y)?;
                    if h < min {
                        min = h;
                        at = (x, y);
                    }
                    max = max.max(h);
                }
            }
            out.push("pqd", "min_gap".into(), min);
            out.push("pqd", "max_gap".into(), max);
            out.push("pqd", "argmin_x".into(), at.0);
            out.push("pqd", "argmin_y".into(), at.1);
            out.push("pqd", "grid_points".into(), (grid.len() * grid.len()) as f64);
        }
        Experiment::Clt => {
            let spec = TriangularArraySpec {
                r: a.r,
                mu_rule: TimeFunction::Constant(a.mu),
                alpha: a.alpha,
                n_values: a.n_values.clone(),
                replications: a.replications,
                dependence,
            };
            let dep = dependence.name();
            for row in triangular_sum_experiment(&spec, seed)? {
                let key = |stat: &str| format!("{stat}@n={};dependence={dep}", row.n);
                out.push("clt", key("ks_normal"), row.ks_normal);
                out.push("clt", key("ks_scaled_bn"), row.ks_scaled_bn);
                out.push("clt", key("ks_critical"), row.ks_critical);
                for l in [1, 5] {
                    let c = check_triangular_conditions(&spec, row.n, l)?;
                    if l == 1 {
                        out.push("clt", key("min_sigma_sq"), c.min_sigma_sq);
                        out.push("clt", key("max_sigma_cubed"), c.max_sigma_cubed);
                        out.push("clt", key("max_row_sum"), c.max_row_sum);
                        out.push("clt", key("row_sum_bound"), c.row_sum_bound);
                    }
                    out.push("clt", format!("tail_sum@n={};l={l}", row.n), c.tail_sum);
                    out.push("clt", format!("tail_envelope@n={};l={l}", row.n), c.tail_envelope);
                }
            }
        }
    }
    Ok(out.render(format))
}
