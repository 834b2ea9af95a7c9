mod config;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use config::{ConfigFile, Overrides, RunConfig};
use tnnflow_core::cells::{self, FigureFormat};
use tnnflow_core::chevalley::Pinning;
use tnnflow_core::embedding::{build_rep, eigenchart, lambda_for, ChartPoint};
use tnnflow_core::flow::{flow, flow_on_flag, FlowSpec};
use tnnflow_core::folding::{build_folding, fixed_locus_flow_check};
use tnnflow_core::scalar::{fmt_decimal, parse_decimal, parse_q, Scalar};
use tnnflow_core::suite::{run_suite, SuiteConfig};
use tnnflow_core::totpos::{
    minor_certificate, random_params, standard_word_w0, FactorizationParams, Side,
};
use tnnflow_core::Matrix;

#[derive(Parser)]
#[command(name = "tnnflow", version, about = "Totally nonnegative flag varieties and the tau flow")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    /// parabolic index set, e.g. "" or "1,3"
    #[arg(long = "J", global = true, allow_hyphen_values = true)]
    j: Option<String>,
    /// falls back to TNNFLOW_SEED
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    count: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, global = true)]
    radius: Option<f64>,
    #[arg(long = "tol-float", global = true)]
    tol_float: Option<f64>,
    #[arg(long = "tol-bisect", global = true)]
    tol_bisect: Option<f64>,
    /// text or json; svg or json for `figure`
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Chevalley generators and tau.
    Pinning,
    /// Sample factorized group elements with minor certificates.
    Sample {
        /// strictly positive parameters only
        #[arg(long)]
        positive: bool,
        #[arg(long, value_enum, default_value_t = SideArg::Group)]
        side: SideArg,
    },
    /// Build the module for (n, J) and its eigenchart.
    Embed,
    /// Flow a chart point or a flag for time t.
    Flow {
        /// JSON file with {"point": [...]} or {"flag": [[...], ...]}
        #[arg(long)]
        from: PathBuf,
    },
    /// Run the seeded verification suite.
    Verify,
    /// SL3 cell census and face poset.
    Cells,
    /// Check sigma-fixed nonnegative flags under the flow.
    Fold,
    /// Draw the SL3 ball picture.
    Figure,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Upper,
    Lower,
    Group,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Upper => Side::Upper,
            SideArg::Lower => Side::Lower,
            SideArg::Group => Side::Group,
        }
    }
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("TNNFLOW_SEED") {
        Ok(s) => Ok(Some(s.trim().parse().context("TNNFLOW_SEED is not an integer")?)),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = cli.global;
    let file = g.config.as_deref().map(ConfigFile::load).transpose()?;
    let config = RunConfig::resolve(
        file,
        Overrides {
            n: g.n,
            j: g.j,
            seed: g.seed,
            env_seed: env_seed()?,
            count: g.count,
            t: g.t,
            radius: g.radius,
            tol_float: g.tol_float,
            tol_bisect: g.tol_bisect,
            format: g.format,
            out: g.out,
        },
    )?;
    match cli.command {
        Command::Pinning => pinning(&config),
        Command::Sample { positive, side } => sample(&config, positive, side.into()),
        Command::Embed => embed(&config),
        Command::Flow { from } => flow_cmd(&config, &from),
        Command::Verify => verify(&config),
        Command::Cells => cells_cmd(&config),
        Command::Fold => fold(&config),
        Command::Figure => figure(&config),
    }
}

fn is_json(config: &RunConfig) -> Result<bool> {
    match config.format.as_deref() {
        None | Some("text") => Ok(false),
        Some("json") => Ok(true),
        Some(other) => bail!("unknown format {other:?}; expected text or json"),
    }
}

fn emit(config: &RunConfig, body: &str) -> Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(config: &RunConfig, value: &Value) -> Result<()> {
    emit(config, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn rows<T: Scalar>(m: &Matrix<T>, f: impl Fn(&T) -> String) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect()).collect()
}

fn compact(rows: &[Vec<String>]) -> String {
    let inner: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(","))).collect();
    format!("[{}]", inner.join(","))
}

fn q_rows(m: &Matrix<tnnflow_core::Q>) -> Vec<Vec<String>> {
    rows(m, tnnflow_core::scalar::fmt_q)
}

fn pinning(config: &RunConfig) -> Result<Outcome> {
    let p = Pinning::new(config.n)?;
    let gens = |get: &dyn Fn(usize) -> Vec<Vec<String>>| -> Vec<Vec<Vec<String>>> {
        (1..config.n).map(get).collect()
    };
    let e = gens(&|i| q_rows(p.e(i)));
    let f = gens(&|i| q_rows(p.f(i)));
    let h = gens(&|i| q_rows(p.h(i)));
    let tau = q_rows(&p.tau());
    if is_json(config)? {
        emit_json(config, &json!({ "config": config, "e": e, "f": f, "h": h, "tau": tau }))?;
    } else {
        let mut s = format!("n = {}\n", config.n);
        for (name, list) in [("e", &e), ("f", &f), ("h", &h)] {
            for (i, m) in list.iter().enumerate() {
                s += &format!("{name}{} = {}\n", i + 1, compact(m));
            }
        }
        s += &format!("tau = {}\n", compact(&tau));
        emit(config, &s)?;
    }
    Ok(Outcome::Pass)
}

fn sample(config: &RunConfig, positive: bool, side: Side) -> Result<Outcome> {
    let p = Pinning::new(config.n)?;
    let word = standard_word_w0(config.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let zero_prob = if positive { 0.0 } else { 0.3 };
    let mut items = Vec::new();
    let mut text = String::new();
    for k in 0..config.count {
        let params: FactorizationParams<_> =
            random_params(&mut rng, &word, zero_prob, side == Side::Group);
        let m = p.product(&params.factors(side))?;
        let cert = minor_certificate(&m);
        let matrix = q_rows(&m);
        text += &format!(
            "{k}: {:?} minors={} zero={} min={} g={}\n",
            cert.class,
            cert.minors,
            cert.zero_minors,
            tnnflow_core::scalar::fmt_q(&cert.min_minor),
            compact(&matrix)
        );
        items.push(json!({
            "word": word.letters(),
            "params": params.t().iter().map(tnnflow_core::scalar::fmt_q).collect::<Vec<_>>(),
            "torus": params.torus().map(|t| t.iter().map(tnnflow_core::scalar::fmt_q).collect::<Vec<_>>()),
            "matrix": matrix,
            "certificate": {
                "class": format!("{:?}", cert.class),
                "minors": cert.minors,
                "zero_minors": cert.zero_minors,
                "min_minor": tnnflow_core::scalar::fmt_q(&cert.min_minor),
            },
        }));
    }
    if is_json(config)? {
        emit_json(config, &json!({ "config": config, "positive": positive, "samples": items }))?;
    } else {
        emit(config, &text)?;
    }
    Ok(Outcome::Pass)
}

fn embed(config: &RunConfig) -> Result<Outcome> {
    let j = config.j_set();
    let rep = build_rep(&lambda_for(config.n, &j)?)?;
    let chart = eigenchart(&rep)?;
    if is_json(config)? {
        emit_json(
            config,
            &json!({ "config": config, "rep": rep.to_json(), "chart": chart.to_json() }),
        )?;
    } else {
        let mu: Vec<String> = chart.eigenvalues().iter().map(|&x| fmt_decimal(x)).collect();
        let s = format!(
            "weight = {:?}\ndim = {}\neigenvalues = [{}]\nlog_c = {}\n",
            rep.weight().coeffs(),
            rep.dim(),
            mu.join(", "),
            fmt_decimal(chart.eigenvalues()[0] - chart.eigenvalues()[1]),
        );
        emit(config, &s)?;
    }
    Ok(Outcome::Pass)
}

fn number(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().context("number out of range"),
        Value::String(s) => match parse_q(s) {
            Ok(q) => Ok(q.to_f64()),
            Err(_) => Ok(parse_decimal(s)?),
        },
        other => bail!("expected a number, got {other}"),
    }
}

fn flow_cmd(config: &RunConfig, from: &PathBuf) -> Result<Outcome> {
    let text = std::fs::read_to_string(from).with_context(|| format!("reading {}", from.display()))?;
    let input: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", from.display()))?;
    let j = config.j_set();
    let rep = build_rep(&lambda_for(config.n, &j)?)?;
    let chart = eigenchart(&rep)?;
    let spec = FlowSpec::from_chart(&chart)?;
    let t = config.t;
    let out = if let Some(point) = input.get("point") {
        let coords = point
            .as_array()
            .context("\"point\" must be an array")?
            .iter()
            .map(number)
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != spec.dim() {
            bail!("point has {} coordinates; the chart has {}", coords.len(), spec.dim());
        }
        let p = ChartPoint(coords);
        let q = flow(&spec, t, &p);
        json!({ "config": config, "start": p, "point": q, "finite": q.is_finite() })
    } else if let Some(flag) = input.get("flag") {
        let rows_in = flag.as_array().context("\"flag\" must be an array of rows")?;
        let rows_f = rows_in
            .iter()
            .map(|r| r.as_array().context("flag rows must be arrays")?.iter().map(number).collect())
            .collect::<Result<Vec<Vec<f64>>>>()?;
        if rows_f.len() != config.n || rows_f.iter().any(|r| r.len() != config.n) {
            bail!("flag must be an {0}x{0} matrix", config.n);
        }
        let g = Matrix::from_rows(rows_f);
        let r = flow_on_flag(&chart, &g, &j, t)?;
        json!({
            "config": config,
            "point": r.via_chart,
            "point_from_flag": r.via_group,
            "discrepancy": fmt_decimal(r.discrepancy),
            "flag": rows(r.flag.rep(), |x| fmt_decimal(*x)),
        })
    } else {
        bail!("input needs a \"point\" or a \"flag\"");
    };
    emit_json(config, &out)?;
    Ok(Outcome::Pass)
}

fn verify(config: &RunConfig) -> Result<Outcome> {
    let suite = SuiteConfig {
        seed: config.seed,
        count: config.count,
        t: config.t,
        radius: config.radius,
        tol_float: config.tol_float,
        tol_bisect: config.tol_bisect,
    };
    let report = run_suite(&suite)?;
    let value = json!({ "config": config, "report": report });
    emit_json(config, &value)?;
    for s in &report.sections {
        eprintln!("{:<18} {}", s.name, if s.pass { "pass" } else { "FAIL" });
    }
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}

fn census_and_poset(config: &RunConfig) -> Result<(cells::Census, cells::FacePoset)> {
    if config.n != 3 || !config.j.is_empty() {
        bail!("the cell census covers the complete flag variety of SL3 only (n = 3, J empty)");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let census = cells::census(&mut rng, 2)?;
    let poset = cells::face_poset(&census, &mut rng)?;
    Ok((census, poset))
}

fn cells_cmd(config: &RunConfig) -> Result<Outcome> {
    let (census, poset) = census_and_poset(config)?;
    let check = cells::boundary_check(&census, &poset);
    let doc = serde_json::to_string_pretty(&cells::to_json(&census, &poset, config.seed))? + "\n";
    let ok = census.f_vector() == [6, 8, 4, 1] && check.is_sphere_like() && poset.unwitnessed.is_empty();
    if is_json(config)? {
        emit(config, &doc)?;
    } else {
        if let Some(path) = &config.out {
            std::fs::write(path, &doc).with_context(|| format!("writing {}", path.display()))?;
        }
        println!("{}", census.summary());
        println!(
            "boundary: V - E + F = {} - {} + {} = {}",
            check.vertices, check.edges, check.faces, check.euler
        );
    }
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn fold(config: &RunConfig) -> Result<Outcome> {
    let folding = build_folding(config.n)?;
    let j: BTreeSet<usize> = config.j_set();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let times = [0.0, 0.1, 1.0, 5.0];
    let symmetric = fixed_locus_flow_check(&folding, &j, true, &times, config.count, &mut rng)?;
    let control = fixed_locus_flow_check(&folding, &j, false, &times, config.count, &mut rng)?;
    let pass = symmetric.all_fixed() && control.exactly_fixed < control.samples;
    emit_json(
        config,
        &json!({ "config": config, "pass": pass, "symmetric": symmetric, "asymmetric_control": control }),
    )?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn figure(config: &RunConfig) -> Result<Outcome> {
    let format: FigureFormat = config.format.as_deref().unwrap_or("svg").parse()?;
    let (census, poset) = census_and_poset(config)?;
    emit(config, &cells::figure_export(&census, &poset, format, config.seed)?)?;
    Ok(Outcome::Pass)
}
