//! The seeded verification suite behind `tnnflow verify`.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chevalley::Pinning;
use crate::embedding::{build_rep, eigenchart, lambda_for, Chart, RepModule};
use crate::error::Result;
use crate::flow::*;
use crate::folding::{build_folding, fixed_locus_flow_check};
use crate::scalar::{fmt_decimal, q_from_f64, Scalar};
use crate::totpos::{minor_certificate, TnnClass};
use crate::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    /// flow time for the invariance checks
    pub t: f64,
    /// ball radius; derived from boundary samples when absent
    pub radius: Option<f64>,
    pub tol_float: f64,
    pub tol_bisect: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 100,
            t: 0.1,
            radius: None,
            tol_float: 1e-10,
            tol_bisect: BISECT_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub name: &'static str,
    pub pass: bool,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub meta: Value,
    pub sections: Vec<Section>,
}

impl VerifyReport {
    pub fn failed(&self) -> Vec<&'static str> {
        self.sections.iter().filter(|s| !s.pass).map(|s| s.name).collect()
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}

fn chart_for(n: usize, j: &BTreeSet<usize>) -> Result<(RepModule, Chart)> {
    let rep = build_rep(&lambda_for(n, j)?)?;
    let chart = eigenchart(&rep)?;
    Ok((rep, chart))
}

/// Runs every check with generators derived from `config.seed`; the report
/// depends on nothing else.
pub fn run_suite(config: &SuiteConfig) -> Result<VerifyReport> {
    let count = config.count.max(1);
    let (rep3, chart3) = chart_for(3, &set(&[]))?;
    let spec3 = FlowSpec::from_chart(&chart3)?;
    let mut sections = Vec::new();

    // flow axioms in the SL3 chart
    let axioms = verify_axioms(&spec3, &AxiomSampler::default(), &mut rng_for(config.seed, 1), count);
    sections.push(Section {
        name: "axioms",
        pass: axioms.all_pass(),
        details: serde_json::to_value(&axioms)?,
    });

    // invariance, with the t = 0 control
    let mut inv = Vec::new();
    let mut inv_pass = true;
    let mut rng = rng_for(config.seed, 2);
    let sl3_boundary = sample_boundary(&mut rng, &rep3, InteriorOracle::Sl3, count)?;
    let (rep24, _) = chart_for(4, &set(&[1, 3]))?;
    let gr_boundary = sample_boundary(&mut rng, &rep24, InteriorOracle::Minuscule, count)?;
    for (rep, oracle, samples) in [
        (&rep3, InteriorOracle::Sl3, &sl3_boundary),
        (&rep24, InteriorOracle::Minuscule, &gr_boundary),
    ] {
        let flowed = invariance_check(rep, oracle, samples, config.t, config.tol_float)?;
        let control = invariance_check(rep, oracle, samples, 0.0, config.tol_float)?;
        inv_pass &= flowed.all_interior() && control.interior == 0;
        inv.push(json!({ "flowed": flowed, "control": control }));
    }
    sections.push(Section {
        name: "invariance",
        pass: inv_pass,
        details: Value::Array(inv),
    });

    // trajectory crossings of the ball boundary
    let radius = match config.radius {
        Some(r) => r,
        None => default_radius(&chart3, &sl3_boundary)?,
    };
    let mut worst_norm: f64 = 0.0;
    let mut worst_repeat: f64 = 0.0;
    for g in &sl3_boundary {
        let p = chart3.chart_coords(&rep3.psi_matrix_f64(&g.to_f64())?)?;
        let c = sphere_crossing_tol(&spec3, &p, radius, 1.0, config.tol_bisect)?;
        worst_norm = worst_norm.max((c.point.norm() - radius).abs() / radius);
        let again = sphere_crossing_tol(&spec3, &c.point, radius, 1.0, config.tol_bisect)?;
        worst_repeat = worst_repeat.max(again.t.abs());
    }
    sections.push(Section {
        name: "crossing",
        pass: worst_norm <= config.tol_bisect && worst_repeat <= 1e-10,
        details: json!({
            "radius": fmt_decimal(radius),
            "radius_source": if config.radius.is_some() { "configured" } else { "0.01 x smallest boundary chart norm" },
            "worst_relative_norm_error": fmt_decimal(worst_norm),
            "worst_repeat_time": fmt_decimal(worst_repeat),
        }),
    });

    // the two evaluation paths of the chart flow on flags
    let mut comm = Vec::new();
    let mut comm_pass = true;
    let mut rng = rng_for(config.seed, 3);
    for (n, j) in [(3, set(&[])), (3, set(&[2])), (4, set(&[2]))] {
        let (rep, chart) = chart_for(n, &j)?;
        let mut worst: f64 = 0.0;
        for _ in 0..count {
            let g = sample_tnn_flag(&mut rng, rep.pinning(), 0.3)?.to_f64();
            for t in [0.1, 1.0] {
                worst = worst.max(flow_on_flag(&chart, &g, &j, t)?.discrepancy);
            }
        }
        comm_pass &= worst <= COMMUTATION_TOL;
        comm.push(json!({ "n": n, "J": j, "worst": fmt_decimal(worst) }));
    }
    sections.push(Section {
        name: "commutation",
        pass: comm_pass,
        details: Value::Array(comm),
    });

    // convergence to the eigenvector flag
    let mut rng = rng_for(config.seed, 4);
    let fixed = sl3_fixed_point().coords();
    let mut worst: f64 = 0.0;
    let mut within_bound = true;
    for _ in 0..count.div_ceil(5) {
        let g = sample_tnn_flag(&mut rng, rep3.pinning(), 0.3)?.to_f64();
        let c = converge_flag(&chart3, &g, &set(&[]), 1e-9)?;
        within_bound &= c.convergence.time <= c.convergence.analytic_bound + 1e-9;
        if let Some(limit) = &c.limit_sl3 {
            for (a, b) in limit.iter().zip(&fixed) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    sections.push(Section {
        name: "convergence",
        pass: worst <= 1e-8 && within_bound,
        details: json!({
            "fixed_point": fixed.iter().map(|&x| fmt_decimal(x)).collect::<Vec<_>>(),
            "worst_coordinate_error": fmt_decimal(worst),
            "within_analytic_bound": within_bound,
        }),
    });

    // total positivity of exp(τ)
    let pinning = Pinning::new(3)?;
    let e = pinning.exp_tau(1.0);
    let exact = Matrix::from_fn(3, 3, |i, j| q_from_f64(e[(i, j)]).expect("finite entry"));
    let cert = minor_certificate(&exact);
    sections.push(Section {
        name: "exp_tau_positive",
        pass: cert.class == TnnClass::TotallyPositive,
        details: json!({
            "class": format!("{:?}", cert.class),
            "minors": cert.minors,
            "min_minor": fmt_decimal(cert.min_minor.to_f64()),
        }),
    });

    // folding
    let folding = build_folding(4)?;
    let mut rng = rng_for(config.seed, 5);
    let times = [0.1, 1.0, 5.0];
    let symmetric = fixed_locus_flow_check(&folding, &set(&[]), true, &times, count, &mut rng)?;
    let control = fixed_locus_flow_check(&folding, &set(&[]), false, &times, count, &mut rng)?;
    sections.push(Section {
        name: "folding",
        pass: symmetric.all_fixed() && control.exactly_fixed < control.samples,
        details: json!({ "symmetric": symmetric, "asymmetric_control": control }),
    });

    let meta = json!({
        "seed": config.seed,
        "count": count,
        "t": fmt_decimal(config.t),
        "radius": fmt_decimal(radius),
        "tol_float": fmt_decimal(config.tol_float),
        "tol_bisect": fmt_decimal(config.tol_bisect),
    });
    Ok(VerifyReport {
        pass: sections.iter().all(|s| s.pass),
        meta,
        sections,
    })
}
