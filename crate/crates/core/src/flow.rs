//! The flow `f(t, p) = (e^{t(μ_k − μ₀)} p_k)_k` in eigenchart coordinates,
//! a sampled verifier for the contractive-flow axioms, trajectory/sphere
//! intersection, and the checks that tie the chart flow to `exp(tτ)` acting
//! on flags.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::chevalley::Pinning;
use crate::embedding::{Chart, ChartPoint, RepModule};
use crate::error::{Error, Result};
use crate::matrix::{norm, Matrix};
use crate::scalar::{fmt_decimal, Q};
use crate::totpos::{
    all_patterns, closure_factors, flag_of, orthonormal_columns, random_params, sample_param,
    sl3_membership, standard_word_w0, FlagPoint, Membership, Sl3Coords, Side,
};

/// Tolerance on `‖f(t*, p)‖ − r`, relative to `r`.
pub const BISECT_TOL: f64 = 1e-12;
pub const BISECT_MAX_ITER: usize = 200;
/// Relative tolerance of the semigroup law.
pub const SEMIGROUP_TOL: f64 = 1e-12;
/// Additive slack in the contraction bound.
pub const CONTRACTION_SLACK: f64 = 1e-12;
/// Agreement of the two evaluation paths of [`flow_on_flag`].
pub const COMMUTATION_TOL: f64 = 1e-8;

pub(crate) fn ser_decimal<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_decimal(*x))
}

pub(crate) fn ser_decimals<S: Serializer>(
    v: &[f64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|&x| fmt_decimal(x)))
}

pub(crate) fn ser_opt_decimals<S: Serializer>(
    v: &Option<Vec<f64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_decimals(v, s),
        None => s.serialize_none(),
    }
}

/// Rates `δ_k = μ_k − μ₀` of the chart flow.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowSpec {
    #[serde(serialize_with = "ser_decimals")]
    deltas: Vec<f64>,
    #[serde(serialize_with = "ser_decimal")]
    log_c: f64,
}

impl FlowSpec {
    /// Requires every rate to be negative.
    pub fn new(deltas: Vec<f64>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::Dimension("flow on a zero-dimensional chart".into()));
        }
        if let Some(d) = deltas.iter().find(|d| !(**d < 0.0)) {
            return Err(Error::Invalid(format!("rate {d} is not negative")));
        }
        Ok(Self::unchecked(deltas))
    }

    /// Skips the sign check, so the verifier can be exercised on flows that
    /// are not contractive.
    pub fn unchecked(deltas: Vec<f64>) -> Self {
        let log_c = deltas.iter().map(|d| -d).fold(f64::INFINITY, f64::min);
        Self { deltas, log_c }
    }

    pub fn from_chart(chart: &Chart) -> Result<Self> {
        let mu = chart.eigenvalues();
        Self::new(mu[1..].iter().map(|m| m - mu[0]).collect())
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// `log C = min_k (μ₀ − μ_k)`.
    pub fn log_c(&self) -> f64 {
        self.log_c
    }

    pub fn dim(&self) -> usize {
        self.deltas.len()
    }

    fn max_rate(&self) -> f64 {
        self.deltas.iter().map(|d| d.abs()).fold(0.0, f64::max)
    }
}

/// Coordinatewise exponential scaling. Very negative `t` may overflow to
/// infinite coordinates; check [`ChartPoint::is_finite`].
pub fn flow(spec: &FlowSpec, t: f64, p: &ChartPoint) -> ChartPoint {
    assert_eq!(spec.dim(), p.dim(), "flow dimension mismatch");
    ChartPoint(
        spec.deltas
            .iter()
            .zip(&p.0)
            .map(|(d, x)| (t * d).exp() * x)
            .collect(),
    )
}

fn flow_norm(spec: &FlowSpec, t: f64, p: &ChartPoint) -> f64 {
    flow(spec, t, p).norm()
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomResult {
    pub axiom: u8,
    pub name: &'static str,
    pub pass: bool,
    pub samples: usize,
    /// Smallest slack over all samples; negative on failure.
    #[serde(serialize_with = "ser_decimal")]
    pub worst_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "ser_decimals")]
    pub t: Vec<f64>,
    #[serde(serialize_with = "ser_decimals")]
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axioms: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.axioms.iter().all(|a| a.pass)
    }

    pub fn get(&self, axiom: u8) -> &AxiomResult {
        &self.axioms[usize::from(axiom) - 1]
    }
}

/// Where [`verify_axioms`] draws its samples.
#[derive(Clone, Copy, Debug)]
pub struct AxiomSampler {
    /// chart points are drawn from the ball of this radius
    pub radius: f64,
    /// times are drawn from `[−t_max, t_max]`, or `(0, t_max]` for axiom 3
    pub t_max: f64,
    /// perturbation size of the continuity estimate
    pub step: f64,
}

impl Default for AxiomSampler {
    fn default() -> Self {
        Self {
            radius: 10.0,
            t_max: 5.0,
            step: 1e-4,
        }
    }
}

impl AxiomSampler {
    fn point<R: Rng + ?Sized>(&self, rng: &mut R, dim: usize) -> ChartPoint {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let n = norm(&v);
            if n > 1e-3 {
                let r = self.radius * rng.random_range(1e-3..=1.0);
                return ChartPoint(v.iter().map(|x| x * r / n).collect());
            }
        }
    }

    fn positive_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // (0, t_max]
        self.t_max * (1.0 - rng.random_range(0.0..1.0))
    }
}

/// Samples the three contractive-flow axioms: continuity (as a Lipschitz
/// estimate on a compact set), the group law, and strict norm decrease
/// together with the bound `‖f(t,p)‖ ≤ e^{−t log C} ‖p‖`.
pub fn verify_axioms<R: Rng + ?Sized>(
    spec: &FlowSpec,
    sampler: &AxiomSampler,
    rng: &mut R,
    count: usize,
) -> AxiomReport {
    let count = count.max(1);
    let dim = spec.dim();

    // (1) continuity
    let rate = spec.max_rate();
    let h = sampler.step;
    let lipschitz = ((sampler.t_max + h) * rate).exp() * (1.0f64).max(rate * (sampler.radius + h));
    let mut estimate: f64 = 0.0;
    let mut worst1: Option<(f64, Witness)> = None;
    for _ in 0..count {
        let t = rng.random_range(-sampler.t_max..=sampler.t_max);
        let p = sampler.point(rng, dim);
        let dt = h * rng.random_range(-1.0..=1.0);
        let dir = sampler.point(rng, dim);
        let dp: Vec<f64> = dir.0.iter().map(|x| x * h / dir.norm()).collect();
        let p2 = ChartPoint(p.0.iter().zip(&dp).map(|(a, b)| a + b).collect());
        let ratio = flow(spec, t + dt, &p2).dist(&flow(spec, t, &p)) / (dt.abs() + h);
        let margin = lipschitz - ratio;
        if !ratio.is_finite() || margin < 0.0 {
            if worst1.as_ref().is_none_or(|(m, _)| margin < *m) {
                worst1 = Some((margin, Witness { t: vec![t, dt], p: p.0.clone() }));
            }
        }
        estimate = estimate.max(ratio);
    }
    let margin1 = lipschitz - estimate;
    let axiom1 = AxiomResult {
        axiom: 1,
        name: "continuity",
        pass: estimate.is_finite() && margin1 >= 0.0,
        samples: count,
        worst_margin: margin1,
        witness: worst1.map(|(_, w)| w),
        note: Some("sampled Lipschitz estimate on a compact box, not a proof"),
    };

    // (2) group law; the trivial pair (0, 0) is always included
    let mut worst2 = f64::INFINITY;
    let mut witness2 = None;
    for k in 0..count {
        let (t1, t2) = if k == 0 {
            (0.0, 0.0)
        } else {
            (
                rng.random_range(-sampler.t_max..=sampler.t_max),
                rng.random_range(-sampler.t_max..=sampler.t_max),
            )
        };
        let p = sampler.point(rng, dim);
        let direct = flow(spec, t1 + t2, &p);
        let composed = flow(spec, t1, &flow(spec, t2, &p));
        let rel = direct.dist(&composed) / direct.norm().max(f64::MIN_POSITIVE);
        let margin = SEMIGROUP_TOL - rel;
        if margin < worst2 {
            worst2 = margin;
            if margin < 0.0 {
                witness2 = Some(Witness { t: vec![t1, t2], p: p.0.clone() });
            }
        }
    }
    let axiom2 = AxiomResult {
        axiom: 2,
        name: "group law",
        pass: worst2 >= 0.0,
        samples: count,
        worst_margin: worst2,
        witness: witness2,
        note: None,
    };

    // (3) contraction; axis-aligned probes catch rates that vanish
    let mut worst3 = f64::INFINITY;
    let mut witness3 = None;
    let mut samples3 = 0;
    let probes = (0..dim).map(|k| {
        let mut v = vec![0.0; dim];
        v[k] = sampler.radius * 0.5;
        (sampler.t_max * 0.5, ChartPoint(v))
    });
    let random: Vec<(f64, ChartPoint)> = (0..count)
        .map(|_| (sampler.positive_time(rng), sampler.point(rng, dim)))
        .collect();
    for (t, p) in probes.chain(random) {
        samples3 += 1;
        let before = p.norm();
        let after = flow(spec, t, &p).norm();
        let bound = (-t * spec.log_c()).exp() * before + CONTRACTION_SLACK;
        let strict = before - after;
        let margin = if strict > 0.0 { bound - after } else { strict.min(bound - after) };
        if margin < worst3 {
            worst3 = margin;
            if margin < 0.0 || strict <= 0.0 {
                witness3 = Some(Witness { t: vec![t], p: p.0.clone() });
            }
        }
    }
    let axiom3 = AxiomResult {
        axiom: 3,
        name: "contraction",
        pass: witness3.is_none() && worst3 >= 0.0,
        samples: samples3,
        worst_margin: worst3,
        witness: witness3,
        note: None,
    };
    AxiomReport {
        axioms: vec![axiom1, axiom2, axiom3],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    #[serde(serialize_with = "ser_decimal")]
    pub t: f64,
    pub point: ChartPoint,
    pub iterations: usize,
}

/// The unique time at which the trajectory through `p` meets the sphere of
/// radius `r`.
pub fn sphere_crossing(spec: &FlowSpec, p: &ChartPoint, r: f64) -> Result<Crossing> {
    sphere_crossing_from(spec, p, r, 1.0)
}

/// [`sphere_crossing`] with an explicit initial bracket `[−step, step]`.
pub fn sphere_crossing_from(
    spec: &FlowSpec,
    p: &ChartPoint,
    r: f64,
    step: f64,
) -> Result<Crossing> {
    sphere_crossing_tol(spec, p, r, step, BISECT_TOL)
}

/// [`sphere_crossing_from`] with a relative stopping tolerance `tol` on
/// `‖f(t, p)‖ − r`.
pub fn sphere_crossing_tol(
    spec: &FlowSpec,
    p: &ChartPoint,
    r: f64,
    step: f64,
    tol: f64,
) -> Result<Crossing> {
    if !(p.norm() > 0.0) {
        return Err(Error::Invalid("trajectory of the fixed point never crosses a sphere".into()));
    }
    if !(r > 0.0) || !(step > 0.0) || !(tol > 0.0) {
        return Err(Error::Invalid("radius and bracket step must be positive".into()));
    }
    let (mut lo, mut hi) = (-step, step);
    let mut guard = 0;
    while flow_norm(spec, hi, p) > r {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            return Err(Error::Invalid("crossing bracket did not close from above".into()));
        }
    }
    while flow_norm(spec, lo, p) < r {
        lo *= 2.0;
        guard += 1;
        if guard > 2000 || !lo.is_finite() {
            return Err(Error::Invalid("crossing bracket did not close from below".into()));
        }
    }
    let mut iterations = 0;
    let mut mid = 0.5 * (lo + hi);
    while iterations < BISECT_MAX_ITER {
        iterations += 1;
        mid = 0.5 * (lo + hi);
        let g = flow_norm(spec, mid, p);
        if (g - r).abs() <= tol * r {
            break;
        }
        if g > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Crossing {
        t: mid,
        point: flow(spec, mid, p),
        iterations,
    })
}

/// `exp(tτ) · g` with column re-orthonormalization after each unit step, so
/// the flag stays well conditioned for large `t`.
pub fn flow_flag_matrix(pinning: &Pinning, g: &Matrix<f64>, t: f64) -> Matrix<f64> {
    let steps = t.abs().ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let step = pinning.exp_tau(dt);
    let mut m = g.clone();
    for _ in 0..steps {
        m = orthonormal_columns(&(&step * &m), m.cols());
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowOnFlag {
    pub via_group: ChartPoint,
    pub via_chart: ChartPoint,
    #[serde(serialize_with = "ser_decimal")]
    pub discrepancy: f64,
    #[serde(skip)]
    pub flag: FlagPoint<f64>,
}

impl FlowOnFlag {
    pub fn agrees(&self) -> bool {
        self.discrepancy <= COMMUTATION_TOL
    }
}

/// Evaluates `φ(f(t, p)) = exp(tτ) · φ(p)` both ways: (a) move the flag by
/// `exp(tτ)`, embed, read chart coordinates; (b) read chart coordinates of
/// the original flag, then apply the chart flow.
pub fn flow_on_flag(
    chart: &Chart,
    g: &Matrix<f64>,
    j: &BTreeSet<usize>,
    t: f64,
) -> Result<FlowOnFlag> {
    let rep = chart.rep();
    let pinning = rep.pinning();
    check_consistent(rep, j)?;
    let spec = FlowSpec::from_chart(chart)?;

    let moved = flow_flag_matrix(pinning, g, t);
    let flag = flag_of(&moved, j)?;
    let via_group = chart.chart_coords(&rep.psi_matrix_f64(flag.rep())?)?;

    let start = chart.chart_coords(&rep.psi_matrix_f64(g)?)?;
    let via_chart = flow(&spec, t, &start);
    Ok(FlowOnFlag {
        discrepancy: via_group.dist(&via_chart),
        via_group,
        via_chart,
        flag,
    })
}

fn check_consistent(rep: &RepModule, j: &BTreeSet<usize>) -> Result<()> {
    let expected: BTreeSet<usize> = (1..rep.n()).filter(|i| !j.contains(i)).collect();
    if rep.weight().support() != expected {
        return Err(Error::Invalid(format!(
            "module of weight {:?} does not embed the flag variety with J = {:?}",
            rep.weight().coeffs(),
            j
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Convergence {
    #[serde(serialize_with = "ser_decimal")]
    pub start_norm: f64,
    /// first time with `‖f(T, p)‖ < tol`
    #[serde(serialize_with = "ser_decimal")]
    pub time: f64,
    /// `ln(‖p‖ / tol) / log C`
    #[serde(serialize_with = "ser_decimal")]
    pub analytic_bound: f64,
    #[serde(serialize_with = "ser_decimal")]
    pub final_norm: f64,
}

/// Time for the trajectory through `p` to enter the `tol`-ball around the
/// fixed point.
pub fn converge(spec: &FlowSpec, p: &ChartPoint, tol: f64) -> Result<Convergence> {
    if !(tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let start_norm = p.norm();
    let analytic_bound = ((start_norm / tol).ln() / spec.log_c()).max(0.0);
    if start_norm < tol {
        return Ok(Convergence {
            start_norm,
            time: 0.0,
            analytic_bound,
            final_norm: start_norm,
        });
    }
    let crossing = sphere_crossing(spec, p, tol)?;
    // step just past the sphere so the norm is strictly below tol
    let mut time = crossing.t;
    let mut bump = 1e-12 * time.abs().max(1.0);
    while flow_norm(spec, time, p) >= tol {
        time += bump;
        bump *= 2.0;
    }
    Ok(Convergence {
        start_norm,
        time,
        analytic_bound,
        final_norm: flow_norm(spec, time, p),
    })
}

/// `10⁻²` times the smallest chart norm among the given closure points, so
/// the sphere of this radius sits well inside the sampled region.
pub fn default_radius(chart: &Chart, samples: &[Matrix<Q>]) -> Result<f64> {
    let rep = chart.rep();
    let mut smallest = f64::INFINITY;
    for g in samples {
        let p = chart.chart_coords(&rep.psi_matrix_f64(&g.to_f64())?)?;
        smallest = smallest.min(p.norm());
    }
    if !(smallest.is_finite() && smallest > 0.0) {
        return Err(Error::Undersampled("no usable samples for the ball radius".into()));
    }
    Ok(1e-2 * smallest)
}

/// The flag of `τ`-eigenvectors ordered by decreasing eigenvalue, the
/// attracting fixed point of the flow.
pub fn fixed_flag(pinning: &Pinning) -> Matrix<f64> {
    let (_, vectors) = pinning.tau_eigen();
    let n = pinning.n();
    // Perron vector first, positive
    let mut m = vectors;
    for c in 0..n {
        let lead = (0..n)
            .map(|i| m[(i, c)])
            .reduce(|a, b| if b.abs() > a.abs() { b } else { a })
            .unwrap_or(1.0);
        if lead < 0.0 {
            for i in 0..n {
                m[(i, c)] = -m[(i, c)];
            }
        }
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct FlagConvergence {
    pub convergence: Convergence,
    #[serde(serialize_with = "ser_opt_decimals")]
    pub limit_sl3: Option<Vec<f64>>,
    /// projector distance from the eigenvector flag
    #[serde(serialize_with = "ser_decimal")]
    pub distance_to_fixed_flag: f64,
}

/// Flows a flag until its chart point is within `tol` of the origin and
/// reports where it lands.
pub fn converge_flag(
    chart: &Chart,
    g: &Matrix<f64>,
    j: &BTreeSet<usize>,
    tol: f64,
) -> Result<FlagConvergence> {
    let rep = chart.rep();
    check_consistent(rep, j)?;
    let spec = FlowSpec::from_chart(chart)?;
    let p = chart.chart_coords(&rep.psi_matrix_f64(g)?)?;
    let convergence = converge(&spec, &p, tol)?;
    let pinning = rep.pinning();
    let moved = flow_flag_matrix(pinning, g, convergence.time);
    let flag = flag_of(&moved, j)?;
    let fixed = flag_of(&fixed_flag(pinning), j)?;
    let limit_sl3 = if pinning.n() == 3 && j.is_empty() {
        let c = Sl3Coords::from_matrix(&moved)?;
        Some(c.coords().to_vec())
    } else {
        None
    };
    Ok(FlagConvergence {
        convergence,
        limit_sl3,
        distance_to_fixed_flag: flag.distance(&fixed),
    })
}

/// The coordinates `v₁ = v₃ = w₁ = w₃ = 1/(2+√2)`, `v₂ = w₂ = √2/(2+√2)` of
/// the SL₃ fixed flag.
pub fn sl3_fixed_point() -> Sl3Coords<f64> {
    let s = 2f64.sqrt();
    let a = 1.0 / (2.0 + s);
    let b = s / (2.0 + s);
    Sl3Coords::new([a, b, a], [a, b, a])
}

/// How strict interiority of a flowed point is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InteriorOracle {
    /// the SL₃ complete-flag inequalities
    Sl3,
    /// positivity of all canonical (wedge) coordinates
    Minuscule,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub oracle: InteriorOracle,
    #[serde(serialize_with = "ser_decimal")]
    pub t: f64,
    pub samples: usize,
    pub interior: usize,
    pub failures: Vec<usize>,
}

impl InvarianceReport {
    pub fn all_interior(&self) -> bool {
        self.samples > 0 && self.interior == self.samples
    }
}

/// Whether the flowed point `exp(tτ) · g` is strictly inside the positive
/// part.
pub fn flowed_is_interior(
    rep: &RepModule,
    oracle: InteriorOracle,
    g: &Matrix<f64>,
    t: f64,
    tol: f64,
) -> Result<bool> {
    let moved = flow_flag_matrix(rep.pinning(), g, t);
    match oracle {
        InteriorOracle::Sl3 => match Sl3Coords::from_matrix(&moved) {
            Ok(c) => Ok(sl3_membership(&c, tol).class == Membership::PositivePart),
            Err(Error::Outside(_)) => Ok(false),
            Err(e) => Err(e),
        },
        InteriorOracle::Minuscule => {
            if !rep.is_minuscule() {
                return Err(Error::Invalid("minuscule oracle needs a fundamental module".into()));
            }
            Ok(rep.psi_matrix_f64(&moved)?.is_positive(tol))
        }
    }
}

/// Checks that `exp(tτ)` pushes closure points strictly inside.
pub fn invariance_check(
    rep: &RepModule,
    oracle: InteriorOracle,
    samples: &[Matrix<Q>],
    t: f64,
    tol: f64,
) -> Result<InvarianceReport> {
    let mut failures = Vec::new();
    for (k, g) in samples.iter().enumerate() {
        if !flowed_is_interior(rep, oracle, &g.to_f64(), t, tol)? {
            failures.push(k);
        }
    }
    Ok(InvarianceReport {
        oracle,
        t,
        samples: samples.len(),
        interior: samples.len() - failures.len(),
        failures,
    })
}

/// Classification of an exact closure sample by the oracle.
fn classify_exact(rep: &RepModule, oracle: InteriorOracle, g: &Matrix<Q>) -> Result<Membership> {
    match oracle {
        InteriorOracle::Sl3 => match Sl3Coords::from_matrix(g) {
            Ok(c) => Ok(sl3_membership(&c, 0.0).class),
            Err(Error::Outside(_)) => Ok(Membership::Outside),
            Err(e) => Err(e),
        },
        InteriorOracle::Minuscule => {
            let line = rep.psi_matrix_exact(g)?;
            Ok(if line.is_positive(0.0) {
                Membership::PositivePart
            } else if line.is_nonnegative(0.0) {
                Membership::NonnegativeBoundary
            } else {
                Membership::Outside
            })
        }
    }
}

/// Exact representatives of boundary points of the nonnegative part, drawn
/// from random `y`/`ṡ` letter patterns along the staircase word and kept
/// when the oracle places them on the boundary.
pub fn sample_boundary<R: Rng + ?Sized>(
    rng: &mut R,
    rep: &RepModule,
    oracle: InteriorOracle,
    count: usize,
) -> Result<Vec<Matrix<Q>>> {
    let pinning = rep.pinning();
    let word = standard_word_w0(pinning.n())?;
    let patterns = all_patterns(word.len());
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 10_000 * count.max(1) {
            return Err(Error::Undersampled(format!(
                "only {} boundary samples after {attempts} attempts",
                out.len()
            )));
        }
        let pattern = &patterns[rng.random_range(0..patterns.len())];
        let t: Vec<Q> = (0..word.len()).map(|_| sample_param(rng)).collect();
        let g = pinning.product(&closure_factors(&word, pattern, &t))?;
        if classify_exact(rep, oracle, &g)? == Membership::NonnegativeBoundary {
            out.push(g);
        }
    }
    Ok(out)
}

/// Random nonnegative lower-unipotent factorization; each parameter is zero
/// with probability `zero_prob`.
pub fn sample_tnn_flag<R: Rng + ?Sized>(
    rng: &mut R,
    pinning: &Pinning,
    zero_prob: f64,
) -> Result<Matrix<Q>> {
    let word = standard_word_w0(pinning.n())?;
    let params = random_params(rng, &word, zero_prob, false);
    pinning.product(&params.factors(Side::Lower))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{build_rep, eigenchart, lambda_for};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_dim(delta: f64) -> FlowSpec {
        FlowSpec::new(vec![delta]).unwrap()
    }

    #[test]
    fn flow_formula() {
        let s = one_dim(-1.0);
        let p = ChartPoint(vec![3.0]);
        assert_eq!(flow(&s, 0.0, &p), p);
        assert!((flow(&s, 2.0, &p).0[0] - 3.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(flow(&s, 7.0, &ChartPoint(vec![0.0])).0[0], 0.0);
        assert!(!flow(&s, -1e4, &p).is_finite());
    }

    #[test]
    fn spec_rejects_nonnegative_rates() {
        assert!(FlowSpec::new(vec![-1.0, 0.0]).is_err());
        assert!(FlowSpec::new(vec![]).is_err());
        assert_eq!(FlowSpec::unchecked(vec![-2.0, 0.0]).log_c(), 0.0);
        assert_eq!(FlowSpec::new(vec![-2.0, -0.5]).unwrap().log_c(), 0.5);
    }

    #[test]
    fn crossing_closed_form() {
        let s = one_dim(-1.0);
        let c = sphere_crossing(&s, &ChartPoint(vec![1.0]), (-2.0f64).exp()).unwrap();
        assert!((c.t - 2.0).abs() < 1e-11);
        let c = sphere_crossing(&s, &ChartPoint(vec![0.5]), 0.5).unwrap();
        assert_eq!(c.t, 0.0);
        assert!(sphere_crossing(&s, &ChartPoint(vec![0.0]), 1.0).is_err());
        // far away brackets
        let c = sphere_crossing(&s, &ChartPoint(vec![1.0]), 1e-200).unwrap();
        assert!((c.t - 200.0 * 10f64.ln()).abs() < 1e-9, "{c:?}");
        let c = sphere_crossing(&s, &ChartPoint(vec![1.0]), 1e200).unwrap();
        assert!((c.t + 200.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn zero_rate_breaks_contraction() {
        let spec = FlowSpec::unchecked(vec![-1.0, 0.0, -2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = verify_axioms(&spec, &AxiomSampler::default(), &mut rng, 200);
        assert!(rep.get(1).pass);
        assert!(rep.get(2).pass);
        let ax3 = rep.get(3);
        assert!(!ax3.pass);
        let w = ax3.witness.as_ref().unwrap();
        // the witness lies on the neutral axis
        assert!(w.p[1] != 0.0 && w.p[0] == 0.0 && w.p[2] == 0.0);
    }

    #[test]
    fn sl3_chart_axioms() {
        let rep = build_rep(&lambda_for(3, &BTreeSet::new()).unwrap()).unwrap();
        let spec = FlowSpec::from_chart(&eigenchart(&rep).unwrap()).unwrap();
        assert!((spec.log_c() - 2f64.sqrt()).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let report = verify_axioms(&spec, &AxiomSampler::default(), &mut rng, 1000);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn fixed_flag_is_sl3_fixed_point() {
        let p = Pinning::new(3).unwrap();
        let c = Sl3Coords::from_matrix(&fixed_flag(&p)).unwrap();
        let want = sl3_fixed_point();
        for (a, b) in c.coords().iter().zip(want.coords()) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
