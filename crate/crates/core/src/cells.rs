//! Cell decomposition of the totally nonnegative part of the SL₃ complete
//! flag variety by vanishing coordinates, its face poset, and export of the
//! ball picture.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chevalley::{Factor, Pinning};
use crate::embedding::RepModule;
use crate::error::{Error, Result};
use crate::flow::{flowed_is_interior, sl3_fixed_point, InteriorOracle};
use crate::matrix::Matrix;
use crate::scalar::{fmt_decimal, fmt_q, parse_q, Scalar, Q};
use crate::totpos::{
    all_patterns, closure_factors, sample_param, sl3_membership, standard_word_w0, Letter,
    Membership, ReducedWord, Sl3Coords,
};

pub const COORD_NAMES: [&str; 6] = ["v1", "v2", "v3", "w1", "w2", "w3"];
/// Vanishing threshold for float coordinates.
pub const VANISH_TOL: f64 = 1e-9;
/// Parameter used for the `t → ∞` limits.
const LARGE_PARAM_BITS: u32 = 60;

/// A cell, named by which of `v₁, v₂, v₃, w₁, w₂, w₃` vanish.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellLabel {
    pub dim: usize,
    /// coordinate indices into [`COORD_NAMES`]
    pub zeros: BTreeSet<usize>,
}

impl CellLabel {
    pub fn zero_names(&self) -> Vec<&'static str> {
        self.zeros.iter().map(|&k| COORD_NAMES[k]).collect()
    }

    /// Vertex label `ab,cd` for the cell `v_a = v_b = w_c = w_d = 0`.
    pub fn vertex_label(&self) -> Option<String> {
        if self.dim != 0 {
            return None;
        }
        let v: String = self.zeros.iter().filter(|&&k| k < 3).map(|k| (k + 1).to_string()).collect();
        let w: String = self.zeros.iter().filter(|&&k| k >= 3).map(|k| (k - 2).to_string()).collect();
        (v.len() == 2 && w.len() == 2).then(|| format!("{v},{w}"))
    }
}

impl fmt::Display for CellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zeros.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{{{}}}", self.zero_names().join(","))
        }
    }
}

fn zero_set<T: Scalar>(c: &Sl3Coords<T>, tol: f64) -> BTreeSet<usize> {
    c.coords()
        .iter()
        .enumerate()
        .filter(|(_, x)| if T::EXACT { x.is_zero() } else { x.magnitude() <= tol })
        .map(|(k, _)| k)
        .collect()
}

/// Local dimension at `c` of the set cut out by the two sum constraints, the
/// incidence relation and the vanishing coordinates: six minus the rank of
/// their Jacobian.
pub fn local_dim<T: Scalar>(c: &Sl3Coords<T>, zeros: &BTreeSet<usize>) -> usize {
    let one = T::one;
    let zero = T::zero;
    let [v1, v2, v3, w1, w2, w3] = c.coords();
    let mut rows = vec![
        vec![one(), one(), one(), zero(), zero(), zero()],
        vec![zero(), zero(), zero(), one(), one(), one()],
        vec![w1, -w2, w3, v1, -v2, v3],
    ];
    for &k in zeros {
        let mut r = vec![zero(); 6];
        r[k] = one();
        rows.push(r);
    }
    6 - Matrix::from_rows(rows).rank()
}

/// Vanishing set and local dimension of a nonnegative SL₃ flag.
pub fn label_of<T: Scalar>(c: &Sl3Coords<T>, tol: f64) -> Result<CellLabel> {
    let m = sl3_membership(c, tol);
    if m.class == Membership::Outside {
        return Err(Error::Outside(m.diagnostic.unwrap_or_default()));
    }
    let zeros = zero_set(c, tol);
    Ok(CellLabel {
        dim: local_dim(c, &zeros),
        zeros,
    })
}

/// A representative `[v | n × v | n]` of the flag with coordinates `c`,
/// where `n = (w₁, −w₂, w₃)`.
pub fn flag_matrix<T: Scalar>(c: &Sl3Coords<T>) -> Matrix<T> {
    let v = c.v.clone();
    let n = [c.w[0].clone(), -c.w[1].clone(), c.w[2].clone()];
    let cross = [
        n[1].clone() * v[2].clone() - n[2].clone() * v[1].clone(),
        n[2].clone() * v[0].clone() - n[0].clone() * v[2].clone(),
        n[0].clone() * v[1].clone() - n[1].clone() * v[0].clone(),
    ];
    Matrix::from_columns(&[v.to_vec(), cross.to_vec(), n.to_vec()])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub label: CellLabel,
    pub witness: Sl3Coords<Q>,
    /// letters along the staircase word that produced the witness
    pub pattern: Vec<Letter>,
    pub params: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    /// sorted by dimension, then vanishing set
    pub cells: Vec<Cell>,
    pub patterns: usize,
    pub samples_per_pattern: usize,
}

impl Census {
    /// Number of cells of each dimension 0..=3.
    pub fn f_vector(&self) -> [usize; 4] {
        let mut f = [0; 4];
        for c in &self.cells {
            f[c.label.dim] += 1;
        }
        f
    }

    pub fn labels(&self) -> BTreeSet<CellLabel> {
        self.cells.iter().map(|c| c.label.clone()).collect()
    }

    pub fn index_of(&self, zeros: &BTreeSet<usize>) -> Option<usize> {
        self.cells.iter().position(|c| &c.label.zeros == zeros)
    }

    pub fn vertex_labels(&self) -> BTreeSet<String> {
        self.cells.iter().filter_map(|c| c.label.vertex_label()).collect()
    }

    pub fn summary(&self) -> String {
        let f = self.f_vector();
        format!(
            "{} cells: f = ({}, {}, {}, {})",
            self.cells.len(),
            f[0],
            f[1],
            f[2],
            f[3]
        )
    }
}

fn word() -> ReducedWord {
    standard_word_w0(3).expect("staircase word for n = 3")
}

fn sl3_point(pinning: &Pinning, word: &ReducedWord, pattern: &[Letter], t: &[Q]) -> Result<Option<Sl3Coords<Q>>> {
    let g = pinning.product(&closure_factors(word, pattern, t))?;
    match Sl3Coords::from_matrix(&g) {
        Ok(c) if sl3_membership(&c, 0.0).class != Membership::Outside => Ok(Some(c)),
        Ok(_) | Err(Error::Outside(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Sweeps every letter pattern from `letters` along the word `(1, 2, 1)`,
/// `samples_per_pattern` random parameter draws each, and records one exact
/// witness per realized vanishing set.
pub fn census_with<R: Rng + ?Sized>(
    rng: &mut R,
    letters: &[Letter],
    samples_per_pattern: usize,
) -> Result<Census> {
    if samples_per_pattern == 0 {
        return Err(Error::Undersampled("no samples per pattern".into()));
    }
    let pinning = Pinning::new(3)?;
    let word = word();
    let patterns: Vec<Vec<Letter>> = all_patterns(word.len())
        .into_iter()
        .filter(|p| p.iter().all(|l| letters.contains(l)))
        .collect();
    if patterns.is_empty() {
        return Err(Error::Undersampled("no letter patterns to sweep".into()));
    }
    let mut found: BTreeMap<CellLabel, Cell> = BTreeMap::new();
    for pattern in &patterns {
        for _ in 0..samples_per_pattern {
            let t: Vec<Q> = (0..word.len()).map(|_| sample_param(rng)).collect();
            if let Some(c) = sl3_point(&pinning, &word, pattern, &t)? {
                let label = label_of(&c, 0.0)?;
                found.entry(label.clone()).or_insert(Cell {
                    label,
                    witness: c,
                    pattern: pattern.clone(),
                    params: t,
                });
            }
        }
    }
    Ok(Census {
        cells: found.into_values().collect(),
        patterns: patterns.len(),
        samples_per_pattern,
    })
}

/// [`census_with`] over all four letter kinds.
pub fn census<R: Rng + ?Sized>(rng: &mut R, samples_per_pattern: usize) -> Result<Census> {
    census_with(rng, &Letter::ALL, samples_per_pattern)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FacePoset {
    /// all strict relations `(a, b)`: cell `a` lies in the closure of cell `b`
    pub relations: Vec<(usize, usize)>,
    /// relations seen as limits of sampled sequences, before transitive
    /// closure
    pub witnessed: Vec<(usize, usize)>,
    /// containment relations with no limit witness
    pub unwitnessed: Vec<(usize, usize)>,
}

impl FacePoset {
    pub fn below(&self, b: usize) -> Vec<usize> {
        self.relations.iter().filter(|r| r.1 == b).map(|r| r.0).collect()
    }

    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.relations
            .iter()
            .copied()
            .filter(|&(a, b)| {
                !self
                    .relations
                    .iter()
                    .any(|&(x, y)| x == a && y != b && self.relations.contains(&(y, b)))
            })
            .collect()
    }
}

/// The closure order by reverse containment of vanishing sets, checked
/// against limits `t → 0` and `t → ∞` of single parameters along every
/// letter pattern, and against small positive perturbations of each witness
/// by `x_i(ε)`, `y_i(ε)`.
pub fn face_poset<R: Rng + ?Sized>(census: &Census, rng: &mut R) -> Result<FacePoset> {
    let k = census.cells.len();
    let mut relations = Vec::new();
    for a in 0..k {
        for b in 0..k {
            let (za, zb) = (&census.cells[a].label.zeros, &census.cells[b].label.zeros);
            if a != b && za.is_superset(zb) {
                relations.push((a, b));
            }
        }
    }

    let pinning = Pinning::new(3)?;
    let word = word();
    let large = Q::from_integer(num_bigint::BigInt::from(1u8) << LARGE_PARAM_BITS);
    let mut seen = BTreeSet::new();
    for pattern in all_patterns(word.len()) {
        let t: Vec<Q> = (0..word.len()).map(|_| sample_param(rng)).collect();
        let Some(here) = sl3_point(&pinning, &word, &pattern, &t)? else {
            continue;
        };
        let Some(b) = census.index_of(&zero_set(&here, 0.0)) else {
            continue;
        };
        for pos in 0..pattern.len() {
            if pattern[pos] != Letter::Positive {
                continue;
            }
            let mut to_zero = pattern.clone();
            to_zero[pos] = Letter::Skip;
            if let Some(c) = sl3_point(&pinning, &word, &to_zero, &t)? {
                if let Some(a) = census.index_of(&zero_set(&c, 0.0)) {
                    seen.insert((a, b));
                }
            }
            let mut t_big = t.clone();
            t_big[pos] = large.clone();
            if let Some(c) = sl3_point(&pinning, &word, &pattern, &t_big)? {
                if let Some(a) = census.index_of(&zero_set(&c.to_f64(), VANISH_TOL)) {
                    seen.insert((a, b));
                }
            }
        }
    }
    // small positive perturbations of each witness land in cells above it
    let eps_words = perturbation_words();
    for (a, cell) in census.cells.iter().enumerate() {
        let g = flag_matrix(&cell.witness);
        for w in &eps_words {
            let mut labels = BTreeSet::new();
            for bits in [20, 40] {
                let eps = Q::new(1.into(), num_bigint::BigInt::from(1u8) << bits);
                let factors: Vec<Factor<Q>> = w
                    .iter()
                    .map(|&(upper, i)| if upper { Factor::X(i, eps.clone()) } else { Factor::Y(i, eps.clone()) })
                    .collect();
                let moved = &pinning.product(&factors)? * &g;
                if let Ok(c) = Sl3Coords::from_matrix(&moved) {
                    labels.insert(zero_set(&c, 0.0));
                }
            }
            // the label must be stable as the perturbation shrinks
            if labels.len() == 1 {
                if let Some(b) = census.index_of(labels.first().expect("one label")) {
                    seen.insert((a, b));
                }
            }
        }
    }
    seen.retain(|(a, b)| a != b);
    let witnessed: Vec<(usize, usize)> = seen.iter().copied().collect();

    // transitive closure
    let mut reach = vec![vec![false; k]; k];
    for &(a, b) in &witnessed {
        reach[a][b] = true;
    }
    for m in 0..k {
        for a in 0..k {
            if reach[a][m] {
                for b in 0..k {
                    if reach[m][b] {
                        reach[a][b] = true;
                    }
                }
            }
        }
    }
    let unwitnessed = relations.iter().copied().filter(|&(a, b)| !reach[a][b]).collect();
    Ok(FacePoset {
        relations,
        witnessed,
        unwitnessed,
    })
}

/// Words of length 1 to 3 in `x₁, x₂, y₁, y₂`, as `(upper, index)`.
fn perturbation_words() -> Vec<Vec<(bool, usize)>> {
    let gens = [(true, 1), (true, 2), (false, 1), (false, 2)];
    let mut out: Vec<Vec<(bool, usize)>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..3 {
        out = out
            .iter()
            .flat_map(|w| {
                gens.iter().map(move |&g| {
                    let mut v = w.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
        all.extend(out.iter().cloned());
    }
    all
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryCheck {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    /// `V − E + F`
    pub euler: i64,
    pub graded: bool,
    pub edges_have_two_vertices: bool,
    pub faces_are_cycles: bool,
    pub everything_below_top: bool,
}

impl BoundaryCheck {
    pub fn is_sphere_like(&self) -> bool {
        self.euler == 2
            && self.graded
            && self.edges_have_two_vertices
            && self.faces_are_cycles
            && self.everything_below_top
    }
}

/// Combinatorial checks that the boundary cells form a regular cell sphere.
pub fn boundary_check(census: &Census, poset: &FacePoset) -> BoundaryCheck {
    let dim = |i: usize| census.cells[i].label.dim;
    let by_dim = |d: usize| -> Vec<usize> { (0..census.cells.len()).filter(|&i| dim(i) == d).collect() };
    let (v, e, f, top) = (by_dim(0), by_dim(1), by_dim(2), by_dim(3));
    let graded = poset.covers().iter().all(|&(a, b)| dim(b) == dim(a) + 1);
    let edges_have_two_vertices = e.iter().all(|&x| poset.below(x).len() == 2);
    let faces_are_cycles = f.iter().all(|&face| {
        let below = poset.below(face);
        let verts: Vec<usize> = below.iter().copied().filter(|&x| dim(x) == 0).collect();
        let edges: Vec<Vec<usize>> = below
            .iter()
            .filter(|&&x| dim(x) == 1)
            .map(|&x| poset.below(x))
            .collect();
        if verts.len() != edges.len() || verts.len() < 2 {
            return false;
        }
        // every vertex meets two edges, and walking the edges visits all
        if verts.iter().any(|x| edges.iter().filter(|ends| ends.contains(x)).count() != 2) {
            return false;
        }
        let mut visited = BTreeSet::from([verts[0]]);
        let mut current = verts[0];
        let mut used = vec![false; edges.len()];
        while let Some(i) = (0..edges.len()).find(|&i| !used[i] && edges[i].contains(&current)) {
            used[i] = true;
            current = if edges[i][0] == current { edges[i][1] } else { edges[i][0] };
            visited.insert(current);
        }
        visited.len() == verts.len() && used.iter().all(|u| *u)
    });
    let everything_below_top = top.len() == 1 && poset.below(top[0]).len() == census.cells.len() - 1;
    BoundaryCheck {
        vertices: v.len(),
        edges: e.len(),
        faces: f.len(),
        euler: v.len() as i64 - e.len() as i64 + f.len() as i64,
        graded,
        edges_have_two_vertices,
        faces_are_cycles,
        everything_below_top,
    }
}

/// Labels whose witnesses are not pushed into the open cell by the flow at
/// time `t`.
pub fn flow_compatibility(census: &Census, rep: &RepModule, t: f64) -> Result<Vec<CellLabel>> {
    let mut stuck = Vec::new();
    for cell in &census.cells {
        let g = flag_matrix(&cell.witness).to_f64();
        if !flowed_is_interior(rep, InteriorOracle::Sl3, &g, t, VANISH_TOL)? {
            stuck.push(cell.label.clone());
        }
    }
    Ok(stuck)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureFormat {
    Json,
    Svg,
}

impl std::str::FromStr for FigureFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            other => Err(Error::UnknownFormat(other.into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellJson {
    pub zeros: Vec<String>,
    pub dim: usize,
    pub witness_v: Vec<String>,
    pub witness_w: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure1_label: Option<String>,
    pub pattern: String,
    pub params: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointJson {
    pub v: Vec<String>,
    pub w: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureMeta {
    pub seed: u64,
    pub tol: String,
    pub patterns: usize,
    pub samples_per_pattern: usize,
    pub f_vector: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureJson {
    pub cells: Vec<CellJson>,
    pub relations: Vec<[usize; 2]>,
    pub fixed_point: FixedPointJson,
    pub meta: FigureMeta,
}

pub fn to_json(census: &Census, poset: &FacePoset, seed: u64) -> FigureJson {
    let fp = sl3_fixed_point();
    FigureJson {
        cells: census
            .cells
            .iter()
            .map(|c| CellJson {
                zeros: c.label.zero_names().into_iter().map(String::from).collect(),
                dim: c.label.dim,
                witness_v: c.witness.v.iter().map(fmt_q).collect(),
                witness_w: c.witness.w.iter().map(fmt_q).collect(),
                figure1_label: c.label.vertex_label(),
                pattern: c.pattern.iter().map(|l| l.symbol()).collect(),
                params: c.params.iter().map(fmt_q).collect(),
            })
            .collect(),
        relations: poset.relations.iter().map(|&(a, b)| [a, b]).collect(),
        fixed_point: FixedPointJson {
            v: fp.v.iter().map(|&x| fmt_decimal(x)).collect(),
            w: fp.w.iter().map(|&x| fmt_decimal(x)).collect(),
        },
        meta: FigureMeta {
            seed,
            tol: fmt_decimal(VANISH_TOL),
            patterns: census.patterns,
            samples_per_pattern: census.samples_per_pattern,
            f_vector: census.f_vector().to_vec(),
        },
    }
}

fn parse_triple(v: &[String]) -> Result<[Q; 3]> {
    let parsed: Vec<Q> = v.iter().map(|s| parse_q(s)).collect::<Result<_>>()?;
    parsed
        .try_into()
        .map_err(|_| Error::Parse("witness needs three coordinates".into()))
}

/// Reads a census back from its JSON export.
pub fn census_from_json(doc: &FigureJson) -> Result<Census> {
    let mut cells = Vec::new();
    for c in &doc.cells {
        let zeros = c
            .zeros
            .iter()
            .map(|z| {
                COORD_NAMES
                    .iter()
                    .position(|n| n == z)
                    .ok_or_else(|| Error::Parse(format!("unknown coordinate {z}")))
            })
            .collect::<Result<_>>()?;
        let pattern = c
            .pattern
            .chars()
            .map(|ch| {
                Letter::ALL
                    .into_iter()
                    .find(|l| l.symbol() == ch)
                    .ok_or_else(|| Error::Parse(format!("unknown letter {ch}")))
            })
            .collect::<Result<_>>()?;
        cells.push(Cell {
            label: CellLabel { dim: c.dim, zeros },
            witness: Sl3Coords::new(parse_triple(&c.witness_v)?, parse_triple(&c.witness_w)?),
            pattern,
            params: c.params.iter().map(|s| parse_q(s)).collect::<Result<_>>()?,
        });
    }
    Ok(Census {
        cells,
        patterns: doc.meta.patterns,
        samples_per_pattern: doc.meta.samples_per_pattern,
    })
}

// Schematic ball: an equator ellipse through all six vertices, one arc over
// the top and one under the bottom. Back halves are dashed.
const R: f64 = 3.0;
const EQUATOR: (f64, f64) = (3.0, 1.0);
const TOP_ARC: (f64, f64) = (1.0, 3.0);
const BOTTOM_ARC: (f64, f64) = (0.6, 3.0);

fn vertex_position(label: &str) -> Option<(f64, f64)> {
    let a = (0.9f64).sqrt();
    // intersection of the equator with the narrow ellipse
    let bx = (8.0f64 / 9.0 / (1.0 / 0.36 - 1.0 / 81.0)).sqrt();
    let by = (1.0f64 - bx * bx / 9.0).sqrt();
    Some(match label {
        "12,13" => (a, a),
        "13,12" => (-a, -a),
        "23,13" => (-bx, by),
        "13,23" => (bx, -by),
        "12,23" => (R, 0.0),
        "23,12" => (-R, 0.0),
        _ => return None,
    })
}

fn angle_on(e: (f64, f64), p: (f64, f64)) -> f64 {
    (p.1 / e.1).atan2(p.0 / e.0)
}

fn arc_points(e: (f64, f64), from: f64, to: f64) -> Vec<(f64, f64)> {
    let steps = 48;
    (0..=steps)
        .map(|s| {
            let th = from + (to - from) * s as f64 / steps as f64;
            (e.0 * th.cos(), e.1 * th.sin())
        })
        .collect()
}

fn path(points: &[(f64, f64)], dashed: bool) -> String {
    let scale = 60.0;
    let d: Vec<String> = points
        .iter()
        .enumerate()
        .map(|(i, (x, y))| {
            format!(
                "{}{:.2},{:.2}",
                if i == 0 { "M" } else { " L" },
                200.0 + scale * x,
                200.0 - scale * y
            )
        })
        .collect();
    format!(
        "  <path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"3\"{} />\n",
        d.join(""),
        if dashed { " stroke-dasharray=\"8,6\"" } else { "" }
    )
}

/// Arc drawing for an edge between two labeled vertices; `None` if the pair
/// is not an edge of the picture.
fn edge_paths(a: &str, b: &str) -> Option<String> {
    let (pa, pb) = (vertex_position(a)?, vertex_position(b)?);
    let pair = |x: &str, y: &str| (a == x && b == y) || (a == y && b == x);
    if pair("12,13", "13,12") {
        // over the top: dashed behind, solid in front
        let e = TOP_ARC;
        let start = angle_on(e, vertex_position("12,13")?);
        let end = angle_on(e, vertex_position("13,12")?) + 2.0 * std::f64::consts::PI;
        let mid = std::f64::consts::FRAC_PI_2;
        return Some(path(&arc_points(e, start, mid), true) + &path(&arc_points(e, mid, end), false));
    }
    if pair("23,13", "13,23") {
        let e = BOTTOM_ARC;
        let start = angle_on(e, vertex_position("23,13")?);
        let end = angle_on(e, vertex_position("13,23")?) + 2.0 * std::f64::consts::PI;
        let mid = 1.5 * std::f64::consts::PI;
        return Some(path(&arc_points(e, start, mid), true) + &path(&arc_points(e, mid, end), false));
    }
    // consecutive vertices along the equator
    let (mut s, mut t) = (angle_on(EQUATOR, pa), angle_on(EQUATOR, pb));
    if s > t {
        std::mem::swap(&mut s, &mut t);
    }
    let others: Vec<f64> = ["12,13", "13,12", "23,13", "13,23", "12,23", "23,12"]
        .iter()
        .filter(|l| **l != a && **l != b)
        .map(|l| angle_on(EQUATOR, vertex_position(l).expect("known label")))
        .collect();
    let inside = others.iter().filter(|&&o| o > s && o < t).count();
    let outside = others.len() - inside;
    let (from, to) = if inside == 0 {
        (s, t)
    } else if outside == 0 {
        (t, s + 2.0 * std::f64::consts::PI)
    } else {
        return None;
    };
    let back = ((from + to) / 2.0).sin() > 0.0;
    Some(path(&arc_points(EQUATOR, from, to), back))
}

/// SVG 1.1 drawing in the style of the ball picture. Fails if the census
/// has an edge the picture does not have.
pub fn to_svg(census: &Census, poset: &FacePoset) -> Result<String> {
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n\
         \x20 <circle cx=\"200\" cy=\"200\" r=\"180\" fill=\"#eeeeee\" fill-opacity=\"0.4\" stroke=\"gray\" />\n",
    );
    let label = |i: usize| census.cells[i].label.vertex_label();
    for (i, cell) in census.cells.iter().enumerate() {
        if cell.label.dim != 1 {
            continue;
        }
        let ends: Vec<String> = poset
            .below(i)
            .into_iter()
            .filter_map(label)
            .collect();
        let drawn = match ends.as_slice() {
            [a, b] => edge_paths(a, b),
            _ => None,
        };
        out += &drawn.ok_or_else(|| {
            Error::Invalid(format!("edge {} does not appear in the picture", cell.label))
        })?;
    }
    for cell in &census.cells {
        if let Some(l) = cell.label.vertex_label() {
            let (x, y) = vertex_position(&l)
                .ok_or_else(|| Error::Invalid(format!("vertex {l} does not appear in the picture")))?;
            let (px, py) = (200.0 + 60.0 * x, 200.0 - 60.0 * y);
            out += &format!("  <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"black\" />\n");
            let dx = if x >= 0.0 { 8.0 } else { -8.0 };
            let anchor = if x >= 0.0 { "start" } else { "end" };
            out += &format!(
                "  <text class=\"vertex-label\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"{anchor}\" font-size=\"14\">{l}</text>\n",
                px + dx,
                py - 6.0
            );
        }
    }
    for (name, angle) in [("v1=0", 45.0f64), ("w1=0", 135.0), ("v3=0", 225.0), ("w3=0", 315.0)] {
        let (s, c) = angle.to_radians().sin_cos();
        out += &format!(
            "  <text class=\"face-label\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\">{name}</text>\n",
            200.0 + 192.0 * c,
            200.0 - 192.0 * s
        );
    }
    out += "</svg>\n";
    Ok(out)
}

/// Renders the census as JSON or SVG.
pub fn figure_export(census: &Census, poset: &FacePoset, format: FigureFormat, seed: u64) -> Result<String> {
    match format {
        FigureFormat::Json => Ok(serde_json::to_string_pretty(&to_json(census, poset, seed))?),
        FigureFormat::Svg => to_svg(census, poset),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn labels() {
        let interior = Sl3Coords::new([q(1, 4), q(1, 2), q(1, 4)], [q(1, 3), q(1, 3), q(1, 3)]);
        let l = label_of(&interior, 0.0).unwrap();
        assert!(l.zeros.is_empty());
        assert_eq!(l.dim, 3);

        let c = Sl3Coords::new([q(1, 2), q(1, 2), q(0, 1)], [q(0, 1), q(0, 1), q(1, 1)]);
        let l = label_of(&c, 0.0).unwrap();
        assert_eq!(l.zero_names(), vec!["v3", "w1", "w2"]);
        assert_eq!(l.dim, 1);

        let l = label_of(&sl3_fixed_point(), VANISH_TOL).unwrap();
        assert!(l.zeros.is_empty());

        let bad = Sl3Coords::new([q(1, 1), q(0, 1), q(0, 1)], [q(1, 1), q(0, 1), q(0, 1)]);
        assert!(label_of(&bad, 0.0).is_err());
    }

    #[test]
    fn vertex_names() {
        let c = Sl3Coords::new([q(0, 1), q(0, 1), q(1, 1)], [q(0, 1), q(1, 1), q(0, 1)]);
        let l = label_of(&c, 0.0).unwrap();
        assert_eq!(l.dim, 0);
        assert_eq!(l.vertex_label().as_deref(), Some("12,13"));
    }

    #[test]
    fn flag_matrix_round_trip() {
        let c = Sl3Coords::new([q(1, 4), q(1, 2), q(1, 4)], [q(1, 3), q(1, 3), q(1, 3)]);
        assert_eq!(Sl3Coords::from_matrix(&flag_matrix(&c)).unwrap(), c);
    }

    #[test]
    fn positive_letters_give_open_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = census_with(&mut rng, &[Letter::Positive], 4).unwrap();
        assert_eq!(c.cells.len(), 1);
        assert!(c.cells[0].label.zeros.is_empty());
        assert!(census_with(&mut rng, &[Letter::Positive], 0).is_err());
    }

    #[test]
    fn unknown_format() {
        assert!("png".parse::<FigureFormat>().is_err());
        assert_eq!("SVG".parse::<FigureFormat>().unwrap(), FigureFormat::Svg);
    }
}
