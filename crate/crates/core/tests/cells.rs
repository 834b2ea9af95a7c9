mod common;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tnnflow_core::cells::*;
use tnnflow_core::embedding::{build_rep, lambda_for};

const VERTICES: [&str; 6] = ["12,13", "23,13", "13,12", "13,23", "12,23", "23,12"];

#[test]
fn bruhat_oracle_counts() {
    assert_eq!(common::bruhat_interval_counts(3), vec![6, 8, 4, 1]);
    assert_eq!(common::bruhat_interval_counts(2), vec![2, 1]);
}

#[test]
fn census_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let c = census(&mut rng, 2).unwrap();
    for cell in &c.cells {
        println!("{} dim {} pattern {:?}", cell.label, cell.label.dim, cell.pattern);
    }
    let oracle = common::bruhat_interval_counts(3);
    assert_eq!(c.f_vector().to_vec(), oracle);
    assert_eq!(c.cells.len(), oracle.iter().sum::<usize>());
    let want: BTreeSet<String> = VERTICES.iter().map(|s| s.to_string()).collect();
    assert_eq!(c.vertex_labels(), want);
    assert_eq!(c.summary(), "19 cells: f = (6, 8, 4, 1)");

    let poset = face_poset(&c, &mut rng).unwrap();
    assert!(poset.unwitnessed.is_empty(), "{:?}", poset.unwitnessed);
    let b = boundary_check(&c, &poset);
    assert!(b.is_sphere_like(), "{b:?}");
    assert_eq!((b.vertices, b.edges, b.faces, b.euler), (6, 8, 4, 2));
}

#[test]
fn census_is_stable_across_seeds() {
    let a = census(&mut ChaCha8Rng::seed_from_u64(2), 1).unwrap();
    let b = census(&mut ChaCha8Rng::seed_from_u64(3), 1).unwrap();
    assert_eq!(a.labels(), b.labels());
}

#[test]
fn every_cell_flows_into_the_open_cell() {
    let rep = build_rep(&lambda_for(3, &BTreeSet::new()).unwrap()).unwrap();
    let c = census(&mut ChaCha8Rng::seed_from_u64(4), 1).unwrap();
    for t in [0.1, 1.0] {
        assert!(flow_compatibility(&c, &rep, t).unwrap().is_empty());
    }
    assert_eq!(flow_compatibility(&c, &rep, 0.0).unwrap().len(), c.cells.len() - 1);
}

#[test]
fn exports() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = census(&mut rng, 1).unwrap();
    let poset = face_poset(&c, &mut rng).unwrap();
    let json = figure_export(&c, &poset, FigureFormat::Json, 5).unwrap();
    assert!(json.contains("0.29289321881345"));
    assert!(json.contains("0.41421356237309"));
    let doc: FigureJson = serde_json::from_str(&json).unwrap();
    assert_eq!(census_from_json(&doc).unwrap(), c);

    let svg = figure_export(&c, &poset, FigureFormat::Svg, 5).unwrap();
    let labels: Vec<&str> = svg
        .lines()
        .filter(|l| l.contains("class=\"vertex-label\""))
        .map(|l| l.rsplit_once("\">").unwrap().1.trim_end_matches("</text>"))
        .collect();
    assert_eq!(labels.len(), 6);
    let got: BTreeSet<&str> = labels.into_iter().collect();
    assert_eq!(got, VERTICES.into_iter().collect());
    assert!(svg.contains("stroke-dasharray"));
}
