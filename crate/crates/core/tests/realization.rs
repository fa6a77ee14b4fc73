mod common;

use common::{edge_triples, reference_entropy, rng, shannon_entropy};
use rand::Rng;
use si2e_core::explore::exact_vcse;
use si2e_core::graph::degree_realization;
use si2e_core::sample;

/// Closed form of the inductive construction after all rescaling: edge
/// `(0, 1)` carries `min(p0, p1) (p0 + p1)`, the larger of the first two
/// vertices keeps a loop of `|p1 - p0| (p0 + p1)`, every later vertex `j`
/// links to each earlier `i` with `p_i p_j` and has a loop of `p_j^2`.
fn closed_form(p: &[f64]) -> Vec<((usize, usize), f64)> {
    let n = p.len();
    let mut out = Vec::new();
    let head = p[0] + p[1];
    out.push(((0, 1), p[0].min(p[1]) * head));
    let big = if p[0] <= p[1] { 1 } else { 0 };
    let diff = (p[1] - p[0]).abs() * head;
    if diff > 0.0 {
        out.push(((big, big), diff));
    }
    for j in 2..n {
        for i in 0..j {
            out.push(((i, j), p[i] * p[j]));
        }
        out.push(((j, j), p[j] * p[j]));
    }
    out
}

#[test]
fn realization_reproduces_degrees_and_is_connected() {
    let mut r = rng(20);
    for _ in 0..200 {
        let n = r.gen_range(2..=16);
        let p = sample::simplex(&mut r, n);
        let g = degree_realization(&p).unwrap();
        for (v, &pv) in p.iter().enumerate() {
            assert!((g.degree(v) - pv).abs() < 1e-12);
        }
        assert!(g.is_connected());
        for ((i, j), w) in closed_form(&p) {
            assert!((g.weight(i, j) - w).abs() < 1e-12, "edge ({i},{j})");
        }
    }
}

#[test]
fn small_examples() {
    let g = degree_realization(&[0.5, 0.5]).unwrap();
    assert_eq!(g.edges().len(), 1);
    assert!((g.weight(0, 1) - 0.5).abs() < 1e-15);
    let g = degree_realization(&[0.3, 0.7]).unwrap();
    assert!((g.weight(0, 1) - 0.3).abs() < 1e-15);
    assert!((g.self_loop(1) - 0.4).abs() < 1e-15);
    assert!(degree_realization(&[0.3, 0.3]).is_err());
}

#[test]
fn value_conditional_sandwich_holds() {
    let mut r = rng(21);
    for _ in 0..200 {
        let n = r.gen_range(1..=16);
        let p = sample::simplex(&mut r, n);
        let blocks = sample::partition(&mut r, n);
        let report = exact_vcse(&p, &blocks).unwrap();
        assert!(report.holds, "{p:?} {blocks:?} {report:?}");
        let g = degree_realization(&p).unwrap();
        let oracle = reference_entropy(n, &edge_triples(&g), &blocks);
        assert!((report.h_tree - oracle).abs() < 1e-12);
        assert!((report.h_v0 - shannon_entropy(&p)).abs() < 1e-12);
    }
}
