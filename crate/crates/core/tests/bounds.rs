mod common;

use common::{mutual_information, rng};
use rand::Rng;
use si2e_core::bounds::{l_sgz, l_up, l_zgs, smi_upper_decomposition_check, TabularChannel};
use si2e_core::sample;
use si2e_core::smi::shannon;
use si2e_core::{Axis, JointDistribution};

fn random_channel(r: &mut impl Rng, given: usize, outcomes: usize) -> TabularChannel {
    TabularChannel::new((0..given).map(|_| sample::simplex(r, outcomes)).collect()).unwrap()
}

fn table(j: &JointDistribution) -> Vec<Vec<f64>> {
    (0..j.rows()).map(|i| (0..j.cols()).map(|c| j.p(i, c)).collect()).collect()
}

/// `H(Z|S)` by direct summation over `p(z, s) log2(p(s) / p(z, s))`.
fn conditional_entropy_z_given_s(j: &JointDistribution) -> f64 {
    j.iter().map(|(_, s, p)| p * (j.py()[s] / p).log2()).sum()
}

#[test]
fn l_up_bounds_mutual_information() {
    let mut r = rng(30);
    for _ in 0..200 {
        let (zs, ss) = (r.gen_range(2..6), r.gen_range(2..6));
        let j = sample::joint(&mut r, zs, ss);
        let mi = mutual_information(&table(&j));
        let q = random_channel(&mut r, 1, zs);
        assert!(l_up(&j, &q).unwrap() >= mi - 1e-12);
        let truth = TabularChannel::marginal_of(&j, Axis::X).unwrap();
        assert!((l_up(&j, &truth).unwrap() - mi).abs() < 1e-12);
        assert!(l_up(&j, &q).unwrap() > mi);
    }
}

#[test]
fn l_zgs_bounds_conditional_entropy() {
    let mut r = rng(31);
    for _ in 0..200 {
        let (zs, ss) = (r.gen_range(2..6), r.gen_range(2..6));
        let j = sample::joint(&mut r, zs, ss);
        let h = conditional_entropy_z_given_s(&j);
        let q = random_channel(&mut r, ss, zs);
        assert!(l_zgs(&j, &q).unwrap() >= h - 1e-12);
        let truth = TabularChannel::conditional_of(&j, Axis::Y).unwrap();
        assert!((l_zgs(&j, &truth).unwrap() - h).abs() < 1e-12);
        assert!(l_zgs(&j, &q).unwrap() > h);
    }
}

#[test]
fn l_sgz_lower_bounds_mutual_information() {
    let mut r = rng(32);
    for _ in 0..200 {
        let (zs, ss) = (r.gen_range(2..6), r.gen_range(2..6));
        let j = sample::joint(&mut r, zs, ss);
        let mi = mutual_information(&table(&j));
        let q = random_channel(&mut r, zs, ss);
        assert!(l_sgz(&j, &q).unwrap() <= mi + 1e-12);
        let truth = TabularChannel::conditional_of(&j, Axis::X).unwrap();
        let h_next = shannon(&j).h_y;
        assert!((l_sgz(&j, &truth).unwrap() - (mi - h_next)).abs() < 1e-12);
        assert!(l_sgz(&j, &q).unwrap() < mi - h_next);
    }
}

#[test]
fn structural_mi_upper_decomposition() {
    let mut r = rng(33);
    for _ in 0..1000 {
        let n = r.gen_range(2..=8);
        assert!(smi_upper_decomposition_check(&sample::joint(&mut r, n, n)).unwrap());
    }
}
