//! The property suite behind `si2e verify`. Each group sweeps seeded random
//! instances and counts violations; the suite passes when every group has
//! none.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use si2e_core::bounds::{l_sgz, l_up, l_zgs, smi_upper_decomposition_check, TabularChannel};
use si2e_core::explore::{exact_vcse, knn_entropy};
use si2e_core::graph::degree_realization;
use si2e_core::smi::{shannon, smi_by_definition, smi_closed_form, theorem32_report, theorem41_check};
use si2e_core::tree::{optimize_two_layer, stretch_delta, structural_entropy};
use si2e_core::{sample, Axis, EncodingTree, JointDistribution, OptimizeMode, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    SmiOracle,
    Theorem32,
    Theorem41,
    Prop31,
    Stretch,
    Prop42,
    Theorem43,
    Bounds,
    Knn,
}

impl Group {
    pub const ALL: [Group; 9] = [
        Group::SmiOracle,
        Group::Theorem32,
        Group::Theorem41,
        Group::Prop31,
        Group::Stretch,
        Group::Prop42,
        Group::Theorem43,
        Group::Bounds,
        Group::Knn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::SmiOracle => "smi_oracle",
            Group::Theorem32 => "theorem32",
            Group::Theorem41 => "theorem41",
            Group::Prop31 => "prop31",
            Group::Stretch => "stretch",
            Group::Prop42 => "prop42",
            Group::Theorem43 => "theorem43",
            Group::Bounds => "bounds",
            Group::Knn => "knn",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Group::SmiOracle => "structural MI closed form equals the tree-by-tree definition",
            Group::Theorem32 => "structural MI sandwiched between MI and MI + (1 - eps) H(X,Y)",
            Group::Theorem41 => "one-to-one joints give structural MI = MI = H(X)",
            Group::Prop31 => "matching-mode optimum never pairs non-adjacent vertices",
            Group::Stretch => "stretch gain formula equals entropy before minus after",
            Group::Prop42 => "degree realization reproduces the distribution, connected",
            Group::Theorem43 => "value-conditional entropy four-way sandwich",
            Group::Bounds => "variational loss bounds and their tightness points",
            Group::Knn => "k-NN entropy translation/scale behaviour and fixture",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Group::ALL.into_iter().find(|g| g.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Group::ALL.iter().map(|g| g.name()).collect();
            format!("unknown group {s:?}; expected one of {}", names.join(", "))
        })
    }
}

/// Deliberate corruptions used to confirm the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Negates the structural MI closed form.
    SmiSign,
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "smi-sign" => Ok(Fault::SmiSign),
            _ => Err(format!("unknown fault {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub group: Group,
    pub cases: usize,
    pub failures: usize,
    /// Largest deviation seen where the check is numeric.
    pub worst: f64,
    pub first_failure: Option<String>,
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: usize,
    worst: f64,
    first_failure: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    /// `|got - want| <= tol`, tracking the worst deviation.
    fn close(&mut self, got: f64, want: f64, tol: f64, label: &str) {
        let dev = (got - want).abs();
        if dev.is_finite() {
            self.worst = self.worst.max(dev);
        }
        self.check(dev <= tol, || format!("{label}: {got} vs {want} (|diff| {dev:e} > {tol:e})"));
    }

    fn error(&mut self, e: impl fmt::Display) {
        self.check(false, || format!("error: {e}"));
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn smi_oracle(fault: Option<Fault>) -> Tally {
    let mut t = Tally::default();
    let mut r = rng(1);
    for _ in 0..100 {
        let n = r.gen_range(2..=8);
        let j = sample::joint(&mut r, n, n);
        match (smi_closed_form(&j), smi_by_definition(&j)) {
            (Ok(closed), Ok(def)) => {
                let closed = if fault == Some(Fault::SmiSign) { -closed } else { closed };
                t.close(closed, def, 1e-9, &format!("n={n}"));
            }
            (Err(e), _) | (_, Err(e)) => t.error(e),
        }
    }
    t
}

fn theorem32() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(2);
    for _ in 0..1000 {
        let n = r.gen_range(2..=8);
        let j = sample::joint(&mut r, n, n);
        match theorem32_report(&j) {
            Ok(rep) => t.check(rep.holds, || format!("{rep:?}")),
            Err(e) => t.error(e),
        }
    }
    t
}

fn entropy_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

fn theorem41() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(3);
    for _ in 0..50 {
        let n = r.gen_range(1..=12);
        let p = sample::simplex(&mut r, n);
        let h = entropy_bits(&p);
        match theorem41_check(&p) {
            Ok((smi, mi)) => {
                t.close(smi, h, 1e-12, "structural MI vs H(X)");
                t.close(mi, h, 1e-12, "MI vs H(X)");
            }
            Err(e) => t.error(e),
        }
    }
    t
}

fn prop31() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(4);
    for _ in 0..200 {
        let n = r.gen_range(2..=8);
        let g = sample::sparse_bipartite(&mut r, n, 0.3);
        match optimize_two_layer(&g, OptimizeMode::Matching) {
            Ok(tree) => {
                for members in tree.communities() {
                    let ok = members
                        .iter()
                        .enumerate()
                        .all(|(i, &a)| members[i + 1..].iter().all(|&b| g.weight(a, b) > 0.0));
                    t.check(ok, || format!("community {members:?} holds a non-adjacent pair"));
                }
            }
            Err(e) => t.error(e),
        }
    }
    t
}

fn stretch_case(g: &WeightedGraph, tree: &EncodingTree, r: &mut ChaCha8Rng, t: &mut Tally) {
    let kids = tree.root_children();
    if kids.len() < 2 {
        return;
    }
    let i = r.gen_range(0..kids.len());
    let j = (i + r.gen_range(1..kids.len())) % kids.len();
    let (a, b) = (kids[i], kids[j]);
    let result = stretch_delta(g, tree, a, b).and_then(|delta| {
        let after = tree.stretch(g, a, b)?;
        Ok((delta, structural_entropy(g, tree)? - structural_entropy(g, &after)?))
    });
    match result {
        Ok((delta, diff)) => t.close(delta, diff, 1e-10, "stretch gain"),
        Err(e) => t.error(e),
    }
}

fn stretch() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(5);
    while t.cases < 200 {
        let n = r.gen_range(3..=10);
        let g = sample::graph(&mut r, n, 0.5);
        let blocks = sample::partition(&mut r, n);
        match EncodingTree::from_partition(&g, &blocks) {
            Ok(tree) => stretch_case(&g, &tree, &mut r, &mut t),
            Err(e) => t.error(e),
        }
    }
    // two disjoint unit edges: merging the endpoints of one saves half a bit
    let fixture = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).and_then(|g| {
        let tree = EncodingTree::one_layer(&g)?;
        let (a, b) = (tree.find_child(&[0]), tree.find_child(&[1]));
        stretch_delta(&g, &tree, a.expect("leaf 0"), b.expect("leaf 1"))
    });
    match fixture {
        Ok(d) => t.close(d, 0.5, 1e-12, "two-edge fixture"),
        Err(e) => t.error(e),
    }
    t
}

fn prop42() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(6);
    for _ in 0..200 {
        let n = r.gen_range(2..=16);
        let p = sample::simplex(&mut r, n);
        match degree_realization(&p) {
            Ok(g) => {
                let worst = p.iter().enumerate().map(|(v, &pv)| (g.degree(v) - pv).abs()).fold(0.0, f64::max);
                t.close(worst, 0.0, 1e-12, "degree");
                t.check(g.is_connected(), || format!("disconnected realization of {p:?}"));
            }
            Err(e) => t.error(e),
        }
    }
    t
}

fn theorem43() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(7);
    for _ in 0..200 {
        let n = r.gen_range(1..=16);
        let p = sample::simplex(&mut r, n);
        let blocks = sample::partition(&mut r, n);
        match exact_vcse(&p, &blocks) {
            Ok(rep) => t.check(rep.holds, || format!("{rep:?} for {blocks:?}")),
            Err(e) => t.error(e),
        }
    }
    t
}

fn random_channel(r: &mut ChaCha8Rng, given: usize, outcomes: usize) -> si2e_core::Result<TabularChannel> {
    TabularChannel::new((0..given).map(|_| sample::simplex(r, outcomes)).collect())
}

fn conditional_entropy_z_given_s(j: &JointDistribution) -> f64 {
    j.iter().map(|(_, s, p)| p * (j.py()[s] / p).log2()).sum()
}

fn bounds() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(8);
    for _ in 0..200 {
        let (zs, ss) = (r.gen_range(2..6), r.gen_range(2..6));
        let j = sample::joint(&mut r, zs, ss);
        let info = shannon(&j);
        let (mi, h_next) = (info.mutual_information, info.h_y);
        let h_zgs = conditional_entropy_z_given_s(&j);
        let result = (|| -> si2e_core::Result<()> {
            let up = l_up(&j, &random_channel(&mut r, 1, zs)?)?;
            t.check(up >= mi - 1e-12, || format!("upper bound {up} < MI {mi}"));
            t.close(l_up(&j, &TabularChannel::marginal_of(&j, Axis::X)?)?, mi, 1e-12, "upper bound at true marginal");

            let zgs = l_zgs(&j, &random_channel(&mut r, ss, zs)?)?;
            t.check(zgs >= h_zgs - 1e-12, || format!("conditional bound {zgs} < H(Z|S) {h_zgs}"));
            t.close(l_zgs(&j, &TabularChannel::conditional_of(&j, Axis::Y)?)?, h_zgs, 1e-12, "conditional bound at truth");

            let sgz = l_sgz(&j, &random_channel(&mut r, zs, ss)?)?;
            t.check(sgz <= mi - h_next + 1e-12, || format!("lower bound {sgz} > MI - H(S') {}", mi - h_next));
            t.close(l_sgz(&j, &TabularChannel::conditional_of(&j, Axis::X)?)?, mi - h_next, 1e-12, "lower bound at truth");

            let n = r.gen_range(2..=8);
            let sq = sample::joint(&mut r, n, n);
            let ok = smi_upper_decomposition_check(&sq)?;
            t.check(ok, || "structural MI upper decomposition violated".into());
            Ok(())
        })();
        if let Err(e) = result {
            t.error(e);
        }
    }
    t
}

fn knn() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(9);
    for _ in 0..100 {
        let (n, d) = (r.gen_range(3..30), r.gen_range(1..5));
        let k = r.gen_range(1..n);
        let pts = sample::points(&mut r, n, d, 4.0);
        let shift: Vec<f64> = (0..d).map(|_| r.gen_range(-3.0..3.0)).collect();
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().zip(&shift).map(|(x, s)| x + s).collect()).collect();
        let a = [0.25, 0.5, 2.0, 8.0][r.gen_range(0..4)];
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| x * a).collect()).collect();
        match (knn_entropy(&pts, k), knn_entropy(&moved, k), knn_entropy(&scaled, k)) {
            (Ok(base), Ok(m), Ok(s)) => {
                t.close(m, base, 1e-12, "translation");
                t.close(s, base + d as f64 * a.log2(), 1e-12, "scaling");
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => t.error(e),
        }
    }
    match knn_entropy(&[vec![0.0], vec![1.0], vec![3.0]], 1) {
        Ok(h) => t.close(h, 4.0 / 3.0, 1e-12, "{0,1,3} fixture"),
        Err(e) => t.error(e),
    }
    t
}

pub fn run_group(group: Group, fault: Option<Fault>) -> CheckResult {
    let start = Instant::now();
    let tally = match group {
        Group::SmiOracle => smi_oracle(fault),
        Group::Theorem32 => theorem32(),
        Group::Theorem41 => theorem41(),
        Group::Prop31 => prop31(),
        Group::Stretch => stretch(),
        Group::Prop42 => prop42(),
        Group::Theorem43 => theorem43(),
        Group::Bounds => bounds(),
        Group::Knn => knn(),
    };
    CheckResult {
        group,
        cases: tally.cases,
        failures: tally.failures,
        worst: tally.worst,
        first_failure: tally.first_failure,
        elapsed: start.elapsed(),
    }
}

/// Runs `only` or every group, in a fixed order.
pub fn run(only: Option<Group>, fault: Option<Fault>) -> Vec<CheckResult> {
    let groups: Vec<Group> = match only {
        Some(g) => vec![g],
        None => Group::ALL.to_vec(),
    };
    groups.into_iter().map(|g| run_group(g, fault)).collect()
}

pub fn render_table(results: &[CheckResult]) -> String {
    let mut out = format!("{:<12} {:<6} {:>7} {:>9} {:>11} {:>9}  {}\n", "group", "result", "cases", "failures", "worst dev", "time", "check");
    for r in results {
        out.push_str(&format!(
            "{:<12} {:<6} {:>7} {:>9} {:>11.3e} {:>8.2}s  {}\n",
            r.group.name(),
            if r.passed() { "PASS" } else { "FAIL" },
            r.cases,
            r.failures,
            r.worst,
            r.elapsed.as_secs_f64(),
            r.group.description()
        ));
        if let Some(msg) = &r.first_failure {
            out.push_str(&format!("    first failure: {msg}\n"));
        }
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    out.push_str(&format!("{} of {} groups passed\n", results.len() - failed, results.len()));
    out
}
