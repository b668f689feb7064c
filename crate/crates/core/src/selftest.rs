//! Reduced-size run of the invariant suites, used by the command-line
//! `selftest` command. Output depends only on the seed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::comass::{comass_pcovector, pontryagin_gradient, pontryagin_phi, PCovector};
use crate::ddvv::{ddvv_gap, inequality_1a_sides, SffTensor};
use crate::extremal::{
    build_p_xi, build_quad_p_xi, circle_point, lemma1_extrema, lemma2_check, proof_trace_p33,
    proof_trace_p34, quartic_oracles, ratio_and_gradient, ratio_maximize, sin_sum_max, SearchOptions,
};
use crate::linalg::{
    act, commutator_norm_sq, haar_orthogonal, spectral_decompose, Configuration, GroupElement,
    SymmetricMatrix,
};
use crate::reduction::{
    canonical_configuration, classify_equality, diagonalize_first, reduce_lemma3, reduce_thm3_pair,
};
use crate::seed::derive_seed;
use crate::Budget;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub samples: usize,
    /// Worst value of the suite's figure of merit (a violation, residual or error).
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "{} {:<28} samples={:<6} worst={:.3e}\n",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.samples,
                s.worst
            ));
        }
        let failed = self.suites.iter().filter(|s| !s.passed).count();
        out.push_str(&format!("{} suites, {} failed\n", self.suites.len(), failed));
        out
    }
}

/// Tracks the largest figure of merit and whether it stayed within `limit`.
struct Worst {
    value: f64,
    samples: usize,
}

impl Worst {
    fn new() -> Self {
        Self { value: 0.0, samples: 0 }
    }

    fn add(&mut self, v: f64) {
        self.samples += 1;
        if v > self.value || v.is_nan() {
            self.value = v;
        }
    }

    fn finish(self, name: &'static str, limit: f64) -> SuiteResult {
        SuiteResult {
            name,
            passed: self.value <= limit,
            samples: self.samples,
            worst: self.value,
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn suite_spectral(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for k in 0..1000 {
        let a = SymmetricMatrix::random(1 + k % 6, rng);
        let d = spectral_decompose(&a).expect("spectral decomposition");
        let err = (d.reconstruct().as_matrix() - a.as_matrix()).amax();
        w.add(err / (1.0 + a.as_matrix().amax()));
    }
    w.finish("linalg.spectral", 1e-9)
}

fn suite_group_action(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for _ in 0..1000 {
        let c = Configuration::random(3, 4, false, rng);
        let g = GroupElement::random(3, 4, rng);
        let moved = act(&g, &c).expect("act");
        w.add(g.p.orthogonality_residual().max(g.q.orthogonality_residual()));
        w.add(relative(moved.norm_sq(), c.norm_sq()));
        w.add((ddvv_gap(&moved).ratio - ddvv_gap(&c).ratio).abs());
    }
    w.finish("linalg.group_action", 1e-10)
}

fn suite_gap(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for m in 2..=5 {
        for k in 0..250 {
            let c = Configuration::random(3, m, k % 2 == 0, rng);
            let g = ddvv_gap(&c);
            w.add(-g.gap / g.lhs);
        }
    }
    for n in 2..=6 {
        for _ in 0..200 {
            let g = ddvv_gap(&Configuration::random(n, 2, false, rng));
            w.add(-g.gap / g.lhs);
        }
    }
    w.finish("ddvv.gap_nonnegative", 1e-9)
}

fn suite_forms(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for k in 0..1000 {
        let n = 2 + k % 4;
        let c = Configuration::random(n, 1 + k % 4, true, rng);
        let (l, r) = inequality_1a_sides(&SffTensor::from_configuration(c.clone()));
        let g = ddvv_gap(&c);
        let d = l - r;
        let dead = 1e-10 * l.max(1.0);
        if d.abs() > dead && g.gap.abs() > 1e-10 * g.lhs {
            w.add(if (d > 0.0) == (g.gap > 0.0) { 0.0 } else { 1.0 });
        }
    }
    w.finish("ddvv.forms_agree", 0.0)
}

fn suite_reductions(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for _ in 0..300 {
        let c = Configuration::random(3, 5, false, rng);
        let base = ddvv_gap(&c).ratio;
        for cert in [
            diagonalize_first(&c).expect("diagonalize"),
            reduce_thm3_pair(&c).expect("pair reduction"),
        ] {
            w.add(if cert.verify(1e-9) { 0.0 } else { 1.0 });
            w.add((ddvv_gap(&cert.after).ratio - base).abs());
        }
        let q = Configuration::random(3, 4, true, rng);
        let cert = reduce_lemma3(&q).expect("quadruple reduction");
        w.add(if cert.verify(1e-9) && cert.satisfied_predicates.len() == 3 { 0.0 } else { 1.0 });
        w.add((ddvv_gap(&cert.after).ratio - ddvv_gap(&q).ratio).abs());
    }
    w.finish("reduction.certificates", 1e-9)
}

fn suite_classification(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for _ in 0..300 {
        let lambda = rng.random_range(0.1..10.0);
        let g = GroupElement::random(3, 4, rng);
        let c = act(&g, &canonical_configuration(3, 4, lambda)).expect("act");
        let d = classify_equality(&c).expect("classify");
        w.add(if d.is_equality { 0.0 } else { 1.0 });
        w.add(relative(d.lambda, lambda));
        w.add(d.residual / lambda);
    }
    for _ in 0..1000 {
        let a = SymmetricMatrix::random(3, rng);
        let e = spectral_decompose(&a).expect("spectral").eigenvalues;
        let spread = (e[0] - e[2]).powi(2);
        w.add(((spread - 2.0 * a.norm_sq()) / (1.0 + a.norm_sq())).max(0.0));
    }
    w.finish("reduction.equality", 1e-6)
}

fn suite_lemma1(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    let circle: Vec<[f64; 3]> = (0..2000)
        .map(|k| circle_point(std::f64::consts::TAU * k as f64 / 2000.0))
        .collect();
    for _ in 0..200 {
        let p: [f64; 3] = [rng.random_range(0.0..10.0), rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)];
        let r = lemma1_extrema(p[0], p[1], p[2]).expect("weights are nonnegative");
        let (mut lo, mut hi, mut pair) = (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for l in &circle {
            let f: f64 = (0..3).map(|i| l[i] * l[i] * p[i]).sum();
            let g = (l[1] - l[2]).powi(2) * p[0] + (l[0] - l[2]).powi(2) * p[1] + (l[0] - l[1]).powi(2) * p[2];
            lo = lo.min(f);
            hi = hi.max(f);
            pair = pair.max(g);
        }
        w.add((lo - r.f_min).abs().max((hi - r.f_max).abs()));
        w.add((pair - r.bound_2_5).max(0.0));
    }
    w.finish("extremal.lemma1", 1e-2)
}

fn suite_identities(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for _ in 0..1000 {
        let (b, c) = (SymmetricMatrix::random(3, rng), SymmetricMatrix::random(3, rng));
        let px = build_p_xi(&b, &c).expect("3x3 inputs");
        let v = px.p_mu_plus_xi();
        let direct = commutator_norm_sq(&b, &c);
        w.add(relative(direct, 2.0 * v.iter().map(|x| x * x).sum::<f64>()));
        let (a1, a2) = lemma2_check(&px);
        w.add((-a1 / px.sigma0.max(f64::MIN_POSITIVE)).max(0.0));
        w.add((-a2 / (1.0 + px.sigma0)).max(0.0));

        let cert = reduce_lemma3(&Configuration::random(3, 4, false, rng)).expect("reduction");
        let m = cert.after.matrices();
        let clean = |a: &SymmetricMatrix, slots: &[(usize, usize)]| {
            SymmetricMatrix::from_upper_fn(3, |i, j| if slots.contains(&(i, j)) { 0.0 } else { a.get(i, j) })
        };
        let (b, c, d) = (m[1].clone(), clean(&m[2], &[(0, 1)]), clean(&m[3], &[(0, 1), (0, 2)]));
        let q = build_quad_p_xi(&b, &c, &d).expect("reduced form");
        let res = q.residual_vectors();
        for (k, (x, y)) in [(&c, &d), (&b, &d), (&b, &c)].into_iter().enumerate() {
            w.add(relative(commutator_norm_sq(x, y), 2.0 * res[k].iter().map(|v| v * v).sum::<f64>()));
        }
    }
    w.finish("extremal.identities", 1e-10)
}

fn suite_oracles(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for _ in 0..10_000 {
        let v: [f64; 3] = [rng.random_range(1e-3..1e3), rng.random_range(1e-3..1e3), rng.random_range(1e-3..1e3)];
        let (s14, spqr) = quartic_oracles(v[0], v[1], v[2]).expect("positive inputs");
        let sum: f64 = v.iter().sum();
        let sig = v[0] * v[0] * v[1] * v[1] + v[1] * v[1] * v[2] * v[2] + v[2] * v[2] * v[0] * v[0];
        w.add((-s14 / sum.powi(4)).max(0.0));
        w.add((-spqr / sig.powi(4)).max(0.0));
    }
    w.add(((sin_sum_max() - 2.25).abs() - 1e-9).max(0.0));
    w.finish("extremal.oracles", 1e-12)
}

fn suite_traces(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for _ in 0..500 {
        let m: Vec<_> = (0..4).map(|_| SymmetricMatrix::random(3, rng)).collect();
        for tr in [
            proof_trace_p33(&m[0], &m[1], &m[2]).expect("trace"),
            proof_trace_p34(&m[0], &m[1], &m[2], &m[3]).expect("trace"),
        ] {
            for s in tr.active() {
                w.add((-s.value).max(0.0));
            }
        }
    }
    w.finish("extremal.proof_traces", 1e-9)
}

fn suite_search(seed: u64) -> SuiteResult {
    let mut w = Worst::new();
    for (k, &(n, m)) in [(2usize, 2usize), (3, 2), (3, 3)].iter().enumerate() {
        let opts = SearchOptions {
            budget: Budget::new(6, 5000),
            seed: derive_seed(seed, k as u64),
            traceless: true,
        };
        let r = ratio_maximize(n, m, &opts).expect("search");
        w.add((1.0 - r.best_ratio).abs());
        for t in &r.trace {
            w.add((t.best_ratio - 1.0).max(0.0));
        }
    }
    w.finish("extremal.ratio_search", 1e-6)
}

fn suite_gradients(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    let h = 1e-5;
    for _ in 0..20 {
        let c = Configuration::random(3, 3, false, rng);
        let (_, grad) = ratio_and_gradient(&c);
        let r = rng.random_range(0..3);
        let dir = SymmetricMatrix::random(3, rng);
        let bump = |t: f64| {
            let mut mats = c.matrices().to_vec();
            mats[r] = mats[r].add_scaled(t, &dir);
            ddvv_gap(&Configuration::new(mats).expect("same shapes")).ratio
        };
        let fd = (bump(h) - bump(-h)) / (2.0 * h);
        let an = grad[r].dot(&dir);
        w.add((fd - an).abs() / an.abs().max(1e-3));

        let a: Vec<DMatrix<f64>> = (0..4)
            .map(|_| DMatrix::from_fn(4, 3, |_, _| rng.sample(StandardNormal)))
            .collect();
        let g = pontryagin_gradient([&a[0], &a[1], &a[2], &a[3]]).expect("shapes");
        let s = rng.random_range(0..4);
        let dir = DMatrix::<f64>::from_fn(4, 3, |_, _| rng.sample(StandardNormal));
        let bump = |t: f64| {
            let mut b = a.clone();
            b[s] += &dir * t;
            pontryagin_phi(&b[0], &b[1], &b[2], &b[3]).expect("shapes")
        };
        let fd = (bump(h) - bump(-h)) / (2.0 * h);
        let an = g[s].dot(&dir);
        w.add((fd - an).abs() / an.abs().max(1.0));
    }
    w.finish("gradients.finite_difference", 1e-5)
}

fn suite_comass(seed: u64) -> SuiteResult {
    let mut w = Worst::new();
    let forms = [
        PCovector::new(4, 2, [(vec![1, 2], 1.0)]),
        PCovector::new(4, 2, [(vec![1, 2], 1.0), (vec![3, 4], 1.0)]),
        PCovector::new(3, 3, [(vec![1, 2, 3], 1.0)]),
    ];
    for (k, phi) in forms.iter().enumerate() {
        let phi = phi.as_ref().expect("valid covector");
        let est = comass_pcovector(phi, Budget::new(8, 1000), derive_seed(seed, k as u64)).expect("comass");
        w.add((est.value - 1.0).abs());
        w.add(est.argmax.gram_residual());
    }
    w.finish("comass.simple_forms", 1e-6)
}

fn suite_alternation(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut w = Worst::new();
    for _ in 0..200 {
        let a: Vec<DMatrix<f64>> = (0..4)
            .map(|_| DMatrix::from_fn(3, 3, |_, _| rng.sample(StandardNormal)))
            .collect();
        let v = pontryagin_phi(&a[0], &a[1], &a[2], &a[3]).expect("shapes");
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let mut b = a.clone();
            b.swap(i, j);
            let u = pontryagin_phi(&b[0], &b[1], &b[2], &b[3]).expect("shapes");
            w.add((u + v).abs() / (1.0 + v.abs()));
        }
        let u = haar_orthogonal(3, rng);
        let b: Vec<_> = a.iter().map(|x| u.as_matrix() * x).collect();
        let t = pontryagin_phi(&b[0], &b[1], &b[2], &b[3]).expect("shapes");
        w.add((t - v).abs() / (1.0 + v.abs()));
    }
    w.finish("comass.alternation", 1e-10)
}

/// Runs every suite with generators derived from `seed`.
pub fn run(seed: u64) -> SelftestReport {
    let mut k = 0u64;
    let mut rng = || {
        k += 1;
        ChaCha8Rng::seed_from_u64(derive_seed(seed, k))
    };
    let suites = vec![
        suite_spectral(&mut rng()),
        suite_group_action(&mut rng()),
        suite_gap(&mut rng()),
        suite_forms(&mut rng()),
        suite_reductions(&mut rng()),
        suite_classification(&mut rng()),
        suite_lemma1(&mut rng()),
        suite_identities(&mut rng()),
        suite_oracles(&mut rng()),
        suite_traces(&mut rng()),
        suite_search(seed),
        suite_gradients(&mut rng()),
        suite_comass(seed),
        suite_alternation(&mut rng()),
    ];
    SelftestReport { seed, suites }
}
