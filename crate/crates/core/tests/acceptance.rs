//! Acceptance suite. Prints one PASS/FAIL line per criterion with the measured
//! worst case, the pinned tolerance and the runtime against its limit. Exits
//! nonzero when any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use conemetric::axioms::check_matrix_axioms;
use conemetric::cone::{self, validate_cone, ConeSpec, NormSpec, OrderedVectorSpace};
use conemetric::fixpoint::{banach_iterate, verify_rate_bounds};
use conemetric::linalg;
use conemetric::metrics::{random_cone_metric_table, tail_bound, ConeMetric, Point, ScalarMetric};
use conemetric::metrize::{check_convergence_equivalence, distance_matrix, equivalent_metric, metrize_vector};
use conemetric::transfer::{all_pairs, check_corollary, psi_function, BoundedConeMap, ContractiveCondition};
use conemetric::SelfMap;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    ok: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, Criterion); 9] = [
        (1, "discrete example", 1, discrete_example),
        (2, "product example", 1, product_example),
        (3, "lq example", 2, lq_example),
        (4, "oracle equivalence", 60, oracle_equivalence),
        (5, "metric axiom suite", 30, metric_axioms),
        (6, "contractive condition transfer", 60, condition_transfer),
        (7, "psi construction", 5, psi_construction),
        (8, "convergence equivalence", 1, convergence_equivalence),
        (9, "fixed point", 1, fixed_point),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut passed = 0;
    for (n, title, limit, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| Outcome {
            ok: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ),
        });
        let elapsed = start.elapsed();
        let ok = outcome.ok && elapsed <= Duration::from_secs(limit);
        if ok {
            passed += 1;
        }
        println!(
            "criterion {n} ({title}): {} | {} | {:.3}s of {limit}s",
            if ok { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{passed} of {} criteria passed", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_random(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = linalg::norm2(&v);
        if r > 0.1 && r <= 1.0 {
            return linalg::scale(1.0 / r, &v);
        }
    }
}

/// Pointed cone with `k` unit generators spread around a random axis; angles
/// between generators range from acute to obtuse.
fn random_generator_cone(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> ConeSpec {
    loop {
        let axis = unit_random(rng, dim);
        let gens: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let g = linalg::axpy(&axis, 1.2, &unit_random(rng, dim));
                linalg::scale(1.0 / linalg::norm2(&g), &g)
            })
            .collect();
        if let Ok(c) = ConeSpec::generators(gens) {
            if validate_cone(&c, 1e-9).passed() {
                return c;
            }
        }
    }
}

fn random_norm(rng: &mut ChaCha8Rng, dim: usize) -> (NormSpec, &'static str) {
    match rng.random_range(0..5) {
        0 => (NormSpec::lp(1.0).unwrap(), "l1"),
        1 => (NormSpec::euclidean(), "l2"),
        2 => (NormSpec::lp(3.0).unwrap(), "l3"),
        3 => (NormSpec::lp(f64::INFINITY).unwrap(), "linf"),
        _ => {
            let w = (0..dim).map(|_| rng.random_range(0.5..1.5)).collect();
            (NormSpec::weighted_lp(2.0, w).unwrap(), "weighted l2")
        }
    }
}

/// Orthant, second-order or 2–4 generator cone in dimension 2 or 3, with a random norm.
fn random_space(rng: &mut ChaCha8Rng, family: usize) -> (OrderedVectorSpace, String) {
    let dim = rng.random_range(2..=3);
    let (cone, cname) = match family % 3 {
        0 => (ConeSpec::orthant(dim), "orthant".to_string()),
        1 => (ConeSpec::second_order(dim), "second-order".to_string()),
        _ => {
            let k = rng.random_range(dim.max(2)..=4);
            (random_generator_cone(rng, dim, k), format!("{k} generators"))
        }
    };
    let (norm, nname) = random_norm(rng, dim);
    (
        OrderedVectorSpace::new(norm, cone).unwrap(),
        format!("{cname} in R^{dim}, {nname}"),
    )
}

fn discrete_example() -> Outcome {
    let mut r = rng(1);
    let points: Vec<Point> = (1..=5).map(|i| Point::label(format!("p{i}"))).collect();
    let (mut worst_orthant, mut worst_all) = (0.0_f64, 0.0_f64);
    let mut worst_case = String::new();
    let mut codomains = 0;
    let mut check = |space: OrderedVectorSpace, name: String, a: Vec<f64>| {
        let a = linalg::scale(1.0 / space.norm(&a), &a);
        let orthant = matches!(space.cone(), ConeSpec::Orthant { .. });
        let cm = ConeMetric::discrete(a.clone(), space).unwrap();
        let m = distance_matrix(&cm, &points).unwrap();
        codomains += 1;
        for i in 0..5 {
            for j in 0..5 {
                let err = (m.values[i][j] - if i == j { 0.0 } else { 1.0 }).abs();
                if orthant {
                    worst_orthant = worst_orthant.max(err);
                }
                if err > worst_all {
                    worst_all = err;
                    worst_case = format!(
                        "{name}, a = {a:.3?}: d = {:.6} (certified within {:.1e})",
                        m.values[i][j], m.error_bounds[i][j]
                    );
                }
            }
        }
    };
    for family in 0..30 {
        let (space, name) = random_space(&mut r, family);
        let a = loop {
            let a = cone::sample_cone_point(space.cone(), &mut r).unwrap();
            if linalg::norm2(&a) > 1e-3 {
                break a;
            }
        };
        check(space, name, a);
    }
    let obtuse = ConeSpec::generators(vec![vec![1.0, 0.0], vec![-0.8, 0.6]]).unwrap();
    check(
        OrderedVectorSpace::new(NormSpec::euclidean(), obtuse).unwrap(),
        "generators (1,0), (-0.8,0.6), l2".into(),
        vec![1.0, 0.0],
    );
    Outcome {
        ok: worst_all <= 1e-9,
        detail: format!(
            "{codomains} codomains, tolerance 1e-9; max |d - discrete| = {worst_orthant:.1e} on orthants, \
             {worst_all:.1e} overall{}",
            if worst_all > 1e-9 { format!(" at {worst_case}") } else { String::new() }
        ),
    }
}

fn product_example() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0_f64;
    for alpha in [0.0, 1.0, 2.0] {
        let cm = ConeMetric::product_example(alpha).unwrap();
        let d = equivalent_metric(&cm);
        for _ in 0..1000 {
            let (x, y) = (r.random_range(-10.0..10.0), r.random_range(-10.0..10.0));
            let got = d.distance(&Point::scalar(x), &Point::scalar(y)).unwrap();
            let want = (1.0 + alpha * alpha).sqrt() * (x - y).abs();
            worst = worst.max((got - want).abs());
        }
    }
    Outcome {
        ok: worst <= 1e-9,
        detail: format!("3 x 1000 pairs, max |d - sqrt(1+a^2)|x-y|| = {worst:.1e}, tolerance 1e-9"),
    }
}

fn lq_example() -> Outcome {
    // analytically the q = 1 truncation error equals the bound; allow for rounding
    const ROUNDING: f64 = 4.0 * f64::EPSILON;
    let mut r = rng(3);
    let mut ok = true;
    let mut parts = Vec::new();
    for (q, b) in [(1.0, 2.0), (2.0, 2.0), (0.5, 3.0)] {
        let cm = ConeMetric::geometric_lq(ScalarMetric::Euclidean, b, q, 32).unwrap();
        let d = equivalent_metric(&cm);
        let (mut worst_ratio, mut failures) = (0.0_f64, 0);
        for _ in 0..1000 {
            let rho = 10.0 * (1.0 - r.random::<f64>());
            let got = d.distance(&Point::scalar(0.0), &Point::scalar(rho)).unwrap();
            let closed = (rho / (b - 1.0)).powf(1.0 / q);
            let bound = tail_bound(b, q, 32, rho);
            let err = (got - closed).abs();
            worst_ratio = worst_ratio.max(err / bound);
            if err > bound + ROUNDING * closed {
                failures += 1;
            }
        }
        ok &= failures == 0;
        parts.push(format!(
            "(q,b)=({q},{b}): {failures}/1000 outside bound, max err/bound {worst_ratio:.3e}"
        ));
    }
    Outcome {
        ok,
        detail: format!("N = 32, rounding allowance 4 ulps relative; {}", parts.join("; ")),
    }
}

/// `max{⟨y, c⟩ : y ∈ P*, ‖y‖_* ≤ 1}` over a direction grid with local refinement.
/// Equals `d` by duality; the objective is quasi-concave on the sphere so the
/// refined coarse maximum is global.
fn dual_grid_oracle(space: &OrderedVectorSpace, c: &[f64]) -> f64 {
    const REFINE_ROUNDS: usize = 200;
    let value = |y: &[f64]| -> f64 {
        if cone::dual_contains(space.cone(), y, 0.0).unwrap() {
            linalg::dot(y, c) / space.norm_spec().dual_norm(y)
        } else {
            f64::NEG_INFINITY
        }
    };
    let best = if c.len() == 2 {
        let at = |t: f64| value(&[t.cos(), t.sin()]);
        let steps = (std::f64::consts::TAU / 1e-4) as usize;
        let (mut t, mut v) = (0..steps)
            .into_par_iter()
            .map(|i| (i as f64 * 1e-4, at(i as f64 * 1e-4)))
            .reduce(|| (0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        for (window, step) in [(1e-4, 1e-6), (1e-6, 1e-8)] {
            let n = (2.0 * window / step) as i64;
            // rescan around the best point until it stops moving
            for _ in 0..REFINE_ROUNDS {
                let t0 = t;
                for i in 0..=n {
                    let s = t0 - window + i as f64 * step;
                    let w = at(s);
                    if w > v {
                        v = w;
                        t = s;
                    }
                }
                if t == t0 {
                    break;
                }
            }
        }
        v
    } else {
        let at = |p: f64, t: f64| value(&[p.sin() * t.cos(), p.sin() * t.sin(), p.cos()]);
        let step = 4e-3;
        let (np, nt) = ((std::f64::consts::PI / step) as usize + 1, (std::f64::consts::TAU / step) as usize);
        let (mut p, mut t, mut v) = (0..np)
            .into_par_iter()
            .map(|i| {
                let p = i as f64 * step;
                (0..nt).fold((p, 0.0, f64::NEG_INFINITY), |acc, j| {
                    let w = at(p, j as f64 * step);
                    if w > acc.2 {
                        (p, j as f64 * step, w)
                    } else {
                        acc
                    }
                })
            })
            .reduce(|| (0.0, 0.0, f64::NEG_INFINITY), |a, b| if b.2 > a.2 { b } else { a });
        for (window, fine) in [(4e-3, 1e-4), (1e-4, 2e-6), (2e-6, 5e-8)] {
            let n = (2.0 * window / fine) as i64;
            for _ in 0..REFINE_ROUNDS {
                let (p0, t0) = (p, t);
                for i in 0..=n {
                    for j in 0..=n {
                        let (pp, tt) = (p0 - window + i as f64 * fine, t0 - window + j as f64 * fine);
                        let w = at(pp, tt);
                        if w > v {
                            (p, t, v) = (pp, tt, w);
                        }
                    }
                }
                if (p, t) == (p0, t0) {
                    break;
                }
            }
        }
        v
    };
    best.max(0.0)
}

/// Extreme rays of a two-dimensional cone, normalized.
fn extreme_rays_2d(cone: &ConeSpec) -> [Vec<f64>; 2] {
    let gens = cone::canonical_rays(cone);
    let gens: Vec<Vec<f64>> = gens.iter().map(|g| linalg::scale(1.0 / linalg::norm2(g), g)).collect();
    let mid = gens.iter().fold(vec![0.0, 0.0], |acc, g| linalg::add(&acc, g));
    let angle = |g: &Vec<f64>| (mid[0] * g[1] - mid[1] * g[0]).atan2(linalg::dot(&mid, g));
    let lo = gens.iter().min_by(|a, b| angle(a).total_cmp(&angle(b))).unwrap();
    let hi = gens.iter().max_by(|a, b| angle(a).total_cmp(&angle(b))).unwrap();
    [lo.clone(), hi.clone()]
}

/// `min ‖c + λ₁g₁ + λ₂g₂‖` over `λ ∈ [0, 3‖c‖]²` with step `1e-3`.
fn primal_grid_oracle(space: &OrderedVectorSpace, c: &[f64]) -> f64 {
    let [g1, g2] = extreme_rays_2d(space.cone());
    let radius = 3.0 * space.norm(c);
    let n = (radius / 1e-3) as usize + 1;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let base = linalg::axpy(c, i as f64 * 1e-3, &g1);
            (0..=n)
                .map(|j| {
                    let l = j as f64 * 1e-3;
                    space.norm(&[base[0] + l * g2[0], base[1] + l * g2[1]])
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

fn oracle_equivalence() -> Outcome {
    const TOL: f64 = 2e-3;
    let mut r = rng(4);
    let (mut worst_dual, mut worst_primal, mut primal_checked) = (0.0_f64, 0.0_f64, 0);
    let (mut worst, mut worst_case) = (0.0_f64, String::new());
    for i in 0..200 {
        let (space, name) = random_space(&mut r, i);
        let c = loop {
            let c = cone::sample_cone_point(space.cone(), &mut r).unwrap();
            let n = linalg::norm2(&c);
            if n > 1e-3 {
                break linalg::scale(r.random_range(0.2..1.0) / n, &c);
            }
        };
        let got = metrize_vector(&space, &c).unwrap();
        let dual = dual_grid_oracle(&space, &c);
        let mut err = (got.value - dual).abs();
        worst_dual = worst_dual.max(err);
        if c.len() == 2 {
            let primal = primal_grid_oracle(&space, &c);
            worst_primal = worst_primal.max((got.value - primal).abs());
            err = err.max((got.value - primal).abs());
            primal_checked += 1;
        }
        if err > worst {
            worst = err;
            worst_case = format!(
                "{name} {:?}, c = {c:?}, {} d = {:.6} certified within {:.1e}",
                space.cone(),
                got.method.as_str(),
                got.value,
                got.error_bound
            );
        }
    }
    let obtuse = ConeSpec::generators(vec![vec![1.0, 0.0], vec![-0.8, 0.6]]).unwrap();
    let space = OrderedVectorSpace::new(NormSpec::euclidean(), obtuse).unwrap();
    let witness = metrize_vector(&space, &[1.0, 0.0]).unwrap().value;
    let witness_primal = primal_grid_oracle(&space, &[1.0, 0.0]);
    let witness_ok = (witness - 0.6).abs() <= TOL && (witness_primal - 0.6).abs() <= TOL && witness < 1.0;
    Outcome {
        ok: worst_dual <= TOL && worst_primal <= TOL && witness_ok,
        detail: format!(
            "200 instances, tolerance {TOL:.0e}; max |d - dual grid| = {worst_dual:.1e}, \
             max |d - primal grid| = {worst_primal:.1e} on {primal_checked} planar instances; worst at {worst_case}; \
             obtuse witness d = {witness:.6} (grid {witness_primal:.4}) vs |c| = 1"
        ),
    }
}

fn metric_axioms() -> Outcome {
    let mut violations = 0;
    let mut triples = 0;
    for seed in 0..50u64 {
        let mut r = rng(500 + seed);
        let n = r.random_range(5..=10);
        let dim = r.random_range(2..=4);
        let p = [1.0, 2.0, f64::INFINITY][seed as usize % 3];
        let space = OrderedVectorSpace::new(NormSpec::lp(p).unwrap(), ConeSpec::orthant(dim)).unwrap();
        let cm = random_cone_metric_table(n, &space, seed).unwrap();
        let points = cm.table_points().unwrap();
        let m = distance_matrix(&cm, &points).unwrap();
        let report = check_matrix_axioms(&m.values, &|i, j| i == j, 1e-8);
        violations += report.total_violations();
        triples += report.triangle.checked;
    }
    Outcome {
        ok: violations == 0,
        detail: format!("50 tables, {triples} triples, {violations} violations above 1e-8"),
    }
}

/// Codomain for the transfer constructions: a coordinatewise metric on `R^n`,
/// either directly over the orthant or pushed through a matrix `A` into the
/// cone generated by the columns of `A`.
struct Codomain {
    matrix: Option<Vec<Vec<f64>>>,
    norm: NormSpec,
}

impl Codomain {
    fn random(r: &mut ChaCha8Rng, n: usize) -> Self {
        if r.random_bool(0.5) {
            let norm = [NormSpec::lp(1.0), NormSpec::lp(2.0), NormSpec::lp(f64::INFINITY)]
                [r.random_range(0..3)]
            .clone()
            .unwrap();
            return Codomain { matrix: None, norm };
        }
        loop {
            let a: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 } + 0.6 * r.random_range(-1.0..1.0)).collect())
                .collect();
            let columns: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| a[i][j]).collect()).collect();
            if let Ok(cone) = ConeSpec::generators(columns) {
                if validate_cone(&cone, 1e-9).passed() {
                    return Codomain {
                        matrix: Some(a),
                        norm: NormSpec::euclidean(),
                    };
                }
            }
        }
    }

    fn metric(&self, weights: Vec<f64>) -> ConeMetric {
        let n = weights.len();
        match &self.matrix {
            None => ConeMetric::coordinatewise(
                weights,
                OrderedVectorSpace::new(self.norm.clone(), ConeSpec::orthant(n)).unwrap(),
            )
            .unwrap(),
            Some(a) => {
                let inner = ConeMetric::coordinatewise(weights, OrderedVectorSpace::euclidean_orthant(n)).unwrap();
                let columns: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| a[i][j]).collect()).collect();
                let outer = OrderedVectorSpace::new(self.norm.clone(), ConeSpec::generators(columns).unwrap()).unwrap();
                ConeMetric::linear_image(inner, a.clone(), outer).unwrap()
            }
        }
    }
}

/// A condition with coefficients drawn in range, and the largest slope `s` for
/// which `T(x) = s⊙x + b` (with `0 ≤ sᵢ ≤ s`) satisfies its cone premise at
/// every pair of a coordinatewise metric.
///
/// Banach, two-term, max-type, five-coefficient and Hardy–Rogers: the `D(x, y)`
/// term alone dominates when `s` is at most its coefficient. Kannan: with fixed
/// point `x*`, `D(Tx, x) = (1 − s)|x − x*|` coordinatewise, and
/// `|x − y| ≤ |x − x*| + |y − x*|`, so `s ≤ λ/(1 + λ)` suffices. Chatterjea:
/// `|Tx − y| + |Ty − x| ≥ (1 + s)|x − y|`, so `s ≤ λ/(1 − λ)`. Iterated power
/// (existential, `m = n`): `D(Tᵐx, Tᵐy) = sᵐD(x, y)`, so `s ≤ k^{1/m}`.
fn affine_condition(kind: usize, r: &mut ChaCha8Rng) -> (ContractiveCondition, f64) {
    use ContractiveCondition::*;
    let mut u = |lo: f64, hi: f64| r.random_range(lo..hi);
    match kind {
        0 => {
            let alpha = u(0.1, 0.9);
            (Banach { alpha }, alpha)
        }
        1 => {
            let lambda = u(0.05, 0.45);
            (Kannan { lambda }, lambda / (1.0 + lambda))
        }
        2 => {
            let lambda = u(0.05, 0.45);
            (Chatterjea { lambda }, lambda / (1.0 - lambda))
        }
        3 => {
            let (alpha, beta) = (u(0.1, 0.9), u(0.0, 0.9));
            (TwoTerm { alpha, beta }, alpha)
        }
        4 => {
            let alpha = u(0.1, 0.9);
            (QuasiMax5 { alpha }, alpha)
        }
        5 => {
            let beta = u(0.1, 0.9);
            (QuasiMax5Half { beta }, beta)
        }
        6 => {
            let beta = u(0.1, 0.9);
            (ZamfirescuMax3 { beta }, beta)
        }
        7 => {
            let w: Vec<f64> = (0..6).map(|_| u(0.05, 1.0)).collect();
            let s: f64 = w.iter().sum();
            let a: Vec<f64> = w.iter().map(|x| x / s).collect();
            (
                FiveCoefficient { a1: a[0], a2: a[1], a3: a[2], a4: a[3], a5: a[4] },
                a[0],
            )
        }
        8 => {
            let beta = u(0.1, 0.95);
            (HalfBetaMax5 { beta }, beta / 2.0)
        }
        9 => {
            let w: Vec<f64> = (0..5).map(|_| u(0.05, 1.0)).collect();
            let s: f64 = w.iter().sum();
            let a: Vec<f64> = w.iter().map(|x| x / s).collect();
            (
                HardyRogersSym { a1: a[0], a2: a[1], a3: a[2], a4: a[3] / 2.0 },
                a[0],
            )
        }
        _ => {
            let m = r.random_range(1..=3);
            let k = r.random_range(0.1..0.9);
            (IteratedPower { m, n: m, k, existential: true }, f64::powf(k, 1.0 / m as f64))
        }
    }
}

struct Tally {
    name: String,
    premise: usize,
    excluded: usize,
    violations: usize,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            name: name.to_string(),
            premise: 0,
            excluded: 0,
            violations: 0,
        }
    }

    fn add(&mut self, checked: usize, premise: usize, violations: usize) {
        self.premise += premise;
        self.excluded += checked - premise;
        self.violations += violations;
    }
}

fn random_coords(r: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n).map(|_| r.random_range(-half_width..half_width)).collect()
}

fn condition_transfer() -> Outcome {
    const TAU: f64 = 1e-8;
    const INSTANCES: usize = 120;
    let mut tallies = Vec::new();
    for kind in 0..11 {
        let mut r = rng(600 + kind as u64);
        let mut tally = Tally::new("");
        for _ in 0..INSTANCES {
            let n = r.random_range(1..=3);
            let (cond, s_max) = affine_condition(kind, &mut r);
            tally.name = match &cond {
                ContractiveCondition::IteratedPower { .. } => "iterated-power (existential)".into(),
                c => c.name().into(),
            };
            let codomain = Codomain::random(&mut r, n);
            let cm = codomain.metric((0..n).map(|_| r.random_range(0.2..2.0)).collect());
            let slopes: Vec<f64> = (0..n).map(|_| s_max * r.random::<f64>()).collect();
            let t = SelfMap::diagonal(&slopes, random_coords(&mut r, n, 1.0));
            let pair = (Point::Coords(random_coords(&mut r, n, 3.0)), Point::Coords(random_coords(&mut r, n, 3.0)));
            let rep = check_corollary(&cond, &cm, &t, &[pair], TAU).unwrap();
            tally.add(rep.samples_checked, rep.cone_holds, rep.violations.len());
        }
        tallies.push(tally);
    }

    // universal reading: the set {x, y, Tᵖx, T^q y} contains Tᵐx and Tⁿy, so the
    // premise holds exactly when Tᵐx = Tⁿy; maps collapsing to p0 provide that
    let mut tally = Tally::new("iterated-power (universal)");
    for seed in 0..6u64 {
        let mut r = rng(700 + seed);
        let dim = r.random_range(1..=3);
        let norm = NormSpec::lp([1.0, 2.0, f64::INFINITY][seed as usize % 3]).unwrap();
        let space = OrderedVectorSpace::new(norm, ConeSpec::orthant(dim)).unwrap();
        let cm = random_cone_metric_table(6, &space, seed).unwrap();
        let table = (0..6).map(|i| (format!("p{i}"), format!("p{}", i / 2))).collect();
        let t = SelfMap::Labels { table };
        let m = r.random_range(3..=4);
        let cond = ContractiveCondition::IteratedPower { m, n: 7 - m, k: r.random_range(0.1..0.9), existential: false };
        let rep = check_corollary(&cond, &cm, &t, &all_pairs(&cm.table_points().unwrap()), TAU).unwrap();
        tally.add(rep.samples_checked, rep.cone_holds, rep.violations.len());
    }
    tallies.push(tally);

    // D(Tx, Ty) ≤ D*(x, y) with D* the coordinatewise metric of weights wᵢ·sᵢ·(1 + u)
    let mut tally = Tally::new("dominance");
    let mut r = rng(800);
    for _ in 0..INSTANCES {
        let n = r.random_range(1..=3);
        let codomain = Codomain::random(&mut r, n);
        let w: Vec<f64> = (0..n).map(|_| r.random_range(0.2..2.0)).collect();
        let slopes: Vec<f64> = (0..n).map(|_| r.random_range(0.05..2.0)).collect();
        let wstar: Vec<f64> = (0..n).map(|i| w[i] * slopes[i] * (1.0 + r.random::<f64>())).collect();
        let cm = codomain.metric(w);
        let cond = ContractiveCondition::Dominance { dstar: Some(Box::new(codomain.metric(wstar))) };
        let t = SelfMap::diagonal(&slopes, random_coords(&mut r, n, 1.0));
        let pair = (Point::Coords(random_coords(&mut r, n, 3.0)), Point::Coords(random_coords(&mut r, n, 3.0)));
        let rep = check_corollary(&cond, &cm, &t, &[pair], TAU).unwrap();
        tally.add(rep.samples_checked, rep.cone_holds, rep.violations.len());
    }
    tallies.push(tally);

    let ok = tallies.iter().all(|t| t.premise >= 100 && t.violations == 0);
    let summary: Vec<String> = tallies
        .iter()
        .map(|t| format!("{} {}/{}/{}", t.name, t.premise, t.excluded, t.violations))
        .collect();
    Outcome {
        ok,
        detail: format!(
            "premise held/excluded/violations above {TAU:.0e} per condition: {}",
            summary.join(", ")
        ),
    }
}

fn psi_construction() -> Outcome {
    const SAMPLES: usize = 256;
    let mut r = rng(7);
    let (mut worst_excess, mut worst_linear) = (f64::NEG_INFINITY, 0.0_f64);
    let mut maps = 0;
    let mut check = |phi: &BoundedConeMap, space: &OrderedVectorSpace, exact_norm: Option<f64>, r: &mut ChaCha8Rng| {
        maps += 1;
        let psi = psi_function(phi, space, SAMPLES, 11).unwrap();
        for _ in 0..1000 {
            let x = cone::sample_cone_point(space.cone(), r).unwrap();
            let x = linalg::scale(10f64.powf(r.random_range(-3.0..3.0)), &x);
            let lhs = space.norm(&phi.apply(&x).unwrap());
            worst_excess = worst_excess.max(lhs - psi.eval(space.norm(&x)));
        }
        if let Some(k) = exact_norm {
            for t in [1e-3, 0.1, 1.0, 7.5, 1e3] {
                worst_linear = worst_linear.max((psi.eval(t) - t * k).abs() / (t * k));
            }
        }
    };
    let line = OrderedVectorSpace::euclidean_orthant(1);
    check(&BoundedConeMap::x_over_one_plus_x(), &line, None, &mut r);
    let plane = OrderedVectorSpace::euclidean_orthant(2);
    check(&BoundedConeMap::diagonal(&[2.0, 3.0]), &plane, Some(3.0), &mut r);
    for _ in 0..10 {
        let n = r.random_range(2..=4);
        let m: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| r.random_range(0.1..1.0)).collect()).collect();
        let spectral = DMatrix::from_fn(n, n, |i, j| m[i][j]).singular_values().max();
        let column_sum = (0..n).map(|j| (0..n).map(|i| m[i][j]).sum::<f64>()).fold(0.0, f64::max);
        let phi = BoundedConeMap::LinearMatrix(m);
        check(&phi, &OrderedVectorSpace::euclidean_orthant(n), Some(spectral), &mut r);
        let l1 = OrderedVectorSpace::new(NormSpec::lp(1.0).unwrap(), ConeSpec::orthant(n)).unwrap();
        check(&phi, &l1, Some(column_sum), &mut r);
    }
    Outcome {
        ok: worst_excess <= 1e-8 && worst_linear <= 1e-9,
        detail: format!(
            "{maps} maps x 1000 samples; max |phi(x)| - psi(|x|) = {worst_excess:.1e} (tolerance 1e-8); \
             max relative |psi(t) - t|phi|| = {worst_linear:.1e} (tolerance 1e-9)"
        ),
    }
}

fn convergence_equivalence() -> Outcome {
    let cm = ConeMetric::product_example(1.0).unwrap();
    let zero = Point::scalar(0.0);
    let c = vec![vec![0.1, 0.1]];
    let seq: Vec<Point> = (1..=200).map(|n| Point::scalar(1.0 / n as f64)).collect();
    let rep = check_convergence_equivalence(&cm, &seq, &zero, &c, 1e-6).unwrap();
    let (dom, didx) = (rep.directions[0].domination_index, rep.directions[0].d_index);
    let constant = vec![Point::scalar(1.0); 50];
    let stuck = check_convergence_equivalence(&cm, &constant, &zero, &c, 1e-6).unwrap();
    let flagged = !stuck.cone_converges && !stuck.d_converges;
    Outcome {
        ok: dom == Some(15) && didx == Some(15) && flagged,
        detail: format!(
            "x_n = 1/n, c = (0.1, 0.1), margin 1e-6: D-domination index {dom:?}, d index {didx:?} (expected 15 and 15); \
             constant sequence flagged non-convergent in both senses: {flagged}"
        ),
    }
}

fn fixed_point() -> Outcome {
    let cm = ConeMetric::product_example(1.0).unwrap();
    let trace = banach_iterate(&cm, &SelfMap::scaling(0.5, 1), &Point::scalar(1.0), 1e-8, 1000).unwrap();
    let rate = trace.estimated_rate.unwrap_or(f64::NAN);
    let at_half = verify_rate_bounds(&trace, 0.5, 1e-12).unwrap().passed();
    let at_four_tenths = verify_rate_bounds(&trace, 0.4, 1e-12).unwrap().passed();
    Outcome {
        ok: trace.converged
            && trace.residual <= 1e-8
            && trace.iterations <= 29
            && (0.49..=0.51).contains(&rate)
            && at_half
            && !at_four_tenths,
        detail: format!(
            "{} iterations (limit 29), residual {:.2e}, rate {rate:.4}, rate bounds at 0.5 {}, at 0.4 {}",
            trace.iterations,
            trace.residual,
            if at_half { "pass" } else { "fail" },
            if at_four_tenths { "pass" } else { "fail" }
        ),
    }
}
