//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

mod common;

use common::{random_barrier, single_barrier_t};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};
use steptunnel::pauli::{epsilon, explicit_product, fold_chain, i_pow, phi, PauliVector, ScaledPauliVector};
use steptunnel::resonance::{alias_audit, find_peaks, peak_count, AliasSettings, PeakSearch};
use steptunnel::scan::single_well_spec;
use steptunnel::scattering::{solve, transmission, Incidence};
use steptunnel::{build_mbp, discretize, MbpSpec, PiecewiseConstantPotential};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Matrix = [[Complex64; 2]; 2];

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Sequential product with the magnitude pulled out after every step.
fn direct_product(chain: &[Matrix]) -> (Matrix, f64) {
    let mut acc = [[ONE, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), ONE]];
    let mut log_scale = 0.0;
    for m in chain {
        acc = mat_mul(&acc, m);
        let s = max_abs(&acc);
        for z in acc.iter_mut().flatten() {
            *z /= s;
        }
        log_scale += s.ln();
    }
    (acc, log_scale)
}

fn as_matrix(v: &PauliVector) -> Matrix {
    let m = v.to_matrix();
    [[m.m11, m.m12], [m.m21, m.m22]]
}

fn scaled_relative_error(a: &Matrix, a_log: f64, b: &Matrix, b_log: f64) -> f64 {
    let f = (a_log - b_log).exp();
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            worst = worst.max((a[r][c] * f - b[r][c]).norm());
        }
    }
    worst / max_abs(b)
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn pauli_chains() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let lengths = [2usize, 5, 20, 200, 2000];
    let (mut worst_fold, mut worst_explicit) = (0.0f64, 0.0f64);
    for k in 0..1000 {
        let len = lengths[k % lengths.len()];
        let chain: Vec<PauliVector> = (0..len)
            .map(|_| PauliVector::new(random_complex(&mut rng), random_complex(&mut rng), random_complex(&mut rng), random_complex(&mut rng)))
            .collect();
        let matrices: Vec<Matrix> = chain.iter().map(as_matrix).collect();
        let (direct, direct_log) = direct_product(&matrices);
        let folded: ScaledPauliVector = fold_chain(&chain).expect("finite chain");
        worst_fold = worst_fold.max(scaled_relative_error(&as_matrix(&folded.vector), folded.log_scale, &direct, direct_log));
        if len <= 8 {
            let explicit = as_matrix(&explicit_product(&chain, 8).expect("short chain"));
            worst_explicit = worst_explicit.max(scaled_relative_error(&explicit, 0.0, &direct, direct_log));
            worst_explicit = worst_explicit.max(scaled_relative_error(&explicit, 0.0, &as_matrix(&folded.vector), folded.log_scale));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst_fold < 1e-10 && worst_explicit < 1e-12 && elapsed < Duration::from_secs(10),
        format!("fold vs direct {worst_fold:.2e} (< 1e-10), explicit {worst_explicit:.2e} (< 1e-12), {elapsed:.2?} (< 10 s)"),
    )
}

fn pauli_table() -> Outcome {
    let z = Complex64::new(0.0, 0.0);
    let i = Complex64::i();
    let sigma: [Matrix; 4] = [[[ONE, z], [z, ONE]], [[z, ONE], [ONE, z]], [[z, -i], [i, z]], [[ONE, z], [z, -ONE]]];
    let mut failures = 0;
    for p in 0..4 {
        for q in 0..4 {
            let r = phi(p, q);
            let lhs = mat_mul(&sigma[q], &sigma[r]);
            let factor = i_pow(epsilon(p, q, r));
            let rhs = sigma[p].map(|row| row.map(|x| x * factor));
            if lhs != rhs {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{} of 16 products exact", 16 - failures))
}

fn conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let p = random_barrier(&mut rng, 100);
        let e = rng.gen_range(0.1..100.0);
        let left = transmission(&p, e).expect("left solve");
        let right = solve(&p, e, Incidence::Right, ONE).expect("right solve");
        worst = worst.max((left.t + left.r - 1.0).abs());
        worst = worst.max((right.transmission + right.reflection - 1.0).abs());
    }
    outcome(worst < 1e-10, format!("max |T + R - 1| = {worst:.2e} over both incidences (< 1e-10)"))
}

fn single_barrier() -> Outcome {
    let p = build_mbp(&MbpSpec::new(40.0, 0.5, vec![])).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let e = 0.1 + (120.0 - 0.1) * (k as f64 + 0.5) / 200.0;
        let t = transmission(&p, e).unwrap().t;
        let want = single_barrier_t(40.0, 0.5, e);
        worst = worst.max((t - want).abs() / want);
    }
    let at_top = transmission(&p, 40.0).unwrap().t;
    let limit = 1.0 / (1.0 + 40.0 * 0.25 / 4.0);
    let top_err = (at_top - limit).abs();
    outcome(
        worst < 1e-10 && top_err < 1e-6,
        format!("max relative error {worst:.2e} (< 1e-10); T(V0) = {at_top:.9} vs {limit:.9}, error {top_err:.2e} (< 1e-6)"),
    )
}

fn uniform_four_barrier() -> Outcome {
    let start = Instant::now();
    let p = build_mbp(&MbpSpec::uniform(4, 40.0, 0.5, 2.0)).unwrap();
    let c = find_peaks(&p, &PeakSearch::for_barrier(40.0)).unwrap();
    let elapsed = start.elapsed();
    let k = c.sharp_kappas();
    let bands: Vec<&[f64]> = k.chunks(3).collect();
    let intra = bands.iter().flat_map(|b| b.windows(2).map(|w| w[1] - w[0])).fold(0.0, f64::max);
    let inter = bands.windows(2).map(|w| w[1][0] - w[0][w[0].len() - 1]).fold(f64::INFINITY, f64::min);
    let banded = k.len() == 12 && bands.iter().all(|b| b.len() == 3) && inter >= 5.0 * intra;
    let near = k.iter().copied().find(|x| (5.207..=5.227).contains(x));
    outcome(
        k.len() == 12 && banded && near.is_some() && elapsed < Duration::from_secs(30),
        format!(
            "{} sharp peaks (12), min band gap {inter:.4} vs 5 x max intra-band gap {:.4}, peak in [5.207, 5.227]: {:?}, {elapsed:.2?}",
            k.len(),
            5.0 * intra,
            near.map(|x| (x * 1e4).round() / 1e4)
        ),
    )
}

fn asymmetric_four_barrier() -> Outcome {
    let p = build_mbp(&MbpSpec::new(40.0, 0.5, vec![5.0, 3.0, 2.0])).unwrap();
    let c = find_peaks(&p, &PeakSearch::for_barrier(40.0)).unwrap();
    let alpha = peak_count(&[5.0, 3.0, 2.0], 40.0);
    let diffuse: Vec<String> = c.diffuse().map(|p| format!("{:.3}", p.kappa)).collect();
    outcome(
        c.sharp_count() == 20 && c.diffuse_count() == 3 && alpha == 20,
        format!("{} sharp (20), {} diffuse (3) at [{}], floor-sum count {alpha} (20)", c.sharp_count(), c.diffuse_count(), diffuse.join(", ")),
    )
}

fn alias_effect() -> Outcome {
    // cyclic rotations of the well order
    let orderings = vec![vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 3.0, 4.0, 1.0], vec![3.0, 4.0, 1.0, 2.0]];
    let mut all = orderings.clone();
    all.extend(orderings.iter().map(|o| o.iter().rev().copied().collect::<Vec<f64>>()));
    let spec = MbpSpec::new(40.0, 0.5, vec![1.0, 2.0, 3.0, 4.0]);
    let report = alias_audit(&spec, &all, &AliasSettings::for_barrier(40.0)).unwrap();

    let counts: Vec<usize> = report.orderings[..3].iter().map(|o| o.sharp_count()).collect();
    let counts_equal = counts.windows(2).all(|w| w[0] == w[1]);
    let among: Vec<_> = report.matchings.iter().filter(|m| m.first < 3 && m.second < 3).collect();
    let all_matched = among.iter().all(|m| m.unmatched_first == 0 && m.unmatched_second == 0);
    let discrepancy = among.iter().map(|m| m.max_discrepancy).fold(0.0, f64::max);
    let mirror = report.reversal_pairs.iter().map(|p| p.max_delta_t).fold(0.0, f64::max);
    outcome(
        counts_equal && all_matched && mirror < 1e-12 && report.reversal_pairs.len() == 3,
        format!(
            "orderings 1234/2341/3412: sharp counts {counts:?}, all matched within 1e-2: {all_matched} (max nearest discrepancy {discrepancy:.4}), mirror max |dT| = {mirror:.2e} over {} pairs (< 1e-12)",
            report.reversal_pairs.len()
        ),
    )
}

fn single_well_rows() -> Outcome {
    let search = PeakSearch::for_barrier(40.0);
    let count_row = |index: usize, tau_prime: f64| -> (usize, Vec<f64>) {
        let p = build_mbp(&single_well_spec(6, 40.0, 1.0, 1.0, index, tau_prime)).unwrap();
        let c = find_peaks(&p, &search).unwrap();
        (c.sharp_count(), c.sharp_kappas())
    };
    let (at_335, _) = count_row(4, 3.35);
    let rows: Vec<f64> = (0..=40).map(|k| 1.0 + 0.1 * k as f64).collect();
    let mut track_misses = 0;
    let mut worst_track: f64 = 0.0;
    let mut base_counts = Vec::new();
    for &t in &rows {
        let (n, k) = count_row(4, t);
        base_counts.push(n);
        for target in [PI, 2.0 * PI] {
            let d = k.iter().map(|x| (x - target).abs()).fold(f64::INFINITY, f64::min);
            worst_track = worst_track.max(d);
            if d > 0.15 {
                track_misses += 1;
            }
        }
    }
    let mut index_report = Vec::new();
    let mut index_same = true;
    for index in [1, 2, 3, 5] {
        let differing = rows.iter().zip(&base_counts).filter(|(t, n)| count_row(index, **t).0 != **n).count();
        index_same &= differing == 0;
        index_report.push(format!("index {index}: {differing} rows differ"));
    }
    outcome(
        at_335 == 10 && track_misses == 0 && index_same,
        format!(
            "row 3.35 has {at_335} peaks (10); {track_misses} of {} track checks miss pi/2pi by > 0.15 (worst {worst_track:.3}); vs varied well 4 over {} rows: {}",
            2 * rows.len(),
            rows.len(),
            index_report.join(", ")
        ),
    )
}

fn degenerate_continuity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let e_max = 100.0;
    let (mut worst, mut checked) = (0.0f64, 0);
    for _ in 0..20 {
        let p = random_barrier(&mut rng, 20);
        for &v in &p.levels()[1..p.levels().len() - 1] {
            if !(v > 0.0 && v < e_max) {
                continue;
            }
            let at = transmission(&p, v).unwrap().t;
            for e in [v - 1e-7, v + 1e-7] {
                worst = worst.max((transmission(&p, e).unwrap().t - at).abs());
            }
            checked += 1;
        }
    }
    outcome(worst < 1e-4 && checked > 0, format!("{checked} levels, max |dT| = {worst:.2e} (< 1e-4)"))
}

fn direction_reversal() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut direction, mut reversal) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = random_barrier(&mut rng, 100);
        let e = rng.gen_range(0.1..100.0);
        let t = transmission(&p, e).unwrap().t;
        direction = direction.max((solve(&p, e, Incidence::Right, ONE).unwrap().transmission - t).abs());
        reversal = reversal.max((transmission(&p.reverse(), e).unwrap().t - t).abs());
    }
    outcome(
        direction < 1e-12 && reversal < 1e-12,
        format!("max |T_left - T_right| = {direction:.2e}, max |T(P) - T(reverse P)| = {reversal:.2e} (< 1e-12)"),
    )
}

fn long_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 100_000;
    let mut x = Vec::with_capacity(n);
    let mut pos = 0.0;
    for _ in 0..n {
        x.push(pos);
        pos += rng.gen_range(0.05..0.5);
    }
    let mut v = vec![0.0];
    v.extend((1..n).map(|_| rng.gen_range(-50.0..80.0)));
    v.push(0.0);
    let p = PiecewiseConstantPotential::new(x, v).unwrap();
    solve(&p, 30.0, Incidence::Left, ONE).unwrap();
    let start = Instant::now();
    let sol = solve(&p, 30.0, Incidence::Left, ONE).unwrap();
    let elapsed = start.elapsed();
    outcome(
        elapsed < Duration::from_millis(100) && sol.ln_transmission.is_finite(),
        format!("{n} interfaces solved in {elapsed:.2?} (< 100 ms), ln T = {:.4e}", sol.ln_transmission),
    )
}

fn gaussian_convergence() -> Outcome {
    let samples: Vec<(f64, f64)> = (0..=20_000)
        .map(|k| {
            let x = -5.0 + 10.0 * k as f64 / 20_000.0;
            (x, 40.0 * (-x * x).exp())
        })
        .collect();
    let t_at = |steps: usize| transmission(&discretize(&samples, steps).unwrap(), 20.0).unwrap().t;
    let reference = t_at(1024);
    let deltas: Vec<f64> = [16, 32, 64, 128, 256].iter().map(|&s| (t_at(s) - reference).abs()).collect();
    let decreasing = deltas.windows(2).all(|w| w[1] < w[0]);
    let last = deltas[deltas.len() - 1];
    let shown: Vec<String> = deltas.iter().map(|d| format!("{d:.2e}")).collect();
    outcome(decreasing && last < 1e-4, format!("|dT| vs 1024 steps for 16..256: [{}], final < 1e-4", shown.join(", ")))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("pauli chain oracle", pauli_chains),
        ("pauli product table", pauli_table),
        ("flux conservation", conservation),
        ("single barrier closed form", single_barrier),
        ("uniform four-barrier bands", uniform_four_barrier),
        ("asymmetric four-barrier peaks", asymmetric_four_barrier),
        ("alias effect", alias_effect),
        ("single-well scan rows", single_well_rows),
        ("degenerate-energy continuity", degenerate_continuity),
        ("direction and reversal invariance", direction_reversal),
        ("long chain performance", long_chain),
        ("staircase convergence", gaussian_convergence),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("[{:02}] {} {name}: {}", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: {} of {} criteria fail: {failed:?}", failed.len(), criteria.len());
        std::process::exit(1);
    }
}
