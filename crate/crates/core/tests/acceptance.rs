//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::FRAC_1_SQRT_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use magicstate::analysis::{self, Stability};
use magicstate::bloch::{classify_region, BlochVector, RegionLabel};
use magicstate::codes::{self, golay_s, pair_weight_table, rm15_s, steane_s, weight_distribution};
use magicstate::distill::{self, distillation_map};
use magicstate::knownmaps;
use magicstate::oracle;
use magicstate::poly::{RationalFunction, RationalPolynomial};
use magicstate::stabreduce;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Polynomial `sum c_k x^k / den` from `(k, c_k)` pairs.
fn poly(terms: &[(usize, i64)], den: i64) -> RationalPolynomial {
    let deg = terms.iter().map(|t| t.0).max().unwrap_or(0);
    let mut c = vec![BigRational::zero(); deg + 1];
    for &(k, v) in terms {
        c[k] = BigRational::new(BigInt::from(v), BigInt::from(den));
    }
    RationalPolynomial::new(c)
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{what} took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let m = distillation_map(&steane_s()).map_err(|e| e.to_string())?;
    let accept = poly(&[(0, 1), (4, 14)], 64);
    ensure(m.accept == accept, format!("accept = {}", m.accept))?;
    let x_out = RationalFunction::new(poly(&[(3, 7), (7, 8)], 1), poly(&[(0, 1), (4, 14)], 1));
    let got = m.x_out().normalized();
    ensure(got.num == x_out.num && got.den == x_out.den, format!("x_out = {}", got))?;
    let t = within(start, Duration::from_secs(1), "Steane map")?;
    Ok(format!("accept and x_out coefficient-exact in {t:?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let s = golay_s();
    let wd = weight_distribution(&s);
    let expected_wd = [(0u32, 1u64), (8, 506), (12, 1288), (16, 253)];
    ensure(wd.0.len() == 4, format!("weights {:?}", wd.0))?;
    for (w, c) in expected_wd {
        ensure(wd.count(w) == c, format!("weight {w}: {} != {c}", wd.count(w)))?;
    }
    let t = pair_weight_table(&s).map_err(|e| e.to_string())?;
    // (|a|, |b|) -> counts for |a xor b| = 0, 8, 12, 16
    let table: [((u32, u32), [u64; 4]); 6] = [
        ((8, 8), [506, 106260, 141680, 7590]),
        ((8, 12), [0, 141680, 425040, 85008]),
        ((8, 16), [0, 7590, 85008, 35420]),
        ((12, 12), [1288, 425040, 1020096, 212520]),
        ((12, 16), [0, 85008, 212520, 28336]),
        ((16, 16), [253, 35420, 28336, 0]),
    ];
    let mut checked = 0;
    for ((k, l), row) in table {
        for (wc, want) in [0u32, 8, 12, 16].into_iter().zip(row) {
            for (a, b) in [(k, l), (l, k)] {
                let got = t.count(a, b, wc);
                ensure(got == want, format!("({a},{b},{wc}): {got} != {want}"))?;
                checked += 1;
            }
        }
    }
    ensure(t.total() == 2048 * 2048, "pair table total")?;
    let el = within(start, Duration::from_secs(60), "Golay tables")?;
    Ok(format!("weight distribution and {checked} pair-table entries exact in {el:?}"))
}

fn criterion_3() -> Outcome {
    let m = distillation_map(&golay_s()).map_err(|e| e.to_string())?;
    let accept = poly(&[(0, 1), (8, 1012), (12, 2576), (16, 8096)], 1 << 22);
    ensure(m.accept == accept, format!("accept = {}", m.accept))?;
    let x_out = RationalFunction::new(
        poly(&[(7, 253), (11, 1288), (15, 8096), (23, 2048)], 1),
        poly(&[(0, 1), (8, 1012), (12, 2576), (16, 8096)], 1),
    );
    let got = m.x_out().normalized();
    ensure(got.num == x_out.num && got.den == x_out.den, format!("x_out = {got}"))?;
    Ok("accept and x_out coefficient-exact".into())
}

fn criterion_4() -> Outcome {
    let steane = distillation_map(&steane_s()).map_err(|e| e.to_string())?;
    let fps = analysis::fixed_points(&steane);
    let half = fps
        .iter()
        .find(|f| (f.x_star - 0.5).abs() < 1e-10 && f.stability == Stability::Unstable)
        .ok_or(format!("no unstable fixed point at 1/2: {fps:?}"))?;
    let thr = analysis::threshold_p(&steane).ok_or("Steane has no threshold")?;
    let p_star = (1.0 - FRAC_1_SQRT_2) / 2.0;
    ensure((thr.p_star - p_star).abs() < 1e-10, format!("Steane p* = {}", thr.p_star))?;

    let golay = distillation_map(&golay_s()).map_err(|e| e.to_string())?;
    let g = analysis::fixed_points(&golay)
        .into_iter()
        .find(|f| f.stability == Stability::Stable && (f.x_star - 0.62292).abs() < 5e-5)
        .ok_or("no stable Golay fixed point near 0.62292")?;

    let bk = knownmaps::bk15_threshold();
    ensure((bk - 0.14148).abs() < 5e-5, format!("BK15 threshold {bk}"))?;
    let t = knownmaps::t5_threshold();
    let t_exact = (1.0 - (3.0f64 / 7.0).sqrt()) / 2.0;
    ensure((t - t_exact).abs() < 1e-12, format!("T threshold {t}"))?;
    Ok(format!(
        "Steane x*={:.12} p*={:.12}; Golay stable x={:.6}; BK15 {bk:.8}; T {t:.12}",
        half.x_star, thr.p_star, g.x_star
    ))
}

fn criterion_5() -> Outcome {
    let s = steane_s();
    let table = pair_weight_table(&s).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut complex = 0;
    let mut done = 0;
    while done < 100 {
        let v = BlochVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if !v.is_physical() {
            continue;
        }
        done += 1;
        if v.y.abs() > 1e-3 {
            complex += 1;
        }
        let rho = v.to_density();
        let a = distill::overlap_general_from_table(&table, &rho).map_err(|e| e.to_string())?;
        let b = oracle::dense_overlaps(&s, &rho).map_err(|e| e.to_string())?;
        worst = worst.max(a.max_abs_diff(&b));
    }
    ensure(worst < 1e-10, format!("max abs error {worst:e}"))?;
    Ok(format!("100 states ({complex} with complex off-diagonals), max abs error {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sets = vec![steane_s(), golay_s(), rm15_s()];
    for _ in 0..20 {
        let n = rng.random_range(3..=10);
        sets.push(codes::random_valid_s(&mut rng, n, 3));
    }
    for s in &sets {
        let r = analysis::appendix_a_instability(s).map_err(|e| e.to_string())?;
        ensure(r.identity_sum.is_zero(), format!("identity sum {} for n={}", r.identity_sum, s.n()))?;
        ensure(r.consistent(), format!("verdict mismatch for n={}: {r:?}", s.n()))?;
    }
    let steane = distillation_map(&steane_s()).map_err(|e| e.to_string())?;
    let d =
        analysis::map_derivative_exact(&steane, &BigRational::new(1.into(), 2.into())).map_err(|e| e.to_string())?;
    ensure(d == BigRational::new(7.into(), 5.into()), format!("Steane f'(1/2) = {d}"))?;
    Ok(format!("{} sets: identity 0, verdicts agree; Steane f'(1/2) = {d}", sets.len()))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=5usize {
        for i in 0..200 {
            let psi = stabreduce::random_non_stabilizer_state(n, &mut rng);
            let (script, _) = stabreduce::reduce_state(&psi).map_err(|e| format!("n={n} #{i}: {e}"))?;
            let r = stabreduce::verify_script(&psi, &script).map_err(|e| format!("n={n} #{i}: {e}"))?;
            ensure(r.probability > 0.0, format!("n={n} #{i}: zero probability"))?;
            ensure(
                script.measurement_count() == n - 1,
                format!("n={n} #{i}: {} measurements", script.measurement_count()),
            )?;
            ensure(
                r.final_bloch.max_pauli_expectation() < 1.0 - 1e-6,
                format!("n={n} #{i}: final qubit is a Pauli eigenstate"),
            )?;
        }
        for i in 0..200 {
            let psi = stabreduce::random_stabilizer_state(n, &mut rng);
            let w = stabreduce::is_stabilizer_state(&psi).map_err(|e| e.to_string())?;
            ensure(w.is_some(), format!("n={n} #{i}: stabilizer state not detected"))?;
        }
    }
    let t = within(start, Duration::from_secs(120), "reductions")?;
    Ok(format!("800 reductions and 800 detections in {t:?}"))
}

fn criterion_8() -> Outcome {
    let steane = distillation_map(&steane_s()).map_err(|e| e.to_string())?;
    let pure = analysis::fixed_points(&steane)
        .into_iter()
        .find(|f| (f.x_star - FRAC_1_SQRT_2).abs() < 1e-12)
        .ok_or("pure state is not a fixed point")?;
    ensure((pure.derivative - 7.0 / 9.0).abs() < 1e-9, format!("f'(1/sqrt 2) = {}", pure.derivative))?;
    let exact = analysis::map_derivative_at_pure(&steane).ok_or("no exact derivative")?;
    ensure(exact == BigRational::new(7.into(), 9.into()), format!("exact f'(1/sqrt 2) = {exact}"))?;
    let p = 1e-4;
    let ratio = knownmaps::bk15_pout(p).map_err(|e| e.to_string())? / p.powi(3);
    ensure((ratio / 35.0 - 1.0).abs() < 0.01, format!("bk15/p^3 = {ratio}"))?;
    Ok(format!("Steane f'(1/sqrt 2) = {exact}; bk15(1e-4)/p^3 = {ratio:.4}"))
}

fn criterion_9() -> Outcome {
    let table = pair_weight_table(&rm15_s()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for p in distill::linear_grid(0.0, 0.5, 1000) {
        let (engine, _) = distill::a_axis_error_map(&table, p).map_err(|e| e.to_string())?;
        let closed = knownmaps::bk15_pout(p).map_err(|e| e.to_string())?;
        worst = worst.max((engine - closed).abs());
    }
    ensure(worst < 1e-10, format!("max deviation {worst:e}"))?;
    Ok(format!("rm15 engine matches closed form on 1000 points, max deviation {worst:.2e}"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        let v = BlochVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if !v.is_physical() {
            continue;
        }
        let r = classify_region(&v).map_err(|e| e.to_string())?;
        ensure(!(r.simulable && (r.h_new || r.h_bk || r.t)), format!("{v} simulable and distillable"))?;
    }
    let mut pure = 0;
    while pure < 10_000 {
        let g: [f64; 3] = [
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
        ];
        let nrm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        let v = BlochVector::new(g[0] / nrm, g[1] / nrm, g[2] / nrm);
        if v.max_pauli_expectation() > 1.0 - 1e-12 {
            continue;
        }
        pure += 1;
        let r = classify_region(&v).map_err(|e| e.to_string())?;
        ensure(r.label == RegionLabel::HDistillableNew, format!("pure {v} classified {}", r.label))?;
    }
    Ok("simulable never distillable; 10000 pure non-Pauli states are H_DISTILLABLE_NEW".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Steane map exactness", criterion_1),
        ("Golay weight tables", criterion_2),
        ("Golay map exactness", criterion_3),
        ("thresholds and fixed points", criterion_4),
        ("oracle equivalence", criterion_5),
        ("identity and stability sums", criterion_6),
        ("stabilizer reduction", criterion_7),
        ("small-p behaviour", criterion_8),
        ("rm15 reproduces the 15-qubit map", criterion_9),
        ("region classification consistency", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
