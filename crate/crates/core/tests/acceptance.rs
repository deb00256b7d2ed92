//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use common::{quadratic_monomials, random_affine, random_dense, random_multigraph, random_quadratic};
use expsum::dichotomy::{
    a_star_matrix, bp_matrix, classify_s, cor51_hypergraph, cor51_matrix, gadget_hp, gadget_star, matrix_from_h,
    orthogonality_violation, replace_edges, to_complex, Witness, DEFAULT_TOL,
};
use expsum::gauss::gauss_sum;
use expsum::num::roots_table;
use expsum::oracle::{brute_counts, brute_partition, DEFAULT_BUDGET};
use expsum::polyring::{affine_substitute, h_type_expand, parse_poly, Multigraph, QuadraticPoly, SparsePoly};
use expsum::solver::{crt_split_eval, z_eval, z_eval_quadratic, z_mod2};
use expsum::{Complex64, ExponentMatrix, Outcome, SymbolicValue};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type CriterionResult = Result<String, String>;
type Criterion = (&'static str, fn() -> CriterionResult);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn approx(v: &SymbolicValue) -> Complex64 {
    v.approx().complex.expect("value fits in f64")
}

fn bi(x: u64) -> BigInt {
    BigInt::from(x)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss_table() -> CriterionResult {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for b in 1..=512u64 {
        let roots = roots_table::<f64>(b);
        for a in 1..b.max(2) {
            if a.gcd(&b) != 1 {
                continue;
            }
            let direct: Complex64 = (0..b).map(|x| roots[(a * x % b * x % b) as usize]).sum();
            let v = gauss_sum(&bi(a), &bi(b)).map_err(|e| e.to_string())?;
            let err = (approx(&v) - direct).norm();
            worst = worst.max(err);
            ensure(err <= 1e-8, || format!("G({a}, {b}) = {v}, direct sum {direct}, error {err:e}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs, max error {worst:.1e}"))
}

fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

fn gauss_sign() -> CriterionResult {
    // G(1, 2) = 0; the sign statement concerns odd primes.
    let primes: Vec<u64> = primes_upto(499).into_iter().filter(|&p| p > 2).collect();
    for &p in &primes {
        let v = gauss_sum(&BigInt::one(), &bi(p)).map_err(|e| e.to_string())?;
        let t = v.as_term().ok_or_else(|| format!("G(1, {p}) is zero"))?;
        let phase = if p % 4 == 1 { Ratio::zero() } else { Ratio::new(BigUint::one(), BigUint::from(4u32)) };
        ensure(t.coeff().is_one() && t.radicand() == &BigUint::from(p) && t.phase() == &phase, || {
            format!("G(1, {p}) = {v}")
        })?;
    }
    Ok(format!("{} odd primes", primes.len()))
}

fn solver_vs_oracle() -> CriterionResult {
    let mut r = rng(3);
    let mut count = 0;
    for n_mod in [2u64, 3, 4, 5, 6, 7, 8, 9, 12, 16, 25, 27, 30] {
        for _ in 0..400 {
            let n = r.random_range(1..=4usize);
            let f = random_quadratic(&mut r, n_mod, n);
            let got = approx(&z_eval(&f).map_err(|e| e.to_string())?);
            let want: Complex64 = brute_counts(&f, DEFAULT_BUDGET).map_err(|e| e.to_string())?.value();
            let tol = 1e-6 * (n_mod as f64).powf(n as f64 / 2.0);
            ensure((got - want).norm() <= tol, || format!("N = {n_mod}, f = {f}: solver {got}, oracle {want}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} polynomials"))
}

fn crt_multiplicativity() -> CriterionResult {
    let mut r = rng(4);
    let pairs: Vec<(u64, u64)> = (2..=25u64)
        .flat_map(|a| (2..=25u64).map(move |b| (a, b)))
        .filter(|&(a, b)| a * b <= 50 && a.gcd(&b) == 1)
        .collect();
    for _ in 0..100 {
        let (n1, n2) = pairs[r.random_range(0..pairs.len())];
        let n = r.random_range(1..=4usize);
        let f = random_quadratic(&mut r, n1 * n2, n);
        let whole = approx(&z_eval(&f).map_err(|e| e.to_string())?);
        let split = approx(&crt_split_eval(&bi(n1), &bi(n2), &f).map_err(|e| e.to_string())?);
        ensure((whole - split).norm() <= 1e-8, || format!("N = {n1}·{n2}, f = {f}: {whole} vs {split}"))?;
    }
    Ok(format!("100 cases over {} coprime pairs", pairs.len()))
}

fn time_eval(f: &QuadraticPoly) -> Duration {
    let start = Instant::now();
    let v = z_eval_quadratic(f);
    let elapsed = start.elapsed();
    std::hint::black_box(v);
    elapsed
}

fn polynomial_time() -> CriterionResult {
    let mut r = rng(5);
    let modulus: BigInt = common::random_bits(&mut r, 512) | (BigInt::one() << 511u32) | BigInt::one();
    let f50 = random_dense(&mut r, &modulus, 50);
    let f100 = random_dense(&mut r, &modulus, 100);
    let best = |f: &QuadraticPoly| (0..3).map(|_| time_eval(f)).min().unwrap();
    let t50 = best(&f50);
    let t100 = best(&f100);
    let ratio = t100.as_secs_f64() / t50.as_secs_f64();
    ensure(t50 < Duration::from_secs(5), || format!("n = 50 took {t50:?}"))?;
    ensure(ratio <= 4.0, || format!("n = 50: {t50:?}, n = 100: {t100:?}, ratio {ratio:.2}"))?;
    Ok(format!("n = 50: {t50:.2?}, n = 100: {t100:.2?}, ratio {ratio:.2}"))
}

fn mod2_exact(f: &SparsePoly) -> Result<(), String> {
    let q = f.as_quadratic().map_err(|e| e.to_string())?;
    let got = z_mod2(&q).map_err(|e| e.to_string())?.to_integer().ok_or("non-integer mod-2 sum")?;
    let want = brute_counts(f, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let want = BigInt::from(want.counts[0]) - BigInt::from(want.counts[1]);
    ensure(got == want, || format!("f = {f}: z_mod2 {got}, enumeration {want}"))
}

fn mod2_base_case() -> CriterionResult {
    let two = bi(2);
    let mut exhaustive = 0u64;
    for n in 0..=4usize {
        let monos = quadratic_monomials(n);
        for mask in 0u64..(1 << monos.len()) {
            let terms = monos.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| (BigInt::one(), e.clone()));
            mod2_exact(&SparsePoly::from_terms(n, &two, terms).unwrap())?;
            exhaustive += 1;
        }
    }
    let mut r = rng(6);
    for _ in 0..200 {
        mod2_exact(&random_quadratic(&mut r, 2, 10))?;
    }
    Ok(format!("{exhaustive} exhaustive + 200 random (n = 10)"))
}

fn symmetric_matrices(m: usize, order: u64) -> Vec<ExponentMatrix> {
    let slots: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let total = order.pow(slots.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut e = vec![vec![0u64; m]; m];
            for &(i, j) in &slots {
                e[i][j] = code % order;
                e[j][i] = code % order;
                code /= order;
            }
            ExponentMatrix::new(order, e).unwrap()
        })
        .collect()
}

fn small_multigraphs() -> Vec<Multigraph> {
    let mut out = Vec::new();
    for nverts in 1..=3usize {
        let pairs: Vec<(usize, usize)> = (0..nverts).flat_map(|u| (u + 1..nverts).map(move |v| (u, v))).collect();
        out.push(Multigraph::new(nverts));
        for (k, &(u, v)) in pairs.iter().enumerate() {
            let mut g = Multigraph::new(nverts);
            g.add_edge(u, v, 1).unwrap();
            out.push(g);
            for &(x, y) in &pairs[k..] {
                let mut g = Multigraph::new(nverts);
                g.add_edge(u, v, 1).unwrap();
                g.add_edge(x, y, 1).unwrap();
                out.push(g);
            }
        }
    }
    out
}

fn rel_close(a: Complex64, b: Complex64, rel: f64) -> bool {
    let scale = a.norm().max(b.norm());
    (a - b).norm() <= rel * scale || (a - b).norm() <= 1e-9
}

fn gadget_identities() -> CriterionResult {
    let graphs = small_multigraphs();
    let mut cases = 0;
    for order in 2..=3u64 {
        let star = gadget_star(order).map_err(|e| e.to_string())?;
        let hp = gadget_hp(1, order).map_err(|e| e.to_string())?;
        let g_star: Vec<Multigraph> = graphs.iter().map(|g| replace_edges(g, &star)).collect();
        let g_hp: Vec<Multigraph> = graphs.iter().map(|g| replace_edges(g, &hp)).collect();
        for m in 1..=3usize {
            for a in symmetric_matrices(m, order) {
                let entries = a.entries::<f64>();
                let a_star = to_complex(&a_star_matrix::<f64>(&a));
                let b1 = to_complex(&bp_matrix::<f64>(&a, 1));
                for (k, g) in graphs.iter().enumerate() {
                    let lhs: Complex64 = brute_partition(&a_star, g, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                    let rhs: Complex64 = brute_partition(&entries, &g_star[k], DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                    ensure(rel_close(lhs, rhs, 1e-6), || {
                        format!("A* identity: A = {:?} (M = {order}), G = {}: {lhs} vs {rhs}", a.exponents(), g.to_text())
                    })?;
                    let lhs: Complex64 = brute_partition(&b1, g, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                    let rhs: Complex64 = brute_partition(&entries, &g_hp[k], DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                    ensure(rel_close(lhs, rhs, 1e-6), || {
                        format!("B[1] identity: A = {:?} (M = {order}), G = {}: {lhs} vs {rhs}", a.exponents(), g.to_text())
                    })?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} (A, G) pairs, both identities"))
}

fn fourier_bp() -> CriterionResult {
    for m in 2..=5usize {
        for p in 1..=2u32 {
            let want = (m as f64).powi(2 * p as i32 + 1);
            for (i, row) in bp_matrix::<f64>(&ExponentMatrix::fourier(m), p).iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    ensure((x - want).abs() <= 1e-6 * want, || format!("m = {m}, p = {p}: B[{i}][{j}] = {x}, want {want}"))?;
                }
            }
        }
    }
    Ok("m in 2..=5, p in 1..=2".into())
}

fn classifier_ground_truth() -> CriterionResult {
    let poly = |text: &str, q: u64| parse_poly(text, &bi(q), 2).map_err(|e| e.to_string());
    for q in [3u64, 5, 7, 8, 9, 16, 27] {
        let v = classify_s(q, &poly("x1*x2 + x1^2*x2^2", q)?, DEFAULT_TOL).map_err(|e| e.to_string())?;
        ensure(v.outcome == Outcome::Hard, || format!("h3 at q = {q}: {:?} ({})", v.outcome, v.witness))?;
    }
    let v = classify_s(2, &poly("x1*x2", 2)?, DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure(v.outcome == Outcome::TractableInClassC, || format!("x1*x2 at q = 2: {:?}", v.outcome))?;
    for q in [3u64, 5, 8, 16] {
        let a = matrix_from_h(q, &poly("x1^2*x2", q)?, true).map_err(|e| e.to_string())?;
        let w = orthogonality_violation(&a, DEFAULT_TOL);
        ensure(matches!(w, Some(Witness::DependentNorOrthogonal { .. })), || format!("h2 at q = {q}: no witness"))?;
    }
    Ok("h3 Hard for 7 moduli, Hadamard tractable, h2 witnesses for 4 moduli".into())
}

fn cubic_template_identity() -> CriterionResult {
    let mut r = rng(10);
    for q in [2u64, 3, 4] {
        let template = parse_poly("x1*x2*x3", &bi(q), 3).map_err(|e| e.to_string())?;
        let a = cor51_matrix::<f64>(q).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let nverts = r.random_range(1..=3usize);
            let edges = if nverts < 2 { 0 } else { r.random_range(0..=3usize) };
            let g = random_multigraph(&mut r, nverts, edges);
            let f = h_type_expand(&template, &cor51_hypergraph(&g), &bi(q)).map_err(|e| e.to_string())?;
            let lhs: Complex64 = brute_partition(&a, &g, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let rhs: Complex64 = brute_counts(&f, DEFAULT_BUDGET).map_err(|e| e.to_string())?.value();
            ensure((lhs - rhs).norm() <= 1e-6, || format!("q = {q}, G = {}: {lhs} vs {rhs}", g.to_text()))?;
        }
    }
    Ok("60 multigraphs".into())
}

fn affine_invariance() -> CriterionResult {
    let mut r = rng(11);
    for _ in 0..100 {
        let modulus = r.random_range(2..=25u64);
        let n = r.random_range(1..=3usize);
        let f = random_quadratic(&mut r, modulus, n);
        let (t, shift) = random_affine(&mut r, modulus, n);
        let g = affine_substitute(&f, &t, &shift).map_err(|e| e.to_string())?;
        let lhs = approx(&z_eval(&f).map_err(|e| e.to_string())?);
        let rhs = approx(&z_eval(&g).map_err(|e| e.to_string())?);
        ensure((lhs - rhs).norm() <= 1e-8, || format!("N = {modulus}, f = {f}, f∘T = {g}: {lhs} vs {rhs}"))?;
    }
    Ok("100 transforms".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("gauss-sum table, b <= 512", gauss_table),
        ("gauss sign for odd primes <= 499", gauss_sign),
        ("solver matches oracle", solver_vs_oracle),
        ("CRT multiplicativity", crt_multiplicativity),
        ("polynomial-time contract", polynomial_time),
        ("mod-2 base case", mod2_base_case),
        ("gadget identities", gadget_identities),
        ("Fourier B[p] entries", fourier_bp),
        ("classifier ground truth", classifier_ground_truth),
        ("cubic-template reduction identity", cubic_template_identity),
        ("affine invariance", affine_invariance),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({elapsed:.2?})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {detail} ({elapsed:.2?})", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
