//! Exact evaluation of `Z(N, f) = Σ_{x ∈ Z_N^n} ω_N^{f(x)}` for quadratic `f`.
//!
//! The evaluation runs on an explicit work list. Every step either removes a
//! variable, shrinks the modulus, or splits it into coprime parts, and
//! multiplies the running result by a closed-form factor (a root of unity,
//! a Gauss sum, an integer, or `1/2`). No factorization of `N` is needed.
//!
//! Odd moduli: coefficients are tested with
//! [`coprime_split`](crate::ntheory::coprime_split) in the order diagonal,
//! cross, linear. A split sends both coprime parts back to the work list;
//! a coefficient coprime to `N` triggers square completion (possibly after
//! the change of variables `x_i = y₁ + y₂`, `x_j = y₁ − y₂`); a linear
//! coefficient coprime to `N` while every quadratic coefficient is divisible
//! by all primes of `N` makes the sum vanish; otherwise all coefficients
//! share the factor `d = gcd(N, coefficients)` and
//! `Z(N, f) = d^n · Z(N/d, f/d)`.
//!
//! Powers of two: a substitution makes every cross and linear coefficient
//! even (at the price of a factor `1/2`), after which either an odd diagonal
//! is completed to a square or everything is halved together with the
//! modulus. Modulus 2 is handled by pairing variables.

use crate::cyclovalue::SymbolicValue;
use crate::cyclovalue::signum_value;
use crate::gauss::{gauss_g1, gauss_sum};
use crate::ntheory::jacobi;
use std::collections::HashMap;
use crate::ntheory::{coprime_split, ext_gcd, mod_inverse, split_two_power, CoprimeSplit};
use crate::polyring::{PolyError, QuadraticPoly, SparsePoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

type Result<T> = std::result::Result<T, SolverError>;

/// `Z(N, f)` with `N = f.modulus()`.
pub fn z_eval(f: &SparsePoly) -> Result<SymbolicValue> {
    Ok(Engine::run(f.as_quadratic()?))
}

/// `Z(N, f)` for a polynomial already in dense quadratic form.
pub fn z_eval_quadratic(f: &QuadraticPoly) -> SymbolicValue {
    Engine::run(f.clone())
}

/// `Z(N₁N₂, f) = Z(N₁, a·f) · Z(N₂, b·f)` where `b·N₁ + a·N₂ = 1`.
pub fn crt_split_eval(n1: &BigInt, n2: &BigInt, f: &SparsePoly) -> Result<SymbolicValue> {
    let one = BigInt::one();
    if n1 <= &one || n2 <= &one {
        return Err(SolverError::InvalidInput(format!("CRT factors must exceed 1, got {n1} and {n2}")));
    }
    if f.modulus() != &(n1 * n2) {
        return Err(SolverError::InvalidInput(format!(
            "polynomial modulus {} is not {n1}·{n2}",
            f.modulus()
        )));
    }
    let (g, b, a) = ext_gcd(n1, n2).map_err(|e| SolverError::InvalidInput(e.to_string()))?;
    if !g.is_one() {
        return Err(SolverError::InvalidInput(format!("{n1} and {n2} are not coprime")));
    }
    let first = z_eval(&f.scalar_retarget(&a, n1)?)?;
    let second = z_eval(&f.scalar_retarget(&b, n2)?)?;
    Ok(first.mul(&second))
}

/// `Z(N, f)` for odd `N >= 3`.
pub fn z_odd(f: &QuadraticPoly) -> Result<SymbolicValue> {
    let n = f.modulus();
    if n.is_even() || n < &BigInt::from(3) {
        return Err(SolverError::InvalidInput(format!("z_odd needs an odd modulus >= 3, got {n}")));
    }
    Ok(Engine::run(f.clone()))
}

/// `Z(2^k, f)` for `k >= 1`.
pub fn z_pow2(f: &QuadraticPoly) -> Result<SymbolicValue> {
    let n = f.modulus();
    let (k, odd) = split_two_power(n);
    if k == 0 || !odd.is_one() {
        return Err(SolverError::InvalidInput(format!("z_pow2 needs a modulus 2^k with k >= 1, got {n}")));
    }
    Ok(Engine::run(f.clone()))
}

/// `Σ_{x ∈ {0,1}^n} (−1)^{f(x)}`, always `0` or `±2^s`.
pub fn z_mod2(f: &QuadraticPoly) -> Result<SymbolicValue> {
    if f.modulus() != &BigInt::from(2) {
        return Err(SolverError::InvalidInput(format!("z_mod2 needs modulus 2, got {}", f.modulus())));
    }
    Ok(SymbolicValue::from_integer(&mod2_sum(f)))
}

struct Engine {
    value: SymbolicValue,
    tasks: Vec<QuadraticPoly>,
    steps: u64,
    step_limit: u64,
    /// `G(1, N)` per odd modulus; building it reduces `√N` by trial division.
    g1_cache: HashMap<BigInt, SymbolicValue>,
}

impl Engine {
    fn run(f: QuadraticPoly) -> SymbolicValue {
        let bits = f.modulus.bits();
        let n = f.nvars as u64;
        let step_limit = (bits + 2).saturating_mul(n + 2).saturating_mul(n + bits + 4);
        let mut engine = Engine { value: SymbolicValue::one(), tasks: vec![f], steps: 0, step_limit, g1_cache: HashMap::new() };
        while let Some(task) = engine.tasks.pop() {
            engine.steps += 1;
            assert!(engine.steps <= engine.step_limit, "solver exceeded its step bound");
            engine.step(task);
            if engine.value.is_zero() {
                return SymbolicValue::Zero;
            }
        }
        if let Some(t) = engine.value.as_term() {
            assert!(t.coeff().is_integer(), "non-integral coefficient in final value {}", engine.value);
        }
        engine.value
    }

    fn times(&mut self, factor: &SymbolicValue) {
        self.value = self.value.mul(factor);
    }

    fn times_integer_pow(&mut self, base: &BigInt, e: usize) {
        self.times(&SymbolicValue::from_integer(&base.pow(e as u32)));
    }

    fn strip_constant(&mut self, f: &mut QuadraticPoly) {
        if !f.constant.is_zero() {
            let m = f.modulus.magnitude();
            self.times(&SymbolicValue::root_of_unity(&f.constant, m));
            f.constant = BigInt::zero();
        }
    }

    fn step(&mut self, mut f: QuadraticPoly) {
        self.strip_constant(&mut f);
        if f.modulus.is_one() || f.nvars == 0 {
            return;
        }
        let (k, odd) = split_two_power(&f.modulus);
        if k == 0 {
            return self.odd_step(f);
        }
        reduce(&mut f);
        if !odd.is_one() {
            self.split(f, BigInt::one() << k, odd);
        } else if k == 1 {
            self.times(&SymbolicValue::from_integer(&mod2_sum(&f)));
        } else {
            self.pow2_step(f);
        }
    }

    fn split(&mut self, f: QuadraticPoly, n1: BigInt, n2: BigInt) {
        let (_, b, a) = ext_gcd(&n1, &n2).expect("moduli are positive");
        self.tasks.push(retarget(&f, &a, &n1));
        self.tasks.push(retarget(&f, &b, &n2));
    }

    fn odd_step(&mut self, mut f: QuadraticPoly) {
        let n = f.modulus.clone();
        let nv = f.nvars;
        for i in 0..nv {
            normalize(&mut f.quad[i][i], &n);
            if f.quad[i][i].is_zero() {
                continue;
            }
            match coprime_split(&n, &f.quad[i][i]).expect("odd modulus >= 3") {
                CoprimeSplit::Split(a, b) => return self.split(f, a, b),
                CoprimeSplit::Coprime => return self.complete_square_odd(f, i),
                CoprimeSplit::AllFactors => {}
            }
        }
        for i in 0..nv {
            for j in i + 1..nv {
                normalize(&mut f.quad[i][j], &n);
                if f.quad[i][j].is_zero() {
                    continue;
                }
                match coprime_split(&n, &f.quad[i][j]).expect("odd modulus >= 3") {
                    CoprimeSplit::Split(a, b) => return self.split(f, a, b),
                    CoprimeSplit::Coprime => {
                        rotate_pair(&mut f, i, j);
                        return self.complete_square_odd(f, i);
                    }
                    CoprimeSplit::AllFactors => {}
                }
            }
        }
        for i in 0..nv {
            normalize(&mut f.linear[i], &n);
            if f.linear[i].is_zero() {
                continue;
            }
            match coprime_split(&n, &f.linear[i]).expect("odd modulus >= 3") {
                CoprimeSplit::Split(a, b) => return self.split(f, a, b),
                // Shifting x_i by N/p for any prime p of N leaves the
                // quadratic part fixed and rotates the sum by a nontrivial
                // p-th root of unity.
                CoprimeSplit::Coprime => {
                    self.value = SymbolicValue::Zero;
                    return;
                }
                CoprimeSplit::AllFactors => {}
            }
        }
        self.divide_common_factor(f);
    }

    /// Every coefficient shares the factor `d = gcd(N, coefficients) > 1`.
    fn divide_common_factor(&mut self, mut f: QuadraticPoly) {
        reduce(&mut f);
        let n = f.modulus.clone();
        let mut d = n.clone();
        for c in f.quad.iter().flatten().chain(f.linear.iter()) {
            if d.is_one() {
                break;
            }
            d = d.gcd(c);
        }
        assert!(!d.is_one(), "no common factor with modulus {n}");
        self.times_integer_pow(&d, f.nvars);
        if d == n {
            return;
        }
        for c in f.quad.iter_mut().flatten().chain(f.linear.iter_mut()) {
            *c = &*c / &d;
        }
        f.modulus = n / d;
        self.tasks.push(f);
    }

    /// Odd `N`, `c = c_{ii}` coprime to `N`:
    /// `x_i ↦ x_i − (2c)^{-1}·L` turns `c·x_i² + L·x_i` into `c·x_i² − L²/(4c)`.
    fn complete_square_odd(&mut self, mut f: QuadraticPoly, i: usize) {
        let n = f.modulus.clone();
        let c = f.quad[i][i].clone();
        let k = mod_inverse(&(&c * 4u32), &n).expect("4c is invertible for odd N");
        for j in 0..f.nvars {
            normalize(&mut f.quad[j.min(i)][j.max(i)], &n);
        }
        normalize(&mut f.linear[i], &n);
        let (l, l0) = companion_form(&f, i);
        let rest = eliminate(f, i, &k, &l, &l0);
        let g1 = self
            .g1_cache
            .entry(n.clone())
            .or_insert_with(|| gauss_g1(&n).expect("positive modulus"))
            .clone();
        let sign = jacobi(&c, &n).expect("odd modulus");
        self.times(&signum_value(sign).mul(&g1));
        self.tasks.push(rest);
    }

    fn pow2_step(&mut self, mut f: QuadraticPoly) {
        let q = f.modulus.clone();
        let nv = f.nvars;
        let mut t = 0;
        while t < nv {
            if f.linear[t].is_odd() || f.quad[t][t + 1..].iter().any(|c| c.is_odd()) {
                let Some(l) = (t + 1..nv).find(|&j| f.quad[t][j].is_odd()) else {
                    // x_t ↦ x_t + q/2 flips the sign of every term.
                    self.value = SymbolicValue::Zero;
                    return;
                };
                normalize_pair(&mut f, t, l);
                self.times(&SymbolicValue::one().scale(&BigInt::one(), &BigInt::from(2)).expect("nonzero"));
            }
            t += 1;
        }
        reduce(&mut f);
        self.strip_constant(&mut f);
        match (0..nv).find(|&i| f.quad[i][i].is_odd()) {
            Some(i) => {
                let c = f.quad[i][i].clone();
                let k = mod_inverse(&c, &q).expect("odd c is invertible");
                let (l, l0) = companion_form(&f, i);
                let half: Vec<BigInt> = l.iter().map(|a| a / 2u32).collect();
                self.times(&gauss_sum(&c, &q).expect("odd c"));
                self.tasks.push(eliminate(f, i, &k, &half, &(l0 / 2u32)));
            }
            None => {
                self.times_integer_pow(&BigInt::from(2), nv);
                for c in f.quad.iter_mut().flatten().chain(f.linear.iter_mut()) {
                    *c = &*c / 2;
                }
                f.modulus = q / 2;
                self.tasks.push(f);
            }
        }
    }
}

fn normalize(c: &mut BigInt, n: &BigInt) {
    if c.is_negative() || &*c >= n {
        *c = c.mod_floor(n);
    }
}

/// Brings every coefficient into `[0, N)`. The odd-modulus path lets the
/// entries it does not inspect drift outside this range and reduces them
/// on demand.
fn reduce(f: &mut QuadraticPoly) {
    let n = f.modulus.clone();
    for c in f.quad.iter_mut().flatten().chain(f.linear.iter_mut()) {
        normalize(c, &n);
    }
    normalize(&mut f.constant, &n);
}

fn retarget(f: &QuadraticPoly, a: &BigInt, modulus: &BigInt) -> QuadraticPoly {
    let scale = |c: &BigInt| (c * a).mod_floor(modulus);
    QuadraticPoly {
        nvars: f.nvars,
        modulus: modulus.clone(),
        quad: f.quad.iter().map(|row| row.iter().map(scale).collect()).collect(),
        linear: f.linear.iter().map(scale).collect(),
        constant: scale(&f.constant),
    }
}

/// The linear form `L = Σ_{j≠i} c_{ij} x_j + c_i` multiplying `x_i`, as
/// `(coefficients with a zero at i, constant)`.
fn companion_form(f: &QuadraticPoly, i: usize) -> (Vec<BigInt>, BigInt) {
    let coeffs = (0..f.nvars)
        .map(|j| if j == i { BigInt::zero() } else { f.quad(i, j).clone() })
        .collect();
    (coeffs, f.linear[i].clone())
}

/// Replaces `x_v` by `a·x_v + Σ_j b_j x_j + b₀` (with `b_v = 0`).
fn substitute(f: &mut QuadraticPoly, v: usize, a: &BigInt, b: &[BigInt], b0: &BigInt) {
    let n = f.nvars;
    let modulus = f.modulus.clone();
    let cvv = f.quad[v][v].clone();
    let (p, p0) = companion_form(f, v);
    let b: Vec<BigInt> = b.iter().map(|x| x.mod_floor(&modulus)).collect();
    let b0 = &b0.mod_floor(&modulus);
    // Terms of x_v in the new variable.
    let two_a_cvv = (a * &cvv * 2u32).mod_floor(&modulus);
    for j in (0..n).filter(|&j| j != v) {
        let c = (&two_a_cvv * &b[j] + a * &p[j]).mod_floor(&modulus);
        f.set_quad(v, j, &c);
    }
    f.linear[v] = (&two_a_cvv * b0 + a * &p0).mod_floor(&modulus);
    f.quad[v][v] = (&cvv * a * a).mod_floor(&modulus);
    // Remaining part: c_vv·B² + P·B with B = Σ b_j x_j + b₀, P = Σ p_j x_j + p₀.
    let w: Vec<BigInt> = (0..n).map(|j| (&cvv * &b[j] + &p[j]).mod_floor(&modulus)).collect();
    let w0 = (&cvv * b0 + &p0).mod_floor(&modulus);
    for j in (0..n).filter(|&j| j != v) {
        if b[j].is_zero() && w[j].is_zero() {
            continue;
        }
        for k in (j..n).filter(|&k| k != v) {
            let c = if j == k { &b[j] * &w[j] } else { &b[j] * &w[k] + &b[k] * &w[j] };
            if !c.is_zero() {
                f.quad[j][k] = (&f.quad[j][k] + c).mod_floor(&modulus);
            }
        }
        f.linear[j] = (&f.linear[j] + &b[j] * &w0 + b0 * &w[j]).mod_floor(&modulus);
    }
    f.constant = (&f.constant + b0 * &w0).mod_floor(&modulus);
}

/// Given `f = c·x_i² + L·x_i + R` with `L = Σ l_j x_j + l₀`, returns
/// `R − k·L²` in the remaining variables. Shifting `x_i` by a multiple of `L`
/// leaves `c·x_i²` plus this polynomial, for `k = (4c)^{-1}` (odd modulus)
/// or `k = c^{-1}` with `L` replaced by `L/2` (even modulus).
fn eliminate(mut f: QuadraticPoly, i: usize, k: &BigInt, l: &[BigInt], l0: &BigInt) -> QuadraticPoly {
    let m = f.modulus.clone();
    let n = f.nvars;
    let u: Vec<BigInt> = (0..n).map(|j| if j == i { BigInt::zero() } else { (k * &l[j]).mod_floor(&m) }).collect();
    for j in (0..n).filter(|&j| j != i && !u[j].is_zero()) {
        let u2 = &u[j] * 2u32;
        f.quad[j][j] -= &u[j] * &l[j];
        for h in (j + 1..n).filter(|&h| h != i && !l[h].is_zero()) {
            f.quad[j][h] -= &u2 * &l[h];
        }
        f.linear[j] -= &u2 * l0;
    }
    f.constant -= (k * l0).mod_floor(&m) * l0;
    f.quad.remove(i);
    for row in f.quad.iter_mut() {
        row.remove(i);
    }
    f.linear.remove(i);
    f.nvars -= 1;
    f
}

/// `x_i = y₁ + y₂`, `x_j = y₁ − y₂`, a bijection for odd `N`. The new
/// diagonal at `i` is `c_ii + c_jj + c_ij`.
fn rotate_pair(f: &mut QuadraticPoly, i: usize, j: usize) {
    let m = f.modulus.clone();
    let md = |x: BigInt| x.mod_floor(&m);
    let (cii, cjj, cij) = (f.quad[i][i].clone(), f.quad[j][j].clone(), f.quad[i][j].clone());
    for k in (0..f.nvars).filter(|&k| k != i && k != j) {
        let (cik, cjk) = (f.quad(i, k).clone(), f.quad(j, k).clone());
        f.set_quad(i, k, &md(&cik + &cjk));
        f.set_quad(j, k, &md(cik - cjk));
    }
    f.quad[i][i] = md(&cii + &cjj + &cij);
    f.quad[j][j] = md(&cii + &cjj - &cij);
    f.quad[i][j] = md((cii - cjj) * 2);
    let (ci, cj) = (f.linear[i].clone(), f.linear[j].clone());
    f.linear[i] = md(&ci + &cj);
    f.linear[j] = md(ci - cj);
}

/// Modulus `2^k`, `k >= 2`, with `c_{tl}` odd: substitutes
/// `x_l = c_{tl}^{-1}·(2x_l − S)` where `S` collects the rest of the factor
/// multiplying `x_t`. Afterwards `x_t` meets other variables and the linear
/// part only through even coefficients. The substitution hits only the
/// points where the factor of `x_t` is even, each twice; the remaining
/// points cancel in pairs under `x_t ↦ x_t + 2^{k−1}`. Hence the caller
/// multiplies by `1/2`.
fn normalize_pair(f: &mut QuadraticPoly, t: usize, l: usize) {
    let q = f.modulus.clone();
    let alpha = mod_inverse(f.quad(t, l), &q).expect("odd coefficient");
    let (s, s0) = companion_form(f, t);
    let b: Vec<BigInt> = (0..f.nvars)
        .map(|j| if j == t || j == l { BigInt::zero() } else { -(&alpha * &s[j]) })
        .collect();
    substitute(f, l, &(&alpha * 2), &b, &-(&alpha * s0));
}

/// `Σ_{x ∈ {0,1}^n} (−1)^{f(x)}` by repeatedly pairing a cross term
/// `x_u x_v + x_u A + x_v B = (x_u + B)(x_v + A) + AB`.
fn mod2_sum(f: &QuadraticPoly) -> BigInt {
    let n = f.nvars;
    let bit = |c: &BigInt| c.is_odd();
    let mut quad: Vec<Vec<bool>> = vec![vec![false; n]; n];
    let mut lin: Vec<bool> = f.linear.iter().map(bit).collect();
    for i in 0..n {
        lin[i] ^= bit(&f.quad[i][i]);
        for j in i + 1..n {
            quad[i][j] = bit(&f.quad[i][j]);
        }
    }
    let mut constant = bit(&f.constant);
    let mut alive = vec![true; n];
    let mut free = n as u64;
    let mut pairs = 0u64;
    let at = |quad: &Vec<Vec<bool>>, i: usize, j: usize| quad[i.min(j)][i.max(j)];
    loop {
        let cross = (0..n)
            .filter(|&u| alive[u])
            .find_map(|u| (u + 1..n).find(|&v| alive[v] && quad[u][v]).map(|v| (u, v)));
        let Some((u, v)) = cross else { break };
        let others: Vec<usize> = (0..n).filter(|&j| alive[j] && j != u && j != v).collect();
        // A multiplies x_u, B multiplies x_v.
        let a: Vec<(usize, bool)> = others.iter().map(|&j| (j, at(&quad, u, j))).collect();
        let b: Vec<(usize, bool)> = others.iter().map(|&j| (j, at(&quad, v, j))).collect();
        let (a0, b0) = (lin[u], lin[v]);
        for &(j, aj) in &a {
            for &(k, bk) in &b {
                if aj && bk {
                    if j == k {
                        lin[j] ^= true;
                    } else {
                        let (lo, hi) = (j.min(k), j.max(k));
                        quad[lo][hi] ^= true;
                    }
                }
            }
            if aj && b0 {
                lin[j] ^= true;
            }
        }
        for &(k, bk) in &b {
            if bk && a0 {
                lin[k] ^= true;
            }
        }
        constant ^= a0 && b0;
        alive[u] = false;
        alive[v] = false;
        free -= 2;
        pairs += 1;
    }
    if (0..n).any(|i| alive[i] && lin[i]) {
        return BigInt::zero();
    }
    let magnitude = BigInt::one() << (free + pairs) as usize;
    if constant {
        -magnitude
    } else {
        magnitude
    }
}
