//! Brute-force reference values: `Z(N, f)` by enumerating `Z_N^n`, and
//! partition functions `Z_A(G)` by enumerating vertex assignments.
//!
//! Everything here is exponential and guarded by an explicit budget on the
//! number of points visited.

use crate::num::{roots_table, Real};
use crate::polyring::{Multigraph, SparsePoly};
use crate::ComplexMatrix;
use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Default cap on the number of enumerated points.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration needs {needed} points, budget is {budget}")]
    Budget { needed: String, budget: u64 },
    #[error("modulus {0} is too large for enumeration")]
    ModulusTooLarge(BigInt),
    #[error("matrix must be square and nonempty")]
    BadMatrix,
    #[error("pin of vertex {vertex} to color {color} is out of range")]
    PinOutOfRange { vertex: usize, color: usize },
}

type Result<T> = std::result::Result<T, OracleError>;

/// `counts[k] = #{x ∈ Z_N^n : f(x) ≡ k (mod N)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountVector {
    pub modulus: u64,
    pub counts: Vec<u64>,
}

impl CountVector {
    /// `Σ_k counts[k] · ω_N^k`.
    pub fn value<T: Real>(&self) -> Complex<T> {
        brute_value(self)
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }
}

fn check_budget(base: u64, exponent: usize, budget: u64) -> Result<u64> {
    let mut points: u128 = 1;
    for _ in 0..exponent {
        points = points.saturating_mul(base as u128);
        if points > budget as u128 {
            let needed = BigInt::from(base).pow(exponent as u32);
            return Err(OracleError::Budget { needed: format!("{base}^{exponent} = {needed}"), budget });
        }
    }
    Ok(points as u64)
}

/// Coefficient and `(variable, exponent)` factors.
type Monomial = (u64, Vec<(usize, u32)>);

/// Exact value distribution of `f` over `Z_N^n`, `N = f.modulus()`.
pub fn brute_counts(f: &SparsePoly, budget: u64) -> Result<CountVector> {
    let n = f.modulus().to_u64().ok_or_else(|| OracleError::ModulusTooLarge(f.modulus().clone()))?;
    let nv = f.nvars();
    check_budget(n, nv, budget)?;
    // Terms grouped by their highest variable, each as (coefficient, [(variable, exponent)]);
    // level 0 holds constants.
    let mut levels: Vec<Vec<Monomial>> = vec![Vec::new(); nv + 1];
    for (c, e) in f.terms() {
        let vars: Vec<(usize, u32)> = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect();
        let level = vars.last().map_or(0, |&(i, _)| i + 1);
        levels[level].push((c.to_u64().expect("reduced coefficient"), vars));
    }
    let level_value = |level: &[Monomial], x: &[u64]| {
        level.iter().fold(0u64, |acc, (c, vars)| {
            let t = vars.iter().fold(*c, |t, &(i, k)| mul_mod(t, pow_mod_u64(x[i], k, n), n));
            add_mod(acc, t, n)
        })
    };
    let mut counts = vec![0u64; n as usize];
    if nv == 0 {
        counts[level_value(&levels[0], &[]) as usize] += 1;
        return Ok(CountVector { modulus: n, counts });
    }
    // partial[k] = contribution of levels 0..=k for the current prefix x[0..k].
    let mut partial = vec![0u64; nv + 1];
    partial[0] = level_value(&levels[0], &[]);
    let mut x = vec![0u64; nv];
    let mut depth = 0;
    loop {
        // Variables at index >= depth are zero.
        while depth < nv {
            partial[depth + 1] = add_mod(partial[depth], level_value(&levels[depth + 1], &x), n);
            depth += 1;
        }
        counts[partial[nv] as usize] += 1;
        // Advance the deepest variable that can still move.
        loop {
            if depth == 0 {
                return Ok(CountVector { modulus: n, counts });
            }
            let i = depth - 1;
            x[i] += 1;
            if x[i] < n {
                partial[depth] = add_mod(partial[i], level_value(&levels[depth], &x), n);
                break;
            }
            x[i] = 0;
            depth -= 1;
        }
    }
}

fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    let (s, over) = a.overflowing_add(b);
    if over || s >= n {
        s.wrapping_sub(n)
    } else {
        s
    }
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    if n <= u32::MAX as u64 {
        a * b % n
    } else {
        (a as u128 * b as u128 % n as u128) as u64
    }
}

fn pow_mod_u64(mut b: u64, mut e: u32, n: u64) -> u64 {
    let mut r = 1 % n;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, n);
        }
        b = mul_mod(b, b, n);
        e >>= 1;
    }
    r
}

/// `Σ_k counts[k] · e^{2πik/N}`.
pub fn brute_value<T: Real>(counts: &CountVector) -> Complex<T> {
    let roots = roots_table::<T>(counts.modulus);
    counts
        .counts
        .iter()
        .zip(roots)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, w)| w * T::from_u64(c).expect("count fits the float type"))
        .fold(Complex::zero(), |a, b| a + b)
}

/// `Z_A(G) = Σ_{ξ : V → [m]} Π_{(u,v) ∈ E} A_{ξ(u), ξ(v)}^{μ(u,v)}`.
pub fn brute_partition<T: Real>(a: &[Vec<Complex<T>>], g: &Multigraph, budget: u64) -> Result<Complex<T>> {
    brute_partition_pinned(a, g, &BTreeMap::new(), budget)
}

/// [`brute_partition`] restricted to assignments with `ξ(v) = pins[v]`.
pub fn brute_partition_pinned<T: Real>(
    a: &[Vec<Complex<T>>],
    g: &Multigraph,
    pins: &BTreeMap<usize, usize>,
    budget: u64,
) -> Result<Complex<T>> {
    let m = a.len();
    if m == 0 || a.iter().any(|row| row.len() != m) {
        return Err(OracleError::BadMatrix);
    }
    for (&vertex, &color) in pins {
        if vertex >= g.nverts() || color >= m {
            return Err(OracleError::PinOutOfRange { vertex, color });
        }
    }
    let free = (0..g.nverts()).filter(|v| !pins.contains_key(v)).count();
    check_budget(m as u64, free, budget)?;

    // Entrywise powers A^μ for every multiplicity that occurs.
    let mut powers: BTreeMap<u64, ComplexMatrix<T>> = BTreeMap::new();
    for (_, _, mult) in g.edges() {
        powers.entry(mult).or_insert_with(|| {
            a.iter().map(|row| row.iter().map(|z| z.powu(mult as u32)).collect()).collect()
        });
    }
    // Each edge is charged when its later endpoint gets a color.
    let mut back_edges: Vec<Vec<(usize, &ComplexMatrix<T>)>> = vec![Vec::new(); g.nverts()];
    for (u, v, mult) in g.edges() {
        back_edges[v].push((u, &powers[&mult]));
    }

    let nv = g.nverts();
    let mut colors = vec![0usize; nv];
    let mut total = Complex::zero();
    let mut prefix = vec![Complex::new(T::one(), T::zero()); nv + 1];
    let mut depth = 0usize;
    let choices = |v: usize| pins.get(&v).map_or((0, m), |&c| (c, c + 1));
    if nv == 0 {
        return Ok(prefix[0]);
    }
    colors[0] = choices(0).0;
    loop {
        let v = depth;
        let mut w = prefix[v];
        for &(u, pw) in &back_edges[v] {
            w = w * pw[colors[u]][colors[v]];
        }
        prefix[v + 1] = w;
        if v + 1 < nv {
            depth += 1;
            colors[depth] = choices(depth).0;
            continue;
        }
        total = total + w;
        // Advance to the next assignment, backtracking as needed.
        loop {
            colors[depth] += 1;
            if colors[depth] < choices(depth).1 {
                break;
            }
            if depth == 0 {
                return Ok(total);
            }
            depth -= 1;
        }
    }
}

/// Point-by-point `Σ_x ω_N^{f(x)}`, evaluating `f` with arbitrary-precision
/// arithmetic. Independent of [`brute_counts`] and much slower.
pub fn direct_sum<T: Real>(f: &SparsePoly, budget: u64) -> Result<Complex<T>> {
    let n = f.modulus().to_u64().ok_or_else(|| OracleError::ModulusTooLarge(f.modulus().clone()))?;
    check_budget(n, f.nvars(), budget)?;
    let nv = f.nvars();
    let mut x = vec![BigInt::zero(); nv];
    let mut total = Complex::zero();
    loop {
        let k = f.eval_point(&x).expect("matching length").to_u64().expect("reduced value");
        total = total + crate::num::cis_turns::<T>(k, n);
        let mut i = 0;
        while i < nv {
            x[i] += 1;
            if x[i].mod_floor(f.modulus()).is_zero() {
                x[i] = BigInt::zero();
                i += 1;
            } else {
                break;
            }
        }
        if i == nv {
            return Ok(total);
        }
    }
}
