#![allow(dead_code)]

use expsum::polyring::{Multigraph, QuadraticPoly, SparsePoly};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use rand::{Rng, RngCore};

/// Uniform-ish nonnegative integer with `bits` random bits.
pub fn random_bits(rng: &mut impl RngCore, bits: usize) -> BigInt {
    let mut bytes = vec![0u8; bits.div_ceil(8)];
    rng.fill_bytes(&mut bytes);
    let extra = bytes.len() * 8 - bits;
    if extra > 0 {
        *bytes.last_mut().unwrap() >>= extra;
    }
    BigInt::from_bytes_le(Sign::Plus, &bytes)
}

/// Every monomial of degree at most two in `n` variables.
pub fn quadratic_monomials(n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; n]];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        out.push(e);
    }
    for i in 0..n {
        for j in i..n {
            let mut e = vec![0; n];
            e[i] += 1;
            e[j] += 1;
            out.push(e);
        }
    }
    out
}

/// Quadratic polynomial with every coefficient uniform in `[0, N)`.
pub fn random_quadratic(rng: &mut impl Rng, modulus: u64, n: usize) -> SparsePoly {
    let terms = quadratic_monomials(n).into_iter().map(|e| (BigInt::from(rng.random_range(0..modulus)), e));
    SparsePoly::from_terms(n, &BigInt::from(modulus), terms).unwrap()
}

/// Dense quadratic over a big modulus with coefficients uniform in `[0, N)`.
pub fn random_dense(rng: &mut impl RngCore, modulus: &BigInt, n: usize) -> QuadraticPoly {
    let bits = modulus.bits() as usize + 64;
    let mut f = QuadraticPoly::zero(n, modulus).unwrap();
    for i in 0..n {
        for j in i..n {
            f.set_quad(i, j, &random_bits(rng, bits).mod_floor(modulus));
        }
        f.set_linear(i, &random_bits(rng, bits).mod_floor(modulus));
    }
    f.set_constant(&random_bits(rng, bits).mod_floor(modulus));
    f
}

/// Multigraph on `nverts` vertices with `edges` random non-loop edges.
pub fn random_multigraph(rng: &mut impl Rng, nverts: usize, edges: usize) -> Multigraph {
    let mut g = Multigraph::new(nverts);
    if nverts < 2 {
        return g;
    }
    for _ in 0..edges {
        let u = rng.random_range(0..nverts);
        let v = (u + rng.random_range(1..nverts)) % nverts;
        g.add_edge(u, v, 1).unwrap();
    }
    g
}

/// Determinant of a small integer matrix by cofactor expansion.
pub fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect()).collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

/// Random `n×n` matrix over `Z_N` with unit determinant, and a random shift.
pub fn random_affine(rng: &mut impl Rng, modulus: u64, n: usize) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let big = |x: i64| BigInt::from(x);
    loop {
        let t: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(0..modulus as i64)).collect()).collect();
        if det(&t).rem_euclid(modulus as i64).gcd(&(modulus as i64)) == 1 {
            let shift = (0..n).map(|_| big(rng.random_range(0..modulus as i64))).collect();
            return (t.into_iter().map(|r| r.into_iter().map(big).collect()).collect(), shift);
        }
    }
}
