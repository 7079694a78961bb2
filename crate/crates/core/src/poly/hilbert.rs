//! Hilbert series numerators and independent sets of monomial ideals.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{divides, monomial_degree, Monomial};

fn minimalize(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort_by_key(|m| monomial_degree(m));
    gens.dedup();
    let mut out: Vec<Monomial> = Vec::new();
    for g in gens {
        if !out.iter().any(|h| divides(h, &g)) {
            out.push(g);
        }
    }
    out
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect()
}

fn one_minus_t_pow(d: u64) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); d as usize + 1];
    v[0] += 1;
    v[d as usize] -= 1;
    v
}

/// Numerator `N(t)` of the Hilbert series `N(t)/(1-t)^n` of `k[x]/I` for a
/// monomial ideal `I`.
pub(crate) fn numerator(gens: &[Monomial]) -> Vec<BigInt> {
    let gens = minimalize(gens.to_vec());
    if gens.is_empty() {
        return vec![BigInt::one()];
    }
    if gens.iter().any(|g| g.iter().all(|&e| e == 0)) {
        return vec![BigInt::zero()];
    }
    let pairwise_coprime = gens.iter().enumerate().all(|(i, a)| {
        gens[i + 1..]
            .iter()
            .all(|b| a.iter().zip(b).all(|(&x, &y)| x == 0 || y == 0))
    });
    if pairwise_coprime {
        return gens
            .iter()
            .fold(vec![BigInt::one()], |acc, g| poly_mul(&acc, &one_minus_t_pow(monomial_degree(g))));
    }
    let pivot = gens.last().unwrap().clone();
    let rest: Vec<Monomial> = gens[..gens.len() - 1].to_vec();
    let colon: Vec<Monomial> = rest
        .iter()
        .map(|g| g.iter().zip(&pivot).map(|(&a, &b)| a.saturating_sub(b)).collect())
        .collect();
    let n_rest = numerator(&rest);
    let n_colon = numerator(&colon);
    let mut shifted = vec![BigInt::zero(); monomial_degree(&pivot) as usize];
    shifted.extend(n_colon);
    let mut out = poly_sub(&n_rest, &shifted);
    while out.len() > 1 && out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

/// Divides out every factor `(1 - t)` and evaluates the quotient at `t = 1`.
pub(crate) fn multiplicity_at_one(num: &[BigInt]) -> BigInt {
    let mut p = num.to_vec();
    if p.iter().all(|c| c.is_zero()) {
        return BigInt::zero();
    }
    loop {
        let at_one: BigInt = p.iter().sum();
        if !at_one.is_zero() {
            return at_one;
        }
        // p(t) = (t - 1) q(t), synthetic division from the top coefficient
        let m = p.len() - 1;
        let mut q = vec![BigInt::zero(); m];
        let mut carry = BigInt::zero();
        for k in (1..=m).rev() {
            carry += &p[k];
            q[k - 1] = carry.clone();
        }
        // (1 - t) q'(t) = p(t) with q' = -q; sign does not matter for zero tests,
        // but keeps the final value positive
        p = q.into_iter().map(|c| -c).collect();
    }
}

/// Size of the largest set of variables containing no support of a generator.
pub(crate) fn max_independent_set(gens: &[Monomial], nvars: usize) -> usize {
    let supports: Vec<Vec<usize>> = minimalize(gens.to_vec())
        .iter()
        .map(|g| (0..nvars).filter(|&i| g[i] > 0).collect())
        .collect();
    // minimal hitting set by branch and bound
    fn search(supports: &[Vec<usize>], chosen: &mut Vec<bool>, count: usize, best: &mut usize) {
        if count >= *best {
            return;
        }
        let unhit = supports.iter().find(|s| !s.iter().any(|&i| chosen[i]));
        let Some(s) = unhit else {
            *best = count;
            return;
        };
        for &i in s {
            chosen[i] = true;
            search(supports, chosen, count + 1, best);
            chosen[i] = false;
        }
    }
    let mut best = nvars + 1;
    search(&supports, &mut vec![false; nvars], 0, &mut best);
    nvars - best.min(nvars)
}
