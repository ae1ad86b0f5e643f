//! Helpers shared by the integration tests.
#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use qform_core::{PrimePower, QuadraticForm, RandomSource, RingElem};

pub fn pp(p: u64, k: u32) -> PrimePower {
    PrimePower::from_u64(p, k).unwrap()
}

pub fn form(rows: &[&[i64]]) -> QuadraticForm {
    QuadraticForm::from_i64(rows).unwrap()
}

/// Symmetric form over `Z/p^k` whose entries have random `p`-orders.
pub fn random_form(rng: &mut RandomSource, n: usize, p: u64, k: u32) -> QuadraticForm {
    let q = p.pow(k);
    let mut rows = vec![vec![BigInt::from(0); n]; n];
    for i in 0..n {
        for j in i..n {
            let e = rng.uniform_u64(u64::from(k) + 1) as u32;
            let v = rng.uniform_u64(q) * p.pow(e) % q;
            rows[i][j] = BigInt::from(v);
            rows[j][i] = BigInt::from(v);
        }
    }
    QuadraticForm::from_rows(rows).unwrap()
}

pub fn to_u64s(x: &[RingElem]) -> Vec<u64> {
    x.iter().map(|e| e.value.to_u64().unwrap()).collect()
}

pub fn big_to_u64s(x: &[BigUint]) -> Vec<u64> {
    x.iter().map(|e| e.to_u64().unwrap()).collect()
}

/// `x'Qx mod q` with plain integers.
pub fn eval_mod(q: &QuadraticForm, x: &[u64], modulus: u64) -> u64 {
    let n = q.dim();
    let mut acc: i128 = 0;
    for i in 0..n {
        for j in 0..n {
            let e = q.entry(i, j).to_i128().unwrap();
            acc += e * x[i] as i128 * x[j] as i128;
        }
    }
    acc.rem_euclid(modulus as i128) as u64
}
