//! Square roots modulo `p`, `p^k` (odd `p`) and `2^k`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::modring::{
    inverse_mod, legendre_unit, reduce_mod, split_reduced, Order, PrimePower, RandomSource,
    RETRY_CAP,
};
use crate::{Error, Result};

/// Whether `x^2 ≡ t (mod p^k)` is solvable. Zero is always a square.
pub fn is_square(pp: &PrimePower, t: &BigInt) -> bool {
    let r = pp.reduce(t);
    let (ord, cop) = split_reduced(pp, &r);
    let ord = match ord {
        Order::Infinite => return true,
        Order::Finite(o) => o,
    };
    if ord % 2 == 1 {
        return false;
    }
    if pp.is_two() {
        let prec = u64::from(pp.k()) - ord;
        let m = BigUint::one() << prec.min(3);
        (cop % m).is_one()
    } else {
        legendre_unit(&(cop % pp.p()), pp.p()) == 1
    }
}

/// Both square roots of the unit `t` modulo the odd prime `p`, smaller first.
///
/// Tonelli-Shanks with a random non-residue search; the search gives up after
/// [`RETRY_CAP`] draws with [`Error::Fail`].
pub fn sqrt_unit_mod_p(
    p: &BigUint,
    t: &BigInt,
    rng: &mut RandomSource,
) -> Result<(BigUint, BigUint)> {
    if p.is_even() {
        return Err(Error::Domain("sqrt_unit_mod_p needs an odd prime"));
    }
    let t = reduce_mod(t, p);
    if t.is_zero() {
        return Err(Error::NotAUnit);
    }
    if legendre_unit(&t, p) != 1 {
        return Err(Error::NonResidue);
    }
    let root = tonelli_shanks(&t, p, rng)?;
    let other = p - &root;
    Ok(if root <= other { (root, other) } else { (other, root) })
}

fn tonelli_shanks(t: &BigUint, p: &BigUint, rng: &mut RandomSource) -> Result<BigUint> {
    let p_minus_one = p - 1u8;
    let s = p_minus_one.trailing_zeros().unwrap_or(0);
    let q = &p_minus_one >> s;
    if s == 1 {
        return Ok(t.modpow(&((p + 1u8) >> 2), p));
    }
    let mut z = None;
    let span = p - 2u8;
    for _ in 0..RETRY_CAP {
        let cand = rng.uniform_below(&span) + 2u8;
        if legendre_unit(&cand, p) == -1 {
            z = Some(cand);
            break;
        }
    }
    let z = z.ok_or(Error::Fail)?;

    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut tt = t.modpow(&q, p);
    let mut r = t.modpow(&((&q + 1u8) >> 1), p);
    while !tt.is_one() {
        let mut i = 0u64;
        let mut probe = tt.clone();
        while !probe.is_one() {
            probe = (&probe * &probe) % p;
            i += 1;
        }
        let b = c.modpow(&(BigUint::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        tt = (tt * &c) % p;
        r = (r * b) % p;
    }
    Ok(r)
}

/// Both roots of `x^2 ≡ t (mod p^k)` for odd `p` and a unit residue `t`,
/// lifted from a root modulo `p` with precision doubling each step.
pub fn lift_sqrt_odd(
    pp: &PrimePower,
    t: &BigInt,
    rng: &mut RandomSource,
) -> Result<(BigUint, BigUint)> {
    if pp.is_two() {
        return Err(Error::Domain("lift_sqrt_odd needs an odd prime"));
    }
    let (r0, _) = sqrt_unit_mod_p(pp.p(), t, rng)?;
    let root = lift_root(pp, &pp.reduce(t), r0, 1, pp.k());
    let other = (pp.modulus() - &root) % pp.modulus();
    Ok(if root <= other { (root, other) } else { (other, root) })
}

// Lift `a` with a^2 ≡ t mod p^e to a root modulo p^target.
fn lift_root(pp: &PrimePower, t: &BigUint, mut a: BigUint, mut e: u32, target: u32) -> BigUint {
    while e < target {
        let next = (2 * e).min(target);
        let pe = pp.pow(u64::from(e));
        let modulus = pp.pow(u64::from(next));
        let t_big = BigInt::from(t % &modulus);
        let a_sq = BigInt::from(&a * &a);
        // (t - a^2) is divisible by p^e
        let quotient = (t_big - a_sq) / BigInt::from(pe.clone());
        let inv = inverse_mod(&((&a << 1u8) % &modulus), &modulus)
            .expect("2a is a unit for odd p");
        let b = (reduce_mod(&quotient, &modulus) * inv) % &modulus;
        a = (a + pe * b) % &modulus;
        e = next;
    }
    a % pp.pow(u64::from(target))
}

/// The complete root set of `x^2 ≡ t (mod 2^k)` for odd `t`, sorted ascending.
///
/// One root for `k = 1`, two for `k = 2`, four otherwise.
pub fn sqrt_unit_mod_2k(k: u32, t: &BigInt) -> Result<Vec<BigUint>> {
    if k == 0 {
        return Err(Error::ZeroExponent);
    }
    if t.is_even() {
        return Err(Error::NotAUnit);
    }
    let check = BigUint::one() << k.min(3);
    if !reduce_mod(t, &check).is_one() {
        return Err(Error::NotASquare);
    }
    let modulus = BigUint::one() << k;
    let t = reduce_mod(t, &modulus);
    let mut roots: Vec<BigUint> = match k {
        1 => vec![BigUint::one()],
        2 => vec![BigUint::from(1u8), BigUint::from(3u8)],
        3 => vec![1u8, 3, 5, 7].into_iter().map(BigUint::from).collect(),
        _ => {
            // b is a root modulo 2^j; extend by one digit at a time
            let mut b = BigUint::one();
            for j in 3..k {
                let sq = (&b * &b) % &modulus;
                let diff = if t >= sq { &t - &sq } else { &t + &modulus - &sq };
                let d = (diff >> j) & BigUint::one();
                b = (b + (d << (j - 1))) % (BigUint::one() << (j + 1));
            }
            let half = BigUint::one() << (k - 1);
            let neg = |x: &BigUint| (&modulus - x) % &modulus;
            vec![
                b.clone(),
                neg(&b),
                (&half + &b) % &modulus,
                neg(&((&half + &b) % &modulus)),
            ]
        }
    };
    roots.sort();
    roots.dedup();
    Ok(roots)
}
