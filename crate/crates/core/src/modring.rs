//! Exact arithmetic over `Z/p^k`.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, Result};

/// Retry budget of every rejection loop (non-residue search, sign rejection,
/// split rejection) and of the sampling driver.
pub const RETRY_CAP: u32 = 64;

/// A `p`-order: a natural number or `∞` (the order of zero).
///
/// `Finite(_) < Infinite` under the derived ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(v) => Some(v),
            Order::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(v) => write!(f, "{v}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

/// `(ord_p(a), cop_p(a))` with `a = cop · p^ord`; `cop` is 0 when `ord = ∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    pub ord: Order,
    pub cop: BigInt,
}

/// A prime power `p^k` with `k ≥ 1`. Primality is checked on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimePower {
    p: BigUint,
    k: u32,
    // powers[i] = p^i for i in 0..=k
    powers: Vec<BigUint>,
}

impl PrimePower {
    pub fn new(p: BigUint, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroExponent);
        }
        if !is_probable_prime(&p) {
            return Err(Error::NotPrime);
        }
        Ok(Self::new_unchecked(p, k))
    }

    pub fn from_u64(p: u64, k: u32) -> Result<Self> {
        Self::new(BigUint::from(p), k)
    }

    fn new_unchecked(p: BigUint, k: u32) -> Self {
        let mut powers = Vec::with_capacity(k as usize + 1);
        let mut acc = BigUint::one();
        for _ in 0..k {
            powers.push(acc.clone());
            acc *= &p;
        }
        powers.push(acc);
        Self { p, k, powers }
    }

    /// Same prime, different exponent. Skips the primality test.
    pub fn with_exponent(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroExponent);
        }
        Ok(Self::new_unchecked(self.p.clone(), k))
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `p^k`.
    pub fn modulus(&self) -> &BigUint {
        &self.powers[self.k as usize]
    }

    pub fn is_two(&self) -> bool {
        self.p == BigUint::from(2u8)
    }

    /// `p^e`; cached for `e ≤ k`.
    pub fn pow(&self, e: u64) -> BigUint {
        match self.powers.get(e as usize) {
            Some(v) => v.clone(),
            None => num_traits::pow(self.p.clone(), e as usize),
        }
    }

    pub fn reduce(&self, a: &BigInt) -> BigUint {
        reduce_mod(a, self.modulus())
    }

    pub fn elem(&self, a: &BigInt) -> RingElem {
        RingElem {
            value: self.reduce(a),
            modulus: self.modulus().clone(),
        }
    }

    /// The order of `a mod p^k` inside the ring: `∞` when it vanishes.
    pub fn ring_order(&self, a: &BigUint) -> Order {
        let a = a % self.modulus();
        if a.is_zero() {
            Order::Infinite
        } else {
            valuation_uint(&self.p, &a).0
        }
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

/// An element of `Z/q` stored as its least non-negative residue.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem {
    pub value: BigUint,
    pub modulus: BigUint,
}

impl RingElem {
    pub fn new(value: &BigInt, modulus: &BigUint) -> Self {
        RingElem {
            value: reduce_mod(value, modulus),
            modulus: modulus.clone(),
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub(crate) fn reduce_mod(a: &BigInt, m: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, m.clone());
    a.mod_floor(&m).magnitude().clone()
}

fn valuation_uint(p: &BigUint, a: &BigUint) -> (Order, BigUint) {
    if a.is_zero() {
        return (Order::Infinite, BigUint::zero());
    }
    if p == &BigUint::from(2u8) {
        let tz = a.trailing_zeros().unwrap_or(0);
        return (Order::Finite(tz), a >> tz);
    }
    let mut cop = a.clone();
    let mut ord = 0u64;
    loop {
        let (q, r) = cop.div_rem(p);
        if !r.is_zero() {
            break;
        }
        cop = q;
        ord += 1;
    }
    (Order::Finite(ord), cop)
}

/// `(ord_p(a), cop_p(a))` of the integer `a` (not reduced modulo `p^k`).
pub fn valuation(pp: &PrimePower, a: &BigInt) -> Valuation {
    let (ord, cop) = valuation_uint(pp.p(), a.magnitude());
    Valuation {
        ord,
        cop: BigInt::from_biguint(a.sign(), cop),
    }
}

/// Legendre symbol `(t/p)` for `t` prime to `p`.
pub fn legendre(t: &BigInt, p: &BigUint) -> Result<i8> {
    if p == &BigUint::from(2u8) || p.is_even() {
        return Err(Error::Domain("legendre needs an odd prime"));
    }
    let r = reduce_mod(t, p);
    if r.is_zero() {
        return Err(Error::Domain("legendre argument divisible by p"));
    }
    Ok(legendre_unit(&r, p))
}

// `r` must be a unit modulo the odd prime `p`.
pub(crate) fn legendre_unit(r: &BigUint, p: &BigUint) -> i8 {
    if let Some(small) = p.to_u64() {
        let a = (r % p).to_u64().unwrap_or(0);
        return jacobi_u64(a, small);
    }
    // binary Jacobi algorithm; avoids a full modular exponentiation
    let (mut a, mut n) = (r % p, p.clone());
    let mut sign = 1i8;
    while !a.is_zero() {
        let z = a.trailing_zeros().unwrap_or(0);
        a >>= z;
        let n8 = (&n % 8u8).to_u8().unwrap_or(0);
        if z % 2 == 1 && (n8 == 3 || n8 == 5) {
            sign = -sign;
        }
        if (&a % 4u8).to_u8() == Some(3) && n8 % 4 == 3 {
            sign = -sign;
        }
        core::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

fn jacobi_u64(mut a: u64, mut n: u64) -> i8 {
    let mut sign = 1i8;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        core::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(t/2)` for odd `t`.
pub fn kronecker2(t: &BigInt) -> Result<i8> {
    if t.is_even() {
        return Err(Error::Domain("kronecker2 needs an odd argument"));
    }
    let r = reduce_mod(t, &BigUint::from(8u8)).to_u8().unwrap_or(0);
    Ok(if r == 1 || r == 7 { 1 } else { -1 })
}

/// The `p`-sign of `t mod p^k`: 0 for zero, `±1` for odd `p`, `cop mod 8` for `p = 2`.
pub fn sign_p(pp: &PrimePower, t: &BigInt) -> i8 {
    let r = pp.reduce(t);
    sign_of_reduced(pp, &r)
}

pub(crate) fn sign_of_reduced(pp: &PrimePower, r: &BigUint) -> i8 {
    if r.is_zero() {
        return 0;
    }
    let (_, cop) = valuation_uint(pp.p(), r);
    if pp.is_two() {
        (&cop % 8u8).to_i8().unwrap_or(0)
    } else {
        legendre_unit(&(&cop % pp.p()), pp.p())
    }
}

/// `(ord, cop)` of a residue already reduced modulo `p^k`, `ord = ∞` for zero.
pub(crate) fn split_reduced(pp: &PrimePower, r: &BigUint) -> (Order, BigUint) {
    valuation_uint(pp.p(), r)
}

/// The `k` base-`p` digits of `x mod p^k`, least significant first.
pub fn digits(pp: &PrimePower, x: &BigUint) -> Vec<BigUint> {
    let mut rest = x % pp.modulus();
    let mut out = Vec::with_capacity(pp.k() as usize);
    for _ in 0..pp.k() {
        let (q, r) = rest.div_rem(pp.p());
        out.push(r);
        rest = q;
    }
    out
}

/// Inverse of [`digits`].
pub fn from_digits(pp: &PrimePower, ds: &[BigUint]) -> BigUint {
    ds.iter()
        .rev()
        .fold(BigUint::zero(), |acc, d| acc * pp.p() + d)
}

/// `u^{-1} mod p^k`.
pub fn inverse(pp: &PrimePower, u: &BigUint) -> Result<BigUint> {
    inverse_mod(u, pp.modulus())
}

pub(crate) fn inverse_mod(u: &BigUint, m: &BigUint) -> Result<BigUint> {
    if m.is_one() {
        return Ok(BigUint::zero());
    }
    (u % m).modinv(m).ok_or(Error::NotAUnit)
}

/// Uniform integer in `[0, n)`; `n` must be positive.
pub fn uniform_below(n: &BigUint, rng: &mut RandomSource) -> BigUint {
    rng.uniform_below(n)
}

/// Seedable stream of uniform integers. One instance per thread of execution.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha12Rng,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, n)` for `n ≥ 1`, by rejection on the bit length of `n`.
    pub fn uniform_below(&mut self, n: &BigUint) -> BigUint {
        assert!(!n.is_zero(), "uniform_below: empty range");
        if let Some(small) = n.to_u64() {
            return BigUint::from(self.uniform_u64(small));
        }
        let bits = n.bits();
        let words = bits.div_ceil(32) as usize;
        let top_bits = bits - 32 * (words as u64 - 1);
        let top_mask = if top_bits == 32 {
            u32::MAX
        } else {
            (1u32 << top_bits) - 1
        };
        loop {
            let mut digits: Vec<u32> = (0..words).map(|_| self.rng.next_u32()).collect();
            if let Some(last) = digits.last_mut() {
                *last &= top_mask;
            }
            let candidate = BigUint::new(digits);
            if &candidate < n {
                return candidate;
            }
        }
    }

    /// Uniform in `[0, n)` for `n ≥ 1`.
    pub fn uniform_u64(&mut self, n: u64) -> u64 {
        assert!(n > 0, "uniform_u64: empty range");
        if n.is_power_of_two() {
            return self.rng.next_u64() & (n - 1);
        }
        // reject the incomplete top interval
        let zone = u64::MAX - (u64::MAX % n) - 1;
        loop {
            let v = self.rng.next_u64();
            if v <= zone {
                return v % n;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.rng.next_u32() & 1 == 1
    }
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Trial division by small primes followed by Miller-Rabin on 25 fixed bases.
/// Deterministic for every `n < 3.3·10^24`.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u8) {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if n == &sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u8;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for &base in SMALL_PRIMES.iter() {
        let mut x = BigUint::from(base).modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Combine residues modulo pairwise coprime moduli into one residue modulo their product.
pub fn crt_combine(parts: &[(BigUint, BigUint)]) -> Result<(BigUint, BigUint)> {
    let mut acc = BigUint::zero();
    let mut modulus = BigUint::one();
    for (r, m) in parts {
        // acc + modulus * h ≡ r (mod m)
        let inv = inverse_mod(&modulus, m)?;
        let r = r % m;
        let diff = (&r + m - (&acc % m)) % m;
        let h = (diff * inv) % m;
        acc += &modulus * h;
        modulus *= m;
    }
    Ok((acc, modulus))
}
