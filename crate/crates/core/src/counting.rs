//! Total, primitive and non-primitive representation counts.
//!
//! Counts for a single block come in closed form. A block-diagonal form is
//! handled by a dynamic programme over `p^k`-symbols: for `Q = Q1 ⊕ Q2`,
//!
//! ```text
//! A(Q, γ) = Σ S^γ(γ1, γ2) · A(Q1, γ1) · A(Q2, γ2)
//! C(Q, γ) = Σ S^γ(γ1, γ2) · C(Q1, γ1) · C(Q2, γ2)
//! ```
//!
//! where `A` counts all representations and `C` the non-primitive ones (a
//! vector is non-primitive iff both halves are).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::blockdiag::{block_diagonalize, Block, QuadraticForm};
use crate::modring::{inverse_mod, legendre_unit, split_reduced, Order, PrimePower};
use crate::symbols::{
    class_size, enumerate_symbols, representative, symbol_index, symbol_of, PkSymbol, SplitTable,
};
use crate::{Error, Result};

/// `(total, primitive, nonprimitive)` with `total = primitive + nonprimitive`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RepCounts {
    pub total: BigUint,
    pub primitive: BigUint,
    pub nonprimitive: BigUint,
}

impl RepCounts {
    pub fn new(primitive: BigUint, nonprimitive: BigUint) -> Self {
        RepCounts {
            total: &primitive + &nonprimitive,
            primitive,
            nonprimitive,
        }
    }

    pub fn zero() -> Self {
        RepCounts::default()
    }

    pub fn from_u64(primitive: u64, nonprimitive: u64) -> Self {
        RepCounts::new(BigUint::from(primitive), BigUint::from(nonprimitive))
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_zero()
    }
}

impl fmt::Display for RepCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "total={} primitive={} nonprimitive={}",
            self.total, self.primitive, self.nonprimitive
        )
    }
}

// Order of a residue, with zero mapped to k.
pub(crate) fn clamped_order(pp: &PrimePower, r: &BigUint) -> (u64, BigUint) {
    match split_reduced(pp, r) {
        (Order::Finite(o), cop) => (o, cop),
        (Order::Infinite, _) => (u64::from(pp.k()), BigUint::zero()),
    }
}

// Solutions of d·x^2 ≡ t when t ≡ 0 (k ≥ 1).
fn type1_zero_target(pp: &PrimePower, od: u64) -> RepCounts {
    let k = u64::from(pp.k());
    if od >= k {
        let non = pp.pow(k - 1);
        return RepCounts::new(pp.modulus() - &non, non);
    }
    // ord x ≥ ⌈(k - od) / 2⌉
    let e = (k - od).div_ceil(2);
    RepCounts::new(BigUint::zero(), pp.pow(k - e))
}

/// Counts of `x ∈ Z/p^k` with `d·x^2 ≡ t`, for odd `p` and `t` of symbol `γ_t`.
pub fn count_type1_odd(d: &BigInt, pp: &PrimePower, gt: &PkSymbol) -> RepCounts {
    debug_assert!(!pp.is_two());
    type1_counts(d, pp, gt)
}

/// Counts of `x ∈ Z/2^k` with `d·x^2 ≡ t`, for `t` of symbol `γ_t`.
pub fn count_type1_two(d: &BigInt, k: u32, gt: &PkSymbol) -> RepCounts {
    let pp = PrimePower::from_u64(2, k).expect("k >= 1");
    type1_counts(d, &pp, gt)
}

/// Shape of the Type I solution set for a non-zero target: `x = p^e·w` where
/// `w` is a root of `w^2 ≡ target (mod p^{k - ot})` and `ot - e` free digits.
pub(crate) struct Type1Shape {
    pub e: u64,
    pub ot: u64,
    pub target: BigUint,
    pub roots: u64,
}

pub(crate) fn type1_shape(d: &BigInt, pp: &PrimePower, t: &BigUint) -> Option<Type1Shape> {
    let k = u64::from(pp.k());
    let (od, cop_d) = clamped_order(pp, &pp.reduce(d));
    let (ot, cop_t) = clamped_order(pp, t);
    if ot >= k || od > ot || (ot - od) % 2 == 1 {
        return None;
    }
    let rest = k - ot;
    let modulus = pp.pow(rest);
    let target = (&cop_t * inverse_mod(&cop_d, &modulus).ok()?) % &modulus;
    let roots = if pp.is_two() {
        let check = BigUint::one() << rest.min(3);
        if !(&target % &check).is_one() {
            return None;
        }
        1u64 << rest.min(3).saturating_sub(1)
    } else {
        if legendre_unit(&(&target % pp.p()), pp.p()) != 1 {
            return None;
        }
        2
    };
    Some(Type1Shape {
        e: (ot - od) / 2,
        ot,
        target,
        roots,
    })
}

pub(crate) fn type1_counts(d: &BigInt, pp: &PrimePower, gt: &PkSymbol) -> RepCounts {
    let Some(t) = representative(pp, gt) else {
        return RepCounts::zero();
    };
    if gt.is_zero() {
        let (od, _) = clamped_order(pp, &pp.reduce(d));
        return type1_zero_target(pp, od);
    }
    match type1_shape(d, pp, &t) {
        None => RepCounts::zero(),
        Some(s) => {
            let n = BigUint::from(s.roots) * pp.pow(s.ot - s.e);
            if s.e == 0 {
                RepCounts::new(n, BigUint::zero())
            } else {
                RepCounts::new(BigUint::zero(), n)
            }
        }
    }
}

// Borrowed coefficients of a Type II block.
pub(crate) struct TypeTwo<'a> {
    pub ell: u64,
    pub a: &'a BigInt,
    pub b: &'a BigInt,
    pub c: &'a BigInt,
}

impl<'a> TypeTwo<'a> {
    pub fn of(blk: &'a Block) -> Option<Self> {
        match blk {
            Block::TypeII { ell, a, b, c } => Some(TypeTwo { ell: *ell, a, b, c }),
            Block::TypeI(_) => None,
        }
    }

    /// `a x^2 + b x y + c y^2` over the integers.
    pub fn reduced_form(&self, x: &BigInt, y: &BigInt) -> BigInt {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    // Parity seeds (x0, y0), not both even, with F(x0, y0) ≡ t (mod 2).
    pub fn seeds(&self, t_odd: bool) -> Vec<(u8, u8)> {
        [(1u8, 0u8), (0, 1), (1, 1)]
            .into_iter()
            .filter(|&(x, y)| {
                let v = self.reduced_form(&BigInt::from(x), &BigInt::from(y));
                v.is_odd() == t_odd
            })
            .collect()
    }

    /// Counts of `F(x, y) ≡ t (mod 2^m)` for `F = a x^2 + b x y + c y^2`.
    pub fn star_counts(&self, m: u64, t: &BigUint) -> RepCounts {
        if m == 0 {
            return RepCounts::from_u64(0, 1);
        }
        let t = t % (BigUint::one() << m);
        let prim = BigUint::from(self.seeds(t.is_odd()).len()) << (m - 1);
        let non = if m == 1 {
            BigUint::from(u8::from(t.is_even()))
        } else if (&t % 4u8).is_zero() {
            self.star_counts(m - 2, &(&t >> 2u8)).total << 2u8
        } else {
            BigUint::zero()
        };
        RepCounts::new(prim, non)
    }
}

/// Counts of `2^{ℓ+1}(a x1^2 + b x1 x2 + c x2^2) ≡ t (mod 2^k)`.
pub fn count_type2(blk: &Block, k: u32, gt: &PkSymbol) -> RepCounts {
    let Some(two) = TypeTwo::of(blk) else {
        return RepCounts::zero();
    };
    let pp = PrimePower::from_u64(2, k).expect("k >= 1");
    let Some(t) = representative(&pp, gt) else {
        return RepCounts::zero();
    };
    type2_counts(&two, k, &t)
}

pub(crate) fn type2_counts(two: &TypeTwo<'_>, k: u32, t: &BigUint) -> RepCounts {
    let k = u64::from(k);
    let shift = two.ell + 1;
    let ot = t.trailing_zeros().map_or(k, |o| o.min(k));
    if shift >= k {
        if ot < k {
            return RepCounts::zero();
        }
        let all = BigUint::one() << (2 * k);
        let non = BigUint::one() << (2 * (k - 1));
        return RepCounts::new(&all - &non, non);
    }
    if ot < shift {
        return RepCounts::zero();
    }
    let m = k - shift;
    let star = two.star_counts(m, &(t >> shift));
    let lift = 2 * shift;
    RepCounts::new(star.primitive << lift, star.nonprimitive << lift)
}

/// Counts of one block for every symbol, in [`symbol_index`] order.
pub fn block_counts(blk: &Block, pp: &PrimePower) -> Vec<RepCounts> {
    enumerate_symbols(pp)
        .iter()
        .map(|g| match blk {
            Block::TypeI(d) => type1_counts(d, pp, g),
            Block::TypeII { .. } => {
                if class_size(pp, g).is_zero() {
                    RepCounts::zero()
                } else {
                    count_type2(blk, pp.k(), g)
                }
            }
        })
        .collect()
}

// Counts of the zero-dimensional form: only the empty vector, representing 0.
fn empty_counts(pp: &PrimePower) -> Vec<RepCounts> {
    let mut out = vec![RepCounts::zero(); enumerate_symbols(pp).len()];
    out[0] = RepCounts::from_u64(0, 1);
    out
}

/// Counts of `X ⊕ Y` from per-symbol counts of `X` and `Y`.
pub fn compose(split: &SplitTable, x: &[RepCounts], y: &[RepCounts]) -> Vec<RepCounts> {
    split
        .entries
        .iter()
        .map(|row| {
            let mut total = BigUint::zero();
            let mut non = BigUint::zero();
            for (i1, i2, s) in row {
                let (a, b) = (&x[*i1], &y[*i2]);
                if !a.total.is_zero() && !b.total.is_zero() {
                    total += s * &a.total * &b.total;
                }
                if !a.nonprimitive.is_zero() && !b.nonprimitive.is_zero() {
                    non += s * &a.nonprimitive * &b.nonprimitive;
                }
            }
            RepCounts {
                primitive: &total - &non,
                total,
                nonprimitive: non,
            }
        })
        .collect()
}

/// Per-symbol counts for every suffix `blocks[i..]`; entry `blocks.len()` is the empty form.
pub fn suffix_counts(blocks: &[Block], pp: &PrimePower, split: &SplitTable) -> Vec<Vec<RepCounts>> {
    let mut out = vec![Vec::new(); blocks.len() + 1];
    out[blocks.len()] = empty_counts(pp);
    for i in (0..blocks.len()).rev() {
        let here = block_counts(&blocks[i], pp);
        out[i] = compose(split, &here, &out[i + 1]);
    }
    out
}

/// Counts of a form for every target symbol.
///
/// Building the table costs one diagonalization plus the symbol DP; each
/// lookup afterwards is a symbol computation.
#[derive(Debug, Clone)]
pub struct CountTable {
    pp: PrimePower,
    counts: Vec<RepCounts>,
}

impl CountTable {
    pub fn new(q: &QuadraticForm, pp: &PrimePower) -> Self {
        let bd = block_diagonalize(q, pp);
        let split = SplitTable::new(pp);
        let mut suffixes = suffix_counts(&bd.blocks, pp, &split);
        CountTable {
            pp: pp.clone(),
            counts: suffixes.swap_remove(0),
        }
    }

    pub fn get(&self, t: &BigInt) -> &RepCounts {
        self.by_symbol(&symbol_of(&self.pp, t))
    }

    pub fn by_symbol(&self, g: &PkSymbol) -> &RepCounts {
        &self.counts[symbol_index(&self.pp, g)]
    }
}

/// Counts of `x ∈ (Z/p^k)^n` with `x'Qx ≡ t`.
pub fn count_form(q: &QuadraticForm, pp: &PrimePower, t: &BigInt) -> RepCounts {
    CountTable::new(q, pp).get(t).clone()
}

/// The local density `A_{p^s}(Q, t) / p^{s(n-1)}` as a reduced fraction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalDensity {
    pub numerator: BigUint,
    pub denominator: BigUint,
    /// The level `s = 1 + ord_p(8·t·det Q)` at which the count stabilizes.
    pub level: u32,
}

impl fmt::Display for LocalDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_one() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

/// `1 + ord_p(8·t·det Q)`; errors on a singular form or zero target.
pub fn stable_level(q: &QuadraticForm, p: &BigUint, t: &BigInt) -> Result<u32> {
    if t.is_zero() {
        return Err(Error::ZeroTarget);
    }
    let det = q.matrix().det();
    if det.is_zero() {
        return Err(Error::SingularForm);
    }
    let pp = PrimePower::new(p.clone(), 1)?;
    let prod = det * t * 8;
    let ord = crate::modring::valuation(&pp, &prod)
        .ord
        .finite()
        .expect("non-zero product");
    u32::try_from(ord + 1).map_err(|_| Error::Domain("stabilization level exceeds u32"))
}

/// Local density of `Q` at `t` for the prime `p`.
pub fn local_density(q: &QuadraticForm, p: &BigUint, t: &BigInt) -> Result<LocalDensity> {
    let s = stable_level(q, p, t)?;
    let pp = PrimePower::new(p.clone(), s)?;
    let total = count_form(q, &pp, t).total;
    let n = q.dim() as u64;
    let den = pp.pow(u64::from(s) * n.saturating_sub(1));
    let g = total.gcd(&den);
    let (numerator, denominator) = if g.is_zero() {
        (BigUint::zero(), BigUint::one())
    } else {
        (&total / &g, &den / &g)
    };
    Ok(LocalDensity {
        numerator,
        denominator,
        level: s,
    })
}

pub(crate) fn check_coprime(factors: &[PrimePower]) -> Result<()> {
    if factors.is_empty() {
        return Err(Error::Domain("empty factorization"));
    }
    for (i, a) in factors.iter().enumerate() {
        if factors[..i].iter().any(|b| b.p() == a.p()) {
            return Err(Error::DuplicatePrime);
        }
    }
    Ok(())
}

/// Counts modulo `q = Π p_i^{k_i}`.
///
/// A vector is primitive modulo `q` iff it is primitive modulo every `p_i^{k_i}`,
/// so the primitive counts multiply and the rest is non-primitive.
pub fn count_composite(q: &QuadraticForm, factors: &[PrimePower], t: &BigInt) -> Result<RepCounts> {
    check_coprime(factors)?;
    let mut total = BigUint::one();
    let mut prim = BigUint::one();
    for pp in factors {
        let c = count_form(q, pp, t);
        total *= c.total;
        prim *= c.primitive;
    }
    Ok(RepCounts {
        nonprimitive: &total - &prim,
        total,
        primitive: prim,
    })
}

/// Product of the factor moduli.
pub fn composite_modulus(factors: &[PrimePower]) -> BigUint {
    factors.iter().map(|pp| pp.modulus().clone()).product()
}
