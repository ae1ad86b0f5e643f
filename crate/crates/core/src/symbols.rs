//! `p^k`-symbols, class sizes and split sizes.
//!
//! The symbol of `t` is `(ord_p(t mod p^k), sgn_p(t mod p^k))`. Two residues
//! share a symbol exactly when they differ by a unit square, so every count in
//! this crate depends on `t` only through its symbol.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::modring::{legendre_unit, sign_of_reduced, split_reduced, Order, PrimePower};

/// A `p^k`-symbol. `ord = ∞` iff `sgn = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PkSymbol {
    pub ord: Order,
    pub sgn: i8,
}

impl PkSymbol {
    pub const ZERO: PkSymbol = PkSymbol {
        ord: Order::Infinite,
        sgn: 0,
    };

    pub fn new(ord: u64, sgn: i8) -> Self {
        PkSymbol {
            ord: Order::Finite(ord),
            sgn,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ord.is_infinite()
    }
}

impl fmt::Display for PkSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.ord, self.sgn)
    }
}

/// The symbol of `t mod p^k`.
pub fn symbol_of(pp: &PrimePower, t: &BigInt) -> PkSymbol {
    symbol_of_reduced(pp, &pp.reduce(t))
}

pub(crate) fn symbol_of_reduced(pp: &PrimePower, r: &BigUint) -> PkSymbol {
    let (ord, _) = split_reduced(pp, r);
    PkSymbol {
        ord,
        sgn: sign_of_reduced(pp, r),
    }
}

/// Number of symbols: `4k + 1` for `p = 2`, `2k + 1` otherwise.
pub fn symbol_count(pp: &PrimePower) -> usize {
    let per = if pp.is_two() { 4 } else { 2 };
    per * pp.k() as usize + 1
}

/// Dense index of `γ` in `0..symbol_count(pp)`, `∞` first.
pub fn symbol_index(pp: &PrimePower, g: &PkSymbol) -> usize {
    match g.ord {
        Order::Infinite => 0,
        Order::Finite(o) => {
            let o = o as usize;
            if pp.is_two() {
                1 + 4 * o + ((g.sgn - 1) / 2) as usize
            } else {
                1 + 2 * o + usize::from(g.sgn == -1)
            }
        }
    }
}

/// All symbols of `Z/p^k`, in [`symbol_index`] order.
pub fn enumerate_symbols(pp: &PrimePower) -> Vec<PkSymbol> {
    let mut out = Vec::with_capacity(symbol_count(pp));
    out.push(PkSymbol::ZERO);
    let signs: &[i8] = if pp.is_two() { &[1, 3, 5, 7] } else { &[1, -1] };
    for o in 0..u64::from(pp.k()) {
        for &s in signs {
            out.push(PkSymbol::new(o, s));
        }
    }
    out
}

/// Whether `γ` is a well-formed symbol for `p^k`.
pub fn is_valid(pp: &PrimePower, g: &PkSymbol) -> bool {
    match g.ord {
        Order::Infinite => g.sgn == 0,
        Order::Finite(o) => {
            o < u64::from(pp.k())
                && if pp.is_two() {
                    matches!(g.sgn, 1 | 3 | 5 | 7)
                } else {
                    g.sgn == 1 || g.sgn == -1
                }
        }
    }
}

/// `|{x ∈ Z/p^k : symbol(x) = γ}|`.
///
/// For `p = 2` and `k - ord ≤ 2` the coprime part is smaller than 8, so only
/// the signs below `2^{k-ord}` occur; the others have an empty class.
pub fn class_size(pp: &PrimePower, g: &PkSymbol) -> BigUint {
    let o = match g.ord {
        Order::Infinite => return BigUint::one(),
        Order::Finite(o) => o,
    };
    let rest = u64::from(pp.k()) - o;
    if pp.is_two() {
        if rest >= 3 {
            BigUint::one() << (rest - 3)
        } else if (g.sgn as u64) < (1u64 << rest) {
            BigUint::one()
        } else {
            BigUint::zero()
        }
    } else {
        ((pp.p() - 1u8) >> 1) * pp.pow(rest - 1)
    }
}

/// The smallest residue with symbol `γ`, or `None` for an empty class.
pub fn representative(pp: &PrimePower, g: &PkSymbol) -> Option<BigUint> {
    let o = match g.ord {
        Order::Infinite => return Some(BigUint::zero()),
        Order::Finite(o) => o,
    };
    if class_size(pp, g).is_zero() {
        return None;
    }
    let unit = if pp.is_two() {
        BigUint::from(g.sgn as u8)
    } else if g.sgn == 1 {
        BigUint::one()
    } else {
        smallest_non_residue(pp.p())
    };
    Some(unit * pp.pow(o))
}

pub(crate) fn smallest_non_residue(p: &BigUint) -> BigUint {
    let mut c = BigUint::from(2u8);
    while legendre_unit(&c, p) != -1 {
        c += 1u8;
    }
    c
}

/// `|{x ∈ Z/p : (x/p) = s1, ((x + a)/p) = s2}|` for any `a` with `(a/p) = leg_a`.
pub fn split_pair_count_mod_p(p: &BigUint, leg_a: i8, s1: i8, s2: i8) -> BigUint {
    let p_mod_4 = (p % 4u8).to_i64().unwrap_or(0);
    let leg_minus_one: i64 = if p_mod_4 == 1 { 1 } else { -1 };
    let (la, s1, s2) = (i64::from(leg_a), i64::from(s1), i64::from(s2));
    let correction = (la + s1) * (la * leg_minus_one + s2);
    let num = BigInt::from(p.clone()) - p_mod_4 - correction;
    (num / 4i32).to_biguint().unwrap_or_default()
}

fn reduced_diff(pp: &PrimePower, a: &BigUint, b: &BigUint) -> BigUint {
    let m = pp.modulus();
    if a >= b {
        (a - b) % m
    } else {
        (m - (b - a) % m) % m
    }
}

/// `S^γ(γ1, γ2)`: ordered pairs `(a, b)` with `symbol(a) = γ1`,
/// `symbol(b) = γ2` and `a + b ≡ t` for a fixed `t` of symbol `γ`.
pub fn split_class_size(pp: &PrimePower, g: &PkSymbol, g1: &PkSymbol, g2: &PkSymbol) -> BigUint {
    let (Some(t), Some(r1), Some(r2)) = (
        representative(pp, g),
        representative(pp, g1),
        representative(pp, g2),
    ) else {
        return BigUint::zero();
    };
    // When ord γ1 ≠ ord γ the symbol of t - a is fixed on the whole class of a.
    if g1.ord != g.ord {
        return if symbol_of_reduced(pp, &reduced_diff(pp, &t, &r1)) == *g2 {
            class_size(pp, g1)
        } else {
            BigUint::zero()
        };
    }
    if g2.ord != g.ord {
        return if symbol_of_reduced(pp, &reduced_diff(pp, &t, &r2)) == *g1 {
            class_size(pp, g2)
        } else {
            BigUint::zero()
        };
    }
    let o = match g.ord {
        Order::Infinite => return BigUint::one(),
        Order::Finite(o) => o,
    };
    if pp.is_two() {
        // two odd numbers never add up to an odd number
        return BigUint::zero();
    }
    // x = p^o u, t = p^o v: count leading digits u0 with (u0) = s1 and
    // (v0 - u0) = s2; substituting x' = -u0 gives the mod-p pair count
    let leg_minus_one = if (pp.p() % 4u8).is_one() { 1 } else { -1 };
    let low = split_pair_count_mod_p(pp.p(), g.sgn, leg_minus_one * g1.sgn, g2.sgn);
    low * pp.pow(u64::from(pp.k()) - o - 1)
}

/// Non-zero split sizes indexed by target symbol.
///
/// `entries[symbol_index(γ)]` lists `(symbol_index(γ1), symbol_index(γ2), S^γ(γ1, γ2))`.
#[derive(Debug, Clone)]
pub struct SplitTable {
    pub symbols: Vec<PkSymbol>,
    pub entries: Vec<Vec<(usize, usize, BigUint)>>,
}

impl SplitTable {
    pub fn new(pp: &PrimePower) -> Self {
        let symbols = enumerate_symbols(pp);
        let reps: Vec<Option<BigUint>> = symbols.iter().map(|g| representative(pp, g)).collect();
        let sizes: Vec<BigUint> = symbols.iter().map(|g| class_size(pp, g)).collect();
        let mut entries = Vec::with_capacity(symbols.len());
        for (gi, g) in symbols.iter().enumerate() {
            let mut row = Vec::new();
            let Some(t) = &reps[gi] else {
                entries.push(row);
                continue;
            };
            for (i1, g1) in symbols.iter().enumerate() {
                let Some(r1) = &reps[i1] else { continue };
                if g1.ord != g.ord {
                    let g2 = symbol_of_reduced(pp, &reduced_diff(pp, t, r1));
                    row.push((i1, symbol_index(pp, &g2), sizes[i1].clone()));
                    continue;
                }
                for (i2, g2) in symbols.iter().enumerate() {
                    let size = if g2.ord != g.ord {
                        match &reps[i2] {
                            Some(r2)
                                if symbol_of_reduced(pp, &reduced_diff(pp, t, r2)) == *g1 =>
                            {
                                sizes[i2].clone()
                            }
                            _ => continue,
                        }
                    } else {
                        split_class_size(pp, g, g1, g2)
                    };
                    if !size.is_zero() {
                        row.push((i1, i2, size));
                    }
                }
            }
            entries.push(row);
        }
        SplitTable { symbols, entries }
    }
}
