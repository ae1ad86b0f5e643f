//! Las Vegas uniform sampling of representations.
//!
//! Every sampler either returns an exactly uniform element of the requested
//! solution set, reports that the set is empty, or fails detectably after
//! exhausting its retry budget. Only odd-prime rejection steps can fail.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::blockdiag::{block_diagonalize, Block, BlockDiagForm, QuadraticForm};
use crate::counting::{
    block_counts, check_coprime, clamped_order, suffix_counts, type1_counts, type1_shape,
    type2_counts, RepCounts, TypeTwo,
};
use crate::modring::{crt_combine, legendre_unit, Order, PrimePower, RandomSource, RingElem, RETRY_CAP};
use crate::sqroots::{lift_sqrt_odd, sqrt_unit_mod_2k};
use crate::symbols::{
    class_size, split_class_size, symbol_index, symbol_of_reduced, PkSymbol, SplitTable,
};
use crate::{Error, Result};

/// Which representations to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepKind {
    Any,
    Primitive,
    NonPrimitive,
}

impl RepKind {
    pub fn matches(self, primitive: bool) -> bool {
        match self {
            RepKind::Any => true,
            RepKind::Primitive => primitive,
            RepKind::NonPrimitive => !primitive,
        }
    }

    /// The size of the class in `counts`.
    pub fn count<'a>(self, counts: &'a RepCounts) -> &'a BigUint {
        match self {
            RepKind::Any => &counts.total,
            RepKind::Primitive => &counts.primitive,
            RepKind::NonPrimitive => &counts.nonprimitive,
        }
    }
}

impl fmt::Display for RepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepKind::Any => "any",
            RepKind::Primitive => "primitive",
            RepKind::NonPrimitive => "nonprimitive",
        })
    }
}

/// Result of one sampling call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleOutcome {
    Solution(Vec<RingElem>),
    NoSolution,
    Fail,
}

impl SampleOutcome {
    pub fn solution(&self) -> Option<&[RingElem]> {
        match self {
            SampleOutcome::Solution(v) => Some(v),
            _ => None,
        }
    }

    fn from_result(r: Result<Vec<RingElem>>) -> Self {
        match r {
            Ok(v) => SampleOutcome::Solution(v),
            Err(Error::NoSolution) => SampleOutcome::NoSolution,
            Err(_) => SampleOutcome::Fail,
        }
    }
}

/// Counters for the rejection loops, accumulated across calls.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SamplingStats {
    /// Iterations of the equal-order split rejection loop.
    pub split_trials: u64,
    /// Iterations of that loop that were rejected.
    pub split_rejections: u64,
    /// Attempts restarted by the driver after an internal failure.
    pub restarts: u64,
    /// Calls that returned [`SampleOutcome::Fail`].
    pub fails: u64,
}

impl SamplingStats {
    pub fn split_failure_rate(&self) -> Option<f64> {
        (self.split_trials > 0).then(|| self.split_rejections as f64 / self.split_trials as f64)
    }

    pub fn merge(&mut self, other: &SamplingStats) {
        self.split_trials += other.split_trials;
        self.split_rejections += other.split_rejections;
        self.restarts += other.restarts;
        self.fails += other.fails;
    }
}

fn below(rng: &mut RandomSource, n: &BigUint) -> BigUint {
    if n.is_one() {
        BigUint::zero()
    } else {
        rng.uniform_below(n)
    }
}

fn bit(rng: &mut RandomSource) -> u8 {
    u8::from(rng.coin())
}

fn sub_mod(a: &BigUint, b: &BigUint, m: &BigUint) -> BigUint {
    let b = b % m;
    ((a % m) + m - b) % m
}

// Resolve Any by the primitive share; reject empty classes.
fn resolve(kind: RepKind, counts: &RepCounts, rng: &mut RandomSource) -> Result<RepKind> {
    if kind.count(counts).is_zero() {
        return Err(Error::NoSolution);
    }
    Ok(match kind {
        RepKind::Any => {
            if below(rng, &counts.total) < counts.primitive {
                RepKind::Primitive
            } else {
                RepKind::NonPrimitive
            }
        }
        other => other,
    })
}

fn symbol_elem(pp: &PrimePower, g: &PkSymbol, rng: &mut RandomSource) -> Result<BigUint> {
    let o = match g.ord {
        Order::Infinite => return Ok(BigUint::zero()),
        Order::Finite(o) => o,
    };
    if class_size(pp, g).is_zero() {
        return Err(Error::NoSolution);
    }
    let rest = u64::from(pp.k()) - o;
    let unit = if pp.is_two() {
        if rest >= 3 {
            BigUint::from(g.sgn as u8) + (below(rng, &(BigUint::one() << (rest - 3))) << 3u8)
        } else {
            BigUint::from(g.sgn as u8)
        }
    } else {
        let p = pp.p();
        let mut lead = None;
        for _ in 0..RETRY_CAP {
            let d = rng.uniform_below(p);
            if !d.is_zero() && legendre_unit(&d, p) == g.sgn {
                lead = Some(d);
                break;
            }
        }
        let lead = lead.ok_or(Error::Fail)?;
        lead + below(rng, &pp.pow(rest - 1)) * p
    };
    Ok(unit * pp.pow(o))
}

/// A uniform element of the symbol class `γ`.
pub fn sample_symbol_elem(pp: &PrimePower, g: &PkSymbol, rng: &mut RandomSource) -> Result<RingElem> {
    symbol_elem(pp, g, rng).map(|v| RingElem {
        value: v,
        modulus: pp.modulus().clone(),
    })
}

fn split_draw(
    pp: &PrimePower,
    t: &BigUint,
    g1: &PkSymbol,
    g2: &PkSymbol,
    rng: &mut RandomSource,
    stats: &mut SamplingStats,
) -> Result<(BigUint, BigUint)> {
    let m = pp.modulus();
    let g = symbol_of_reduced(pp, t);
    if split_class_size(pp, &g, g1, g2).is_zero() {
        return Err(Error::NoSolution);
    }
    if g1.ord != g.ord {
        let a = symbol_elem(pp, g1, rng)?;
        let b = sub_mod(t, &a, m);
        return Ok((a, b));
    }
    if g2.ord != g.ord {
        let b = symbol_elem(pp, g2, rng)?;
        let a = sub_mod(t, &b, m);
        return Ok((a, b));
    }
    let o = match g.ord {
        Order::Infinite => return Ok((BigUint::zero(), BigUint::zero())),
        Order::Finite(o) => o,
    };
    // equal finite orders, odd p: only the leading digit u0 of a / p^o matters
    let p = pp.p();
    let po = pp.pow(o);
    let v0 = (t / &po) % p;
    let ok = |u0: &BigUint| {
        let w = sub_mod(&v0, u0, p);
        !u0.is_zero()
            && !w.is_zero()
            && legendre_unit(u0, p) == g1.sgn
            && legendre_unit(&w, p) == g2.sgn
    };
    let lead = match p.to_u64() {
        Some(small) if small <= 7 => {
            let cands: Vec<BigUint> = (1..small).map(BigUint::from).filter(|u| ok(u)).collect();
            let i = rng.uniform_u64(cands.len() as u64) as usize;
            cands[i].clone()
        }
        _ => {
            let span = p - 1u8;
            let mut found = None;
            for _ in 0..RETRY_CAP {
                stats.split_trials += 1;
                let u0 = rng.uniform_below(&span) + 1u8;
                if ok(&u0) {
                    found = Some(u0);
                    break;
                }
                stats.split_rejections += 1;
            }
            found.ok_or(Error::Fail)?
        }
    };
    let high = below(rng, &pp.pow(u64::from(pp.k()) - o - 1));
    let a = ((lead + high * p) * po) % m;
    let b = sub_mod(t, &a, m);
    Ok((a, b))
}

/// A uniform pair `(a, b)` with symbols `γ1`, `γ2` and `a + b ≡ t`.
pub fn sample_split(
    pp: &PrimePower,
    t: &RingElem,
    g1: &PkSymbol,
    g2: &PkSymbol,
    rng: &mut RandomSource,
) -> Result<(RingElem, RingElem)> {
    sample_split_with_stats(pp, t, g1, g2, rng, &mut SamplingStats::default())
}

pub fn sample_split_with_stats(
    pp: &PrimePower,
    t: &RingElem,
    g1: &PkSymbol,
    g2: &PkSymbol,
    rng: &mut RandomSource,
    stats: &mut SamplingStats,
) -> Result<(RingElem, RingElem)> {
    let (a, b) = split_draw(pp, &(&t.value % pp.modulus()), g1, g2, rng, stats)?;
    let m = pp.modulus().clone();
    Ok((
        RingElem {
            value: a,
            modulus: m.clone(),
        },
        RingElem { value: b, modulus: m },
    ))
}

fn type1_draw(
    d: &BigInt,
    pp: &PrimePower,
    t: &BigUint,
    kind: RepKind,
    rng: &mut RandomSource,
) -> Result<BigUint> {
    let k = u64::from(pp.k());
    let p = pp.p();
    let counts = type1_counts(d, pp, &symbol_of_reduced(pp, t));
    let kind = resolve(kind, &counts, rng)?;
    if t.is_zero() {
        let (od, _) = clamped_order(pp, &pp.reduce(d));
        if od >= k {
            let high = below(rng, &pp.pow(k - 1));
            return Ok(if kind == RepKind::Primitive {
                rng.uniform_below(&(p - 1u8)) + 1u8 + high * p
            } else {
                high * p
            });
        }
        let e = (k - od).div_ceil(2);
        return Ok(below(rng, &pp.pow(k - e)) * pp.pow(e));
    }
    let shape = type1_shape(d, pp, t).ok_or(Error::NoSolution)?;
    let rest = k - shape.ot;
    let root = if pp.is_two() {
        let roots = sqrt_unit_mod_2k(rest as u32, &BigInt::from(shape.target))?;
        roots[rng.uniform_u64(roots.len() as u64) as usize].clone()
    } else {
        let sub = pp.with_exponent(rest as u32)?;
        let (r1, r2) = lift_sqrt_odd(&sub, &BigInt::from(shape.target), rng)?;
        if rng.coin() {
            r1
        } else {
            r2
        }
    };
    let free = below(rng, &pp.pow(shape.ot - shape.e));
    let w = root + free * pp.pow(rest);
    Ok((w * pp.pow(shape.e)) % pp.modulus())
}

/// A uniform solution of `d·x^2 ≡ t (mod p^k)` of the requested kind.
pub fn sample_type1(
    d: &BigInt,
    pp: &PrimePower,
    t: &RingElem,
    kind: RepKind,
    rng: &mut RandomSource,
) -> SampleOutcome {
    let r = type1_draw(d, pp, &(&t.value % pp.modulus()), kind, rng);
    SampleOutcome::from_result(r.map(|x| {
        alloc::vec![RingElem {
            value: x,
            modulus: pp.modulus().clone(),
        }]
    }))
}

// Uniform solution of F(x, y) ≡ t (mod 2^m) of a resolved kind.
fn star_draw(
    two: &TypeTwo<'_>,
    m: u64,
    t: &BigUint,
    kind: RepKind,
    rng: &mut RandomSource,
) -> (BigUint, BigUint) {
    if m == 0 {
        return (BigUint::zero(), BigUint::zero());
    }
    let t = t % (BigUint::one() << m);
    if kind == RepKind::Primitive {
        let seeds = two.seeds(t.is_odd());
        let (x0, y0) = seeds[rng.uniform_u64(seeds.len() as u64) as usize];
        let (mut x, mut y) = (BigInt::from(x0), BigInt::from(y0));
        let t = BigInt::from(t);
        for i in 1..m {
            let window = BigInt::one() << (i + 1);
            let diff = (&t - two.reduced_form(&x, &y)).mod_floor(&window);
            let d = u8::from(!(diff >> i).is_zero());
            // D ≡ b1·y + b2·x (mod 2) since b is odd
            let (b1, b2) = if x.is_odd() {
                let b1 = bit(rng);
                let y_odd = u8::from(y.is_odd());
                (b1, (d + b1 * y_odd) % 2)
            } else {
                (d, bit(rng))
            };
            x += BigInt::from(b1) << i;
            y += BigInt::from(b2) << i;
        }
        return (
            x.to_biguint().unwrap_or_default(),
            y.to_biguint().unwrap_or_default(),
        );
    }
    if m == 1 {
        return (BigUint::zero(), BigUint::zero());
    }
    // both even: x = 2x'', F(x, y) = 4F(x'', y'')
    let inner_t = &t >> 2u8;
    let inner = two.star_counts(m - 2, &inner_t);
    let inner_kind = if below(rng, &inner.total) < inner.primitive {
        RepKind::Primitive
    } else {
        RepKind::NonPrimitive
    };
    let (x, y) = star_draw(two, m - 2, &inner_t, inner_kind, rng);
    let top = BigUint::one() << (m - 2);
    let x = (x + &top * bit(rng)) << 1u8;
    let y = (y + &top * bit(rng)) << 1u8;
    (x, y)
}

fn type2_draw(
    two: &TypeTwo<'_>,
    k: u32,
    t: &BigUint,
    kind: RepKind,
    rng: &mut RandomSource,
) -> Result<(BigUint, BigUint)> {
    let counts = type2_counts(two, k, t);
    let kind = resolve(kind, &counts, rng)?;
    let k = u64::from(k);
    let shift = two.ell + 1;
    if shift >= k {
        let half = BigUint::one() << (k - 1);
        let (px, py) = if kind == RepKind::Primitive {
            [(1u8, 0u8), (0, 1), (1, 1)][rng.uniform_u64(3) as usize]
        } else {
            (0, 0)
        };
        let x = BigUint::from(px) + (below(rng, &half) << 1u8);
        let y = BigUint::from(py) + (below(rng, &half) << 1u8);
        return Ok((x, y));
    }
    let m = k - shift;
    let (x, y) = star_draw(two, m, &(t >> shift), kind, rng);
    let lift = BigUint::one() << shift;
    let x = x + (below(rng, &lift) << m);
    let y = y + (below(rng, &lift) << m);
    Ok((x, y))
}

/// A uniform solution of a Type II block equation modulo `2^k`. Panics on a Type I block.
pub fn sample_type2(
    blk: &Block,
    k: u32,
    t: &RingElem,
    kind: RepKind,
    rng: &mut RandomSource,
) -> SampleOutcome {
    let two = TypeTwo::of(blk).expect("sample_type2 needs a Type II block");
    let modulus = BigUint::one() << k;
    let r = type2_draw(&two, k, &(&t.value % &modulus), kind, rng);
    SampleOutcome::from_result(r.map(|(x, y)| {
        alloc::vec![
            RingElem {
                value: x,
                modulus: modulus.clone(),
            },
            RingElem {
                value: y,
                modulus: modulus.clone(),
            },
        ]
    }))
}

/// Reusable sampler for one form and modulus.
///
/// Holds the diagonalization and the per-suffix count tables so that
/// repeated draws only pay for the random choices.
#[derive(Debug, Clone)]
pub struct FormSampler {
    pp: PrimePower,
    bd: BlockDiagForm,
    split: SplitTable,
    block_tables: Vec<Vec<RepCounts>>,
    suffix: Vec<Vec<RepCounts>>,
}

struct Cell {
    g1: usize,
    g2: usize,
    k1: RepKind,
    k2: RepKind,
}

impl FormSampler {
    pub fn new(q: &QuadraticForm, pp: &PrimePower) -> Self {
        let bd = block_diagonalize(q, pp);
        let split = SplitTable::new(pp);
        let block_tables = bd.blocks.iter().map(|b| block_counts(b, pp)).collect();
        let suffix = suffix_counts(&bd.blocks, pp, &split);
        FormSampler {
            pp: pp.clone(),
            bd,
            split,
            block_tables,
            suffix,
        }
    }

    pub fn modulus(&self) -> &PrimePower {
        &self.pp
    }

    pub fn counts(&self, t: &BigInt) -> &RepCounts {
        let g = symbol_of_reduced(&self.pp, &self.pp.reduce(t));
        &self.suffix[0][symbol_index(&self.pp, &g)]
    }

    pub fn sample(&self, t: &BigInt, kind: RepKind, rng: &mut RandomSource) -> SampleOutcome {
        self.sample_with_stats(t, kind, rng, &mut SamplingStats::default())
    }

    /// Draws with up to [`RETRY_CAP`] restarts after internal failures.
    pub fn sample_with_stats(
        &self,
        t: &BigInt,
        kind: RepKind,
        rng: &mut RandomSource,
        stats: &mut SamplingStats,
    ) -> SampleOutcome {
        let t = self.pp.reduce(t);
        let counts = self.counts(&BigInt::from(t.clone()));
        if kind.count(counts).is_zero() {
            return SampleOutcome::NoSolution;
        }
        for _ in 0..RETRY_CAP {
            match self.attempt(&t, kind, rng, stats) {
                Ok(y) => return SampleOutcome::Solution(self.map_back(&y)),
                Err(Error::Fail) => stats.restarts += 1,
                Err(Error::NoSolution) => return SampleOutcome::NoSolution,
                Err(_) => break,
            }
        }
        stats.fails += 1;
        SampleOutcome::Fail
    }

    fn map_back(&self, y: &[BigUint]) -> Vec<RingElem> {
        let n = y.len();
        let m = self.pp.modulus();
        (0..n)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (j, yj) in y.iter().enumerate() {
                    acc += self.bd.u.get(i, j) * BigInt::from(yj.clone());
                }
                RingElem::new(&acc, m)
            })
            .collect()
    }

    fn attempt(
        &self,
        t: &BigUint,
        kind: RepKind,
        rng: &mut RandomSource,
        stats: &mut SamplingStats,
    ) -> Result<Vec<BigUint>> {
        let kind = resolve(kind, self.counts(&BigInt::from(t.clone())), rng)?;
        let mut out = Vec::with_capacity(self.bd.u.dim());
        let mut t = t.clone();
        let mut kind = kind;
        for i in 0..self.bd.blocks.len() {
            let cell = self.pick_cell(i, &t, kind, rng)?;
            let g1 = self.split.symbols[cell.g1];
            let g2 = self.split.symbols[cell.g2];
            let (a, b) = split_draw(&self.pp, &t, &g1, &g2, rng, stats)?;
            match &self.bd.blocks[i] {
                Block::TypeI(d) => out.push(type1_draw(d, &self.pp, &a, cell.k1, rng)?),
                blk => {
                    let two = TypeTwo::of(blk).expect("type II");
                    let (x, y) = type2_draw(&two, self.pp.k(), &a, cell.k1, rng)?;
                    out.push(x);
                    out.push(y);
                }
            }
            t = b;
            kind = cell.k2;
        }
        Ok(out)
    }

    // Chooses (γ1, γ2, kinds) with probability proportional to its count.
    fn pick_cell(&self, i: usize, t: &BigUint, kind: RepKind, rng: &mut RandomSource) -> Result<Cell> {
        use RepKind::{NonPrimitive as N, Primitive as P};
        let gi = symbol_index(&self.pp, &symbol_of_reduced(&self.pp, t));
        let x = &self.block_tables[i];
        let y = &self.suffix[i + 1];
        let kinds: &[(RepKind, RepKind)] = if kind == P {
            &[(N, P), (P, N), (P, P)]
        } else {
            &[(N, N)]
        };
        let mut cells = Vec::new();
        let mut weights = Vec::new();
        for (i1, i2, s) in &self.split.entries[gi] {
            for &(k1, k2) in kinds {
                let w = s * k1.count(&x[*i1]) * k2.count(&y[*i2]);
                if !w.is_zero() {
                    cells.push(Cell { g1: *i1, g2: *i2, k1, k2 });
                    weights.push(w);
                }
            }
        }
        let total: BigUint = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::NoSolution);
        }
        let mut u = rng.uniform_below(&total);
        for (cell, w) in cells.into_iter().zip(weights) {
            if u < w {
                return Ok(cell);
            }
            u -= w;
        }
        unreachable!("draw below the total weight")
    }
}

/// A uniform representation of `t` by `Q` modulo `p^k` of the requested kind.
pub fn sample_form(
    q: &QuadraticForm,
    pp: &PrimePower,
    t: &BigInt,
    kind: RepKind,
    rng: &mut RandomSource,
) -> SampleOutcome {
    FormSampler::new(q, pp).sample(t, kind, rng)
}

/// Reusable sampler modulo `Π p_i^{k_i}`.
#[derive(Debug, Clone)]
pub struct CompositeSampler {
    parts: Vec<FormSampler>,
    modulus: BigUint,
}

impl CompositeSampler {
    pub fn new(q: &QuadraticForm, factors: &[PrimePower]) -> Result<Self> {
        check_coprime(factors)?;
        Ok(CompositeSampler {
            parts: factors.iter().map(|pp| FormSampler::new(q, pp)).collect(),
            modulus: factors.iter().map(|pp| pp.modulus().clone()).product(),
        })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn sample(&self, t: &BigInt, kind: RepKind, rng: &mut RandomSource) -> SampleOutcome {
        self.sample_with_stats(t, kind, rng, &mut SamplingStats::default())
    }

    /// Primitive modulo `q` means primitive at every prime; a non-primitive draw
    /// first picks which primes are non-primitive, weighted by the counts.
    pub fn sample_with_stats(
        &self,
        t: &BigInt,
        kind: RepKind,
        rng: &mut RandomSource,
        stats: &mut SamplingStats,
    ) -> SampleOutcome {
        let kinds = match self.factor_kinds(t, kind, rng) {
            Ok(k) => k,
            Err(_) => return SampleOutcome::NoSolution,
        };
        let mut draws = Vec::with_capacity(self.parts.len());
        for (part, k) in self.parts.iter().zip(kinds) {
            match part.sample_with_stats(t, k, rng, stats) {
                SampleOutcome::Solution(v) => draws.push(v),
                other => return other,
            }
        }
        let n = draws.first().map_or(0, Vec::len);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let residues: Vec<(BigUint, BigUint)> = draws
                .iter()
                .map(|v| (v[i].value.clone(), v[i].modulus.clone()))
                .collect();
            match crt_combine(&residues) {
                Ok((x, m)) => out.push(RingElem { value: x, modulus: m }),
                Err(_) => return SampleOutcome::Fail,
            }
        }
        SampleOutcome::Solution(out)
    }

    fn factor_kinds(&self, t: &BigInt, kind: RepKind, rng: &mut RandomSource) -> Result<Vec<RepKind>> {
        let r = self.parts.len();
        let counts: Vec<&RepCounts> = self.parts.iter().map(|p| p.counts(t)).collect();
        match kind {
            RepKind::Any | RepKind::Primitive => {
                if counts.iter().any(|c| kind.count(c).is_zero()) {
                    return Err(Error::NoSolution);
                }
                Ok(alloc::vec![kind; r])
            }
            RepKind::NonPrimitive => {
                // bit i set: factor i non-primitive; the all-primitive pattern is excluded
                let weight = |mask: usize| -> BigUint {
                    counts
                        .iter()
                        .enumerate()
                        .map(|(i, c)| {
                            if mask >> i & 1 == 1 {
                                c.nonprimitive.clone()
                            } else {
                                c.primitive.clone()
                            }
                        })
                        .product()
                };
                let weights: Vec<BigUint> = (1..1usize << r).map(weight).collect();
                let total: BigUint = weights.iter().sum();
                if total.is_zero() {
                    return Err(Error::NoSolution);
                }
                let mut u = rng.uniform_below(&total);
                for (j, w) in weights.iter().enumerate() {
                    if u < *w {
                        let mask = j + 1;
                        return Ok((0..r)
                            .map(|i| {
                                if mask >> i & 1 == 1 {
                                    RepKind::NonPrimitive
                                } else {
                                    RepKind::Primitive
                                }
                            })
                            .collect());
                    }
                    u -= w;
                }
                unreachable!("draw below the total weight")
            }
        }
    }
}

/// A uniform representation modulo `q = Π p_i^{k_i}`, combined by CRT.
pub fn sample_composite(
    q: &QuadraticForm,
    factors: &[PrimePower],
    t: &BigInt,
    kind: RepKind,
    rng: &mut RandomSource,
) -> Result<SampleOutcome> {
    Ok(CompositeSampler::new(q, factors)?.sample(t, kind, rng))
}

/// Whether `x` is primitive modulo `p`: some coordinate is a unit.
pub fn is_primitive(x: &[RingElem], p: &BigUint) -> bool {
    x.iter().any(|c| !(&c.value % p).is_zero())
}
