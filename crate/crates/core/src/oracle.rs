//! Brute-force ground truth: exhaustive enumeration and chi-square uniformity.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use crate::blockdiag::QuadraticForm;
use crate::counting::RepCounts;
use crate::modring::{reduce_mod, PrimePower};
use crate::{Error, Result};

/// Default cap on the number of enumerated vectors.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

// Flat u64 copy of a form reduced modulo q.
struct SmallForm {
    n: usize,
    q: u64,
    entries: Vec<u64>,
    primes: Vec<u64>,
}

impl SmallForm {
    fn new(form: &QuadraticForm, q: u64, primes: &[u64], budget: u128) -> Result<Self> {
        let n = form.dim();
        let needed = (q as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if needed > budget || q > u64::from(u32::MAX) {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let qb = BigUint::from(q);
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(reduce_mod(form.entry(i, j), &qb).to_u64().unwrap_or(0));
            }
        }
        Ok(SmallForm {
            n,
            q,
            entries,
            primes: primes.to_vec(),
        })
    }

    fn e(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    // Bitmask over primes: bit i set when some coordinate is a unit mod primes[i].
    fn unit_mask(&self, v: u64) -> u32 {
        let mut m = 0;
        for (i, p) in self.primes.iter().enumerate() {
            if v % p != 0 {
                m |= 1 << i;
            }
        }
        m
    }

    fn full_mask(&self) -> u32 {
        (1u32 << self.primes.len()) - 1
    }

    /// Calls `visit(x, value, primitive)` for every vector, with `x[0]` running fastest.
    fn for_each(&self, mut visit: impl FnMut(&[u64], u64, bool)) {
        let (n, q) = (self.n, self.q);
        if n == 0 {
            visit(&[], 0, self.primes.is_empty());
            return;
        }
        let full = self.full_mask();
        let mut x = vec![0u64; n];
        loop {
            // contribution of x[1..], and the linear coefficient of x[0]
            let mut base = 0u64;
            let mut lin = 0u64;
            let mut mask = 0u32;
            for i in 1..n {
                mask |= self.unit_mask(x[i]);
                lin = (lin + self.mulmod(self.e(0, i), x[i])) % q;
                for j in 1..n {
                    base = (base + self.mulmod(self.e(i, j), self.mulmod(x[i], x[j]))) % q;
                }
            }
            let lin2 = (2 * lin) % q;
            let d = self.e(0, 0);
            // v(x0 + 1) - v(x0) = 2·lin + d·(2·x0 + 1)
            let mut v = base;
            let mut step = (lin2 + d) % q;
            let two_d = (2 * d) % q;
            for x0 in 0..q {
                x[0] = x0;
                let prim = (mask | self.unit_mask(x0)) == full;
                visit(&x, v, prim);
                v = (v + step) % q;
                step = (step + two_d) % q;
            }
            // odometer over x[1..]
            let mut i = 1;
            loop {
                if i == n {
                    return;
                }
                x[i] += 1;
                if x[i] < q {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
        }
    }
}

fn to_small(t: &BigInt, q: u64) -> u64 {
    reduce_mod(t, &BigUint::from(q)).to_u64().unwrap_or(0)
}

fn small_pp(pp: &PrimePower) -> Result<(u64, u64)> {
    match (pp.modulus().to_u64(), pp.p().to_u64()) {
        (Some(q), Some(p)) => Ok((q, p)),
        _ => Err(Error::BudgetExceeded {
            needed: u128::MAX,
            budget: DEFAULT_BUDGET,
        }),
    }
}

/// Every `x ∈ (Z/p^k)^n` with `x'Qx ≡ t`, in odometer order, with its counts.
pub fn enumerate_reps(
    form: &QuadraticForm,
    pp: &PrimePower,
    t: &BigInt,
) -> Result<(Vec<Vec<BigUint>>, RepCounts)> {
    enumerate_reps_with_budget(form, pp, t, DEFAULT_BUDGET)
}

pub fn enumerate_reps_with_budget(
    form: &QuadraticForm,
    pp: &PrimePower,
    t: &BigInt,
    budget: u128,
) -> Result<(Vec<Vec<BigUint>>, RepCounts)> {
    let (q, p) = small_pp(pp)?;
    enumerate_mod(form, q, &[p], t, budget)
}

/// Enumeration modulo an arbitrary `q` whose prime divisors are `primes`.
///
/// A vector is primitive iff for every listed prime some coordinate is a unit modulo it.
pub fn enumerate_mod(
    form: &QuadraticForm,
    q: u64,
    primes: &[u64],
    t: &BigInt,
    budget: u128,
) -> Result<(Vec<Vec<BigUint>>, RepCounts)> {
    let small = SmallForm::new(form, q, primes, budget)?;
    let target = to_small(t, q);
    let mut sols = Vec::new();
    let (mut prim, mut non) = (0u64, 0u64);
    small.for_each(|x, v, is_prim| {
        if v == target {
            sols.push(x.iter().map(|&c| BigUint::from(c)).collect());
            if is_prim {
                prim += 1;
            } else {
                non += 1;
            }
        }
    });
    Ok((sols, RepCounts::from_u64(prim, non)))
}

/// Counts for every target `t ∈ [0, q)` in one pass over `(Z/q)^n`.
pub fn enumerate_counts_all(
    form: &QuadraticForm,
    q: u64,
    primes: &[u64],
    budget: u128,
) -> Result<Vec<RepCounts>> {
    let small = SmallForm::new(form, q, primes, budget)?;
    let mut total = vec![0u64; q as usize];
    let mut prim = vec![0u64; q as usize];
    small.for_each(|_, v, is_prim| {
        total[v as usize] += 1;
        prim[v as usize] += u64::from(is_prim);
    });
    Ok(total
        .into_iter()
        .zip(prim)
        .map(|(a, b)| RepCounts::from_u64(b, a - b))
        .collect())
}

/// Per-target counts modulo a prime power.
pub fn counts_all_targets(form: &QuadraticForm, pp: &PrimePower) -> Result<Vec<RepCounts>> {
    let (q, p) = small_pp(pp)?;
    enumerate_counts_all(form, q, &[p], DEFAULT_BUDGET)
}

/// Pearson statistic as the exact fraction `numerator / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChiSquare {
    pub numerator: u128,
    pub denominator: u128,
    pub degrees_of_freedom: usize,
    pub pass: bool,
}

impl ChiSquare {
    pub fn statistic(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Goodness of fit of `observed` against the uniform law on `support` cells, at α = 0.001.
pub fn chi_square_uniform(observed: &[u64], support: usize) -> Result<ChiSquare> {
    if observed.len() != support {
        return Err(Error::DimensionMismatch {
            expected: support,
            got: observed.len(),
        });
    }
    if support == 0 {
        return Err(Error::Domain("empty support"));
    }
    let n: u64 = observed.iter().sum();
    let needed = 5 * support as u64;
    if n < needed {
        return Err(Error::InsufficientSamples { needed, got: n });
    }
    let k = support as u128;
    let n = n as u128;
    // Σ (O - N/K)^2 / (N/K) = Σ (K·O - N)^2 / (K·N)
    let numerator: u128 = observed
        .iter()
        .map(|&o| {
            let d = (k * o as u128).abs_diff(n);
            d * d
        })
        .sum();
    let denominator = k * n;
    let df = support - 1;
    let pass = match df {
        0 => true,
        _ => {
            let crit = critical_value(df).ok_or(Error::Domain("more than 255 degrees of freedom"))?;
            (numerator as f64) < crit * denominator as f64
        }
    };
    Ok(ChiSquare {
        numerator,
        denominator,
        degrees_of_freedom: df,
        pass,
    })
}

/// Upper 0.001 quantile of the chi-square law with `df` degrees of freedom, `1 ≤ df ≤ 255`.
pub fn critical_value(df: usize) -> Option<f64> {
    CHI2_999.get(df.checked_sub(1)?).copied()
}

static CHI2_999: [f64; 255] = [
    10.828, 13.816, 16.266, 18.467, 20.515, 22.458,
    24.322, 26.124, 27.877, 29.588, 31.264, 32.909,
    34.528, 36.123, 37.697, 39.252, 40.790, 42.312,
    43.820, 45.315, 46.797, 48.268, 49.728, 51.179,
    52.620, 54.052, 55.476, 56.892, 58.301, 59.703,
    61.098, 62.487, 63.870, 65.247, 66.619, 67.985,
    69.346, 70.703, 72.055, 73.402, 74.745, 76.084,
    77.419, 78.750, 80.077, 81.400, 82.720, 84.037,
    85.351, 86.661, 87.968, 89.272, 90.573, 91.872,
    93.168, 94.461, 95.751, 97.039, 98.324, 99.607,
    100.888, 102.166, 103.442, 104.716, 105.988, 107.258,
    108.526, 109.791, 111.055, 112.317, 113.577, 114.835,
    116.092, 117.346, 118.599, 119.850, 121.100, 122.348,
    123.594, 124.839, 126.083, 127.324, 128.565, 129.804,
    131.041, 132.277, 133.512, 134.745, 135.978, 137.208,
    138.438, 139.666, 140.893, 142.119, 143.344, 144.567,
    145.789, 147.010, 148.230, 149.449, 150.667, 151.884,
    153.099, 154.314, 155.528, 156.740, 157.952, 159.162,
    160.372, 161.581, 162.788, 163.995, 165.201, 166.406,
    167.610, 168.813, 170.016, 171.217, 172.418, 173.617,
    174.816, 176.014, 177.212, 178.408, 179.604, 180.799,
    181.993, 183.186, 184.379, 185.571, 186.762, 187.953,
    189.142, 190.331, 191.520, 192.707, 193.894, 195.080,
    196.266, 197.451, 198.635, 199.819, 201.002, 202.184,
    203.366, 204.547, 205.727, 206.907, 208.086, 209.265,
    210.443, 211.620, 212.797, 213.973, 215.149, 216.324,
    217.499, 218.673, 219.846, 221.019, 222.191, 223.363,
    224.535, 225.705, 226.876, 228.045, 229.215, 230.383,
    231.552, 232.719, 233.887, 235.053, 236.220, 237.385,
    238.551, 239.716, 240.880, 242.044, 243.207, 244.370,
    245.533, 246.695, 247.857, 249.018, 250.179, 251.339,
    252.499, 253.659, 254.818, 255.976, 257.135, 258.292,
    259.450, 260.607, 261.763, 262.920, 264.075, 265.231,
    266.386, 267.541, 268.695, 269.849, 271.002, 272.155,
    273.308, 274.460, 275.612, 276.764, 277.915, 279.066,
    280.217, 281.367, 282.517, 283.666, 284.815, 285.964,
    287.112, 288.261, 289.408, 290.556, 291.703, 292.850,
    293.996, 295.142, 296.288, 297.433, 298.579, 299.723,
    300.868, 302.012, 303.156, 304.299, 305.443, 306.586,
    307.728, 308.871, 310.013, 311.154, 312.296, 313.437,
    314.578, 315.718, 316.859, 317.999, 319.138, 320.278,
    321.417, 322.556, 323.694, 324.832, 325.970, 327.108,
    328.246, 329.383, 330.520,
];
