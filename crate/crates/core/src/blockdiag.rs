//! Reduction of a quadratic form to block-diagonal shape over `Z/p^k`.
//!
//! [`block_diagonalize`] finds `U ∈ SL_n(Z/p^k)` with `U'QU` a direct sum of
//! Type I blocks `[d]` and, only when `p = 2`, Type II blocks
//! `2^ℓ [[2a, b], [b, 2c]]` with `b` odd.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::modring::{inverse_mod, reduce_mod, split_reduced, Order, PrimePower};
use crate::{Error, Result};

/// Square matrix of arbitrary-precision integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    data: Vec<BigInt>,
}

impl Matrix {
    pub fn zero(n: usize) -> Self {
        Matrix {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix { n, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(l, j);
                }
            }
        }
        Ok(out)
    }

    /// Entries reduced into `[0, m)`.
    pub fn reduced(&self, m: &BigUint) -> Matrix {
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|v| BigInt::from(reduce_mod(v, m)))
                .collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, r);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Determinant modulo `m`, in `[0, m)`.
    pub fn det_mod(&self, m: &BigUint) -> BigUint {
        reduce_mod(&self.det(), m)
    }

    /// Inverse modulo `m` via the adjugate; fails when the determinant is not a unit.
    pub fn inverse_mod(&self, m: &BigUint) -> Result<Matrix> {
        let n = self.n;
        let d_inv = BigInt::from(inverse_mod(&self.det_mod(m), m)?);
        let mut inv = Matrix::zero(n);
        if n == 1 {
            inv.set(0, 0, BigInt::from(reduce_mod(&d_inv, m)));
            return Ok(inv);
        }
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j);
                let mut c = minor.det();
                if (i + j) % 2 == 1 {
                    c = -c;
                }
                // adj[j][i] = cofactor(i, j)
                inv.set(j, i, BigInt::from(reduce_mod(&(c * &d_inv), m)));
            }
        }
        Ok(inv)
    }

    fn minor(&self, row: usize, col: usize) -> Matrix {
        let n = self.n - 1;
        let mut out = Matrix::zero(n);
        for (ii, i) in (0..self.n).filter(|&i| i != row).enumerate() {
            for (jj, j) in (0..self.n).filter(|&j| j != col).enumerate() {
                out.set(ii, jj, self.get(i, j).clone());
            }
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// An `n`-ary integral quadratic form `x'Qx` given by its symmetric matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    matrix: Matrix,
}

impl QuadraticForm {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_symmetric() {
            return Err(Error::AsymmetricMatrix);
        }
        Ok(QuadraticForm { matrix })
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        QuadraticForm::new(Matrix::from_rows(rows)?)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        QuadraticForm::new(Matrix::from_i64(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        QuadraticForm {
            matrix: Matrix::identity(n),
        }
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = Matrix::zero(entries.len());
        for (i, d) in entries.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        QuadraticForm { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        self.matrix.get(i, j)
    }

    /// `x'Qx` over the integers.
    pub fn eval(&self, x: &[BigUint]) -> BigInt {
        let n = self.dim();
        let x: Vec<BigInt> = x.iter().map(|v| BigInt::from(v.clone())).collect();
        let mut acc = BigInt::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let mut row = BigInt::zero();
            for j in 0..n {
                row += self.entry(i, j) * &x[j];
            }
            acc += row * &x[i];
        }
        acc
    }

    pub fn reduced(&self, m: &BigUint) -> QuadraticForm {
        QuadraticForm {
            matrix: self.matrix.reduced(m),
        }
    }
}

/// One summand of a block-diagonal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Block {
    /// The 1×1 form `d·x^2`.
    TypeI(BigInt),
    /// `2^ℓ [[2a, b], [b, 2c]]` with `b` odd, i.e. `2^{ℓ+1}(a x^2 + b x y + c y^2)`.
    TypeII {
        ell: u64,
        a: BigInt,
        b: BigInt,
        c: BigInt,
    },
}

impl Block {
    pub fn dim(&self) -> usize {
        match self {
            Block::TypeI(_) => 1,
            Block::TypeII { .. } => 2,
        }
    }

    pub fn is_type_two(&self) -> bool {
        matches!(self, Block::TypeII { .. })
    }

    pub fn to_form(&self) -> QuadraticForm {
        blocks_form(core::slice::from_ref(self))
    }

    /// The block's value at `x` (one or two coordinates).
    pub fn eval(&self, x: &[BigUint]) -> BigInt {
        match self {
            Block::TypeI(d) => {
                let v = BigInt::from(x[0].clone());
                d * &v * &v
            }
            Block::TypeII { ell, a, b, c } => {
                let (u, v) = (BigInt::from(x[0].clone()), BigInt::from(x[1].clone()));
                (a * &u * &u + b * &u * &v + c * &v * &v) << (ell + 1)
            }
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::TypeI(d) => write!(f, "I({d})"),
            Block::TypeII { ell, a, b, c } => write!(f, "II(ell={ell}, a={a}, b={b}, c={c})"),
        }
    }
}

/// Output of [`block_diagonalize`]: `U'QU ≡ ⊕ blocks (mod p^k)` with `det U ≡ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDiagForm {
    pub blocks: Vec<Block>,
    pub u: Matrix,
    pub modulus: PrimePower,
}

/// `U'QU` with entries reduced modulo `p^k`.
pub fn apply_transform(q: &QuadraticForm, u: &Matrix, pp: &PrimePower) -> Result<QuadraticForm> {
    if u.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            got: u.dim(),
        });
    }
    let m = u.transpose().mul(q.matrix())?.mul(u)?;
    Ok(QuadraticForm {
        matrix: m.reduced(pp.modulus()),
    })
}

/// The direct-sum matrix of `bd.blocks`.
pub fn blocks_to_matrix(bd: &BlockDiagForm) -> QuadraticForm {
    blocks_form(&bd.blocks)
}

pub(crate) fn blocks_form(blocks: &[Block]) -> QuadraticForm {
    let n = blocks.iter().map(Block::dim).sum();
    let mut m = Matrix::zero(n);
    let mut at = 0;
    for blk in blocks {
        match blk {
            Block::TypeI(d) => m.set(at, at, d.clone()),
            Block::TypeII { ell, a, b, c } => {
                m.set(at, at, a << (ell + 1));
                m.set(at + 1, at + 1, c << (ell + 1));
                m.set(at, at + 1, b << *ell);
                m.set(at + 1, at, b << *ell);
            }
        }
        at += blk.dim();
    }
    QuadraticForm { matrix: m }
}

// Working state: M = U'QU mod p^k, updated by elementary column operations on U.
struct Reducer<'a> {
    pp: &'a PrimePower,
    m: Matrix,
    u: Matrix,
}

impl Reducer<'_> {
    fn order(&self, i: usize, j: usize) -> u64 {
        match split_reduced(self.pp, self.m.get(i, j).magnitude()).0 {
            Order::Finite(o) => o,
            Order::Infinite => u64::from(self.pp.k()),
        }
    }

    fn fix(&mut self, i: usize, j: usize) {
        let v = reduce_mod(self.m.get(i, j), self.pp.modulus());
        self.m.set(i, j, BigInt::from(v));
    }

    // v_dst += c·v_src
    fn add_multiple(&mut self, src: usize, dst: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let n = self.m.dim();
        for r in 0..n {
            let v = self.m.get(r, dst) + c * self.m.get(r, src);
            self.m.set(r, dst, v);
            self.fix(r, dst);
        }
        for col in 0..n {
            let v = self.m.get(dst, col) + c * self.m.get(src, col);
            self.m.set(dst, col, v);
            self.fix(dst, col);
        }
        for r in 0..n {
            let v = self.u.get(r, dst) + c * self.u.get(r, src);
            self.u.set(r, dst, BigInt::from(reduce_mod(&v, self.pp.modulus())));
        }
    }

    // new v_s = v_i, new v_i = -v_s; keeps det U = 1
    fn signed_swap(&mut self, s: usize, i: usize) {
        if s == i {
            return;
        }
        let n = self.m.dim();
        for r in 0..n {
            let a = self.m.get(r, s).clone();
            let b = self.m.get(r, i).clone();
            self.m.set(r, s, b);
            self.m.set(r, i, -a);
        }
        for col in 0..n {
            let a = self.m.get(s, col).clone();
            let b = self.m.get(i, col).clone();
            self.m.set(s, col, b);
            self.m.set(i, col, -a);
        }
        for r in 0..n {
            let a = self.u.get(r, s).clone();
            let b = self.u.get(r, i).clone();
            self.u.set(r, s, b);
            self.u.set(r, i, BigInt::from(reduce_mod(&-a, self.pp.modulus())));
        }
        for r in 0..n {
            self.fix(r, s);
            self.fix(r, i);
            self.fix(s, r);
            self.fix(i, r);
        }
    }

    // Minimal-order entry of the active block, preferring the diagonal.
    fn pivot(&self, s: usize) -> (usize, usize, u64) {
        let n = self.m.dim();
        let mut best = (s, s, u64::MAX);
        for i in s..n {
            let o = self.order(i, i);
            if o < best.2 {
                best = (i, i, o);
            }
        }
        for i in s..n {
            for j in i + 1..n {
                let o = self.order(i, j);
                if o < best.2 {
                    best = (i, j, o);
                }
            }
        }
        best
    }

    fn eliminate_diagonal(&mut self, s: usize, o: u64) {
        let modulus = self.pp.modulus().clone();
        let po = BigInt::from(self.pp.pow(o));
        let unit = reduce_mod(&(self.m.get(s, s) / &po), &modulus);
        let inv = BigInt::from(inverse_mod(&unit, &modulus).expect("pivot is p^o times a unit"));
        for j in s + 1..self.m.dim() {
            let c = -(self.m.get(s, j) / &po) * &inv;
            self.add_multiple(s, j, &c);
        }
    }

    fn eliminate_type_two(&mut self, s: usize, o: u64) {
        let modulus = self.pp.modulus().clone();
        let po = BigInt::from(self.pp.pow(o));
        let a = self.m.get(s, s) / &po;
        let b = self.m.get(s, s + 1) / &po;
        let c = self.m.get(s + 1, s + 1) / &po;
        let det = reduce_mod(&(&a * &c - &b * &b), &modulus);
        let det_inv = BigInt::from(inverse_mod(&det, &modulus).expect("odd determinant"));
        for r in s + 2..self.m.dim() {
            let r1 = -(self.m.get(s, r) / &po);
            let r2 = -(self.m.get(s + 1, r) / &po);
            let x = (&c * &r1 - &b * &r2) * &det_inv;
            let y = (&a * &r2 - &b * &r1) * &det_inv;
            let x = BigInt::from(reduce_mod(&x, &modulus));
            let y = BigInt::from(reduce_mod(&y, &modulus));
            self.add_multiple(s, r, &x);
            self.add_multiple(s + 1, r, &y);
        }
    }
}

/// Reduces `Q` to block-diagonal form modulo `p^k`. Deterministic.
///
/// Odd `p` gives only Type I blocks. Rows that vanish modulo `p^k` give `TypeI(0)`.
pub fn block_diagonalize(q: &QuadraticForm, pp: &PrimePower) -> BlockDiagForm {
    let n = q.dim();
    let k = u64::from(pp.k());
    let mut red = Reducer {
        pp,
        m: q.matrix().reduced(pp.modulus()),
        u: Matrix::identity(n),
    };
    let mut blocks = Vec::with_capacity(n);
    let mut s = 0;
    while s < n {
        let (i, j, o) = red.pivot(s);
        if o >= k {
            blocks.extend((s..n).map(|_| Block::TypeI(BigInt::zero())));
            break;
        }
        if i == j {
            red.signed_swap(s, i);
            red.eliminate_diagonal(s, o);
            blocks.push(Block::TypeI(red.m.get(s, s).clone()));
            s += 1;
        } else if !pp.is_two() {
            // the sum has order o since both diagonal entries have larger order
            red.add_multiple(j, i, &BigInt::one());
        } else {
            red.signed_swap(s, i);
            red.signed_swap(s + 1, j);
            red.eliminate_type_two(s, o);
            let m = &red.m;
            blocks.push(Block::TypeII {
                ell: o,
                a: m.get(s, s) >> (o + 1),
                b: m.get(s, s + 1) >> o,
                c: m.get(s + 1, s + 1) >> (o + 1),
            });
            s += 2;
        }
    }
    BlockDiagForm {
        blocks,
        u: red.u,
        modulus: pp.clone(),
    }
}

/// The minimal order among the entries of `q` modulo `p^k` (`k` for the zero form).
pub fn min_order(q: &QuadraticForm, pp: &PrimePower) -> u64 {
    let n = q.dim();
    let k = u64::from(pp.k());
    let mut best = k;
    for i in 0..n {
        for j in 0..n {
            if let Order::Finite(o) = split_reduced(pp, &pp.reduce(q.entry(i, j))).0 {
                best = best.min(o);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn pp(p: u64, k: u32) -> PrimePower {
        PrimePower::from_u64(p, k).unwrap()
    }

    fn check(q: &QuadraticForm, pp: &PrimePower) -> BlockDiagForm {
        let bd = block_diagonalize(q, pp);
        assert!(bd.u.det_mod(pp.modulus()).is_one(), "det U for {}", q.matrix());
        let lhs = apply_transform(q, &bd.u, pp).unwrap();
        let rhs = blocks_to_matrix(&bd).reduced(pp.modulus());
        assert_eq!(lhs, rhs, "U'QU for {}", q.matrix());
        for blk in &bd.blocks {
            if let Block::TypeII { b, .. } = blk {
                assert!(pp.is_two());
                assert!(b.is_odd());
            }
        }
        bd
    }

    #[test]
    fn already_diagonal() {
        let q = QuadraticForm::from_i64(&[&[5]]).unwrap();
        let bd = check(&q, &pp(7, 2));
        assert_eq!(bd.u, Matrix::identity(1));
        assert_eq!(bd.blocks, vec![Block::TypeI(BigInt::from(5))]);
    }

    #[test]
    fn hyperbolic_plane_mod_8() {
        let q = QuadraticForm::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        let bd = check(&q, &pp(2, 3));
        assert_eq!(bd.u, Matrix::identity(2));
        assert_eq!(
            bd.blocks,
            vec![Block::TypeII {
                ell: 0,
                a: BigInt::zero(),
                b: BigInt::one(),
                c: BigInt::zero()
            }]
        );
    }

    #[test]
    fn hyperbolic_plane_mod_5() {
        let q = QuadraticForm::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        let bd = check(&q, &pp(5, 1));
        assert_eq!(bd.u, Matrix::from_i64(&[&[1, 2], &[1, 3]]).unwrap());
        let two = BigInt::from(2);
        assert_eq!(bd.blocks, vec![Block::TypeI(two.clone()), Block::TypeI(two)]);
    }

    #[test]
    fn zero_form() {
        let q = QuadraticForm::from_i64(&[&[9, 0], &[0, 27]]).unwrap();
        let bd = check(&q, &pp(3, 2));
        assert_eq!(bd.u, Matrix::identity(2));
        assert!(bd.blocks.iter().all(|b| *b == Block::TypeI(BigInt::zero())));
    }

    #[test]
    fn shear_clears_off_diagonal() {
        // [[p·α1, p^2·α2], [p^2·α2, p^3·α3]] with p = 3
        let q = QuadraticForm::from_i64(&[&[3 * 2, 9 * 4], &[9 * 4, 27 * 5]]).unwrap();
        let pp = pp(3, 4);
        let bd = check(&q, &pp);
        let d = blocks_to_matrix(&bd);
        assert!(d.entry(0, 1).is_zero());
    }

    #[test]
    fn blocks_to_matrix_examples() {
        let mk = |blocks| BlockDiagForm {
            blocks,
            u: Matrix::identity(0),
            modulus: pp(2, 1),
        };
        let two = BigInt::from(2);
        assert_eq!(
            blocks_to_matrix(&mk(vec![Block::TypeI(two.clone()), Block::TypeI(two)])),
            QuadraticForm::from_i64(&[&[2, 0], &[0, 2]]).unwrap()
        );
        let hyp = Block::TypeII {
            ell: 0,
            a: BigInt::zero(),
            b: BigInt::one(),
            c: BigInt::zero(),
        };
        assert_eq!(
            blocks_to_matrix(&mk(vec![hyp])),
            QuadraticForm::from_i64(&[&[0, 1], &[1, 0]]).unwrap()
        );
        assert_eq!(blocks_to_matrix(&mk(vec![])).dim(), 0);
    }

    #[test]
    fn identity_transform_reduces() {
        let q = QuadraticForm::from_i64(&[&[30, -1], &[-1, 7]]).unwrap();
        let pp = pp(5, 2);
        assert_eq!(
            apply_transform(&q, &Matrix::identity(2), &pp).unwrap(),
            q.reduced(pp.modulus())
        );
        assert!(matches!(
            apply_transform(&q, &Matrix::identity(3), &pp),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn determinant_and_inverse() {
        let m = Matrix::from_i64(&[&[2, 3, 1], &[4, 1, -3], &[0, 5, 7]]).unwrap();
        assert_eq!(m.det(), BigInt::from(2 * (7 + 15) - 3 * 28 + 20));
        let singular = Matrix::from_i64(&[&[1, 2], &[2, 4]]).unwrap();
        assert!(singular.det().is_zero());
        let swap_needed = Matrix::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(swap_needed.det(), BigInt::from(-1));
        let modulus = BigUint::from(125u32);
        let u = Matrix::from_i64(&[&[1, 2], &[1, 3]]).unwrap();
        let inv = u.inverse_mod(&modulus).unwrap();
        assert_eq!(u.mul(&inv).unwrap().reduced(&modulus), Matrix::identity(2));
    }

    #[test]
    fn mixed_orders_mod_two_powers() {
        let cases: &[&[&[i64]]] = &[
            &[&[2, 1, 0], &[1, 2, 3], &[0, 3, 4]],
            &[&[4, 2, 6], &[2, 8, 2], &[6, 2, 0]],
            &[&[0, 2, 1, 0], &[2, 0, 0, 4], &[1, 0, 6, 1], &[0, 4, 1, 3]],
            &[&[1, 1], &[1, 1]],
            &[&[0, 4], &[4, 0]],
        ];
        for rows in cases {
            let q = QuadraticForm::from_i64(rows).unwrap();
            for k in 1..=6 {
                check(&q, &pp(2, k));
                check(&q, &pp(3, k));
            }
        }
    }
}
