//! Negacirculant blocks and four-negacirculant generator matrices.
//!
//! A row `r = (r_0, ..., r_{m-1})` is identified with the polynomial
//! `r_0 + r_1 x + ... + r_{m-1} x^{m-1}` in `GF(3)[x]/(x^m + 1)`. Row `i` of
//! the negacirculant matrix of `r` is `x^i r(x)`, i.e. the previous row
//! shifted right by one with the wrapped entry negated. Products of
//! negacirculant matrices are ring products, so the self-duality test runs
//! in `O(m^2)` without building any `n x n` matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::gf3::{Trit, TritMatrix, TritVector, MAX_LEN};

/// Largest block size: `4m` coordinates must fit a [`TritVector`].
pub const MAX_BLOCK: usize = MAX_LEN / 4;

/// First row of an `m x m` negacirculant matrix.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TritRow(TritVector);

impl TritRow {
    pub fn new(coeffs: TritVector) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("negacirculant row must be nonempty".into()));
        }
        if coeffs.len() > MAX_BLOCK {
            return Err(Error::TooLong(coeffs.len()));
        }
        Ok(TritRow(coeffs))
    }

    pub fn from_trits(values: &[u8]) -> Result<Self> {
        TritRow::new(TritVector::from_trits(values)?)
    }

    pub fn zero(m: usize) -> Self {
        TritRow(TritVector::zero(m))
    }

    /// `x^0 = (1, 0, ..., 0)`.
    pub fn one(m: usize) -> Self {
        TritRow(TritVector::unit(m, 0))
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coeffs(&self) -> &TritVector {
        &self.0
    }

    #[inline]
    pub fn get(&self, i: usize) -> Trit {
        self.0.get(i)
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.0.weight()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn scale(&self, c: Trit) -> TritRow {
        TritRow(self.0.scale(c))
    }

    pub fn to_trits(&self) -> Vec<u8> {
        self.0.to_trits()
    }

    /// First nonzero coefficient, if any.
    pub fn leading_coefficient(&self) -> Option<Trit> {
        self.0.leading_index().map(|i| self.0.get(i))
    }

    /// `x^s * r(x) mod (x^m + 1)`.
    pub fn shifted(&self, s: usize) -> TritRow {
        let m = self.m();
        let s = s % m;
        if s == 0 {
            return *self;
        }
        let mask = (1u128 << m) - 1;
        let (o, t) = (self.0.ones(), self.0.twos());
        let ones = ((o << s) & mask) | (t >> (m - s));
        let twos = ((t << s) & mask) | (o >> (m - s));
        TritRow(TritVector::from_planes(m, ones, twos).expect("shift keeps planes disjoint"))
    }
}

impl fmt::Debug for TritRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TritRow({})", self.0)
    }
}

impl fmt::Display for TritRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for TritRow {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_trits().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TritRow {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let trits = Vec::<u8>::deserialize(d)?;
        TritRow::from_trits(&trits).map_err(serde::de::Error::custom)
    }
}

/// The ordered pair `(r_A, r_B)` defining `C(r_A, r_B)` of length `4m`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NegaPair {
    pub ra: TritRow,
    pub rb: TritRow,
}

impl NegaPair {
    pub fn new(ra: TritRow, rb: TritRow) -> Result<Self> {
        if ra.m() != rb.m() {
            return Err(Error::Dimension { expected: ra.m(), found: rb.m() });
        }
        Ok(NegaPair { ra, rb })
    }

    pub fn from_trits(ra: &[u8], rb: &[u8]) -> Result<Self> {
        NegaPair::new(TritRow::from_trits(ra)?, TritRow::from_trits(rb)?)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.ra.m()
    }

    /// Code length `4m`.
    #[inline]
    pub fn length(&self) -> usize {
        4 * self.m()
    }

    pub fn is_self_dual(&self) -> bool {
        is_self_dual_pair(self)
    }

    pub fn generator(&self) -> TritMatrix {
        build_generator(self)
    }

    pub fn code(&self) -> LinearCode {
        LinearCode::new(build_generator(self)).expect("systematic generator has full rank")
    }
}

impl fmt::Debug for NegaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({}, {})", self.ra, self.rb)
    }
}

impl fmt::Display for NegaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The `m x m` negacirculant matrix whose first row is `r`.
pub fn nega_from_row(r: &TritRow) -> TritMatrix {
    let rows = (0..r.m()).map(|i| *r.shifted(i).coeffs()).collect();
    TritMatrix::from_rows(r.m(), rows).expect("rows have length m")
}

/// First row of the transpose of `nega_from_row(r)`:
/// `(r_0, 2r_{m-1}, 2r_{m-2}, ..., 2r_1)`.
pub fn nega_transpose_row(r: &TritRow) -> TritRow {
    let m = r.m();
    let mut out = TritVector::zero(m);
    out.set(0, r.get(0));
    for j in 1..m {
        out.set(j, -r.get(m - j));
    }
    TritRow(out)
}

/// `a(x) * b(x) mod (x^m + 1)`.
pub fn negacyclic_convolve(a: &TritRow, b: &TritRow) -> Result<TritRow> {
    if a.m() != b.m() {
        return Err(Error::Dimension { expected: a.m(), found: b.m() });
    }
    Ok(convolve_unchecked(a, b))
}

pub(crate) fn convolve_unchecked(a: &TritRow, b: &TritRow) -> TritRow {
    let mut acc = TritVector::zero(a.m());
    for i in 0..b.m() {
        let c = b.get(i);
        if !c.is_zero() {
            acc = acc + a.shifted(i).coeffs().scale(c);
        }
    }
    TritRow(acc)
}

/// `r(x) * r^T(x)`, the first row of `R R^T`.
pub fn gram_row(r: &TritRow) -> TritRow {
    convolve_unchecked(r, &nega_transpose_row(r))
}

/// Whether `A A^T + B B^T = 2 I`, which makes `C(A, B)` self-dual.
pub fn is_self_dual_pair(p: &NegaPair) -> bool {
    let sum = *gram_row(&p.ra).coeffs() + *gram_row(&p.rb).coeffs();
    let mut target = TritVector::zero(p.m());
    target.set(0, Trit::TWO);
    sum == target
}

/// The `2m x 4m` generator `( I_{2m} | [[A, B], [2B^T, A^T]] )`.
pub fn build_generator(p: &NegaPair) -> TritMatrix {
    let m = p.m();
    let ra_t = nega_transpose_row(&p.ra);
    let rb_t = nega_transpose_row(&p.rb);
    let mut rows = Vec::with_capacity(2 * m);
    for i in 0..m {
        rows.push(assemble_row(4 * m, i, p.ra.shifted(i).coeffs(), p.rb.shifted(i).coeffs()));
    }
    for i in 0..m {
        let left = rb_t.shifted(i).coeffs().negated();
        rows.push(assemble_row(4 * m, m + i, &left, ra_t.shifted(i).coeffs()));
    }
    TritMatrix::from_rows(4 * m, rows).expect("rows have length 4m")
}

/// The generator `( [[2A^T, B], [2B^T, 2A]] | I_{2m} )`, which is a parity
/// check matrix of `C(A, B)` and, for self-dual pairs, another generator.
pub fn parity_check_generator(p: &NegaPair) -> TritMatrix {
    let m = p.m();
    let ra_t = nega_transpose_row(&p.ra);
    let rb_t = nega_transpose_row(&p.rb);
    let mut rows = Vec::with_capacity(2 * m);
    for i in 0..m {
        let left = ra_t.shifted(i).coeffs().negated().concat(p.rb.shifted(i).coeffs()).unwrap();
        let ident = TritVector::unit(2 * m, i);
        rows.push(left.concat(&ident).unwrap());
    }
    for i in 0..m {
        let left = rb_t
            .shifted(i)
            .coeffs()
            .negated()
            .concat(&p.ra.shifted(i).coeffs().negated())
            .unwrap();
        let ident = TritVector::unit(2 * m, m + i);
        rows.push(left.concat(&ident).unwrap());
    }
    TritMatrix::from_rows(4 * m, rows).expect("rows have length 4m")
}

fn assemble_row(n: usize, unit: usize, left: &TritVector, right: &TritVector) -> TritVector {
    let m = left.len();
    let ones = (1u128 << unit) | (left.ones() << (2 * m)) | (right.ones() << (3 * m));
    let twos = (left.twos() << (2 * m)) | (right.twos() << (3 * m));
    TritVector::from_planes(n, ones, twos).expect("assembled row is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn row(t: &[u8]) -> TritRow {
        TritRow::from_trits(t).unwrap()
    }

    fn random_row(rng: &mut impl Rng, m: usize) -> TritRow {
        let t: Vec<u8> = (0..m).map(|_| rng.random_range(0..3)).collect();
        row(&t)
    }

    #[test]
    fn nega_from_row_examples() {
        assert_eq!(nega_from_row(&row(&[2])), TritMatrix::from_trit_rows(&[vec![2]]).unwrap());
        assert_eq!(
            nega_from_row(&row(&[1, 2])),
            TritMatrix::from_trit_rows(&[vec![1, 2], vec![1, 1]]).unwrap()
        );
        // [[r0,r1,r2],[2r2,r0,r1],[2r1,2r2,r0]] with (r0,r1,r2) = (1,2,0)
        assert_eq!(
            nega_from_row(&row(&[1, 2, 0])),
            TritMatrix::from_trit_rows(&[vec![1, 2, 0], vec![0, 1, 2], vec![1, 0, 1]]).unwrap()
        );
    }

    #[test]
    fn transpose_row_examples() {
        assert_eq!(nega_transpose_row(&row(&[2])), row(&[2]));
        assert_eq!(nega_transpose_row(&row(&[1, 2])), row(&[1, 1]));
        let r = row(&[1, 0, 2, 2, 1]);
        assert_eq!(nega_transpose_row(&nega_transpose_row(&r)), r);
    }

    #[test]
    fn convolve_examples() {
        let a = row(&[2, 1, 0, 1]);
        assert_eq!(negacyclic_convolve(&a, &TritRow::one(4)).unwrap(), a);
        assert_eq!(negacyclic_convolve(&row(&[0, 1]), &row(&[0, 1])).unwrap(), row(&[2, 0]));
        assert!(negacyclic_convolve(&row(&[1]), &row(&[1, 0])).is_err());
    }

    #[test]
    fn convolve_matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let a = random_row(&mut rng, 5);
            let b = random_row(&mut rng, 5);
            let prod = nega_from_row(&a).mat_mul(&nega_from_row(&b)).unwrap();
            assert_eq!(negacyclic_convolve(&a, &b).unwrap().coeffs(), prod.row(0));
            assert_eq!(nega_from_row(&negacyclic_convolve(&a, &b).unwrap()), prod);
        }
    }

    #[test]
    fn negacirculants_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in 1..=8 {
            for _ in 0..20 {
                let a = nega_from_row(&random_row(&mut rng, m));
                let b = nega_from_row(&random_row(&mut rng, m));
                assert_eq!(a.mat_mul(&b).unwrap(), b.mat_mul(&a).unwrap());
            }
        }
    }

    #[test]
    fn transpose_row_builds_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..=12 {
            for _ in 0..20 {
                let r = random_row(&mut rng, m);
                assert_eq!(nega_from_row(&nega_transpose_row(&r)), nega_from_row(&r).transpose());
            }
        }
    }

    #[test]
    fn self_dual_examples() {
        assert!(is_self_dual_pair(&NegaPair::from_trits(&[1], &[1]).unwrap()));
        assert!(!is_self_dual_pair(&NegaPair::from_trits(&[1], &[0]).unwrap()));
        let p = NegaPair::from_trits(&[0, 0, 0, 0, 1, 1, 1, 1, 1, 0], &[1, 1, 2, 1, 0, 0, 1, 0, 1, 0])
            .unwrap();
        assert!(is_self_dual_pair(&p));
    }

    #[test]
    fn generator_examples() {
        let g = build_generator(&NegaPair::from_trits(&[1], &[1]).unwrap());
        assert_eq!(g, TritMatrix::from_trit_rows(&[vec![1, 0, 1, 1], vec![0, 1, 2, 1]]).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in 1..=10 {
            let p = NegaPair::new(random_row(&mut rng, m), random_row(&mut rng, m)).unwrap();
            let g = build_generator(&p);
            assert_eq!(g.nrows(), 2 * m);
            assert_eq!(g.ncols(), 4 * m);
            assert_eq!(g.rank(), 2 * m);
            for i in 0..2 * m {
                assert_eq!(g.row(i).slice(0, 2 * m), TritVector::unit(2 * m, i));
            }
        }
    }

    #[test]
    fn generator_layout_matches_block_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = 4;
        let p = NegaPair::new(random_row(&mut rng, m), random_row(&mut rng, m)).unwrap();
        let a = nega_from_row(&p.ra);
        let b = nega_from_row(&p.rb);
        let top = a.hstack(&b).unwrap();
        let bottom = b.transpose().scale(Trit::TWO).hstack(&a.transpose()).unwrap();
        let expected = TritMatrix::identity(2 * m).hstack(&top.vstack(&bottom).unwrap()).unwrap();
        assert_eq!(build_generator(&p), expected);
    }

    #[test]
    fn ring_test_agrees_with_matrix_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut seen_self_dual = 0;
        for &m in &[2usize, 3, 5] {
            for _ in 0..1000 {
                let p = NegaPair::new(random_row(&mut rng, m), random_row(&mut rng, m)).unwrap();
                let g = build_generator(&p);
                let matrix_says = g.gram().is_zero();
                assert_eq!(is_self_dual_pair(&p), matrix_says, "{p}");
                seen_self_dual += matrix_says as usize;
            }
        }
        assert!(seen_self_dual > 0);
    }

    #[test]
    fn parity_check_form_generates_same_code() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in 1..=5 {
            let mut found = 0;
            while found < 5 {
                let p = NegaPair::new(random_row(&mut rng, m), random_row(&mut rng, m)).unwrap();
                if !is_self_dual_pair(&p) {
                    continue;
                }
                found += 1;
                let g = build_generator(&p);
                let h = parity_check_generator(&p);
                assert!(g.mat_mul(&h.transpose()).unwrap().is_zero());
                assert!(g.same_row_space(&h), "{p}");
            }
        }
    }
}
