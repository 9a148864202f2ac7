//! Arithmetic over GF(3).
//!
//! Vectors are stored as two bitplanes: `ones` marks coordinates equal to 1
//! and `twos` marks coordinates equal to 2. Negation is a plane swap,
//! addition is a handful of word operations and the Hamming weight is one
//! popcount of the union of the planes. Vectors hold at most [`MAX_LEN`]
//! coordinates, which covers every code length this crate deals with.

use std::fmt;
use std::ops::{Add, BitAnd, BitOr, BitXor, Mul, Neg, Not, Shl, Shr, Sub};

use crate::error::{Error, Result};

/// Largest supported vector length.
pub const MAX_LEN: usize = 128;

/// An element of GF(3), stored as 0, 1 or 2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trit(u8);

impl Trit {
    pub const ZERO: Trit = Trit(0);
    pub const ONE: Trit = Trit(1);
    pub const TWO: Trit = Trit(2);

    pub fn new(value: u8) -> Result<Self> {
        if value > 2 {
            return Err(Error::InvalidTrit(value));
        }
        Ok(Trit(value))
    }

    /// Reduces any integer mod 3.
    pub const fn reduce(value: i64) -> Self {
        Trit(value.rem_euclid(3) as u8)
    }

    #[inline]
    pub const fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; every nonzero element is its own inverse.
    pub const fn inverse(self) -> Option<Trit> {
        match self.0 {
            0 => None,
            v => Some(Trit(v)),
        }
    }
}

impl Add for Trit {
    type Output = Trit;
    #[inline]
    fn add(self, rhs: Trit) -> Trit {
        Trit((self.0 + rhs.0) % 3)
    }
}

impl Sub for Trit {
    type Output = Trit;
    #[inline]
    fn sub(self, rhs: Trit) -> Trit {
        Trit((self.0 + 3 - rhs.0) % 3)
    }
}

impl Mul for Trit {
    type Output = Trit;
    #[inline]
    fn mul(self, rhs: Trit) -> Trit {
        Trit((self.0 * rhs.0) % 3)
    }
}

impl Neg for Trit {
    type Output = Trit;
    #[inline]
    fn neg(self) -> Trit {
        Trit((3 - self.0) % 3)
    }
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Machine word used by the packed kernels.
///
/// The enumeration loops are generic over the word so that codes of length
/// at most 64 run on plain `u64` planes.
pub trait Word:
    Copy
    + Eq
    + Default
    + Send
    + Sync
    + std::hash::Hash
    + BitAnd<Output = Self>
    + BitOr<Output = Self>
    + BitXor<Output = Self>
    + Not<Output = Self>
    + Shl<u32, Output = Self>
    + Shr<u32, Output = Self>
    + 'static
{
    const BITS: usize;
    const ZERO: Self;
    fn from_u128(x: u128) -> Self;
    fn to_u128(self) -> u128;
    fn popcount(self) -> u32;
    fn trailing_zeros(self) -> u32;
}

impl Word for u64 {
    const BITS: usize = 64;
    const ZERO: Self = 0;
    #[inline(always)]
    fn from_u128(x: u128) -> Self {
        x as u64
    }
    #[inline(always)]
    fn to_u128(self) -> u128 {
        self as u128
    }
    #[inline(always)]
    fn popcount(self) -> u32 {
        self.count_ones()
    }
    #[inline(always)]
    fn trailing_zeros(self) -> u32 {
        u64::trailing_zeros(self)
    }
}

impl Word for u128 {
    const BITS: usize = 128;
    const ZERO: Self = 0;
    #[inline(always)]
    fn from_u128(x: u128) -> Self {
        x
    }
    #[inline(always)]
    fn to_u128(self) -> u128 {
        self
    }
    #[inline(always)]
    fn popcount(self) -> u32 {
        self.count_ones()
    }
    #[inline(always)]
    fn trailing_zeros(self) -> u32 {
        u128::trailing_zeros(self)
    }
}

/// Length-free packed vector used in hot loops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Packed<W: Word> {
    pub ones: W,
    pub twos: W,
}

impl<W: Word> Packed<W> {
    pub const ZERO: Self = Packed { ones: W::ZERO, twos: W::ZERO };

    #[inline(always)]
    pub fn new(ones: W, twos: W) -> Self {
        Packed { ones, twos }
    }

    #[inline(always)]
    pub fn support(self) -> W {
        self.ones | self.twos
    }

    #[inline(always)]
    pub fn weight(self) -> u32 {
        self.support().popcount()
    }

    #[inline(always)]
    pub fn is_zero(self) -> bool {
        self.support() == W::ZERO
    }

    /// Scales so that the lowest nonzero coordinate is 1.
    #[inline(always)]
    pub fn normalized(self) -> Self {
        let s = self.support();
        if s == W::ZERO {
            return self;
        }
        let low = s.trailing_zeros();
        if (self.twos >> low) & W::from_u128(1) != W::ZERO {
            -self
        } else {
            self
        }
    }
}

impl<W: Word> Add for Packed<W> {
    type Output = Self;

    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        let t = self.ones | rhs.ones;
        let ones = t ^ ((self.ones | self.twos) & (rhs.ones | rhs.twos));
        let twos = t ^ ((self.ones ^ rhs.ones) | (self.twos ^ rhs.twos));
        Packed { ones, twos }
    }
}

impl<W: Word> Neg for Packed<W> {
    type Output = Self;

    #[inline(always)]
    fn neg(self) -> Self {
        Packed { ones: self.twos, twos: self.ones }
    }
}

impl<W: Word> Sub for Packed<W> {
    type Output = Self;

    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        self + -rhs
    }
}

#[inline]
fn len_mask(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

/// A vector over GF(3) of length at most [`MAX_LEN`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TritVector {
    len: usize,
    ones: u128,
    twos: u128,
}

impl TritVector {
    /// The zero vector. Panics if `len` exceeds [`MAX_LEN`].
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_LEN, "vector length {len} exceeds {MAX_LEN}");
        TritVector { len, ones: 0, twos: 0 }
    }

    pub fn from_planes(len: usize, ones: u128, twos: u128) -> Result<Self> {
        if len > MAX_LEN {
            return Err(Error::TooLong(len));
        }
        let mask = len_mask(len);
        if ones & twos != 0 || (ones | twos) & !mask != 0 {
            return Err(Error::InvalidInput("malformed bitplanes".into()));
        }
        Ok(TritVector { len, ones, twos })
    }

    pub fn from_trits(values: &[u8]) -> Result<Self> {
        if values.len() > MAX_LEN {
            return Err(Error::TooLong(values.len()));
        }
        let mut v = TritVector::zero(values.len());
        for (i, &x) in values.iter().enumerate() {
            v.set(i, Trit::new(x)?);
        }
        Ok(v)
    }

    /// Vector with every coordinate equal to `value`.
    pub fn filled(len: usize, value: Trit) -> Self {
        let mut v = TritVector::zero(len);
        let mask = len_mask(len);
        match value.value() {
            1 => v.ones = mask,
            2 => v.twos = mask,
            _ => {}
        }
        v
    }

    /// The unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = TritVector::zero(len);
        v.set(i, Trit::ONE);
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn ones(&self) -> u128 {
        self.ones
    }

    #[inline]
    pub fn twos(&self) -> u128 {
        self.twos
    }

    /// Bitset of nonzero coordinates.
    #[inline]
    pub fn support(&self) -> u128 {
        self.ones | self.twos
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.support() == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> Trit {
        debug_assert!(i < self.len);
        if (self.ones >> i) & 1 == 1 {
            Trit::ONE
        } else if (self.twos >> i) & 1 == 1 {
            Trit::TWO
        } else {
            Trit::ZERO
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: Trit) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let bit = 1u128 << i;
        self.ones &= !bit;
        self.twos &= !bit;
        match value.value() {
            1 => self.ones |= bit,
            2 => self.twos |= bit,
            _ => {}
        }
    }

    /// Number of nonzero coordinates.
    #[inline]
    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    /// Index of the first nonzero coordinate.
    pub fn leading_index(&self) -> Option<usize> {
        let s = self.support();
        (s != 0).then(|| s.trailing_zeros() as usize)
    }

    pub fn try_add(&self, other: &TritVector) -> Result<TritVector> {
        self.check_len(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &TritVector) -> Result<TritVector> {
        self.check_len(other)?;
        Ok(self.add_unchecked(&other.negated()))
    }

    #[inline]
    fn add_unchecked(&self, other: &TritVector) -> TritVector {
        let p = self.packed() + other.packed();
        TritVector { len: self.len, ones: p.ones, twos: p.twos }
    }

    /// Componentwise product with a scalar.
    #[inline]
    pub fn scale(&self, c: Trit) -> TritVector {
        match c.value() {
            0 => TritVector::zero(self.len),
            1 => *self,
            _ => self.negated(),
        }
    }

    #[inline]
    pub fn negated(&self) -> TritVector {
        TritVector { len: self.len, ones: self.twos, twos: self.ones }
    }

    /// `self + c * other`.
    pub fn try_add_scaled(&self, c: Trit, other: &TritVector) -> Result<TritVector> {
        self.try_add(&other.scale(c))
    }

    /// Standard inner product.
    pub fn try_inner(&self, other: &TritVector) -> Result<Trit> {
        self.check_len(other)?;
        Ok(self.inner_unchecked(other))
    }

    #[inline]
    pub(crate) fn inner_unchecked(&self, other: &TritVector) -> Trit {
        let same = ((self.ones & other.ones) | (self.twos & other.twos)).count_ones();
        let opposite = ((self.ones & other.twos) | (self.twos & other.ones)).count_ones();
        Trit::reduce(same as i64 - opposite as i64)
    }

    /// Scaled copy whose first nonzero coordinate is 1.
    pub fn normalized(&self) -> TritVector {
        let p = self.packed().normalized();
        TritVector { len: self.len, ones: p.ones, twos: p.twos }
    }

    pub fn to_trits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i).value()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Trit> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Coordinates `start..start + len` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> TritVector {
        assert!(start + len <= self.len);
        let mask = len_mask(len);
        TritVector {
            len,
            ones: (self.ones >> start) & mask,
            twos: (self.twos >> start) & mask,
        }
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &TritVector) -> Result<TritVector> {
        let len = self.len + other.len;
        if len > MAX_LEN {
            return Err(Error::TooLong(len));
        }
        Ok(TritVector {
            len,
            ones: self.ones | (other.ones << self.len),
            twos: self.twos | (other.twos << self.len),
        })
    }

    #[inline]
    pub fn packed<W: Word>(&self) -> Packed<W> {
        Packed::new(W::from_u128(self.ones), W::from_u128(self.twos))
    }

    #[inline]
    pub fn from_packed<W: Word>(len: usize, p: Packed<W>) -> TritVector {
        TritVector { len, ones: p.ones.to_u128(), twos: p.twos.to_u128() }
    }

    fn check_len(&self, other: &TritVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Dimension { expected: self.len, found: other.len });
        }
        Ok(())
    }
}

impl Add for TritVector {
    type Output = TritVector;
    fn add(self, rhs: TritVector) -> TritVector {
        assert_eq!(self.len, rhs.len, "length mismatch");
        self.add_unchecked(&rhs)
    }
}

impl Sub for TritVector {
    type Output = TritVector;
    fn sub(self, rhs: TritVector) -> TritVector {
        assert_eq!(self.len, rhs.len, "length mismatch");
        self.add_unchecked(&rhs.negated())
    }
}

impl Neg for TritVector {
    type Output = TritVector;
    fn neg(self) -> TritVector {
        self.negated()
    }
}

impl fmt::Debug for TritVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TritVector({self})")
    }
}

impl fmt::Display for TritVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.iter() {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(3) stored by rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TritMatrix {
    cols: usize,
    rows: Vec<TritVector>,
}

/// Reduced row echelon form together with its rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: TritMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl TritMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        TritMatrix { cols, rows: vec![TritVector::zero(cols); rows] }
    }

    pub fn identity(k: usize) -> Self {
        TritMatrix { cols: k, rows: (0..k).map(|i| TritVector::unit(k, i)).collect() }
    }

    /// Builds a matrix from rows that all have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<TritVector>) -> Result<Self> {
        if cols > MAX_LEN {
            return Err(Error::TooLong(cols));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension { expected: cols, found: bad.len() });
        }
        Ok(TritMatrix { cols, rows })
    }

    pub fn from_trit_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let rows = rows.iter().map(|r| TritVector::from_trits(r)).collect::<Result<Vec<_>>>()?;
        TritMatrix::from_rows(cols, rows)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn rows(&self) -> &[TritVector] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> &TritVector {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<TritVector> {
        self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Trit {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: Trit) {
        self.rows[i].set(j, value);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(TritVector::is_zero)
    }

    pub fn transpose(&self) -> TritMatrix {
        let mut out = TritMatrix::zero(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in 0..self.cols {
                let t = row.get(j);
                if !t.is_zero() {
                    out.rows[j].set(i, t);
                }
            }
        }
        out
    }

    pub fn mat_mul(&self, other: &TritMatrix) -> Result<TritMatrix> {
        if self.cols != other.nrows() {
            return Err(Error::Dimension { expected: self.cols, found: other.nrows() });
        }
        let rows = self
            .rows
            .iter()
            .map(|a| {
                let mut acc = TritVector::zero(other.cols);
                for (j, b) in other.rows.iter().enumerate() {
                    match a.get(j).value() {
                        1 => acc = acc.add_unchecked(b),
                        2 => acc = acc.add_unchecked(&b.negated()),
                        _ => {}
                    }
                }
                acc
            })
            .collect();
        Ok(TritMatrix { cols: other.cols, rows })
    }

    /// `self * self^T`, computed from row inner products.
    pub fn gram(&self) -> TritMatrix {
        let k = self.rows.len();
        let mut out = TritMatrix::zero(k, k);
        for i in 0..k {
            for j in 0..k {
                out.rows[i].set(j, self.rows[i].inner_unchecked(&self.rows[j]));
            }
        }
        out
    }

    /// Horizontal concatenation `(self | other)`.
    pub fn hstack(&self, other: &TritMatrix) -> Result<TritMatrix> {
        if self.nrows() != other.nrows() {
            return Err(Error::Dimension { expected: self.nrows(), found: other.nrows() });
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.concat(b))
            .collect::<Result<Vec<_>>>()?;
        TritMatrix::from_rows(self.cols + other.cols, rows)
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &TritMatrix) -> Result<TritMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension { expected: self.cols, found: other.cols });
        }
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        Ok(TritMatrix { cols: self.cols, rows })
    }

    pub fn scale(&self, c: Trit) -> TritMatrix {
        TritMatrix { cols: self.cols, rows: self.rows.iter().map(|r| r.scale(c)).collect() }
    }

    /// Reduced row echelon form with leftmost pivots scaled to 1.
    pub fn rref(&self) -> Rref {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_with_column_order(&order)
    }

    /// Row reduction that looks for pivots in the given column order.
    ///
    /// The returned matrix has the pivot rows first (in the order their
    /// pivots were found) followed by zero rows; `pivots[i]` is the pivot
    /// column of row `i`.
    pub fn rref_with_column_order(&self, order: &[usize]) -> Rref {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for &col in order {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| !rows[i].get(col).is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let lead = rows[r].get(col);
            if lead == Trit::TWO {
                rows[r] = rows[r].negated();
            }
            let pivot = rows[r];
            for (i, row) in rows.iter_mut().enumerate() {
                if i == r {
                    continue;
                }
                match row.get(col).value() {
                    1 => *row = row.add_unchecked(&pivot.negated()),
                    2 => *row = row.add_unchecked(&pivot),
                    _ => {}
                }
            }
            pivots.push(col);
            r += 1;
        }
        Rref { matrix: TritMatrix { cols: self.cols, rows }, rank: r, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Whether both matrices span the same row space.
    pub fn same_row_space(&self, other: &TritMatrix) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let a = self.rref();
        let b = other.rref();
        a.rank == b.rank && a.matrix.rows[..a.rank] == b.matrix.rows[..b.rank]
    }
}

impl fmt::Debug for TritMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TritMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}
