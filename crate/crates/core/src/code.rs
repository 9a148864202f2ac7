//! Linear codes over GF(3) and exhaustive weight enumeration.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf3::{Packed, TritMatrix, TritVector, Word};

/// Largest dimension the exhaustive walk accepts by default (`3^21` words).
pub const DEFAULT_EXHAUSTIVE_MAX_DIMENSION: usize = 21;

/// An `[n, k]` code over GF(3) given by a full-rank generator matrix.
#[derive(Clone, Debug)]
pub struct LinearCode {
    generator: TritMatrix,
    standard: TritMatrix,
    pivots: Vec<usize>,
}

impl LinearCode {
    /// Wraps a generator matrix. Rank-deficient generators are replaced by a
    /// basis of their row space; a zero row space is rejected.
    pub fn new(generator: TritMatrix) -> Result<Self> {
        let rref = generator.rref();
        if rref.rank == 0 {
            return Err(Error::ZeroDimension);
        }
        let standard = TritMatrix::from_rows(
            generator.ncols(),
            rref.matrix.rows()[..rref.rank].to_vec(),
        )?;
        let generator = if rref.rank == generator.nrows() { generator } else { standard.clone() };
        Ok(LinearCode { generator, standard, pivots: rref.pivots })
    }

    pub fn from_rows(n: usize, rows: Vec<TritVector>) -> Result<Self> {
        LinearCode::new(TritMatrix::from_rows(n, rows)?)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.generator.ncols()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &TritMatrix {
        &self.generator
    }

    /// Reduced row echelon generator.
    pub fn standard_form(&self) -> &TritMatrix {
        &self.standard
    }

    /// Pivot columns of the standard form; an information set.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Whether `v` lies in the code.
    pub fn contains(&self, v: &TritVector) -> bool {
        if v.len() != self.n() {
            return false;
        }
        let mut r = *v;
        for (row, &p) in self.standard.rows().iter().zip(&self.pivots) {
            let c = r.get(p);
            if !c.is_zero() {
                r = r - row.scale(c);
            }
        }
        r.is_zero()
    }

    pub fn same_code(&self, other: &LinearCode) -> bool {
        self.n() == other.n() && self.k() == other.k() && self.standard == other.standard
    }

    /// The dual code; fails for the full space, whose dual is zero.
    pub fn dual(&self) -> Result<LinearCode> {
        let n = self.n();
        let k = self.k();
        if k == n {
            return Err(Error::ZeroDimension);
        }
        let mut is_pivot = vec![false; n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let rows = (0..n)
            .filter(|&j| !is_pivot[j])
            .map(|j| {
                let mut h = TritVector::unit(n, j);
                for (i, &p) in self.pivots.iter().enumerate() {
                    h.set(p, -self.standard.get(i, j));
                }
                h
            })
            .collect();
        LinearCode::from_rows(n, rows)
    }

    pub fn is_self_dual(&self) -> bool {
        self.n() == 2 * self.k() && self.generator.gram().is_zero()
    }

    /// Self-orthogonality of the generator rows.
    pub fn is_self_orthogonal(&self) -> bool {
        self.generator.gram().is_zero()
    }
}

/// `3 * floor(n / 12) + 3`, the largest minimum weight a ternary self-dual
/// code of length `n` can have.
pub fn extremal_bound(n: usize) -> Result<usize> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::InvalidLength(n));
    }
    Ok(3 * (n / 12) + 3)
}

/// Result of an exhaustive weight enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightProfile {
    pub min_weight: usize,
    /// Number of nonzero codewords of weight `min_weight`, counting both signs.
    pub min_weight_codeword_count: u64,
    /// Codeword counts per nonzero weight, up to the configured bound.
    pub partial_distribution: BTreeMap<usize, u64>,
    /// Set when the walk stopped at a codeword lighter than the abort bound;
    /// `min_weight` is then that codeword's weight and counts are partial.
    pub aborted: bool,
}

#[derive(Clone, Debug)]
pub struct ExhaustiveOptions {
    pub early_abort_below: Option<usize>,
    /// Largest weight kept in `partial_distribution`.
    pub distribution_bound: usize,
    pub max_dimension: usize,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        ExhaustiveOptions {
            early_abort_below: None,
            distribution_bound: usize::MAX,
            max_dimension: DEFAULT_EXHAUSTIVE_MAX_DIMENSION,
        }
    }
}

/// Minimum weight and its multiplicity by walking every codeword.
pub fn min_weight_exhaustive(c: &LinearCode, early_abort_below: Option<usize>) -> Result<WeightProfile> {
    min_weight_exhaustive_with(c, &ExhaustiveOptions { early_abort_below, ..Default::default() })
}

pub fn min_weight_exhaustive_with(c: &LinearCode, opts: &ExhaustiveOptions) -> Result<WeightProfile> {
    if c.k() > opts.max_dimension {
        return Err(Error::Budget(format!(
            "exhaustive enumeration of dimension {} exceeds the limit {}",
            c.k(),
            opts.max_dimension
        )));
    }
    let (hist, aborted) = if c.n() <= 64 {
        walk_histogram::<u64>(c, opts.early_abort_below)
    } else {
        walk_histogram::<u128>(c, opts.early_abort_below)
    };
    let min_weight = hist.iter().position(|&x| x > 0).expect("nonzero code has a nonzero word");
    let partial_distribution = hist
        .iter()
        .enumerate()
        .filter(|&(w, &x)| x > 0 && w <= opts.distribution_bound)
        .map(|(w, &x)| (w, 2 * x))
        .collect();
    Ok(WeightProfile {
        min_weight,
        min_weight_codeword_count: 2 * hist[min_weight],
        partial_distribution,
        aborted,
    })
}

/// Full weight distribution `A_0, ..., A_n`.
pub fn weight_distribution(c: &LinearCode) -> Result<Vec<u64>> {
    let profile = min_weight_exhaustive_with(c, &ExhaustiveOptions::default())?;
    let mut dist = vec![0u64; c.n() + 1];
    dist[0] = 1;
    for (w, x) in profile.partial_distribution {
        dist[w] = x;
    }
    Ok(dist)
}

/// Calls `f` on every nonzero codeword, each exactly once.
pub fn for_each_nonzero_codeword(c: &LinearCode, mut f: impl FnMut(&TritVector)) {
    let n = c.n();
    let rows: Vec<Packed<u128>> = c.generator().rows().iter().map(|r| r.packed()).collect();
    for top in 0..rows.len() {
        gray_walk(&rows[..top], rows[top], |p| {
            f(&TritVector::from_packed(n, p));
            f(&TritVector::from_packed(n, -p));
            true
        });
    }
}

/// Visits `start + sum_i m_i rows[i]` for every message `m` over `rows`,
/// changing one digit per step (modular ternary Gray code). Stops early when
/// `visit` returns false.
#[inline(always)]
pub(crate) fn gray_walk<W: Word>(rows: &[Packed<W>], start: Packed<W>, mut visit: impl FnMut(Packed<W>) -> bool) -> bool {
    let mut cur = start;
    if !visit(cur) {
        return false;
    }
    let mut digits = vec![0u8; rows.len()];
    loop {
        let mut i = 0;
        while i < digits.len() && digits[i] == 2 {
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            return true;
        }
        digits[i] += 1;
        cur = cur + rows[i];
        if !visit(cur) {
            return false;
        }
    }
}

/// Digits below the top message coordinate that are fixed per task, so the
/// walk splits into independent shards.
const SPLIT_DIGITS: usize = 4;

/// Histogram of weights over one codeword of each `±` pair.
fn walk_histogram<W: Word>(c: &LinearCode, abort_below: Option<usize>) -> (Vec<u64>, bool) {
    let n = c.n();
    let rows: Vec<Packed<W>> = c.generator().rows().iter().map(|r| r.packed()).collect();
    let k = rows.len();
    let abort_below = abort_below.unwrap_or(0) as u32;
    let stop = AtomicBool::new(false);

    // Each task: top digit fixed to 1, `fixed` digits just below it set to a
    // given pattern, remaining lower digits walked.
    let mut tasks: Vec<(usize, usize, u64)> = Vec::new();
    for top in 0..k {
        let fixed = top.min(SPLIT_DIGITS);
        for pattern in 0..3u64.pow(fixed as u32) {
            tasks.push((top, fixed, pattern));
        }
    }

    let partials: Vec<(Vec<u64>, bool)> = tasks
        .par_iter()
        .map(|&(top, fixed, pattern)| {
            let mut hist = vec![0u64; n + 1];
            if stop.load(Ordering::Relaxed) {
                return (hist, false);
            }
            let mut start = rows[top];
            let mut p = pattern;
            for d in 0..fixed {
                match p % 3 {
                    1 => start = start + rows[top - 1 - d],
                    2 => start = start - rows[top - 1 - d],
                    _ => {}
                }
                p /= 3;
            }
            let free = top - fixed;
            let mut aborted = false;
            gray_walk(&rows[..free], start, |v| {
                let w = v.weight();
                hist[w as usize] += 1;
                if w < abort_below {
                    aborted = true;
                    return false;
                }
                true
            });
            if aborted {
                stop.store(true, Ordering::Relaxed);
            }
            (hist, aborted)
        })
        .collect();

    let mut hist = vec![0u64; n + 1];
    let mut aborted = false;
    for (h, a) in partials {
        aborted |= a;
        for (x, y) in hist.iter_mut().zip(h) {
            *x += y;
        }
    }
    (hist, aborted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::Trit;
    use crate::negacirculant::NegaPair;
    use rustc_hash::FxHashSet;

    fn small_code() -> LinearCode {
        NegaPair::from_trits(&[1], &[1]).unwrap().code()
    }

    #[test]
    fn extremal_bound_examples() {
        assert_eq!(extremal_bound(40).unwrap(), 12);
        assert_eq!(extremal_bound(4).unwrap(), 3);
        assert_eq!(extremal_bound(68).unwrap(), 18);
        assert!(matches!(extremal_bound(42), Err(Error::InvalidLength(42))));
        assert!(extremal_bound(0).is_err());
    }

    #[test]
    fn small_code_profile() {
        let c = small_code();
        assert!(c.is_self_dual());
        let p = min_weight_exhaustive(&c, None).unwrap();
        assert_eq!(p.min_weight, 3);
        assert_eq!(p.min_weight_codeword_count, 8);
        assert!(!p.aborted);
        assert_eq!(weight_distribution(&c).unwrap(), vec![1, 0, 0, 8, 0]);
    }

    #[test]
    fn dual_examples() {
        let full = LinearCode::new(TritMatrix::identity(3)).unwrap();
        assert!(matches!(full.dual(), Err(Error::ZeroDimension)));

        let c = small_code();
        assert!(c.dual().unwrap().same_code(&c));

        let g = TritMatrix::from_trit_rows(&[vec![1, 2, 0, 1, 1], vec![0, 1, 1, 2, 0]]).unwrap();
        let c = LinearCode::new(g).unwrap();
        let d = c.dual().unwrap();
        assert_eq!(d.k(), 3);
        assert!(c.generator().mat_mul(&d.generator().transpose()).unwrap().is_zero());
        assert!(d.dual().unwrap().same_code(&c));
    }

    #[test]
    fn self_dual_examples() {
        assert!(small_code().is_self_dual());
        let c = LinearCode::new(TritMatrix::from_trit_rows(&[vec![1, 0]]).unwrap()).unwrap();
        assert!(!c.is_self_dual());
    }

    #[test]
    fn zero_generator_rejected() {
        assert!(matches!(LinearCode::new(TritMatrix::zero(2, 4)), Err(Error::ZeroDimension)));
        let g = TritMatrix::from_trit_rows(&[vec![1, 1, 0], vec![2, 2, 0]]).unwrap();
        assert_eq!(LinearCode::new(g).unwrap().k(), 1);
    }

    #[test]
    fn early_abort() {
        let c = small_code();
        let p = min_weight_exhaustive(&c, Some(4)).unwrap();
        assert!(p.aborted);
        assert_eq!(p.min_weight, 3);
        let p = min_weight_exhaustive(&c, Some(3)).unwrap();
        assert!(!p.aborted);
    }

    #[test]
    fn budget_guard() {
        let c = LinearCode::new(TritMatrix::identity(22)).unwrap();
        assert!(matches!(min_weight_exhaustive(&c, None), Err(Error::Budget(_))));
    }

    #[test]
    fn walk_visits_every_codeword_once() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for k in 1..=10usize {
            let n = k + rng.random_range(0..8);
            let mut rows = Vec::new();
            for i in 0..k {
                let mut r = TritVector::unit(n, i);
                for j in k..n {
                    r.set(j, Trit::reduce(rng.random_range(0..3)));
                }
                rows.push(r);
            }
            let c = LinearCode::from_rows(n, rows).unwrap();
            let mut seen = FxHashSet::default();
            let mut visits = 0u64;
            for_each_nonzero_codeword(&c, |v| {
                assert!(!v.is_zero());
                assert!(c.contains(v));
                seen.insert(*v);
                visits += 1;
            });
            assert_eq!(visits, 3u64.pow(k as u32) - 1);
            assert_eq!(seen.len() as u64, visits);
        }
    }

    #[test]
    fn exhaustive_matches_naive_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let k = rng.random_range(1..=7usize);
            let n = k + rng.random_range(1..=70usize);
            let rows: Vec<TritVector> = (0..k)
                .map(|_| {
                    let t: Vec<u8> = (0..n).map(|_| rng.random_range(0..3)).collect();
                    TritVector::from_trits(&t).unwrap()
                })
                .collect();
            let Ok(c) = LinearCode::from_rows(n, rows) else { continue };
            let mut naive = vec![0u64; n + 1];
            let basis = c.generator().rows().to_vec();
            for msg in 1..3u64.pow(c.k() as u32) {
                let mut v = TritVector::zero(n);
                let mut x = msg;
                for r in &basis {
                    v = v + r.scale(Trit::reduce((x % 3) as i64));
                    x /= 3;
                }
                naive[v.weight()] += 1;
            }
            let mut dist = weight_distribution(&c).unwrap();
            dist[0] = 0;
            assert_eq!(dist, naive);
        }
    }
}
