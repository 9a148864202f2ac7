//! Minimum weight and low-weight codewords via disjoint information sets.
//!
//! This is the Brouwer–Zimmermann scheme: the coordinates are covered
//! greedily by disjoint (possibly rank-deficient) information sets, each with
//! its own systematic generator. Messages of weight 1, 2, ... are enumerated
//! in every generator in turn. After all messages of weight `w` have been
//! tried in generators `0..=j`, every codeword not yet seen has weight at
//! least
//!
//! ```text
//! sum_{i <= j} max(0, w + 1 - (k - r_i)) + sum_{i > j} max(0, w - (k - r_i))
//! ```
//!
//! where `r_i` is the rank of set `i`. The same bound makes the enumeration
//! complete for "all codewords of weight at most `W`" once it exceeds `W`.

use std::cell::Cell;

use rustc_hash::FxHashSet;

use crate::code::LinearCode;
use crate::gf3::{Packed, TritMatrix, TritVector, Word};

/// One information set together with a generator that is systematic on it.
#[derive(Clone, Debug)]
pub struct InfoSet {
    pub columns: Vec<usize>,
    pub rank: usize,
    /// `k x n`; the first `rank` rows carry the identity on `columns`.
    pub generator: TritMatrix,
}

/// Greedy disjoint information sets covering as many coordinates as the
/// code allows.
pub fn information_sets(c: &LinearCode) -> Vec<InfoSet> {
    let n = c.n();
    let g = c.standard_form();
    let mut used = vec![false; n];
    let mut sets = Vec::new();
    loop {
        let mut order: Vec<usize> = (0..n).filter(|&j| !used[j]).collect();
        if order.is_empty() {
            break;
        }
        let fresh = order.len();
        order.extend((0..n).filter(|&j| used[j]));
        let rref = g.rref_with_column_order(&order);
        let columns: Vec<usize> = rref.pivots.iter().copied().filter(|&p| !used[p]).collect();
        debug_assert!(rref.pivots[..columns.len()].iter().all(|&p| !used[p]));
        if columns.is_empty() {
            break;
        }
        for &p in &columns {
            used[p] = true;
        }
        let rank = columns.len();
        sets.push(InfoSet { columns, rank, generator: rref.matrix });
        if fresh == rank {
            break;
        }
    }
    sets
}

struct Prepared<W: Word> {
    k: usize,
    sets: Vec<(usize, Vec<Packed<W>>)>,
}

impl<W: Word> Prepared<W> {
    fn new(c: &LinearCode) -> Self {
        let sets = information_sets(c)
            .into_iter()
            .map(|s| (s.rank, s.generator.rows().iter().map(|r| r.packed()).collect()))
            .collect();
        Prepared { k: c.k(), sets }
    }

    /// Lower bound on unseen codewords after weight `w` in sets `0..=j`.
    fn lower_bound(&self, w: usize, j: usize) -> usize {
        self.sets
            .iter()
            .enumerate()
            .map(|(i, (rank, _))| {
                let defect = self.k - rank;
                let reach = if i <= j { w + 1 } else { w };
                reach.saturating_sub(defect)
            })
            .sum()
    }

    /// Runs the enumeration. `visit` returns false to abort; `done` receives
    /// the current lower bound and returns true to stop. Returns false if
    /// aborted by `visit`.
    fn run(
        &self,
        mut visit: impl FnMut(Packed<W>) -> bool,
        mut done: impl FnMut(usize) -> bool,
    ) -> bool {
        for w in 1..=self.k {
            for (j, (_, rows)) in self.sets.iter().enumerate() {
                if !enumerate_weight(rows, w, &mut visit) {
                    return false;
                }
                if done(self.lower_bound(w, j)) {
                    return true;
                }
            }
        }
        true
    }
}

/// Visits `sum_i c_i rows[i]` for every coefficient vector of weight exactly
/// `w` whose first nonzero entry is 1.
pub(crate) fn enumerate_weight<W: Word>(
    rows: &[Packed<W>],
    w: usize,
    visit: &mut impl FnMut(Packed<W>) -> bool,
) -> bool {
    if w == 0 || w > rows.len() {
        return true;
    }
    (0..=rows.len() - w).all(|i| extend(rows, i + 1, w - 1, rows[i], visit))
}

#[inline(always)]
fn extend<W: Word>(
    rows: &[Packed<W>],
    start: usize,
    remaining: usize,
    acc: Packed<W>,
    visit: &mut impl FnMut(Packed<W>) -> bool,
) -> bool {
    if remaining == 0 {
        return visit(acc);
    }
    if remaining == 1 {
        for r in &rows[start..] {
            if !visit(acc + *r) || !visit(acc - *r) {
                return false;
            }
        }
        return true;
    }
    for i in start..=rows.len() - remaining {
        if !extend_dyn(rows, i + 1, remaining - 1, acc + rows[i], visit)
            || !extend_dyn(rows, i + 1, remaining - 1, acc - rows[i], visit)
        {
            return false;
        }
    }
    true
}

fn extend_dyn<W: Word>(
    rows: &[Packed<W>],
    start: usize,
    remaining: usize,
    acc: Packed<W>,
    visit: &mut impl FnMut(Packed<W>) -> bool,
) -> bool {
    extend(rows, start, remaining, acc, visit)
}

/// Outcome of a bounded minimum-weight computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinWeightBound {
    /// The minimum weight.
    Exact(usize),
    /// The minimum weight is at least this value, which reached the target.
    AtLeast(usize),
}

impl MinWeightBound {
    /// Certified lower bound.
    pub fn lower(self) -> usize {
        match self {
            MinWeightBound::Exact(d) | MinWeightBound::AtLeast(d) => d,
        }
    }
}

/// Brouwer–Zimmermann minimum weight; stops once the weight is known or
/// certified to be at least `target`.
pub fn min_weight_bz(c: &LinearCode, target: usize) -> MinWeightBound {
    if c.n() <= 64 {
        bz::<u64>(c, target, false)
    } else {
        bz::<u128>(c, target, false)
    }
    .expect("no abort requested")
}

/// Exact minimum weight.
pub fn min_weight(c: &LinearCode) -> usize {
    match min_weight_bz(c, usize::MAX) {
        MinWeightBound::Exact(d) => d,
        MinWeightBound::AtLeast(_) => unreachable!("unbounded target always yields an exact value"),
    }
}

/// Screening outcome against a weight target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Screening {
    /// A nonzero codeword of this weight, below the target, exists.
    Below(usize),
    /// Exact minimum weight, at least the target.
    Certified(usize),
}

/// Exact minimum weight if it reaches `target`, otherwise stops at the first
/// codeword lighter than `target`.
pub fn screen_min_weight(c: &LinearCode, target: usize) -> Screening {
    let r = if c.n() <= 64 { bz::<u64>(c, target, true) } else { bz::<u128>(c, target, true) };
    match r {
        Err(w) => Screening::Below(w),
        Ok(MinWeightBound::Exact(d)) => Screening::Certified(d),
        Ok(MinWeightBound::AtLeast(_)) => unreachable!("screening runs to an exact value"),
    }
}

fn bz<W: Word>(c: &LinearCode, target: usize, abort_below: bool) -> Result<MinWeightBound, usize> {
    let prep = Prepared::<W>::new(c);
    let upper = Cell::new(usize::MAX);
    let mut outcome = None;
    let completed = prep.run(
        |v| {
            let w = v.weight() as usize;
            if w < upper.get() {
                upper.set(w);
            }
            !(abort_below && upper.get() < target)
        },
        |l| {
            if l >= upper.get() {
                outcome = Some(MinWeightBound::Exact(upper.get()));
                true
            } else if !abort_below && l >= target {
                outcome = Some(MinWeightBound::AtLeast(l));
                true
            } else {
                false
            }
        },
    );
    let upper = upper.get();
    if !completed {
        return Err(upper);
    }
    Ok(outcome.unwrap_or(MinWeightBound::Exact(upper)))
}

/// Every nonzero codeword of weight at most `max_weight`, one per `±` pair,
/// scaled so the first nonzero entry is 1, in increasing order of
/// `(weight, ones, twos)`.
pub fn codewords_up_to_weight(c: &LinearCode, max_weight: usize) -> Vec<TritVector> {
    if c.n() <= 64 {
        collect::<u64>(c, max_weight)
    } else {
        collect::<u128>(c, max_weight)
    }
}

fn collect<W: Word>(c: &LinearCode, max_weight: usize) -> Vec<TritVector> {
    let prep = Prepared::<W>::new(c);
    let mut seen: FxHashSet<Packed<W>> = FxHashSet::default();
    prep.run(
        |v| {
            if v.weight() as usize <= max_weight {
                seen.insert(v.normalized());
            }
            true
        },
        |l| l > max_weight,
    );
    let mut out: Vec<TritVector> = seen.into_iter().map(|p| TritVector::from_packed(c.n(), p)).collect();
    out.sort_by_key(|v| (v.weight(), v.ones(), v.twos()));
    out
}

/// The minimum weight and all minimum-weight codewords (one per `±` pair).
pub fn min_weight_codewords(c: &LinearCode) -> (usize, Vec<TritVector>) {
    let d = min_weight(c);
    (d, codewords_up_to_weight(c, d))
}

/// Distinct supports of the minimum-weight codewords, as sorted bitsets.
pub fn enumerate_min_weight_supports(c: &LinearCode) -> Vec<u128> {
    let (_, words) = min_weight_codewords(c);
    let mut supports: Vec<u128> = words.iter().map(TritVector::support).collect();
    supports.sort_unstable();
    supports.dedup();
    supports
}
