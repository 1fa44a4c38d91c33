//! Lattice arrays, axis-aligned rectangles, splits, and partitions.
//!
//! Conventions used throughout the crate: lattice coordinates are 1-based
//! (a d-dimensional lattice with sides `n1 x ... x nd` has points whose
//! i-th coordinate ranges over `1..=ni`), axes are 0-based `usize` indices,
//! and flat storage is row-major with the last axis fastest.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// A real-valued array over the lattice `[n1] x ... x [nd]`.
///
/// Holds observations, ground truths, and fitted values alike. Values are
/// stored row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeArray {
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl LatticeArray {
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&n| n == 0) {
            return Err(Error::DimensionMismatch(format!(
                "dims must be nonempty positive integers, got {dims:?}"
            )));
        }
        let n: usize = dims.iter().product();
        if values.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for dims {dims:?}, got {}",
                n,
                values.len()
            )));
        }
        Ok(Self { dims, values })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        Self::new(dims, vec![0.0; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Flat index of a 1-based lattice point.
    pub fn linear_index(&self, point: &[usize]) -> usize {
        debug_assert_eq!(point.len(), self.dims.len());
        let mut idx = 0;
        for (i, &p) in point.iter().enumerate() {
            debug_assert!(p >= 1 && p <= self.dims[i]);
            idx = idx * self.dims[i] + (p - 1);
        }
        idx
    }

    pub fn get(&self, point: &[usize]) -> f64 {
        self.values[self.linear_index(point)]
    }

    pub fn set(&mut self, point: &[usize], v: f64) {
        let idx = self.linear_index(point);
        self.values[idx] = v;
    }

    /// The full-lattice rectangle.
    pub fn full_rect(&self) -> Rect {
        Rect::full(&self.dims)
    }

    /// Squared Euclidean distance to another array of equal shape.
    pub fn squared_distance(&self, other: &LatticeArray) -> f64 {
        debug_assert_eq!(self.dims, other.dims);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Row-major strides (last axis has stride 1).
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// An axis-aligned rectangle: the product of integer intervals
/// `[lo_i, hi_i]`, both endpoints inclusive and 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rect {
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.lo.len() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "[{},{}]", self.lo[i], self.hi[i])?;
        }
        Ok(())
    }
}

impl Rect {
    pub fn new(lo: Vec<usize>, hi: Vec<usize>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch(format!(
                "rectangle corners must be nonempty and of equal length, got lo {lo:?}, hi {hi:?}"
            )));
        }
        for i in 0..lo.len() {
            if lo[i] < 1 || lo[i] > hi[i] {
                return Err(Error::DimensionMismatch(format!(
                    "need 1 <= lo <= hi on every axis, got lo {lo:?}, hi {hi:?}"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The whole lattice `[1,n1] x ... x [1,nd]`.
    pub fn full(dims: &[usize]) -> Self {
        Self {
            lo: vec![1; dims.len()],
            hi: dims.to_vec(),
        }
    }

    /// Convenience constructor for a 1D interval.
    pub fn interval(a: usize, b: usize) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    pub fn lo(&self) -> &[usize] {
        &self.lo
    }

    pub fn hi(&self) -> &[usize] {
        &self.hi
    }

    pub fn ndim(&self) -> usize {
        self.lo.len()
    }

    /// Side length on one axis.
    pub fn side(&self, axis: usize) -> usize {
        self.hi[axis] - self.lo[axis] + 1
    }

    pub fn sides(&self) -> Vec<usize> {
        (0..self.ndim()).map(|a| self.side(a)).collect()
    }

    /// Number of lattice cells in the rectangle.
    pub fn cells(&self) -> usize {
        (0..self.ndim()).map(|a| self.side(a)).product()
    }

    /// Sum of side lengths; splits strictly decrease it on both pieces.
    pub fn size(&self) -> usize {
        (0..self.ndim()).map(|a| self.side(a)).sum()
    }

    /// Largest ratio of side lengths, `max_i n_i / min_j n_j`.
    pub fn aspect_ratio(&self) -> f64 {
        let sides = self.sides();
        let max = *sides.iter().max().unwrap() as f64;
        let min = *sides.iter().min().unwrap() as f64;
        max / min
    }

    pub fn contains_point(&self, point: &[usize]) -> bool {
        point.len() == self.ndim()
            && (0..self.ndim()).all(|a| self.lo[a] <= point[a] && point[a] <= self.hi[a])
    }

    pub fn contains(&self, other: &Rect) -> bool {
        self.ndim() == other.ndim()
            && (0..self.ndim()).all(|a| self.lo[a] <= other.lo[a] && other.hi[a] <= self.hi[a])
    }

    pub fn is_disjoint(&self, other: &Rect) -> bool {
        (0..self.ndim()).any(|a| self.hi[a] < other.lo[a] || other.hi[a] < self.lo[a])
    }

    /// Splits at the axis midpoint: `[a,b]` becomes `[a, m]` and `[m+1, b]`
    /// with `m = a - 1 + ceil((b - a + 1) / 2)`.
    pub fn dyadic_split(&self, axis: usize) -> Result<(Rect, Rect)> {
        self.check_axis(axis)?;
        if self.side(axis) < 2 {
            return Err(Error::UnsplittableAxis {
                rect: self.to_string(),
                axis,
            });
        }
        let mid = self.dyadic_cut(axis);
        self.hierarchical_split(axis, mid)
    }

    /// The midpoint cut position used by a dyadic split of this rectangle.
    pub fn dyadic_cut(&self, axis: usize) -> usize {
        let (a, b) = (self.lo[axis], self.hi[axis]);
        a - 1 + (b - a + 1).div_ceil(2)
    }

    /// Splits `[a,b]` into `[a,cut]` and `[cut+1,b]`; both pieces nonempty.
    pub fn hierarchical_split(&self, axis: usize, cut: usize) -> Result<(Rect, Rect)> {
        self.check_axis(axis)?;
        if cut < self.lo[axis] || cut >= self.hi[axis] {
            return Err(Error::InvalidCut {
                rect: self.to_string(),
                axis,
                cut,
            });
        }
        let mut left = self.clone();
        let mut right = self.clone();
        left.hi[axis] = cut;
        right.lo[axis] = cut + 1;
        Ok((left, right))
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.ndim() {
            return Err(Error::InvalidArgument(format!(
                "axis {axis} out of range for {self}"
            )));
        }
        Ok(())
    }
}

/// Visits every 1-based point of `rect` in row-major order together with its
/// flat index inside an array of shape `dims`.
pub fn for_each_cell(rect: &Rect, dims: &[usize], mut f: impl FnMut(&[usize], usize)) {
    let d = rect.ndim();
    debug_assert_eq!(d, dims.len());
    let st = strides(dims);
    let mut point = rect.lo.clone();
    let mut lin: usize = point
        .iter()
        .zip(&st)
        .map(|(&p, &s)| (p - 1) * s)
        .sum();
    loop {
        f(&point, lin);
        let mut axis = d;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if point[axis] < rect.hi[axis] {
                point[axis] += 1;
                lin += st[axis];
                break;
            }
            lin -= (point[axis] - rect.lo[axis]) * st[axis];
            point[axis] = rect.lo[axis];
        }
    }
}

/// Which splitting discipline produced a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Recursive dyadic partitions: every split at the axis midpoint.
    Rdp,
    /// Hierarchical (guillotine) partitions: splits at arbitrary positions.
    Hier,
    /// Arbitrary rectangular partitions.
    Arbitrary,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Rdp => "rdp",
            Family::Hier => "hier",
            Family::Arbitrary => "arbitrary",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rdp" => Ok(Family::Rdp),
            "hier" => Ok(Family::Hier),
            "arbitrary" | "all" => Ok(Family::Arbitrary),
            other => Err(Error::InvalidArgument(format!(
                "unknown family {other:?} (expected rdp, hier, or arbitrary)"
            ))),
        }
    }
}

/// A set of pairwise-disjoint rectangles covering a root rectangle.
///
/// Construction validates the disjoint cover, and, for the `Rdp` and `Hier`
/// tags, membership in that family. Rectangles are kept sorted by lower
/// corner so equality is order-insensitive.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    root: Rect,
    rects: Vec<Rect>,
    family: Family,
}

impl Partition {
    pub fn new(root: Rect, rects: Vec<Rect>, family: Family) -> Result<Self> {
        let mut rects = rects;
        rects.sort();
        validate_cover(&root, &rects)?;
        match family {
            Family::Rdp => {
                if !rdp_decider(&root, &rects) {
                    return Err(Error::WrongFamily {
                        family: "rdp",
                        detail: format!("{} pieces over {root}", rects.len()),
                    });
                }
            }
            Family::Hier => {
                if !hier_decider(&root, &rects) {
                    return Err(Error::WrongFamily {
                        family: "hier",
                        detail: format!("{} pieces over {root}", rects.len()),
                    });
                }
            }
            Family::Arbitrary => {}
        }
        Ok(Self { root, rects, family })
    }

    /// The one-piece partition `{root}`, a member of every family.
    pub fn trivial(root: Rect, family: Family) -> Self {
        Self {
            rects: vec![root.clone()],
            root,
            family,
        }
    }

    /// Construction without validation, for callers that build partitions by
    /// legal splits. Debug builds still check the cover.
    pub(crate) fn new_unchecked(root: Rect, mut rects: Vec<Rect>, family: Family) -> Self {
        rects.sort();
        debug_assert!(validate_cover(&root, &rects).is_ok());
        Self { root, rects, family }
    }

    pub fn root(&self) -> &Rect {
        &self.root
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Number of rectangles, the paper's |Pi|.
    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// True if every rectangle of `self` lies inside some rectangle of
    /// `coarser` (so `self` refines `coarser`).
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.root == coarser.root
            && self
                .rects
                .iter()
                .all(|r| coarser.rects.iter().any(|c| c.contains(r)))
    }

    /// Re-tags the partition after checking membership in `family`.
    pub fn with_family(self, family: Family) -> Result<Self> {
        Partition::new(self.root, self.rects, family)
    }
}

/// Checks that `rects` are pairwise disjoint, lie inside `root`, and cover
/// it exactly. Works by marking cells, so it is linear in `|root|`.
fn validate_cover(root: &Rect, rects: &[Rect]) -> Result<()> {
    if rects.is_empty() {
        return Err(Error::NotAPartition("no rectangles".into()));
    }
    let local_dims = root.sides();
    let st = strides(&local_dims);
    let mut seen = vec![false; root.cells()];
    let mut covered = 0usize;
    for r in rects {
        if r.ndim() != root.ndim() || !root.contains(r) {
            return Err(Error::NotAPartition(format!("{r} not inside root {root}")));
        }
        // Mark cells using root-local coordinates.
        let mut point = r.lo().to_vec();
        loop {
            let lin: usize = point
                .iter()
                .enumerate()
                .map(|(a, &p)| (p - root.lo()[a]) * st[a])
                .sum();
            if seen[lin] {
                return Err(Error::NotAPartition(format!("cell {point:?} covered twice")));
            }
            seen[lin] = true;
            covered += 1;
            let mut axis = point.len();
            let mut done = true;
            while axis > 0 {
                axis -= 1;
                if point[axis] < r.hi()[axis] {
                    point[axis] += 1;
                    done = false;
                    break;
                }
                point[axis] = r.lo()[axis];
            }
            if done {
                break;
            }
        }
    }
    if covered != root.cells() {
        return Err(Error::NotAPartition(format!(
            "{covered} cells covered, root has {}",
            root.cells()
        )));
    }
    Ok(())
}

/// True iff the partition is reachable from its root by hierarchical
/// (guillotine) splits: at every level some full-width cut must avoid all
/// rectangle interiors.
pub fn is_hierarchical(p: &Partition) -> bool {
    hier_decider(p.root(), p.rects())
}

/// True iff the partition is reachable from its root by dyadic (midpoint)
/// splits. Decided by exhaustive midpoint-split search, which is valid in
/// every dimension; the product-of-dyadic-intervals shortcut holds only for
/// d <= 2 and is used in tests as a cross-check.
pub fn is_rdp(p: &Partition) -> bool {
    rdp_decider(p.root(), p.rects())
}

fn hier_decider(root: &Rect, rects: &[Rect]) -> bool {
    let idx: Vec<usize> = (0..rects.len()).collect();
    let mut memo = HashMap::new();
    guillotine_rec(root, rects, &idx, &mut memo, false)
}

fn rdp_decider(root: &Rect, rects: &[Rect]) -> bool {
    let idx: Vec<usize> = (0..rects.len()).collect();
    let mut memo = HashMap::new();
    guillotine_rec(root, rects, &idx, &mut memo, true)
}

/// Shared recursion for both family deciders. `pieces` indexes the rects
/// lying inside `region`. Candidate cuts are the piece boundaries (dyadic
/// mode restricts to the midpoint); memoization is sound because the pieces
/// inside a region are determined by the region.
fn guillotine_rec(
    region: &Rect,
    rects: &[Rect],
    pieces: &[usize],
    memo: &mut HashMap<Rect, bool>,
    dyadic: bool,
) -> bool {
    if pieces.len() == 1 {
        return rects[pieces[0]] == *region;
    }
    if let Some(&known) = memo.get(region) {
        return known;
    }
    let d = region.ndim();
    let mut ok = false;
    'axes: for axis in 0..d {
        if region.side(axis) < 2 {
            continue;
        }
        let cuts: Vec<usize> = if dyadic {
            vec![region.dyadic_cut(axis)]
        } else {
            let mut c: Vec<usize> = pieces
                .iter()
                .map(|&i| rects[i].hi()[axis])
                .filter(|&h| h < region.hi()[axis])
                .collect();
            c.sort_unstable();
            c.dedup();
            c
        };
        for cut in cuts {
            let straddles = pieces
                .iter()
                .any(|&i| rects[i].lo()[axis] <= cut && rects[i].hi()[axis] > cut);
            if straddles {
                continue;
            }
            let (left, right) = region
                .hierarchical_split(axis, cut)
                .expect("cut inside region");
            let (lp, rp): (Vec<usize>, Vec<usize>) = pieces
                .iter()
                .partition(|&&i| rects[i].hi()[axis] <= cut);
            if guillotine_rec(&left, rects, &lp, memo, dyadic)
                && guillotine_rec(&right, rects, &rp, memo, dyadic)
            {
                ok = true;
                break 'axes;
            }
        }
    }
    memo.insert(region.clone(), ok);
    ok
}

/// Dyadic intervals of `[1, n]`: the intervals reachable by successive
/// dyadic splits of the whole line, in left-to-right, coarse-to-fine order.
pub fn dyadic_intervals(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut queue = vec![(1usize, n)];
    while let Some((a, b)) = queue.pop() {
        out.push((a, b));
        if a < b {
            let mid = a - 1 + (b - a + 1).div_ceil(2);
            queue.push((mid + 1, b));
            queue.push((a, mid));
        }
    }
    out.sort_unstable_by_key(|&(a, b)| (a, std::cmp::Reverse(b)));
    out
}

/// True iff `[a, b]` is a dyadic interval of `[1, n]`.
pub fn is_dyadic_interval(a: usize, b: usize, n: usize) -> bool {
    let (mut lo, mut hi) = (1usize, n);
    loop {
        if (lo, hi) == (a, b) {
            return true;
        }
        if lo == hi || a < lo || b > hi {
            return false;
        }
        let mid = lo - 1 + (hi - lo + 1).div_ceil(2);
        if b <= mid {
            hi = mid;
        } else if a > mid {
            lo = mid + 1;
        } else {
            return false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(lo: &[usize], hi: &[usize]) -> Rect {
        Rect::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    #[test]
    fn dyadic_split_follows_ceiling_rule() {
        let (l, r) = Rect::interval(1, 5).unwrap().dyadic_split(0).unwrap();
        assert_eq!((l, r), (rect(&[1], &[3]), rect(&[4], &[5])));

        let (l, r) = Rect::interval(1, 2).unwrap().dyadic_split(0).unwrap();
        assert_eq!((l, r), (rect(&[1], &[1]), rect(&[2], &[2])));

        let (l, r) = rect(&[3, 1], &[6, 4]).dyadic_split(1).unwrap();
        assert_eq!(l, rect(&[3, 1], &[6, 2]));
        assert_eq!(r, rect(&[3, 3], &[6, 4]));
    }

    #[test]
    fn dyadic_split_rejects_singleton_axis() {
        let err = rect(&[2, 1], &[2, 4]).dyadic_split(0).unwrap_err();
        assert!(matches!(err, Error::UnsplittableAxis { axis: 0, .. }));
    }

    #[test]
    fn hierarchical_split_cases() {
        let (l, r) = Rect::interval(1, 5).unwrap().hierarchical_split(0, 1).unwrap();
        assert_eq!((l, r), (rect(&[1], &[1]), rect(&[2], &[5])));

        let (l, r) = rect(&[1, 1], &[4, 4]).hierarchical_split(0, 3).unwrap();
        assert_eq!(l, rect(&[1, 1], &[3, 4]));
        assert_eq!(r, rect(&[4, 1], &[4, 4]));

        assert!(Rect::interval(2, 2).unwrap().hierarchical_split(0, 2).is_err());
        assert!(Rect::interval(1, 5).unwrap().hierarchical_split(0, 5).is_err());
    }

    #[test]
    fn split_pieces_are_disjoint_and_sum() {
        let r = rect(&[2, 3], &[7, 9]);
        for axis in 0..2 {
            let (a, b) = r.dyadic_split(axis).unwrap();
            assert!(a.is_disjoint(&b));
            assert_eq!(a.cells() + b.cells(), r.cells());
            for cut in r.lo()[axis]..r.hi()[axis] {
                let (a, b) = r.hierarchical_split(axis, cut).unwrap();
                assert!(a.is_disjoint(&b));
                assert_eq!(a.cells() + b.cells(), r.cells());
            }
        }
    }

    #[test]
    fn partition_validation_catches_bad_covers() {
        let root = Rect::full(&[4]);
        // Gap.
        assert!(Partition::new(
            root.clone(),
            vec![rect(&[1], &[1]), rect(&[3], &[4])],
            Family::Arbitrary
        )
        .is_err());
        // Overlap.
        assert!(Partition::new(
            root.clone(),
            vec![rect(&[1], &[2]), rect(&[2], &[4])],
            Family::Arbitrary
        )
        .is_err());
        // Good cover.
        assert!(Partition::new(
            root,
            vec![rect(&[3], &[4]), rect(&[1], &[2])],
            Family::Arbitrary
        )
        .is_ok());
    }

    /// The canonical 5-rectangle pinwheel with cuts at a and b.
    fn pinwheel(n: usize, a: usize, b: usize) -> Partition {
        Partition::new(
            Rect::full(&[n, n]),
            vec![
                rect(&[1, 1], &[a, b]),
                rect(&[1, b + 1], &[b, n]),
                rect(&[b + 1, a + 1], &[n, n]),
                rect(&[a + 1, 1], &[n, a]),
                rect(&[a + 1, a + 1], &[b, b]),
            ],
            Family::Arbitrary,
        )
        .unwrap()
    }

    #[test]
    fn pinwheel_is_not_hierarchical() {
        let p = pinwheel(9, 3, 6);
        assert!(!is_hierarchical(&p));
        assert!(!is_rdp(&p));
    }

    #[test]
    fn guillotine_cut_is_hierarchical_but_not_dyadic() {
        let root = Rect::full(&[8, 8]);
        let p = Partition::new(
            root.clone(),
            vec![rect(&[1, 1], &[3, 8]), rect(&[4, 1], &[8, 8])],
            Family::Arbitrary,
        )
        .unwrap();
        assert!(is_hierarchical(&p));
        // The cut at 3 is not the midpoint 4.
        assert!(!is_rdp(&p));

        let trivial = Partition::trivial(root, Family::Arbitrary);
        assert!(is_hierarchical(&trivial));
        assert!(is_rdp(&trivial));
    }

    #[test]
    fn midpoint_cut_is_rdp() {
        let p = Partition::new(
            Rect::full(&[4, 4]),
            vec![rect(&[1, 1], &[2, 4]), rect(&[3, 1], &[4, 4])],
            Family::Arbitrary,
        )
        .unwrap();
        assert!(is_rdp(&p));
        assert!(is_hierarchical(&p));
    }

    #[test]
    fn three_dim_dyadic_products_need_not_form_an_rdp() {
        // Five boxes of the 2x2x2 lattice, each a product of dyadic
        // intervals of [2], that no midpoint split can separate.
        let p = Partition::new(
            Rect::full(&[2, 2, 2]),
            vec![
                rect(&[1, 1, 2], &[2, 1, 2]),
                rect(&[2, 1, 1], &[2, 2, 1]),
                rect(&[1, 2, 1], &[1, 2, 2]),
                rect(&[1, 1, 1], &[1, 1, 1]),
                rect(&[2, 2, 2], &[2, 2, 2]),
            ],
            Family::Arbitrary,
        )
        .unwrap();
        for r in p.rects() {
            for axis in 0..3 {
                assert!(is_dyadic_interval(r.lo()[axis], r.hi()[axis], 2));
            }
        }
        assert!(!is_rdp(&p));
        // It is not hierarchical either: every full cut crosses a box.
        assert!(!is_hierarchical(&p));
    }

    #[test]
    fn family_constructor_enforces_membership() {
        let root = Rect::full(&[8, 8]);
        let cut3 = vec![rect(&[1, 1], &[3, 8]), rect(&[4, 1], &[8, 8])];
        assert!(Partition::new(root.clone(), cut3.clone(), Family::Hier).is_ok());
        assert!(matches!(
            Partition::new(root, cut3, Family::Rdp),
            Err(Error::WrongFamily { family: "rdp", .. })
        ));
    }

    #[test]
    fn dyadic_interval_enumeration() {
        let ivs = dyadic_intervals(5);
        assert_eq!(ivs.len(), 9);
        assert!(ivs.contains(&(1, 5)));
        assert!(ivs.contains(&(1, 3)));
        assert!(ivs.contains(&(4, 5)));
        assert!(ivs.contains(&(3, 3)));
        for &(a, b) in &ivs {
            assert!(is_dyadic_interval(a, b, 5));
        }
        assert!(!is_dyadic_interval(2, 3, 5));
        // Powers of two give exactly 2n - 1 dyadic intervals.
        assert_eq!(dyadic_intervals(8).len(), 15);
    }

    #[test]
    fn cell_iteration_is_row_major() {
        let arr = LatticeArray::new(vec![2, 3], (0..6).map(|v| v as f64).collect()).unwrap();
        let mut seen = Vec::new();
        for_each_cell(&rect(&[1, 2], &[2, 3]), arr.dims(), |p, lin| {
            seen.push((p.to_vec(), lin));
        });
        assert_eq!(
            seen,
            vec![
                (vec![1, 2], 1),
                (vec![1, 3], 2),
                (vec![2, 2], 4),
                (vec![2, 3], 5),
            ]
        );
    }
}
