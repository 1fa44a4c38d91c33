//! Exact bottom-up dynamic programs for the two tree estimators.
//!
//! Both solvers minimize `||y - theta||^2 + lambda k` over a partition
//! family, fitting degree <= r polynomials per rectangle:
//!
//! * `Family::Rdp` is Dyadic CART: only midpoint splits, so the table holds
//!   just the products of dyadic intervals (at most `2^d N` rectangles).
//! * `Family::Hier` is the optimal regression tree (ORT): every guillotine
//!   cut is a candidate and the table holds all `O(N^2)` sub-rectangles.
//!
//! Rectangles are visited in increasing `Size(R)` (sum of side lengths);
//! every split produces strictly smaller sizes, so each visit only reads
//! completed entries. Sufficient statistics are assembled bottom-up from an
//! arbitrary two-piece split of each rectangle, which is valid because they
//! are additive. Rectangles within one size class may be processed in
//! parallel; all accumulation orders are fixed, so results do not depend on
//! the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{dyadic_intervals, Family, LatticeArray, Partition, Rect};
use crate::polyfit::{project_partition, solve_normal_equations, FitResult, PolyBasis};

/// Cost tolerance for tie-breaking: when the best split is within this of
/// the no-split option, the rectangle stays whole; among splits the smaller
/// axis, then the smaller cut, wins. Keeps optimal partitions deterministic
/// and biased toward fewer pieces.
const TIE_EPS: f64 = 1e-12;

/// One axis of the rectangle index: the usable intervals on that axis and,
/// per interval, the admissible cuts with the interval ids they produce.
struct AxisTable {
    intervals: Vec<(usize, usize)>,
    /// `splits[id]` lists `(cut, left_id, right_id)` in ascending cut order.
    splits: Vec<Vec<(usize, usize, usize)>>,
}

impl AxisTable {
    /// All intervals `1 <= a <= b <= n`, triangular id, every cut admissible.
    fn hier(n: usize) -> Self {
        let count = n * (n + 1) / 2;
        let id = |a: usize, b: usize| {
            let k = a - 1;
            k * n - k * k.saturating_sub(1) / 2 + (b - a)
        };
        let mut intervals = vec![(0, 0); count];
        let mut splits = vec![Vec::new(); count];
        for a in 1..=n {
            for b in a..=n {
                let i = id(a, b);
                intervals[i] = (a, b);
                splits[i] = (a..b).map(|cut| (cut, id(a, cut), id(cut + 1, b))).collect();
            }
        }
        Self { intervals, splits }
    }

    /// Dyadic intervals only, each with its single midpoint cut.
    fn rdp(n: usize) -> Self {
        let intervals = dyadic_intervals(n);
        let id_of: std::collections::HashMap<(usize, usize), usize> = intervals
            .iter()
            .copied()
            .enumerate()
            .map(|(i, iv)| (iv, i))
            .collect();
        let splits = intervals
            .iter()
            .map(|&(a, b)| {
                if a == b {
                    return Vec::new();
                }
                let mid = a - 1 + (b - a + 1).div_ceil(2);
                vec![(mid, id_of[&(a, mid)], id_of[&(mid + 1, b)])]
            })
            .collect();
        Self { intervals, splits }
    }

    fn len(&self) -> usize {
        self.intervals.len()
    }

    fn find(&self, a: usize, b: usize) -> Option<usize> {
        // Tables are small; linear scan only runs in accessor paths.
        self.intervals.iter().position(|&iv| iv == (a, b))
    }
}

/// Per-rectangle optimal cost and first-split tables for one solve.
pub struct DpTables {
    family: Family,
    order: usize,
    lambda: f64,
    dims: Vec<usize>,
    axes: Vec<AxisTable>,
    /// Mixed-radix place value of each axis in a rectangle key.
    radix: Vec<usize>,
    opt: Vec<f64>,
    split: Vec<Option<(usize, usize)>>,
}

impl DpTables {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn key_of(&self, rect: &Rect) -> Option<usize> {
        if rect.ndim() != self.dims.len() {
            return None;
        }
        let mut key = 0;
        for (axis, table) in self.axes.iter().enumerate() {
            let id = table.find(rect.lo()[axis], rect.hi()[axis])?;
            key += id * self.radix[axis];
        }
        Some(key)
    }

    /// Optimal penalized cost of a sub-rectangle, if it is in the table's
    /// domain (for the dyadic family that means a product of dyadic
    /// intervals).
    pub fn opt(&self, rect: &Rect) -> Option<f64> {
        self.key_of(rect).map(|k| self.opt[k])
    }

    /// First-split decision: `None` when the rectangle is unknown,
    /// `Some(None)` for a leaf, `Some(Some((axis, cut)))` otherwise.
    pub fn split_of(&self, rect: &Rect) -> Option<Option<(usize, usize)>> {
        self.key_of(rect).map(|k| self.split[k])
    }
}

/// Builds the full OPT/SPLIT tables for `y` without reconstructing a fit.
pub fn solve_tables(
    y: &LatticeArray,
    order: usize,
    lambda: f64,
    family: Family,
) -> Result<DpTables> {
    if lambda <= 0.0 {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let axes: Vec<AxisTable> = match family {
        Family::Rdp => y.dims().iter().map(|&n| AxisTable::rdp(n)).collect(),
        Family::Hier => y.dims().iter().map(|&n| AxisTable::hier(n)).collect(),
        Family::Arbitrary => {
            return Err(Error::InvalidArgument(
                "no dynamic program over arbitrary partitions; use the enumeration oracle".into(),
            ))
        }
    };
    let d = axes.len();
    let mut radix = vec![1usize; d];
    for axis in (0..d.saturating_sub(1)).rev() {
        radix[axis] = radix[axis + 1] * axes[axis + 1].len();
    }
    let nkeys: usize = axes.iter().map(AxisTable::len).product();

    // Bucket keys by Size(R); interval ids of a key are recovered on the
    // fly, so only the key lists are materialized.
    let max_size: usize = y.dims().iter().sum();
    let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); max_size + 1];
    {
        let mut ids = vec![0usize; d];
        loop {
            let mut key = 0;
            let mut size = 0;
            for axis in 0..d {
                let (a, b) = axes[axis].intervals[ids[axis]];
                key += ids[axis] * radix[axis];
                size += b - a + 1;
            }
            by_size[size].push(key);
            let mut axis = d;
            let mut done = true;
            while axis > 0 {
                axis -= 1;
                ids[axis] += 1;
                if ids[axis] < axes[axis].len() {
                    done = false;
                    break;
                }
                ids[axis] = 0;
            }
            if done {
                break;
            }
        }
        for keys in &mut by_size {
            keys.sort_unstable();
        }
    }

    let basis = PolyBasis::new(order, y.dims());
    let l = basis.len();
    let stride = l * l + l + 1; // gram | moment | sumsq
    let mut stats = vec![0.0f64; nkeys * stride];
    let mut opt = vec![f64::INFINITY; nkeys];
    let mut split: Vec<Option<(usize, usize)>> = vec![None; nkeys];

    let decode = |key: usize, axis: usize| (key / radix[axis]) % axes[axis].len();
    let mut point = vec![0usize; d];
    let mut row = vec![0.0f64; l];
    let mut merged = vec![0.0f64; stride];

    for size in d..=max_size {
        let keys = &by_size[size];
        if keys.is_empty() {
            continue;
        }
        // Pass 1 (sequential): sufficient statistics, leaves from the data
        // and inner rectangles by merging any one split's halves.
        for &key in keys {
            let mut first_split: Option<(usize, usize)> = None;
            for axis in 0..d {
                let id = decode(key, axis);
                if let Some(&(_, lid, rid)) = axes[axis].splits[id].first() {
                    let base = key - id * radix[axis];
                    first_split = Some((base + lid * radix[axis], base + rid * radix[axis]));
                    break;
                }
            }
            match first_split {
                None => {
                    for axis in 0..d {
                        point[axis] = axes[axis].intervals[decode(key, axis)].0;
                    }
                    let v = y.get(&point);
                    basis.eval_into(&point, &mut row);
                    let s = &mut stats[key * stride..(key + 1) * stride];
                    for i in 0..l {
                        for j in 0..l {
                            s[i * l + j] = row[i] * row[j];
                        }
                    }
                    for i in 0..l {
                        s[l * l + i] = v * row[i];
                    }
                    s[l * l + l] = v * v;
                }
                Some((k1, k2)) => {
                    for i in 0..stride {
                        merged[i] = stats[k1 * stride + i] + stats[k2 * stride + i];
                    }
                    stats[key * stride..(key + 1) * stride].copy_from_slice(&merged);
                }
            }
        }
        // Pass 2 (parallel): projection residual and best first split.
        let results: Vec<(f64, Option<(usize, usize)>)> = keys
            .par_iter()
            .with_min_len(64)
            .map(|&key| {
                let s = &stats[key * stride..(key + 1) * stride];
                let (_, explained) = solve_normal_equations(&s[..l * l], &s[l * l..l * l + l], l);
                let sse = (s[l * l + l] - explained).max(0.0);
                let no_split = sse + lambda;
                let mut best = f64::INFINITY;
                let mut best_at = None;
                for axis in 0..d {
                    let id = decode(key, axis);
                    let base = key - id * radix[axis];
                    for &(cut, lid, rid) in &axes[axis].splits[id] {
                        let cost = opt[base + lid * radix[axis]] + opt[base + rid * radix[axis]];
                        if cost < best - TIE_EPS {
                            best = cost;
                            best_at = Some((axis, cut));
                        }
                    }
                }
                if best < no_split - TIE_EPS {
                    (no_split.min(best), best_at)
                } else {
                    (no_split.min(best), None)
                }
            })
            .collect();
        for (&key, (o, s)) in keys.iter().zip(results) {
            opt[key] = o;
            split[key] = s;
        }
    }

    Ok(DpTables {
        family,
        order,
        lambda,
        dims: y.dims().to_vec(),
        axes,
        radix,
        opt,
        split,
    })
}

/// Reads the optimal partition out of completed tables, splitting top-down
/// from `root` until every piece is a no-split leaf.
pub fn reconstruct(tables: &DpTables, root: &Rect) -> Result<Partition> {
    let mut leaves = Vec::new();
    let mut stack = vec![root.clone()];
    while let Some(rect) = stack.pop() {
        let decision = tables.split_of(&rect).ok_or_else(|| {
            Error::Internal(format!("rectangle {rect} missing from the solve tables"))
        })?;
        match decision {
            None => leaves.push(rect),
            Some((axis, cut)) => {
                let (l, r) = rect.hierarchical_split(axis, cut)?;
                stack.push(r);
                stack.push(l);
            }
        }
    }
    Partition::new(root.clone(), leaves, tables.family())
}

/// Globally optimal penalized fit over the chosen family.
pub fn solve(y: &LatticeArray, order: usize, lambda: f64, family: Family) -> Result<FitResult> {
    let tables = solve_tables(y, order, lambda, family)?;
    let partition = reconstruct(&tables, &y.full_rect())?;
    let basis = PolyBasis::new(order, y.dims());
    project_partition(y, &partition, &basis, Some(lambda))
}

/// Just the optimal objective value.
pub fn opt_value(y: &LatticeArray, order: usize, lambda: f64, family: Family) -> Result<f64> {
    let tables = solve_tables(y, order, lambda, family)?;
    tables
        .opt(&y.full_rect())
        .ok_or_else(|| Error::Internal("root rectangle missing from tables".into()))
}
