//! Brute-force enumeration of partition families on tiny lattices, used as
//! ground truth for the dynamic-programming solvers.
//!
//! Everything here is guarded to lattices of at most [`ENUMERATION_GUARD`]
//! cells; enumeration cost explodes beyond that.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::lattice::{Family, LatticeArray, Partition, Rect};
use crate::polyfit::{fit_rect, project_partition, FitResult, PolyBasis, RectStats};

/// Maximum number of lattice cells accepted by the enumeration routines.
pub const ENUMERATION_GUARD: usize = 16;

/// Outcome of an exhaustive search over one partition family.
#[derive(Clone, Debug)]
pub struct EnumerationReport {
    pub family: Family,
    pub count: usize,
    pub best_partition: Partition,
    pub best_objective: f64,
}

fn check_guard(root: &Rect) -> Result<()> {
    let cells = root.cells();
    if cells > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard {
            cells,
            guard: ENUMERATION_GUARD,
        });
    }
    Ok(())
}

/// Every partition of `root` in the given family, each exactly once, in a
/// canonical order (fewer pieces first, then lexicographic).
///
/// `Family::Arbitrary` enumerates all exact covers by rectangles; the other
/// two walk the reachable split states.
pub fn enumerate_partitions(root: &Rect, family: Family) -> Result<Vec<Partition>> {
    check_guard(root)?;
    let mut states = match family {
        Family::Arbitrary => enumerate_all(root),
        Family::Hier | Family::Rdp => enumerate_by_splits(root, family == Family::Rdp),
    };
    states.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    Ok(states
        .into_iter()
        .map(|rects| Partition::new_unchecked(root.clone(), rects, family))
        .collect())
}

/// Exact covers: the lexicographically first uncovered cell must be the low
/// corner of the rectangle covering it, which makes the recursion canonical
/// and duplicate-free.
fn enumerate_all(root: &Rect) -> Vec<Vec<Rect>> {
    let d = root.ndim();
    let sides = root.sides();
    let total = root.cells();
    let mut covered = vec![false; total];
    let mut current: Vec<Rect> = Vec::new();
    let mut out = Vec::new();

    // Root-local linear index of a point.
    let local = |point: &[usize]| -> usize {
        let mut idx = 0;
        for a in 0..point.len() {
            idx = idx * sides[a] + (point[a] - root.lo()[a]);
        }
        idx
    };
    let unlocal = |mut idx: usize| -> Vec<usize> {
        let mut p = vec![0; d];
        for a in (0..d).rev() {
            p[a] = root.lo()[a] + idx % sides[a];
            idx /= sides[a];
        }
        p
    };

    fn rec(
        root: &Rect,
        covered: &mut Vec<bool>,
        current: &mut Vec<Rect>,
        out: &mut Vec<Vec<Rect>>,
        local: &dyn Fn(&[usize]) -> usize,
        unlocal: &dyn Fn(usize) -> Vec<usize>,
    ) {
        let first = match covered.iter().position(|&c| !c) {
            None => {
                out.push(current.clone());
                return;
            }
            Some(i) => i,
        };
        let lo = unlocal(first);
        let d = lo.len();
        // Odometer over the high corner.
        let mut hi = lo.clone();
        loop {
            let rect = Rect::new(lo.clone(), hi.clone()).expect("valid corner pair");
            let mut cells = Vec::with_capacity(rect.cells());
            let mut free = true;
            crate::lattice::for_each_cell(&rect, &root.sides(), |p, _| {
                let idx = local(p);
                if covered[idx] {
                    free = false;
                }
                cells.push(idx);
            });
            if free {
                for &c in &cells {
                    covered[c] = true;
                }
                current.push(rect);
                rec(root, covered, current, out, local, unlocal);
                current.pop();
                for &c in &cells {
                    covered[c] = false;
                }
            }
            // Advance the high corner.
            let mut axis = d;
            let mut done = true;
            while axis > 0 {
                axis -= 1;
                if hi[axis] < root.hi()[axis] {
                    hi[axis] += 1;
                    done = false;
                    break;
                }
                hi[axis] = lo[axis];
            }
            if done {
                break;
            }
        }
    }

    rec(root, &mut covered, &mut current, &mut out, &local, &unlocal);
    out
}

/// Breadth-first walk of split states: start from `{root}` and split any
/// rectangle (midpoint only when `dyadic`), deduplicating reached states.
fn enumerate_by_splits(root: &Rect, dyadic: bool) -> Vec<Vec<Rect>> {
    let mut seen: HashSet<Vec<Rect>> = HashSet::new();
    let start = vec![root.clone()];
    seen.insert(start.clone());
    let mut queue = vec![start];
    while let Some(state) = queue.pop() {
        for (i, rect) in state.iter().enumerate() {
            for axis in 0..root.ndim() {
                if rect.side(axis) < 2 {
                    continue;
                }
                let cuts: Vec<usize> = if dyadic {
                    vec![rect.dyadic_cut(axis)]
                } else {
                    (rect.lo()[axis]..rect.hi()[axis]).collect()
                };
                for cut in cuts {
                    let (l, r) = rect.hierarchical_split(axis, cut).expect("legal cut");
                    let mut next: Vec<Rect> = Vec::with_capacity(state.len() + 1);
                    next.extend(state.iter().take(i).cloned());
                    next.extend(state.iter().skip(i + 1).cloned());
                    next.push(l);
                    next.push(r);
                    next.sort();
                    if seen.insert(next.clone()) {
                        queue.push(next);
                    }
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Evaluates `||y - fit||^2 + lambda k` for each candidate partition and
/// returns `(best objective, index of the winner)`. Ties go to fewer pieces,
/// then to the earlier candidate.
pub fn optimize_over(
    y: &LatticeArray,
    partitions: &[Partition],
    basis: &PolyBasis,
    lambda: f64,
) -> Result<(f64, usize)> {
    if partitions.is_empty() {
        return Err(Error::InvalidArgument("no candidate partitions".into()));
    }
    let mut cache: HashMap<Rect, f64> = HashMap::new();
    let mut best = f64::INFINITY;
    let mut best_k = usize::MAX;
    let mut best_idx = 0;
    for (idx, p) in partitions.iter().enumerate() {
        let mut obj = lambda * p.len() as f64;
        for r in p.rects() {
            let sse = *cache
                .entry(r.clone())
                .or_insert_with(|| fit_rect(&RectStats::from_rect(y, r, basis)).1);
            obj += sse;
        }
        if obj < best - 1e-12 || (obj <= best + 1e-12 && p.len() < best_k) {
            best = obj;
            best_k = p.len();
            best_idx = idx;
        }
    }
    Ok((best, best_idx))
}

/// Globally optimal penalized least-squares fit by exhaustive enumeration.
pub fn exact_penalized_lse(
    y: &LatticeArray,
    order: usize,
    lambda: f64,
    family: Family,
) -> Result<FitResult> {
    Ok(exact_report(y, order, lambda, family)?.1)
}

/// Enumeration count and optimum in one pass.
pub fn enumeration_report(
    y: &LatticeArray,
    order: usize,
    lambda: f64,
    family: Family,
) -> Result<EnumerationReport> {
    Ok(exact_report(y, order, lambda, family)?.0)
}

fn exact_report(
    y: &LatticeArray,
    order: usize,
    lambda: f64,
    family: Family,
) -> Result<(EnumerationReport, FitResult)> {
    if lambda <= 0.0 {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let partitions = enumerate_partitions(&y.full_rect(), family)?;
    let basis = PolyBasis::new(order, y.dims());
    let (best, idx) = optimize_over(y, &partitions, &basis, lambda)?;
    let fit = project_partition(y, &partitions[idx], &basis, Some(lambda))?;
    let report = EnumerationReport {
        family,
        count: partitions.len(),
        best_partition: partitions[idx].clone(),
        best_objective: best,
    };
    Ok((report, fit))
}

/// Minimal number of pieces among partitions of the family on which `theta`
/// is exactly (to rounding) a degree <= `order` polynomial per piece: the
/// paper's k^(r) complexity of an array.
pub fn min_pieces(theta: &LatticeArray, order: usize, family: Family) -> Result<usize> {
    let partitions = enumerate_partitions(&theta.full_rect(), family)?;
    let basis = PolyBasis::new(order, theta.dims());
    let scale: f64 = theta.values().iter().map(|v| v * v).sum::<f64>().max(1.0);
    let tol = 1e-9 * scale;
    let mut cache: HashMap<Rect, f64> = HashMap::new();
    let mut best = usize::MAX;
    for p in &partitions {
        if p.len() >= best {
            continue;
        }
        let sse: f64 = p
            .rects()
            .iter()
            .map(|r| {
                *cache
                    .entry(r.clone())
                    .or_insert_with(|| fit_rect(&RectStats::from_rect(theta, r, &basis)).1)
            })
            .sum();
        if sse <= tol {
            best = p.len();
        }
    }
    if best == usize::MAX {
        return Err(Error::Internal(
            "no partition reproduces theta; singletons should always work".into(),
        ));
    }
    Ok(best)
}
