//! Constructive refinements between partition families: interval-to-dyadic
//! decomposition, 1D and 2D refinement into recursive dyadic partitions,
//! and the sparse-support construction of a hierarchical partition.
//!
//! The cardinality bounds promised here carry explicit constants so they
//! can be asserted in tests; minimality is never attempted.

use crate::error::{Error, Result};
use crate::lattice::{for_each_cell, Family, LatticeArray, Partition, Rect};

/// Decomposes `[a, b]` into maximal dyadic intervals of `[1, n]`, greedily
/// from the top of the dyadic tree. At most two intervals are emitted per
/// tree level, so the count is at most `2 ceil(log2 n) + 1`.
pub fn dyadic_decompose_interval(a: usize, b: usize, n: usize) -> Result<Vec<(usize, usize)>> {
    if !(1 <= a && a <= b && b <= n) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= a <= b <= n, got a = {a}, b = {b}, n = {n}"
        )));
    }
    let mut out = Vec::new();
    decompose_within(1, n, a, b, &mut out);
    Ok(out)
}

/// Walks the dyadic tree of `[lo, hi]`, emitting nodes contained in `[a, b]`.
fn decompose_within(lo: usize, hi: usize, a: usize, b: usize, out: &mut Vec<(usize, usize)>) {
    if b < lo || hi < a {
        return;
    }
    if a <= lo && hi <= b {
        out.push((lo, hi));
        return;
    }
    let mid = lo - 1 + (hi - lo + 1).div_ceil(2);
    decompose_within(lo, mid, a, b, out);
    decompose_within(mid + 1, hi, a, b, out);
}

/// Refines a 1D partition into a recursive dyadic partition of the same
/// root: grow the complete dyadic tree until it has at least `k = |p|`
/// leaves, then keep splitting any leaf not contained in a piece of `p`.
/// The output has at most `4k (1 + log2(2n / k))` intervals.
pub fn refine_1d_to_rdp(p: &Partition) -> Result<Partition> {
    if p.root().ndim() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 1D partition, root is {}",
            p.root()
        )));
    }
    let k = p.len();
    let mut leaves = vec![p.root().clone()];
    // Phase 1: complete levels until the leaf count first reaches k.
    while leaves.len() < k {
        let mut next = Vec::with_capacity(leaves.len() * 2);
        let mut grew = false;
        for leaf in &leaves {
            if leaf.side(0) >= 2 {
                let (l, r) = leaf.dyadic_split(0)?;
                next.push(l);
                next.push(r);
                grew = true;
            } else {
                next.push(leaf.clone());
            }
        }
        leaves = next;
        if !grew {
            break;
        }
    }
    // Phase 2: split only leaves that straddle a piece boundary.
    loop {
        let mut next = Vec::with_capacity(leaves.len());
        let mut split_any = false;
        for leaf in &leaves {
            if p.rects().iter().any(|piece| piece.contains(leaf)) {
                next.push(leaf.clone());
            } else {
                let (l, r) = leaf.dyadic_split(0)?;
                next.push(l);
                next.push(r);
                split_any = true;
            }
        }
        leaves = next;
        if !split_any {
            break;
        }
    }
    Partition::new(p.root().clone(), leaves, Family::Rdp)
}

/// Refines a 2D partition into a recursive dyadic partition by decomposing
/// each rectangle's sides into dyadic intervals and taking products. The
/// output has at most `k (2 ceil(log2 n) + 1)^2` rectangles for side n.
pub fn refine_2d_to_rdp(p: &Partition) -> Result<Partition> {
    if p.root().ndim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 2D partition, root is {}",
            p.root()
        )));
    }
    let root = p.root();
    let mut pieces = Vec::new();
    for rect in p.rects() {
        let mut per_axis: Vec<Vec<(usize, usize)>> = Vec::with_capacity(2);
        for axis in 0..2 {
            let mut side = Vec::new();
            decompose_within(
                root.lo()[axis],
                root.hi()[axis],
                rect.lo()[axis],
                rect.hi()[axis],
                &mut side,
            );
            per_axis.push(side);
        }
        for &(a0, b0) in &per_axis[0] {
            for &(a1, b1) in &per_axis[1] {
                pieces.push(Rect::new(vec![a0, a1], vec![b0, b1])?);
            }
        }
    }
    Partition::new(root.clone(), pieces, Family::Rdp)
}

/// Builds a hierarchical partition on whose pieces `theta` is constant,
/// with at most `3 d ||theta||_0` pieces (one piece for the zero array), by
/// slicing on the support coordinates of each axis in turn.
pub fn sparse_to_hierarchical(theta: &LatticeArray) -> Result<Partition> {
    let root = theta.full_rect();
    let mut pieces = Vec::new();
    slice_support(theta, &root, 0, &mut pieces);
    Partition::new(root, pieces, Family::Hier)
}

fn slice_support(theta: &LatticeArray, region: &Rect, axis: usize, out: &mut Vec<Rect>) {
    let d = region.ndim();
    if axis == d {
        out.push(region.clone());
        return;
    }
    // Coordinates along `axis` whose slab intersects the support.
    let mut support = Vec::new();
    for coord in region.lo()[axis]..=region.hi()[axis] {
        let mut lo = region.lo().to_vec();
        let mut hi = region.hi().to_vec();
        lo[axis] = coord;
        hi[axis] = coord;
        let slab = Rect::new(lo, hi).expect("slab inside region");
        let mut nonzero = false;
        for_each_cell(&slab, theta.dims(), |_, lin| {
            if theta.values()[lin] != 0.0 {
                nonzero = true;
            }
        });
        if nonzero {
            support.push(coord);
        }
    }
    if support.is_empty() {
        out.push(region.clone());
        return;
    }
    let mut cursor = region.lo()[axis];
    for &coord in &support {
        if coord > cursor {
            let mut lo = region.lo().to_vec();
            let mut hi = region.hi().to_vec();
            lo[axis] = cursor;
            hi[axis] = coord - 1;
            out.push(Rect::new(lo, hi).expect("gap slab"));
        }
        let mut lo = region.lo().to_vec();
        let mut hi = region.hi().to_vec();
        lo[axis] = coord;
        hi[axis] = coord;
        let slice = Rect::new(lo, hi).expect("support slab");
        slice_support(theta, &slice, axis + 1, out);
        cursor = coord + 1;
    }
    if cursor <= region.hi()[axis] {
        let mut lo = region.lo().to_vec();
        lo[axis] = cursor;
        out.push(Rect::new(lo, region.hi().to_vec()).expect("tail slab"));
    }
}

/// Implementation bound asserted for [`refine_1d_to_rdp`].
pub fn refine_1d_bound(k: usize, n: usize) -> f64 {
    let (k, n) = (k as f64, n as f64);
    4.0 * k * (1.0 + (2.0 * n / k).log2())
}

/// Implementation bound asserted for [`refine_2d_to_rdp`] on side `n`.
pub fn refine_2d_bound(k: usize, n: usize) -> f64 {
    let per_side = 2.0 * (n as f64).log2().ceil() + 1.0;
    k as f64 * per_side * per_side
}
