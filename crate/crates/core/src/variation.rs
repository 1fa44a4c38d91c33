//! Variation functionals on lattice arrays and the constructive
//! approximation schemes built on them: total variation over the lattice
//! graph, higher-order variation of vectors, greedy variation-bounded
//! partitioning, discrete Sobolev-type inequality checks, and piecewise
//! polynomial approximation of bounded-variation vectors.

use crate::error::{Error, Result};
use crate::lattice::{for_each_cell, strides, Family, LatticeArray, Partition, Rect};

/// Total variation: the sum of absolute first differences over all edges
/// of the lattice graph.
pub fn tv(theta: &LatticeArray) -> f64 {
    tv_on_rect(theta, &theta.full_rect())
}

/// Total variation of the restriction of `theta` to `rect` (edges with both
/// endpoints inside the rectangle).
pub fn tv_on_rect(theta: &LatticeArray, rect: &Rect) -> f64 {
    let st = strides(theta.dims());
    let vals = theta.values();
    let mut total = 0.0;
    for_each_cell(rect, theta.dims(), |point, lin| {
        for axis in 0..rect.ndim() {
            if point[axis] < rect.hi()[axis] {
                total += (vals[lin + st[axis]] - vals[lin]).abs();
            }
        }
    });
    total
}

/// First differences of a vector.
pub fn diff(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

/// r-th discrete difference, a vector of length `n - r`.
pub fn diff_r(v: &[f64], r: usize) -> Vec<f64> {
    let mut cur = v.to_vec();
    for _ in 0..r {
        cur = diff(&cur);
    }
    cur
}

/// Order-r variation of a vector: `n^(r-1) |D^r theta|_1`. Order 1 is the
/// usual total variation.
pub fn higher_order_variation(theta: &[f64], r: usize) -> Result<f64> {
    let n = theta.len();
    if r == 0 {
        return Err(Error::InvalidArgument("variation order must be >= 1".into()));
    }
    if n <= r {
        return Err(Error::OrderTooLarge { n, r });
    }
    let l1: f64 = diff_r(theta, r).iter().map(|d| d.abs()).sum();
    Ok((n as f64).powi(r as i32 - 1) * l1)
}

/// An order tag and nonnegative variation value; zero exactly when the
/// array is a polynomial sequence of degree r - 1 (constant for order 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationProfile {
    pub order: usize,
    pub value: f64,
}

pub fn variation_profile(theta: &LatticeArray, order: usize) -> Result<VariationProfile> {
    let value = if order == 1 {
        tv(theta)
    } else {
        if theta.ndim() != 1 {
            return Err(Error::DimensionMismatch(
                "higher-order variation is defined for 1D arrays".into(),
            ));
        }
        higher_order_variation(theta.values(), order)?
    };
    Ok(VariationProfile { order, value })
}

/// Greedy recursive dyadic partitioning until every piece has total
/// variation at most `delta`, splitting coordinates cyclically so every
/// piece keeps aspect ratio at most 2 (on power-of-two lattices). The piece
/// count is at most `1 + log2(N) (1 + TV(theta) / delta)`.
pub fn tv_delta_scheme(theta: &LatticeArray, delta: f64) -> Result<Partition> {
    if delta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let d = theta.ndim();
    let mut leaves = Vec::new();
    let mut generation = vec![theta.full_rect()];
    let mut level = 0usize;
    while !generation.is_empty() {
        let mut next = Vec::new();
        let preferred = level % d;
        for rect in generation {
            if tv_on_rect(theta, &rect) <= delta {
                leaves.push(rect);
                continue;
            }
            // The cyclic coordinate, or the next splittable one after it.
            let axis = (0..d)
                .map(|off| (preferred + off) % d)
                .find(|&a| rect.side(a) >= 2);
            match axis {
                None => leaves.push(rect), // single cell, TV is 0 anyway
                Some(axis) => {
                    let (l, r) = rect.dyadic_split(axis)?;
                    next.push(l);
                    next.push(r);
                }
            }
        }
        generation = next;
        level += 1;
    }
    Partition::new(theta.full_rect(), leaves, Family::Rdp)
}

/// Both sides of the discrete Gagliardo-Nirenberg-Sobolev inequality.
///
/// `lhs <= rhs` always holds for `d >= 2`; the `d/(d-1)`-power form is
/// carried for reporting alongside the squared form used by the checks.
#[derive(Clone, Copy, Debug)]
pub struct GnsReport {
    /// `sum (theta - mean)^2`
    pub lhs: f64,
    /// `(1 + aspect)^2 TV(theta)^2`
    pub rhs: f64,
    /// `sum |theta - mean|^(d/(d-1))`
    pub lhs_fractional: f64,
    /// `((1 + aspect) TV(theta))^(d/(d-1))`
    pub rhs_fractional: f64,
}

pub fn gns_check(theta: &LatticeArray) -> Result<GnsReport> {
    let d = theta.ndim();
    if d < 2 {
        return Err(Error::DimensionMismatch(
            "the Gagliardo-Nirenberg-Sobolev check needs d >= 2".into(),
        ));
    }
    let n = theta.len() as f64;
    let mean = theta.values().iter().sum::<f64>() / n;
    let lhs: f64 = theta.values().iter().map(|v| (v - mean) * (v - mean)).sum();
    let p = d as f64 / (d as f64 - 1.0);
    let lhs_fractional: f64 = theta.values().iter().map(|v| (v - mean).abs().powf(p)).sum();
    let aspect = theta.full_rect().aspect_ratio();
    let total = tv(theta);
    Ok(GnsReport {
        lhs,
        rhs: (1.0 + aspect) * (1.0 + aspect) * total * total,
        lhs_fractional,
        rhs_fractional: ((1.0 + aspect) * total).powf(p),
    })
}

/// The 1D mean-approximation inequality `sum (theta - mean)^2 <= n TV^2`,
/// returned as `(lhs, rhs)`.
pub fn mean_bound_1d(theta: &[f64]) -> (f64, f64) {
    let n = theta.len() as f64;
    let mean = theta.iter().sum::<f64>() / n;
    let lhs = theta.iter().map(|v| (v - mean) * (v - mean)).sum();
    let total: f64 = diff(theta).iter().map(|d| d.abs()).sum();
    (lhs, n * total * total)
}

/// Binomial coefficient in f64 (exact while below 2^53).
fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut v = 1.0f64;
    for i in 1..=k {
        v = v * (n + 1 - i) as f64 / i as f64;
    }
    v
}

/// The unique degree r-1 polynomial sequence matching the boundary
/// differences `D^(j-1)(theta)_1` for `j = 1..=r`, and the sup-norm of the
/// residual. The residual satisfies
/// `(theta - poly)_i = sum_(j <= i-r) C(i-j-1, r-1) D^r(theta)_j`,
/// which keeps it below `C(n-2, r-1) |D^r theta|_1 <= n^(r-1) |D^r theta|_1`.
pub fn poly_approx_1d(theta: &[f64], r: usize) -> Result<(Vec<f64>, f64)> {
    let n = theta.len();
    if r == 0 {
        return Err(Error::InvalidArgument("approximation order must be >= 1".into()));
    }
    if n < r {
        return Err(Error::OrderTooLarge { n, r });
    }
    // Boundary statistics c_j = D^(j-1)(theta)_1.
    let mut boundary = Vec::with_capacity(r);
    let mut cur = theta.to_vec();
    for _ in 0..r {
        boundary.push(cur[0]);
        cur = diff(&cur);
    }
    let mut poly = Vec::with_capacity(n);
    for i in 1..=n {
        let v: f64 = boundary
            .iter()
            .enumerate()
            .map(|(jm1, c)| binom(i - 1, jm1) * c)
            .sum();
        poly.push(v);
    }
    let sup_err = theta
        .iter()
        .zip(&poly)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok((poly, sup_err))
}

/// Piecewise polynomial approximation of a vector: recursively bisect `[n]`
/// until every interval I has `M(I) = |I|^(r-1) |D^r theta_I|_1` at most
/// `V delta` with `V = V^(r)(theta)`, then fit the boundary-matching
/// polynomial on each piece. The sup error is at most `V delta` and the
/// piece count at most [`piece_count_bound`].
pub fn piecewise_poly_approx(
    theta: &LatticeArray,
    r: usize,
    delta: f64,
) -> Result<(LatticeArray, Partition)> {
    if theta.ndim() != 1 {
        return Err(Error::DimensionMismatch(
            "piecewise polynomial approximation is defined for 1D arrays".into(),
        ));
    }
    if delta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let n = theta.len();
    let v_total = higher_order_variation(theta.values(), r)?;
    let threshold = v_total * delta;
    let vals = theta.values();

    let m_of = |a: usize, b: usize| -> f64 {
        let len = b - a + 1;
        if len <= r {
            return 0.0;
        }
        let l1: f64 = diff_r(&vals[a - 1..b], r).iter().map(|d| d.abs()).sum();
        (len as f64).powi(r as i32 - 1) * l1
    };

    let mut leaves = Vec::new();
    let mut stack = vec![theta.full_rect()];
    while let Some(rect) = stack.pop() {
        let (a, b) = (rect.lo()[0], rect.hi()[0]);
        if m_of(a, b) <= threshold {
            leaves.push(rect);
        } else {
            let (l, rgt) = rect.dyadic_split(0)?;
            stack.push(rgt);
            stack.push(l);
        }
    }

    let mut approx = vec![0.0f64; n];
    for rect in &leaves {
        let (a, b) = (rect.lo()[0], rect.hi()[0]);
        let piece = &vals[a - 1..b];
        if piece.len() >= r {
            let (poly, _) = poly_approx_1d(piece, r)?;
            approx[a - 1..b].copy_from_slice(&poly);
        } else {
            // Fewer points than boundary statistics: interpolate exactly.
            approx[a - 1..b].copy_from_slice(piece);
        }
    }
    let partition = Partition::new(theta.full_rect(), leaves, Family::Rdp)?;
    Ok((LatticeArray::new(vec![n], approx)?, partition))
}

/// Piece-count bound for [`piecewise_poly_approx`], the truncated series
/// `1 + sum_l min(2^(-l(r-1)) / delta, 2^l)` over the at most
/// `ceil(log2 n)` splitting rounds. For r >= 2 it is O(delta^(-1/r)).
pub fn piece_count_bound(r: usize, delta: f64, n: usize) -> f64 {
    let rounds = (n as f64).log2().ceil() as i32;
    let mut total = 1.0;
    for level in 0..=rounds {
        let by_budget = 2.0f64.powi(-level * (r as i32 - 1)) / delta;
        let by_count = 2.0f64.powi(level);
        total += by_budget.min(by_count);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::is_rdp;

    fn arr(dims: &[usize], values: &[f64]) -> LatticeArray {
        LatticeArray::new(dims.to_vec(), values.to_vec()).unwrap()
    }

    #[test]
    fn tv_definitional_cases() {
        assert_eq!(tv(&arr(&[4], &[2.0; 4])), 0.0);
        assert_eq!(tv(&arr(&[3], &[1.0, 3.0, 2.0])), 3.0);
        assert_eq!(tv(&arr(&[2, 2], &[0.0, 1.0, 0.0, 1.0])), 2.0);
    }

    #[test]
    fn tv_is_subadditive_over_partitions() {
        let vals: Vec<f64> = (0..36).map(|i| ((i * 31 % 11) as f64) * 0.4 - 1.0).collect();
        let theta = arr(&[6, 6], &vals);
        let root = theta.full_rect();
        let (l, r) = root.hierarchical_split(0, 2).unwrap();
        let (r1, r2) = r.hierarchical_split(1, 4).unwrap();
        let pieces = [l, r1, r2];
        let sum: f64 = pieces.iter().map(|p| tv_on_rect(&theta, p)).sum();
        assert!(sum <= tv(&theta) + 1e-12);
    }

    #[test]
    fn variation_profile_zero_iff_polynomial() {
        let constant = arr(&[3, 3], &[2.0; 9]);
        assert_eq!(variation_profile(&constant, 1).unwrap().value, 0.0);
        let linear: Vec<f64> = (1..=8).map(|i| 2.0 * i as f64 - 5.0).collect();
        let p = variation_profile(&arr(&[8], &linear), 2).unwrap();
        assert_eq!((p.order, p.value), (2, 0.0));
        // Nonpolynomial input has positive value.
        assert!(variation_profile(&arr(&[4], &[0.0, 1.0, 0.0, 1.0]), 2).unwrap().value > 0.0);
        // Order >= 2 is a 1D notion.
        assert!(variation_profile(&constant, 2).is_err());
    }

    #[test]
    fn higher_order_variation_cases() {
        assert_eq!(higher_order_variation(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(), 0.0);
        assert_eq!(higher_order_variation(&[0.0, 0.0, 1.0, 0.0], 1).unwrap(), 2.0);
        // D^2 of (0,0,0,1) is (0,1), scaled by n^1 = 4.
        assert_eq!(higher_order_variation(&[0.0, 0.0, 0.0, 1.0], 2).unwrap(), 4.0);
        assert!(matches!(
            higher_order_variation(&[1.0, 2.0], 2),
            Err(Error::OrderTooLarge { n: 2, r: 2 })
        ));
    }

    #[test]
    fn tv_delta_scheme_postconditions() {
        // Two column blocks, jump of 7 across the middle.
        let mut vals = vec![0.0; 16];
        for row in 0..4 {
            vals[row * 4 + 2] = 7.0;
            vals[row * 4 + 3] = 7.0;
        }
        let theta = arr(&[4, 4], &vals);
        let p = tv_delta_scheme(&theta, 1.0).unwrap();
        assert!(is_rdp(&p));
        let total = tv(&theta);
        let bound = 1.0 + (16.0f64).log2() * (1.0 + total / 1.0);
        assert!((p.len() as f64) <= bound);
        for rect in p.rects() {
            assert!(tv_on_rect(&theta, rect) <= 1.0 + 1e-12);
            assert!(rect.aspect_ratio() <= 2.0);
        }

        // Constant array or delta above the total variation: trivial.
        let flat = arr(&[4, 4], &[3.0; 16]);
        assert_eq!(tv_delta_scheme(&flat, 0.5).unwrap().len(), 1);
        assert_eq!(tv_delta_scheme(&theta, total + 1.0).unwrap().len(), 1);
        assert!(tv_delta_scheme(&theta, 0.0).is_err());
    }

    #[test]
    fn gns_inequality_cases() {
        let zero = arr(&[2, 2], &[0.0; 4]);
        let rep = gns_check(&zero).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));

        let theta = arr(&[2, 2], &[0.0, 1.0, 0.0, 1.0]);
        let rep = gns_check(&theta).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-12);
        assert!((rep.rhs - 16.0).abs() < 1e-12);
        assert!(rep.lhs <= rep.rhs);
        assert!(rep.lhs_fractional <= rep.rhs_fractional);

        assert!(gns_check(&arr(&[4], &[1.0; 4])).is_err());
    }

    #[test]
    fn gns_holds_on_pseudorandom_arrays() {
        let mut state = 0xc0ffee123u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0
        };
        for dims in [[8usize, 4], [4, 4]] {
            for _ in 0..200 {
                let n: usize = dims.iter().product();
                let theta = arr(&dims, &(0..n).map(|_| next()).collect::<Vec<_>>());
                let rep = gns_check(&theta).unwrap();
                assert!(rep.lhs <= rep.rhs + 1e-9);
                assert!(rep.lhs_fractional <= rep.rhs_fractional + 1e-9);
            }
        }
    }

    #[test]
    fn mean_bound_cases() {
        assert_eq!(mean_bound_1d(&[5.0; 7]), (0.0, 0.0));
        let (lhs, rhs) = mean_bound_1d(&[0.0, 1.0]);
        assert!((lhs - 0.5).abs() < 1e-12);
        assert!((rhs - 2.0).abs() < 1e-12);
        let mut state = 0xab12cd34u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..200 {
            let v: Vec<f64> = (0..100).map(|_| next()).collect();
            let (lhs, rhs) = mean_bound_1d(&v);
            assert!(lhs <= rhs + 1e-9);
        }
    }

    #[test]
    fn poly_approx_matches_boundary_differences() {
        // Already a polynomial: reproduced exactly.
        let quad: Vec<f64> = (1..=8).map(|i| 0.5 * (i * i) as f64 - 3.0).collect();
        let (poly, sup) = poly_approx_1d(&quad, 3).unwrap();
        assert!(sup < 1e-9);
        for (a, b) in quad.iter().zip(&poly) {
            assert!((a - b).abs() < 1e-9);
        }

        // r = 1: the constant at theta_1.
        let theta = [2.0, 5.0, -1.0];
        let (poly, sup) = poly_approx_1d(&theta, 1).unwrap();
        assert_eq!(poly, vec![2.0, 2.0, 2.0]);
        assert_eq!(sup, 3.0);

        // The worked spike example.
        let theta = [0.0, 0.0, 0.0, 1.0];
        let (poly, sup) = poly_approx_1d(&theta, 2).unwrap();
        assert_eq!(poly, vec![0.0; 4]);
        assert_eq!(sup, 1.0);
        // Residual identity: (theta - poly)_i = sum C(i-j-1, r-1) D^r_j.
        let d2 = diff_r(&theta, 2);
        for i in 1..=4usize {
            let predicted: f64 = (1..=i.saturating_sub(2))
                .map(|j| binom(i - j - 1, 1) * d2[j - 1])
                .sum();
            assert!((theta[i - 1] - poly[i - 1] - predicted).abs() < 1e-12);
        }

        assert!(poly_approx_1d(&[1.0], 2).is_err());
    }

    #[test]
    fn piecewise_approx_error_and_count_bounds() {
        // A kinked piecewise-linear signal evaluated on a grid.
        let n = 256;
        let f = |x: f64| -> f64 {
            -44.0 * (x - 0.3).max(0.0) + 48.0 * (x - 0.55).max(0.0) - 56.0 * (x - 0.8).max(0.0)
                + 0.28 * x
        };
        let vals: Vec<f64> = (1..=n).map(|i| f(i as f64 / n as f64)).collect();
        let theta = arr(&[n], &vals);
        let r = 2;
        let v_total = higher_order_variation(&vals, r).unwrap();
        for &delta in &[0.5, 0.1, 0.02] {
            let (approx, partition) = piecewise_poly_approx(&theta, r, delta).unwrap();
            assert!(is_rdp(&partition));
            let sup = vals
                .iter()
                .zip(approx.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(sup <= v_total * delta + 1e-9, "delta {delta}: sup {sup}");
            assert!((partition.len() as f64) <= piece_count_bound(r, delta, n));
        }

        // A linear sequence is one exact piece at r = 2, for any delta.
        let lin: Vec<f64> = (1..=16).map(|i| 3.0 * i as f64 + 1.0).collect();
        let (approx, partition) = piecewise_poly_approx(&arr(&[16], &lin), 2, 0.01).unwrap();
        assert_eq!(partition.len(), 1);
        for (a, b) in lin.iter().zip(approx.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
