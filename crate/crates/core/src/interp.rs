// SPDX-License-Identifier: Apache-2.0

//! Grid helpers shared by the curve and network types.

/// Position of `x` on a strictly increasing grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Locate {
    /// `x` equals `grid[i]`.
    Exact(usize),
    /// `grid[i] < x < grid[i + 1]`, with the fractional position `t` in (0, 1).
    Between(usize, f64),
    OutOfRange,
}

pub(crate) fn locate(grid: &[f64], x: f64) -> Locate {
    if grid.is_empty() || !x.is_finite() || x < grid[0] || x > grid[grid.len() - 1] {
        return Locate::OutOfRange;
    }
    match grid.binary_search_by(|g| g.partial_cmp(&x).expect("finite grid")) {
        Ok(i) => Locate::Exact(i),
        Err(i) => {
            let lo = i - 1;
            let t = (x - grid[lo]) / (grid[i] - grid[lo]);
            Locate::Between(lo, t)
        }
    }
}

/// Linear interpolation of `ys` sampled on `grid`. `None` outside the grid.
pub(crate) fn interp_linear(grid: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    match locate(grid, x) {
        Locate::Exact(i) => Some(ys[i]),
        Locate::Between(i, t) => Some(ys[i] + t * (ys[i + 1] - ys[i])),
        Locate::OutOfRange => None,
    }
}

pub(crate) fn strictly_increasing(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[0] < w[1])
}

/// Union of all grid points lying inside the intersection of the grids'
/// ranges. Returns an empty vector when the ranges do not overlap.
pub(crate) fn common_grid(grids: &[&[f64]]) -> Vec<f64> {
    if grids.iter().any(|g| g.is_empty()) {
        return Vec::new();
    }
    let lo = grids.iter().map(|g| g[0]).fold(f64::NEG_INFINITY, f64::max);
    let hi = grids
        .iter()
        .map(|g| g[g.len() - 1])
        .fold(f64::INFINITY, f64::min);
    if lo > hi {
        return Vec::new();
    }
    let mut out: Vec<f64> = grids
        .iter()
        .flat_map(|g| g.iter().copied())
        .filter(|&f| f >= lo && f <= hi)
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_cases() {
        let g = [1.0, 2.0, 4.0];
        assert_eq!(locate(&g, 2.0), Locate::Exact(1));
        assert_eq!(locate(&g, 3.0), Locate::Between(1, 0.5));
        assert_eq!(locate(&g, 0.5), Locate::OutOfRange);
        assert_eq!(locate(&g, 4.5), Locate::OutOfRange);
        assert_eq!(locate(&g, f64::NAN), Locate::OutOfRange);
    }

    #[test]
    fn common_grid_intersects_and_merges() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [1.5, 2.0, 2.5, 5.0];
        assert_eq!(common_grid(&[&a, &b]), vec![1.5, 2.0, 2.5, 3.0, 4.0]);
        assert!(common_grid(&[&[1.0, 2.0], &[3.0, 4.0]]).is_empty());
        assert_eq!(common_grid(&[&a, &a]), a.to_vec());
    }
}
