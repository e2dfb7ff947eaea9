//! Order-fixed reductions. Sums are evaluated as a balanced binary tree over
//! the input order, so results do not depend on how the inputs were produced
//! (serially or by any number of workers).

const LEAF: usize = 32;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_by(len: usize, f: impl Fn(usize) -> f64 + Copy) -> f64 {
    fn rec(lo: usize, hi: usize, f: impl Fn(usize) -> f64 + Copy) -> f64 {
        if hi - lo <= LEAF {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, len, f)
}

/// Map over indices (in parallel when enabled) and collect in index order.
pub(crate) fn map_indexed<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
        assert_eq!(pairwise_sum_by(1000, |i| i as f64), 499500.0);
    }

    #[test]
    fn closure_and_slice_agree_bitwise() {
        let xs: Vec<f64> = (0..777).map(|i| ((i * 7919) % 101) as f64 * 0.1 - 3.3).collect();
        assert_eq!(pairwise_sum(&xs).to_bits(), pairwise_sum_by(xs.len(), |i| xs[i]).to_bits());
    }
}
