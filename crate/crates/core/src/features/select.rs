//! Mutual-information feature ranking and z-score standardization.

use crate::error::{Error, Result};

/// Number of quantile bins used to discretize each feature.
pub const MI_BINS: usize = 10;

/// Assigns each value to one of `bins` quantile bins.
///
/// Cut points are the values at sorted positions `floor(j * n / bins)` for
/// `j = 1..bins`; a value's bin is the number of cut points it reaches.
/// A constant column lands in a single bin.
pub fn quantile_bins(col: &[f64], bins: usize) -> Vec<usize> {
    let n = col.len();
    let mut sorted = col.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cuts: Vec<f64> = (1..bins).map(|j| sorted[(j * n / bins).min(n - 1)]).collect();
    col.iter().map(|&v| cuts.iter().filter(|&&c| v >= c).count()).collect()
}

/// Discrete mutual information (nats) between bin ids and binary labels.
pub fn discrete_mi(bins: &[usize], y: &[u8]) -> f64 {
    let n = bins.len() as f64;
    let nb = bins.iter().copied().max().map_or(0, |m| m + 1);
    let mut joint = vec![[0usize; 2]; nb];
    let mut py = [0usize; 2];
    for (&b, &l) in bins.iter().zip(y) {
        joint[b][l as usize] += 1;
        py[l as usize] += 1;
    }
    let mut mi = 0.0;
    for row in &joint {
        let pb = (row[0] + row[1]) as f64 / n;
        for l in 0..2 {
            if row[l] == 0 {
                continue;
            }
            let pj = row[l] as f64 / n;
            mi += pj * (pj / (pb * (py[l] as f64 / n))).ln();
        }
    }
    // Independent columns can come out a hair below zero.
    mi.max(0.0)
}

/// Estimated mutual information between every column of `x` and `y`.
pub fn mutual_information(x: &[Vec<f64>], y: &[u8]) -> Result<Vec<f64>> {
    validate(x, y)?;
    let d = x[0].len();
    Ok((0..d)
        .map(|j| {
            let col: Vec<f64> = x.iter().map(|row| row[j]).collect();
            discrete_mi(&quantile_bins(&col, MI_BINS), y)
        })
        .collect())
}

fn validate(x: &[Vec<f64>], y: &[u8]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::EmptyTrainingSet);
    }
    if y.iter().any(|&l| l > 1) {
        return Err(Error::InvalidArgument("labels must be 0 or 1".into()));
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(Error::SingleClassLabels);
    }
    let d = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != d) {
        return Err(Error::DimMismatch { expected: d, got: row.len() });
    }
    Ok(())
}

/// Indices of the `k` columns with the highest mutual information with `y`,
/// best first; ties go to the lower index.
pub fn select_features(x: &[Vec<f64>], y: &[u8], k: usize) -> Result<Vec<usize>> {
    validate(x, y)?;
    let d = x[0].len();
    if k > d {
        return Err(Error::KTooLarge { k, available: d });
    }
    let mi = mutual_information(x, y)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| mi[b].total_cmp(&mi[a]).then(a.cmp(&b)));
    order.truncate(k);
    Ok(order)
}

/// Columns whose standard deviation falls below this get sigma = 1.
pub const MIN_SIGMA: f64 = 1e-12;

/// Column means and population standard deviations.
pub fn fit_standardizer(x: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() < 2 {
        return Err(Error::EmptyTrainingSet);
    }
    let d = x[0].len();
    let n = x.len() as f64;
    let mut mu = vec![0.0; d];
    for row in x {
        if row.len() != d {
            return Err(Error::DimMismatch { expected: d, got: row.len() });
        }
        for (m, v) in mu.iter_mut().zip(row) {
            *m += v;
        }
    }
    mu.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for row in x {
        for ((s, v), m) in var.iter_mut().zip(row).zip(&mu) {
            *s += (v - m) * (v - m);
        }
    }
    let sigma = var
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd < MIN_SIGMA {
                1.0
            } else {
                sd
            }
        })
        .collect();
    Ok((mu, sigma))
}

/// `(x - mu) / sigma`, elementwise.
pub fn standardize(x: &[f64], mu: &[f64], sigma: &[f64]) -> Result<Vec<f64>> {
    if x.len() != mu.len() || mu.len() != sigma.len() {
        return Err(Error::DimMismatch { expected: mu.len(), got: x.len() });
    }
    Ok(x.iter().zip(mu).zip(sigma).map(|((v, m), s)| (v - m) / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(n: usize) -> Vec<u8> {
        (0..n).map(|i| (i % 2) as u8).collect()
    }

    #[test]
    fn label_copy_beats_constant() {
        let y = labels(20);
        let x: Vec<Vec<f64>> = y.iter().map(|&l| vec![5.0, l as f64]).collect();
        let mi = mutual_information(&x, &y).unwrap();
        assert_eq!(mi[0], 0.0);
        assert!(mi[1] > 0.0);
        assert_eq!(select_features(&x, &y, 1).unwrap(), vec![1]);
    }

    #[test]
    fn errors() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(select_features(&x, &[1, 1], 1), Err(Error::SingleClassLabels)));
        assert!(matches!(select_features(&x, &[0, 1], 2), Err(Error::KTooLarge { .. })));
        assert!(matches!(fit_standardizer(&x[..1]), Err(Error::EmptyTrainingSet)));
    }

    #[test]
    fn standardize_arithmetic() {
        assert_eq!(standardize(&[2.0, 4.0], &[1.0, 2.0], &[1.0, 2.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn constant_column_sigma_clamped() {
        let x = vec![vec![3.0, 1.0], vec![3.0, 2.0], vec![3.0, 3.0]];
        let (mu, sigma) = fit_standardizer(&x).unwrap();
        assert_eq!(sigma[0], 1.0);
        for row in &x {
            assert_eq!(standardize(row, &mu, &sigma).unwrap()[0], 0.0);
        }
    }

    proptest! {
        #[test]
        fn selection_is_k_distinct(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 4..30),
            k in 0usize..=6,
        ) {
            let y = labels(rows.len());
            let sel = select_features(&rows, &y, k).unwrap();
            prop_assert_eq!(sel.len(), k);
            let mut s = sel.clone();
            s.sort();
            s.dedup();
            prop_assert_eq!(s.len(), k);
        }

        #[test]
        fn dropping_a_column_keeps_relative_order(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 4..30),
            drop in 0usize..6,
        ) {
            let y = labels(rows.len());
            let full = select_features(&rows, &y, 6).unwrap();
            let reduced: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, v)| *v).collect())
                .collect();
            let sub = select_features(&reduced, &y, 5).unwrap();
            let remapped: Vec<usize> = sub.into_iter().map(|j| if j >= drop { j + 1 } else { j }).collect();
            let expected: Vec<usize> = full.into_iter().filter(|&j| j != drop).collect();
            prop_assert_eq!(remapped, expected);
        }

        #[test]
        fn standardization_inverts(
            rows in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 4), 2..20),
        ) {
            let (mu, sigma) = fit_standardizer(&rows).unwrap();
            for row in &rows {
                let z = standardize(row, &mu, &sigma).unwrap();
                for j in 0..row.len() {
                    let back = z[j] * sigma[j] + mu[j];
                    prop_assert!((back - row[j]).abs() <= 1e-12 * (1.0 + row[j].abs()));
                }
            }
        }
    }
}
