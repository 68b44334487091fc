//! k-nearest-neighbour voting over a precomputed distance matrix.

use crate::data::Label;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub(crate) fn check_k(k: usize, n_train: usize) -> Result<()> {
    if k == 0 || k % 2 == 0 {
        return Err(Error::invalid(format!(
            "k must be odd and positive, got {k}"
        )));
    }
    if k > n_train {
        return Err(Error::invalid(format!(
            "k = {k} exceeds {n_train} training samples"
        )));
    }
    Ok(())
}

/// Majority label among the `k` closest columns of each row. Equal distances
/// are ordered by column index; a split vote goes to the label whose nearest
/// member comes first.
pub fn knn_predict(distances: &Matrix, train_labels: &[Label], k: usize) -> Result<Vec<Label>> {
    if distances.cols() != train_labels.len() {
        return Err(Error::invalid(format!(
            "{} distance columns but {} training labels",
            distances.cols(),
            train_labels.len()
        )));
    }
    check_k(k, train_labels.len())?;

    let mut order: Vec<usize> = Vec::with_capacity(distances.cols());
    let mut out = Vec::with_capacity(distances.rows());
    for i in 0..distances.rows() {
        let row = distances.row(i);
        order.clear();
        order.extend(0..row.len());
        let closer = |a: &usize, b: &usize| row[*a].total_cmp(&row[*b]).then(a.cmp(b));
        if k < order.len() {
            order.select_nth_unstable_by(k - 1, closer);
        }
        let nearest = &mut order[..k];
        nearest.sort_unstable_by(closer);

        let mut votes = [0usize; 256];
        for &j in nearest.iter() {
            votes[train_labels[j] as usize] += 1;
        }
        let top = *votes.iter().max().expect("non-empty");
        let winner = nearest
            .iter()
            .map(|&j| train_labels[j])
            .find(|&l| votes[l as usize] == top)
            .expect("some label has the top count");
        out.push(winner);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_training_sample() {
        let d = Matrix::from_rows(&[vec![0.3], vec![9.0]]).unwrap();
        assert_eq!(knn_predict(&d, &[1], 1).unwrap(), vec![1, 1]);
    }

    #[test]
    fn rejects_bad_k() {
        let d = Matrix::zeros(1, 3);
        assert!(knn_predict(&d, &[0, 1, 0], 2).is_err());
        assert!(knn_predict(&d, &[0, 1, 0], 5).is_err());
        assert!(knn_predict(&d, &[0, 1, 0], 0).is_err());
        assert!(knn_predict(&d, &[0, 1], 1).is_err());
    }

    #[test]
    fn ties_go_to_lower_index() {
        let d = Matrix::from_rows(&[vec![0.5, 0.5, 0.5]]).unwrap();
        assert_eq!(knn_predict(&d, &[1, 0, 0], 1).unwrap(), vec![1]);
        assert_eq!(knn_predict(&d, &[0, 1, 1], 1).unwrap(), vec![0]);
        assert_eq!(knn_predict(&d, &[0, 1, 1], 3).unwrap(), vec![1]);
    }

    #[test]
    fn zero_distance_row_takes_its_twin_label() {
        let d = Matrix::from_rows(&[vec![0.4, 0.0, 0.9]]).unwrap();
        assert_eq!(knn_predict(&d, &[0, 1, 0], 1).unwrap(), vec![1]);
    }
}
