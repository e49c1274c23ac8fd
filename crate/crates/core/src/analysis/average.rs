use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::google::{order_by_probability, PageRankConfig, PageRankVector};
use crate::reduced::{ReduceDiagnostics, ReducedMatrixSet};

/// Equal-weight mean of every component. Inputs must share subset order
/// and damping.
pub fn average_reduced(rsets: &[ReducedMatrixSet]) -> Result<ReducedMatrixSet> {
    let first = rsets
        .first()
        .ok_or_else(|| Error::InvalidArgument("nothing to average".into()))?;
    for (i, r) in rsets.iter().enumerate().skip(1) {
        if r.names != first.names {
            return Err(Error::Mismatch(format!(
                "set {i} ({}) has a different subset order than set 0 ({})",
                r.edition_tag, first.edition_tag
            )));
        }
        if r.alpha != first.alpha {
            return Err(Error::Mismatch(format!(
                "set {i} uses alpha {} but set 0 uses {}",
                r.alpha, first.alpha
            )));
        }
    }
    let count = rsets.len() as f64;
    let mean = |pick: fn(&ReducedMatrixSet) -> &DMatrix<f64>| -> DMatrix<f64> {
        let mut acc = pick(first).clone();
        for r in &rsets[1..] {
            acc += pick(r);
        }
        acc / count
    };
    let lambda_c = rsets
        .iter()
        .map(|r| r.lambda_c)
        .sum::<Option<f64>>()
        .map(|s| s / count);
    let original_ids = if rsets.iter().all(|r| r.original_ids == first.original_ids) {
        first.original_ids.clone()
    } else {
        None
    };
    Ok(ReducedMatrixSet {
        names: first.names.clone(),
        original_ids,
        gr: mean(|r| &r.gr),
        grr: mean(|r| &r.grr),
        gpr: mean(|r| &r.gpr),
        gqrd: mean(|r| &r.gqrd),
        gqrnd: mean(|r| &r.gqrnd),
        lambda_c,
        alpha: first.alpha,
        edition_tag: "average".into(),
        config: first.config,
        diagnostics: ReduceDiagnostics::default(),
    })
}

/// Leading eigenvector of a column-stochastic dense matrix by power
/// iteration from the uniform vector, without extra damping.
pub fn stationary(matrix: &DMatrix<f64>, cfg: &PageRankConfig) -> Result<PageRankVector> {
    let n = matrix.nrows();
    if n == 0 || matrix.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "expected a non-empty square matrix, got {:?}",
            matrix.shape()
        )));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let mut v = nalgebra::DVector::from_element(n, 1.0 / n as f64);
    let mut history = Vec::new();
    for it in 1..=cfg.max_iter {
        let mut w = matrix * &v;
        let mass = w.sum();
        w /= mass;
        let residual = (&w - &v).lp_norm(1);
        history.push(residual);
        v = w;
        if residual <= cfg.tol {
            let probabilities: Vec<f64> = v.iter().copied().collect();
            return Ok(PageRankVector {
                k_index: order_by_probability(&probabilities),
                probabilities,
                residual,
                iterations: it,
                residual_history: history,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "reduced pagerank",
        iterations: cfg.max_iter,
        residual: history.last().copied().unwrap_or(f64::INFINITY),
    })
}

pub fn pagerank_of_reduced(rset: &ReducedMatrixSet, cfg: &PageRankConfig) -> Result<PageRankVector> {
    stationary(&rset.gr, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::ReduceConfig;

    fn set(tag: &str, gr: DMatrix<f64>) -> ReducedMatrixSet {
        let n = gr.nrows();
        ReducedMatrixSet {
            names: (0..n).map(|i| format!("n{i}")).collect(),
            original_ids: None,
            grr: gr.clone() * 0.5,
            gpr: gr.clone() * 0.5,
            gr,
            gqrd: DMatrix::zeros(n, n),
            gqrnd: DMatrix::zeros(n, n),
            lambda_c: Some(0.9),
            alpha: 0.85,
            edition_tag: tag.into(),
            config: ReduceConfig::default(),
            diagnostics: ReduceDiagnostics::default(),
        }
    }

    fn stochastic(seed: f64) -> DMatrix<f64> {
        let m = DMatrix::from_fn(3, 3, |i, j| 1.0 + ((i * 7 + j * 3) as f64 * seed).sin().abs());
        let sums = m.row_sum();
        DMatrix::from_fn(3, 3, |i, j| m[(i, j)] / sums[j])
    }

    #[test]
    fn single_and_self_average() {
        let a = set("a", stochastic(0.3));
        let one = average_reduced(std::slice::from_ref(&a)).unwrap();
        assert_eq!(one.gr, a.gr);
        assert_eq!(one.edition_tag, "average");
        let two = average_reduced(&[a.clone(), a.clone()]).unwrap();
        assert!((two.gr.clone() - &a.gr).amax() < 1e-16);
        assert_eq!(two.lambda_c, Some(0.9));
    }

    #[test]
    fn average_stays_stochastic() {
        let sets: Vec<_> = (1..=7).map(|k| set("e", stochastic(k as f64 * 0.37))).collect();
        let avg = average_reduced(&sets).unwrap();
        for j in 0..3 {
            assert!((avg.gr.column(j).sum() - 1.0).abs() < 1e-10);
        }
        assert!(avg.check_invariants().is_empty(), "{:?}", avg.check_invariants());
    }

    #[test]
    fn mismatched_order_rejected() {
        let a = set("a", stochastic(0.3));
        let mut b = set("b", stochastic(0.5));
        b.names.swap(0, 1);
        assert!(matches!(average_reduced(&[a.clone(), b]), Err(Error::Mismatch(_))));
        let mut c = set("c", stochastic(0.5));
        c.alpha = 0.5;
        assert!(matches!(average_reduced(&[a, c]), Err(Error::Mismatch(_))));
        assert!(average_reduced(&[]).is_err());
    }

    #[test]
    fn stationary_of_trivial_and_two_state() {
        let one = stationary(&DMatrix::from_element(1, 1, 1.0), &PageRankConfig::default()).unwrap();
        assert_eq!(one.probabilities, vec![1.0]);

        let (a, b) = (0.3, 0.6);
        let m = DMatrix::from_row_slice(2, 2, &[1.0 - a, b, a, 1.0 - b]);
        let p = stationary(&m, &PageRankConfig::default()).unwrap();
        assert!((p.probabilities[0] - b / (a + b)).abs() < 1e-12);
        assert!((p.probabilities[1] - a / (a + b)).abs() < 1e-12);
        assert_eq!(p.k_index, vec![0, 1]);
    }
}
