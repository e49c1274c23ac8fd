//! Reduced Google matrix of a node subset and its decomposition.
//!
//! Nodes are split into the subset `r` and its complement `s`, giving blocks
//! `G_rr, G_rs, G_sr, G_ss` (column = source). The reduced matrix is
//!
//! ```text
//! GR = G_rr + G_rs (1 − G_ss)⁻¹ G_sr
//! ```
//!
//! With `λc, ψR, ψL` the leading eigen-triple of `G_ss`, the projector
//! `P_c = ψR ψLᵀ / (ψLᵀ ψR)` and `Q_c = 1 − P_c` split the inverse into the
//! near-singular part and a convergent series:
//!
//! ```text
//! Gpr = G_rs P_c G_sr / (1 − λc)
//! Gqr = G_rs Q_c [Σ_l (Q_c G_ss Q_c)^l] Q_c G_sr
//! ```
//!
//! `Gqr` is further split into its diagonal `Gqrd` and off-diagonal `Gqrnd`.
//! All block applications go through the implicit [`GoogleOperator`] on
//! full-length vectors that are zero on the subset, so nothing of size
//! `Ns × Ns` is ever allocated.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::google::{Execution, GoogleOperator};
use crate::graph::{DirectedGraph, NodeId, NodeSubset};

/// Largest network `dense_oracle_reduce` will materialize.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReduceConfig {
    pub eigen_tol: f64,
    pub eigen_max_iter: usize,
    pub series_tol: f64,
    pub series_max_iter: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig {
            eigen_tol: 1e-12,
            eigen_max_iter: 10_000,
            series_tol: 1e-12,
            series_max_iter: 10_000,
        }
    }
}

impl ReduceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eigen_tol > 0.0 && self.series_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ReduceDiagnostics {
    pub eigen_iterations: usize,
    pub eigen_residual: f64,
    /// Longest series over all subset columns.
    pub max_series_terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    #[serde(rename = "GR")]
    Gr,
    #[serde(rename = "Grr")]
    Grr,
    #[serde(rename = "Gpr")]
    Gpr,
    #[serde(rename = "Gqr")]
    Gqr,
    #[serde(rename = "Gqrd")]
    Gqrd,
    #[serde(rename = "Gqrnd")]
    Gqrnd,
    #[serde(rename = "Grr+Gqrnd")]
    GrrPlusGqrnd,
}

impl std::str::FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "GR" => Component::Gr,
            "Grr" => Component::Grr,
            "Gpr" => Component::Gpr,
            "Gqr" => Component::Gqr,
            "Gqrd" => Component::Gqrd,
            "Gqrnd" => Component::Gqrnd,
            "Grr+Gqrnd" => Component::GrrPlusGqrnd,
            _ => return Err(Error::InvalidArgument(format!("unknown component {s:?}"))),
        })
    }
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Component::Gr => "GR",
            Component::Grr => "Grr",
            Component::Gpr => "Gpr",
            Component::Gqr => "Gqr",
            Component::Gqrd => "Gqrd",
            Component::Gqrnd => "Gqrnd",
            Component::GrrPlusGqrnd => "Grr+Gqrnd",
        })
    }
}

/// The reduced matrix and its components, all `Nr × Nr` with
/// row = destination and column = source.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedMatrixSet {
    pub names: Vec<String>,
    /// Original ids of the subset nodes, when known.
    pub original_ids: Option<Vec<u64>>,
    pub gr: DMatrix<f64>,
    pub grr: DMatrix<f64>,
    pub gpr: DMatrix<f64>,
    pub gqrd: DMatrix<f64>,
    pub gqrnd: DMatrix<f64>,
    /// Leading eigenvalue of `G_ss`; `None` when the complement is empty.
    pub lambda_c: Option<f64>,
    pub alpha: f64,
    pub edition_tag: String,
    pub config: ReduceConfig,
    pub diagnostics: ReduceDiagnostics,
}

impl ReducedMatrixSet {
    pub fn nr(&self) -> usize {
        self.names.len()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn position_or_err(&self, name: &str) -> Result<usize> {
        self.position(name)
            .ok_or_else(|| Error::Unresolved(vec![name.to_string()]))
    }

    pub fn gqr(&self) -> DMatrix<f64> {
        &self.gqrd + &self.gqrnd
    }

    pub fn component(&self, which: Component) -> DMatrix<f64> {
        match which {
            Component::Gr => self.gr.clone(),
            Component::Grr => self.grr.clone(),
            Component::Gpr => self.gpr.clone(),
            Component::Gqr => self.gqr(),
            Component::Gqrd => self.gqrd.clone(),
            Component::Gqrnd => self.gqrnd.clone(),
            Component::GrrPlusGqrnd => &self.grr + &self.gqrnd,
        }
    }

    /// Lists every violated structural invariant.
    pub fn check_invariants(&self) -> Vec<String> {
        let nr = self.nr();
        let mut bad = Vec::new();
        for (name, m) in [
            ("GR", &self.gr),
            ("Grr", &self.grr),
            ("Gpr", &self.gpr),
            ("Gqrd", &self.gqrd),
            ("Gqrnd", &self.gqrnd),
        ] {
            if m.shape() != (nr, nr) {
                bad.push(format!("{name} has shape {:?}, expected ({nr}, {nr})", m.shape()));
                return bad;
            }
        }
        for j in 0..nr {
            let sum: f64 = self.gr.column(j).sum();
            if (sum - 1.0).abs() > 1e-8 {
                bad.push(format!("GR column {j} sums to {sum}"));
            }
        }
        let closure = &self.grr + &self.gpr + &self.gqrd + &self.gqrnd - &self.gr;
        let worst = closure.amax();
        if worst > 1e-10 {
            bad.push(format!("decomposition misses GR by {worst:e}"));
        }
        for i in 0..nr {
            for j in 0..nr {
                if i != j && self.gqrd[(i, j)] != 0.0 {
                    bad.push(format!("Gqrd({i},{j}) off-diagonal is nonzero"));
                }
                if i == j && self.gqrnd[(i, j)] != 0.0 {
                    bad.push(format!("Gqrnd({i},{i}) diagonal is nonzero"));
                }
            }
        }
        for (name, m) in [("GR", &self.gr), ("Grr", &self.grr), ("Gpr", &self.gpr)] {
            let min = m.min();
            if min < 0.0 {
                bad.push(format!("{name} has negative entry {min:e}"));
            }
        }
        if let Some(l) = self.lambda_c {
            if !(l > 0.0 && l < 1.0) {
                bad.push(format!("lambda_c = {l} outside (0,1)"));
            }
        }
        bad
    }

    /// Conditions worth reporting that are not structural violations:
    /// `Gqr` entries below `-1e-8`. These are legitimate when `λc` is far
    /// from 1 and the projector does not dominate.
    pub fn flags(&self) -> Vec<String> {
        let gqr = self.gqr();
        let negative = gqr.iter().filter(|&&x| x < -1e-8).count();
        if negative == 0 {
            return Vec::new();
        }
        vec![format!(
            "Gqr has {negative} entries below -1e-8 (min {:e})",
            gqr.min()
        )]
    }
}

/// Leading eigen-triple of the complement block `G_ss`. Vectors are listed
/// in complement order (ascending node id) and L1-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementEigen {
    pub lambda: f64,
    pub complement: Vec<NodeId>,
    pub psi_right: Vec<f64>,
    pub psi_left: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

struct Split {
    in_subset: Vec<bool>,
    complement: Vec<NodeId>,
}

impl Split {
    fn new(n: usize, subset: &NodeSubset) -> Self {
        let mut in_subset = vec![false; n];
        for &i in subset.indices() {
            in_subset[i as usize] = true;
        }
        let complement = (0..n as NodeId).filter(|&i| !in_subset[i as usize]).collect();
        Split {
            in_subset,
            complement,
        }
    }

    fn zero_subset(&self, v: &mut [f64]) {
        for (x, &r) in v.iter_mut().zip(&self.in_subset) {
            if r {
                *x = 0.0;
            }
        }
    }
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Power iteration restricted to the complement. Works on full-length
/// vectors that stay zero on the subset.
fn complement_power(
    op: &GoogleOperator<'_>,
    split: &Split,
    transpose: bool,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Vec<f64>, usize, f64)> {
    let n = op.n();
    let ns = split.complement.len();
    let mut x = vec![1.0 / ns as f64; n];
    split.zero_subset(&mut x);
    let mut y = vec![0.0; n];
    let exec = op.execution();
    let mut residual = f64::INFINITY;

    for it in 1..=max_iter {
        if transpose {
            op.apply_transpose_unchecked(&x, &mut y, exec);
        } else {
            op.apply_unchecked(&x, &mut y, exec);
        }
        split.zero_subset(&mut y);
        // x ≥ 0 and G_ss > 0 elementwise, so the L1 norm is the plain sum.
        let lambda: f64 = y.iter().sum();
        residual = x.iter().zip(&y).map(|(a, b)| (b - lambda * a).abs()).sum();
        y.iter_mut().for_each(|v| *v /= lambda);
        std::mem::swap(&mut x, &mut y);
        if residual <= tol {
            return Ok((lambda, x, it, residual));
        }
    }
    Err(Error::NonConvergence {
        what: if transpose {
            "complement left eigenvector"
        } else {
            "complement right eigenvector"
        },
        iterations: max_iter,
        residual,
    })
}

pub fn complement_leading_eigen(
    op: &GoogleOperator<'_>,
    subset: &NodeSubset,
    tol: f64,
    max_iter: usize,
) -> Result<ComplementEigen> {
    let split = Split::new(op.n(), subset);
    let (full, _) = leading_eigen_full(op, &split, tol, max_iter)?;
    Ok(full)
}

/// Right and left eigenvectors at full length `N`, zero on the subset.
type FullVectors = (Vec<f64>, Vec<f64>);

fn leading_eigen_full(
    op: &GoogleOperator<'_>,
    split: &Split,
    tol: f64,
    max_iter: usize,
) -> Result<(ComplementEigen, FullVectors)> {
    if split.complement.is_empty() {
        return Err(Error::InvalidArgument("complement is empty".into()));
    }
    let (lambda, right, it_r, res_r) = complement_power(op, split, false, tol, max_iter)?;
    let (_, left, it_l, res_l) = complement_power(op, split, true, tol, max_iter)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "complement eigenvalue {lambda} outside (0,1)"
        )));
    }
    let gather = |v: &[f64]| split.complement.iter().map(|&j| v[j as usize]).collect();
    let eig = ComplementEigen {
        lambda,
        complement: split.complement.clone(),
        psi_right: gather(&right),
        psi_left: gather(&left),
        iterations: it_r.max(it_l),
        residual: res_r.max(res_l),
    };
    Ok((eig, (right, left)))
}

fn trivial_reduction(op: &GoogleOperator<'_>, subset: &NodeSubset) -> DMatrix<f64> {
    let nr = subset.len();
    let idx = subset.indices();
    DMatrix::from_fn(nr, nr, |i, j| op.entry(idx[i], idx[j]))
}

/// Computes the reduced matrix set by the projector split on the implicit
/// operator.
pub fn reduce(
    op: &GoogleOperator<'_>,
    subset: &NodeSubset,
    cfg: &ReduceConfig,
) -> Result<ReducedMatrixSet> {
    cfg.validate()?;
    let n = op.n();
    let nr = subset.len();
    let graph = op.graph();
    let grr = trivial_reduction(op, subset);

    let mut out = ReducedMatrixSet {
        names: subset.names().to_vec(),
        original_ids: Some(subset.indices().iter().map(|&i| graph.external_id(i)).collect()),
        gr: grr.clone(),
        grr,
        gpr: DMatrix::zeros(nr, nr),
        gqrd: DMatrix::zeros(nr, nr),
        gqrnd: DMatrix::zeros(nr, nr),
        lambda_c: None,
        alpha: op.alpha(),
        edition_tag: String::new(),
        config: *cfg,
        diagnostics: ReduceDiagnostics::default(),
    };
    if nr == n {
        return Ok(out);
    }

    let split = Split::new(n, subset);
    let (eig, (psi_r, psi_l)) = leading_eigen_full(op, &split, cfg.eigen_tol, cfg.eigen_max_iter)?;
    let lambda = eig.lambda;
    let norm = dot(&psi_l, &psi_r);
    let project_out = |v: &mut [f64]| {
        let c = dot(&psi_l, v) / norm;
        for (x, p) in v.iter_mut().zip(&psi_r) {
            *x -= c * p;
        }
    };

    let idx = subset.indices();
    let gather_r = |v: &[f64]| -> Vec<f64> { idx.iter().map(|&i| v[i as usize]).collect() };
    let rs_psi = gather_r(&op.apply(&psi_r)?);

    let column = |k: usize| -> Result<(Vec<f64>, Vec<f64>, usize)> {
        let exec = Execution::SEQUENTIAL;
        let mut e = vec![0.0; n];
        e[idx[k] as usize] = 1.0;
        let mut v = vec![0.0; n];
        op.apply_unchecked(&e, &mut v, exec);
        split.zero_subset(&mut v);

        // Projector part: G_rs ψR · (ψLᵀ G_sr e_k) / (ψLᵀψR) / (1 − λ).
        let coef = dot(&psi_l, &v) / norm / (1.0 - lambda);
        let gpr_col: Vec<f64> = rs_psi.iter().map(|h| h * coef).collect();

        project_out(&mut v);
        let mut acc = v.clone();
        let mut next = e;
        let mut terms = 1;
        while l1(&v) >= cfg.series_tol {
            if terms >= cfg.series_max_iter {
                return Err(Error::NonConvergence {
                    what: "hidden-path series",
                    iterations: terms,
                    residual: l1(&v),
                });
            }
            op.apply_unchecked(&v, &mut next, exec);
            split.zero_subset(&mut next);
            project_out(&mut next);
            std::mem::swap(&mut v, &mut next);
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += x;
            }
            terms += 1;
        }
        op.apply_unchecked(&acc, &mut next, exec);
        Ok((gpr_col, gather_r(&next), terms))
    };

    let columns: Vec<(Vec<f64>, Vec<f64>, usize)> = if op.execution().parallel {
        (0..nr).into_par_iter().map(column).collect::<Result<_>>()?
    } else {
        (0..nr).map(column).collect::<Result<_>>()?
    };

    let mut max_terms = 0;
    for (k, (gpr_col, gqr_col, terms)) in columns.into_iter().enumerate() {
        max_terms = max_terms.max(terms);
        for i in 0..nr {
            out.gpr[(i, k)] = gpr_col[i];
            if i == k {
                out.gqrd[(i, k)] = gqr_col[i];
            } else {
                out.gqrnd[(i, k)] = gqr_col[i];
            }
        }
    }
    out.gr = &out.grr + &out.gpr + &out.gqrd + &out.gqrnd;
    out.lambda_c = Some(lambda);
    out.diagnostics = ReduceDiagnostics {
        eigen_iterations: eig.iterations,
        eigen_residual: eig.residual,
        max_series_terms: max_terms,
    };
    Ok(out)
}

/// Dense Google matrix built directly from adjacency.
pub fn dense_google(graph: &DirectedGraph, alpha: f64) -> Result<DMatrix<f64>> {
    let n = graph.n_nodes();
    if n > DENSE_LIMIT {
        return Err(Error::TooLargeForDense(n, DENSE_LIMIT));
    }
    let nf = n as f64;
    let teleport = (1.0 - alpha) / nf;
    let mut g = DMatrix::from_element(n, n, teleport);
    for j in 0..n {
        let links = graph.out_links(j as NodeId);
        if links.is_empty() {
            g.column_mut(j).fill(alpha / nf + teleport);
        } else {
            let w = alpha * (1.0 / links.len() as f64) + teleport;
            for &i in links {
                g[(i as usize, j)] = w;
            }
        }
    }
    Ok(g)
}

/// Reference reduction with dense linear algebra: `GR` by a direct solve,
/// the split by an explicit spectral projector. For verification only.
pub fn dense_oracle_reduce(
    graph: &DirectedGraph,
    subset: &NodeSubset,
    alpha: f64,
) -> Result<ReducedMatrixSet> {
    let g = dense_google(graph, alpha)?;
    let n = graph.n_nodes();
    let nr = subset.len();
    let r: Vec<usize> = subset.indices().iter().map(|&i| i as usize).collect();
    let mut in_r = vec![false; n];
    r.iter().for_each(|&i| in_r[i] = true);
    let s: Vec<usize> = (0..n).filter(|&i| !in_r[i]).collect();
    let block = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |a, b| g[(rows[a], cols[b])])
    };
    let grr = block(&r, &r);

    let mut out = ReducedMatrixSet {
        names: subset.names().to_vec(),
        original_ids: Some(r.iter().map(|&i| graph.external_id(i as NodeId)).collect()),
        gr: grr.clone(),
        grr,
        gpr: DMatrix::zeros(nr, nr),
        gqrd: DMatrix::zeros(nr, nr),
        gqrnd: DMatrix::zeros(nr, nr),
        lambda_c: None,
        alpha,
        edition_tag: "dense-oracle".into(),
        config: ReduceConfig::default(),
        diagnostics: ReduceDiagnostics::default(),
    };
    if s.is_empty() {
        return Ok(out);
    }

    let grs = block(&r, &s);
    let gsr = block(&s, &r);
    let gss = block(&s, &s);
    let ns = s.len();
    let eye = DMatrix::<f64>::identity(ns, ns);

    let resolvent_gsr = (&eye - &gss)
        .lu()
        .solve(&gsr)
        .ok_or_else(|| Error::InvalidArgument("1 - G_ss is singular".into()))?;
    out.gr = &out.grr + &grs * resolvent_gsr;

    let (lambda, psi_r, psi_l) = dense_leading_eigen(&gss)?;
    let p = &psi_r * psi_l.transpose() / psi_l.dot(&psi_r);
    let q = &eye - &p;
    out.gpr = &grs * &p * &gsr / (1.0 - lambda);
    let qgq = &q * &gss * &q;
    let series = (&eye - qgq)
        .lu()
        .solve(&(&q * &gsr))
        .ok_or_else(|| Error::InvalidArgument("1 - Q G_ss Q is singular".into()))?;
    let gqr = &grs * &q * series;
    for i in 0..nr {
        for j in 0..nr {
            if i == j {
                out.gqrd[(i, j)] = gqr[(i, j)];
            } else {
                out.gqrnd[(i, j)] = gqr[(i, j)];
            }
        }
    }
    out.lambda_c = Some(lambda);
    Ok(out)
}

/// Perron root from the Schur eigenvalues; eigenvectors as the singular
/// vectors of `G_ss − λ` with the smallest singular value.
pub fn dense_leading_eigen(gss: &DMatrix<f64>) -> Result<(f64, DVector<f64>, DVector<f64>)> {
    let ns = gss.nrows();
    let eigs = gss.clone().complex_eigenvalues();
    let lead = eigs
        .iter()
        .max_by(|a, b| a.re.total_cmp(&b.re))
        .copied()
        .ok_or_else(|| Error::InvalidArgument("empty block".into()))?;
    if lead.im.abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "leading eigenvalue {lead} is not real"
        )));
    }
    let lambda = lead.re;
    let shifted = gss - DMatrix::<f64>::identity(ns, ns) * lambda;
    let svd = shifted.svd(true, true);
    let k = svd.singular_values.imin();
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let normalize = |v: DVector<f64>| {
        let sum = v.sum();
        v / sum
    };
    let psi_r = normalize(v_t.row(k).transpose().into_owned());
    let psi_l = normalize(u.column(k).into_owned());
    Ok((lambda, psi_r, psi_l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close_m(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).amax() <= tol
    }

    fn small() -> DirectedGraph {
        DirectedGraph::from_edges(
            6,
            [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 1), (4, 5), (1, 4)],
            false,
        )
        .unwrap()
    }

    #[test]
    fn full_subset_gives_dense_g() {
        let g = small();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let subset = NodeSubset::new(&g, (0..6).collect()).unwrap();
        let set = reduce(&op, &subset, &ReduceConfig::default()).unwrap();
        let dense = dense_google(&g, 0.85).unwrap();
        assert_eq!(set.gr, dense);
        assert_eq!(set.grr, dense);
        assert_eq!(set.gpr.amax(), 0.0);
        assert_eq!(set.gqr().amax(), 0.0);
        assert!(set.lambda_c.is_none());
    }

    #[test]
    fn single_node_reduces_to_one() {
        let g = small();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        for node in 0..6 {
            let subset = NodeSubset::new(&g, vec![node]).unwrap();
            let set = reduce(&op, &subset, &ReduceConfig::default()).unwrap();
            assert!((set.gr[(0, 0)] - 1.0).abs() < 1e-10, "{}", set.gr[(0, 0)]);
        }
    }

    #[test]
    fn one_node_complement_eigenvalue_is_diagonal_entry() {
        let g = small();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let subset = NodeSubset::new(&g, vec![0, 1, 2, 3, 4]).unwrap();
        let eig = complement_leading_eigen(&op, &subset, 1e-12, 100).unwrap();
        assert_eq!(eig.complement, vec![5]);
        assert!((eig.lambda - op.entry(5, 5)).abs() < 1e-15);
        assert_eq!(eig.psi_right, vec![1.0]);
        assert!(eig.lambda < 1.0);
    }

    #[test]
    fn matches_dense_oracle_on_small_graph() {
        let g = small();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let subset = NodeSubset::new(&g, vec![4, 1]).unwrap();
        let fast = reduce(&op, &subset, &ReduceConfig::default()).unwrap();
        let oracle = dense_oracle_reduce(&g, &subset, 0.85).unwrap();
        assert!(close_m(&fast.gr, &oracle.gr, 1e-10));
        assert!(close_m(&fast.gpr, &oracle.gpr, 1e-10));
        assert!(close_m(&fast.gqrnd, &oracle.gqrnd, 1e-10));
        assert_eq!(fast.grr, oracle.grr);
        assert!(fast.check_invariants().is_empty(), "{:?}", fast.check_invariants());
        assert!(oracle.check_invariants().is_empty(), "{:?}", oracle.check_invariants());
    }

    #[test]
    fn oracle_two_node_and_symmetry() {
        let g = DirectedGraph::from_edges(2, [(0, 1)], false).unwrap();
        let s = NodeSubset::new(&g, vec![0]).unwrap();
        let set = dense_oracle_reduce(&g, &s, 0.85).unwrap();
        assert!((set.gr[(0, 0)] - 1.0).abs() < 1e-14);

        let complete: Vec<(NodeId, NodeId)> = (0..5)
            .flat_map(|a| (0..5).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        let g = DirectedGraph::from_edges(5, complete, false).unwrap();
        let s = NodeSubset::new(&g, vec![1, 3]).unwrap();
        let set = dense_oracle_reduce(&g, &s, 0.85).unwrap();
        assert!((set.gr[(0, 0)] - set.gr[(1, 1)]).abs() < 1e-14);
        assert!((set.gr[(0, 1)] - set.gr[(1, 0)]).abs() < 1e-14);
    }

    #[test]
    fn oracle_refuses_large_graphs() {
        let g = DirectedGraph::from_edges(DENSE_LIMIT + 1, [], false).unwrap();
        let s = NodeSubset::new(&g, vec![0]).unwrap();
        assert!(matches!(
            dense_oracle_reduce(&g, &s, 0.85),
            Err(Error::TooLargeForDense(..))
        ));
    }

    #[test]
    fn series_cap_reports_non_convergence() {
        let g = small();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let subset = NodeSubset::new(&g, vec![0, 3]).unwrap();
        let cfg = ReduceConfig {
            series_max_iter: 2,
            ..ReduceConfig::default()
        };
        assert!(matches!(
            reduce(&op, &subset, &cfg),
            Err(Error::NonConvergence { .. })
        ));
        let bad = ReduceConfig {
            eigen_tol: 0.0,
            ..ReduceConfig::default()
        };
        assert!(reduce(&op, &subset, &bad).is_err());
    }

    #[test]
    fn component_parsing() {
        for c in [
            Component::Gr,
            Component::Grr,
            Component::Gpr,
            Component::Gqr,
            Component::Gqrd,
            Component::Gqrnd,
            Component::GrrPlusGqrnd,
        ] {
            assert_eq!(c.to_string().parse::<Component>().unwrap(), c);
        }
    }
}
