//! Space-time codebooks and the three design criteria.
//!
//! For a pair of distinct codewords `C, E` (each `n_T × l`) the difference
//! Gram matrix is `A(c,e) = (E−C)(E−C)*`. The criteria score a codebook by its
//! worst pair:
//!
//! * rank-determinant: maximize the minimum rank of `A`, then the minimum
//!   product of its nonzero eigenvalues;
//! * trace: maximize the minimum `tr A = ‖E−C‖_F²`;
//! * largest eigenvalue: maximize the minimum `λ_max(A) = ‖E−C‖₂²`.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::rmt::hermitian_eigenvalues_signed;
use crate::rng::{Domain, StreamFamily};

/// Default relative threshold for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Largest singular value, `sqrt(λ_max(M M*))`.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    let gram = if m.rows() <= m.cols() {
        m.gram()
    } else {
        m.adjoint().gram()
    };
    let ev = hermitian_eigenvalues_signed(&gram).expect("Gram matrices are Hermitian and small");
    ev[0].max(0.0).sqrt()
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.frobenius_norm_sqr().sqrt()
}

/// `A(c,e) = (E−C)(E−C)*`.
pub fn diff_gram(c: &ComplexMatrix, e: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(e.try_sub(c)?.gram())
}

/// A finite set of distinct, equally shaped complex matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    n_t: usize,
    l: usize,
    words: Vec<ComplexMatrix>,
}

impl Codebook {
    pub fn new(words: Vec<ComplexMatrix>) -> Result<Self> {
        if words.len() < 2 {
            return Err(Error::invalid(format!("a codebook needs at least 2 words, got {}", words.len())));
        }
        let (n_t, l) = words[0].shape();
        if let Some((i, w)) = words.iter().enumerate().find(|(_, w)| w.shape() != (n_t, l)) {
            return Err(Error::invalid(format!(
                "word {i} is {}x{}, expected {n_t}x{l}",
                w.rows(),
                w.cols()
            )));
        }
        for i in 0..words.len() {
            for j in (i + 1)..words.len() {
                if words[i] == words[j] {
                    return Err(Error::invalid(format!("words {i} and {j} are identical")));
                }
            }
        }
        Ok(Codebook { n_t, l, words })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn words(&self) -> &[ComplexMatrix] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Unordered index pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.words.len();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
    }
}

/// Everything the criteria need to know about one codeword pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMetrics {
    pub rank: usize,
    /// Product of the eigenvalues of `A(c,e)` above the rank threshold.
    pub det_product: f64,
    pub trace: f64,
    pub sq_spectral_dist: f64,
}

impl PairMetrics {
    pub fn evaluate(c: &ComplexMatrix, e: &ComplexMatrix, tol_rank: f64) -> Result<Self> {
        let a = diff_gram(c, e)?;
        let ev = hermitian_eigenvalues_signed(&a)?;
        let top = ev[0].max(0.0);
        let kept: Vec<f64> = ev.iter().copied().filter(|&v| v > tol_rank * top).collect();
        Ok(PairMetrics {
            rank: kept.len(),
            det_product: kept.iter().product(),
            trace: a.trace().re,
            sq_spectral_dist: top,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    RankDet,
    Trace,
    Lmax,
}

/// Outcome of scoring a codebook under one criterion.
///
/// `min_trace` and `min_sq_spectral_dist` are global minima over pairs.
/// `min_rank` is the global minimum rank and `min_det_product` the smallest
/// determinant product among pairs of that rank. `worst_pair` attains the
/// criterion's own minimum; ties go to the lexicographically first pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub min_rank: usize,
    pub min_det_product: f64,
    pub min_trace: f64,
    pub min_sq_spectral_dist: f64,
    pub worst_pair: (usize, usize),
    /// `None` where the criterion is a pure maximization objective.
    pub satisfied: Option<bool>,
    pub threshold: String,
    /// Largest `|tr C|` over the codewords themselves.
    pub max_abs_codeword_trace: f64,
}

fn scan(book: &Codebook, tol_rank: f64) -> Result<Vec<((usize, usize), PairMetrics)>> {
    book.pairs()
        .map(|(i, j)| Ok(((i, j), PairMetrics::evaluate(&book.words[i], &book.words[j], tol_rank)?)))
        .collect()
}

fn report(book: &Codebook, criterion: Criterion, tol_rank: f64) -> Result<CriterionReport> {
    let metrics = scan(book, tol_rank)?;
    let min_rank = metrics.iter().map(|(_, m)| m.rank).min().expect("at least one pair");
    let min_det_product = metrics
        .iter()
        .filter(|(_, m)| m.rank == min_rank)
        .map(|(_, m)| m.det_product)
        .fold(f64::INFINITY, f64::min);
    let min_trace = metrics.iter().map(|(_, m)| m.trace).fold(f64::INFINITY, f64::min);
    let min_sq = metrics
        .iter()
        .map(|(_, m)| m.sq_spectral_dist)
        .fold(f64::INFINITY, f64::min);

    // First pair (in scan order) attaining the criterion's minimum.
    let worst_pair = metrics
        .iter()
        .find(|(_, m)| match criterion {
            Criterion::RankDet => m.rank == min_rank && m.det_product == min_det_product,
            Criterion::Trace => m.trace == min_trace,
            Criterion::Lmax => m.sq_spectral_dist == min_sq,
        })
        .map(|(p, _)| *p)
        .expect("minimum is attained");

    let (satisfied, threshold) = match criterion {
        Criterion::RankDet => (
            Some(min_rank == book.n_t),
            format!("full rank: min_rank must equal n_T = {}", book.n_t),
        ),
        Criterion::Trace => (None, "maximize min_trace; no absolute threshold".to_string()),
        Criterion::Lmax => (None, "maximize min_sq_spectral_dist; no absolute threshold".to_string()),
    };
    let max_abs_codeword_trace = book.words.iter().map(|w| w.trace().norm()).fold(0.0, f64::max);

    Ok(CriterionReport {
        criterion,
        min_rank,
        min_det_product,
        min_trace,
        min_sq_spectral_dist: min_sq,
        worst_pair,
        satisfied,
        threshold,
        max_abs_codeword_trace,
    })
}

/// Rank and determinant criterion with numerical rank at `tol_rank · λ_max`.
pub fn rank_det_report(book: &Codebook, tol_rank: f64) -> Result<CriterionReport> {
    if !(tol_rank > 0.0) {
        return Err(Error::invalid("rank tolerance must be positive"));
    }
    report(book, Criterion::RankDet, tol_rank)
}

pub fn trace_report(book: &Codebook) -> Result<CriterionReport> {
    report(book, Criterion::Trace, DEFAULT_RANK_TOL)
}

/// Largest-eigenvalue criterion: the minimum squared spectral distance.
pub fn lmax_criterion_report(book: &Codebook) -> Result<CriterionReport> {
    report(book, Criterion::Lmax, DEFAULT_RANK_TOL)
}

/// The example families.
#[derive(Debug, Clone, PartialEq)]
pub enum ExampleCode {
    /// The nine nonzero singular binary 2×2 matrices.
    BinarySingular,
    /// `M(x, z) = [[x i, −conj(z)], [z, −x i]]` for each listed `(x, z)`.
    Traceless(Vec<(f64, Complex64)>),
    /// `D·g` over the quaternion group `g`, `D = [[1, −1], [1, 1]]`.
    Quaternion,
    /// `D₁·g` with `D₁ = [[1, 1], [1, 1]]`.
    QuaternionModified,
}

impl std::str::FromStr for ExampleCode {
    type Err = Error;

    /// Parses the parameter-free families by name.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary_singular" | "binary-singular" => Ok(ExampleCode::BinarySingular),
            "quaternion" => Ok(ExampleCode::Quaternion),
            "quaternion_modified" | "quaternion-modified" => Ok(ExampleCode::QuaternionModified),
            other => Err(Error::invalid(format!(
                "unknown example code '{other}' (traceless needs explicit parameters)"
            ))),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![a, b, cc, d]).expect("finite 2x2")
}

/// The eight-element quaternion group as 2×2 complex matrices.
pub fn quaternion_group() -> Vec<ComplexMatrix> {
    let (o, one, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let base = [
        mat2(one, o, o, one),
        mat2(i, o, o, -i),
        mat2(o, one, -one, o),
        mat2(o, i, i, o),
    ];
    base.iter()
        .flat_map(|g| [g.clone(), g.scale(c(-1.0, 0.0))])
        .collect()
}

pub fn example_codebook(id: &ExampleCode) -> Result<Codebook> {
    match id {
        ExampleCode::BinarySingular => {
            let words = [
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0, 1.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 1.0],
                [1.0, 0.0, 0.0, 0.0],
                [1.0, 0.0, 1.0, 0.0],
                [1.0, 1.0, 0.0, 0.0],
                [1.0, 1.0, 1.0, 1.0],
            ]
            .iter()
            .map(|w| ComplexMatrix::from_real(2, 2, w))
            .collect::<Result<Vec<_>>>()?;
            Codebook::new(words)
        }
        ExampleCode::Traceless(params) => {
            let words = params
                .iter()
                .map(|&(x, z)| {
                    if !x.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
                        return Err(Error::invalid("traceless parameters must be finite"));
                    }
                    Ok(mat2(c(0.0, x), -z.conj(), z, c(0.0, -x)))
                })
                .collect::<Result<Vec<_>>>()?;
            Codebook::new(words)
        }
        ExampleCode::Quaternion => {
            let d = ComplexMatrix::from_real(2, 2, &[1.0, -1.0, 1.0, 1.0])?;
            Codebook::new(quaternion_group().iter().map(|g| &d * g).collect())
        }
        ExampleCode::QuaternionModified => {
            let d = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0])?;
            Codebook::new(quaternion_group().iter().map(|g| &d * g).collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    /// Every `size`-subset of the candidate words; the global optimum.
    Exhaustive,
    /// Farthest-point greedy growth from `budget` random starting words.
    RandomRestartGreedy,
}

/// Largest candidate set the search will enumerate.
pub const MAX_CANDIDATES: usize = 1 << 20;

struct Candidates<'a> {
    alphabet: &'a [Complex64],
    n_t: usize,
    l: usize,
    count: usize,
}

impl Candidates<'_> {
    fn word(&self, mut index: usize) -> ComplexMatrix {
        let q = self.alphabet.len();
        let data = (0..self.n_t * self.l)
            .map(|_| {
                let s = self.alphabet[index % q];
                index /= q;
                s
            })
            .collect();
        ComplexMatrix::from_vec(self.n_t, self.l, data).expect("alphabet is finite")
    }
}

fn sq_dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    spectral_norm(&(a - b)).powi(2)
}

fn binomial_capped(n: usize, k: usize, cap: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Searches words over `alphabet` for a `size`-word codebook maximizing the
/// minimum squared spectral distance.
///
/// Exhaustive mode refuses to run when the number of subsets exceeds
/// `budget`. Greedy mode performs `budget` restarts.
pub fn search_codebook(
    alphabet: &[Complex64],
    n_t: usize,
    l: usize,
    size: usize,
    strategy: SearchStrategy,
    budget: usize,
    seed: u64,
) -> Result<(Codebook, CriterionReport)> {
    if alphabet.is_empty() || n_t == 0 || l == 0 {
        return Err(Error::invalid("alphabet and dimensions must be non-empty"));
    }
    if alphabet.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("alphabet symbols must be finite"));
    }
    for i in 0..alphabet.len() {
        if alphabet[..i].contains(&alphabet[i]) {
            return Err(Error::invalid("alphabet symbols must be distinct"));
        }
    }
    if size < 2 {
        return Err(Error::invalid("codebook size must be at least 2"));
    }
    if budget == 0 {
        return Err(Error::invalid("budget must be positive"));
    }
    let count = (alphabet.len() as f64).powi((n_t * l) as i32);
    if count > MAX_CANDIDATES as f64 {
        return Err(Error::Infeasible(format!(
            "{count} candidate words exceed the enumeration limit {MAX_CANDIDATES}"
        )));
    }
    let count = count as usize;
    if count < size {
        return Err(Error::invalid(format!("only {count} distinct words exist, need {size}")));
    }
    let cands = Candidates {
        alphabet,
        n_t,
        l,
        count,
    };

    let chosen = match strategy {
        SearchStrategy::Exhaustive => exhaustive(&cands, size, budget)?,
        SearchStrategy::RandomRestartGreedy => greedy(&cands, size, budget, seed),
    };
    let book = Codebook::new(chosen.into_iter().map(|i| cands.word(i)).collect())?;
    let report = lmax_criterion_report(&book)?;
    Ok((book, report))
}

fn exhaustive(cands: &Candidates<'_>, size: usize, budget: usize) -> Result<Vec<usize>> {
    if binomial_capped(cands.count, size, budget).is_none() {
        return Err(Error::Infeasible(format!(
            "C({}, {size}) subsets exceed the budget of {budget}",
            cands.count
        )));
    }
    let words: Vec<ComplexMatrix> = (0..cands.count).map(|i| cands.word(i)).collect();
    let n = words.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sq_dist(&words[i], &words[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    struct State<'a> {
        n: usize,
        size: usize,
        dist: &'a [f64],
        stack: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
    }

    fn recurse(st: &mut State<'_>, start: usize, current_min: f64) {
        if st.stack.len() == st.size {
            if st.best.as_ref().is_none_or(|(b, _)| current_min > *b) {
                st.best = Some((current_min, st.stack.clone()));
            }
            return;
        }
        let remaining = st.size - st.stack.len();
        for next in start..=(st.n - remaining) {
            let mut m = current_min;
            for &k in &st.stack {
                m = m.min(st.dist[k * st.n + next]);
            }
            // Adding words can only lower the minimum.
            if let Some((b, _)) = &st.best {
                if m <= *b {
                    continue;
                }
            }
            st.stack.push(next);
            recurse(st, next + 1, m);
            st.stack.pop();
        }
    }

    let mut st = State {
        n,
        size,
        dist: &dist,
        stack: Vec::with_capacity(size),
        best: None,
    };
    recurse(&mut st, 0, f64::INFINITY);
    Ok(st.best.expect("count >= size guarantees a subset").1)
}

fn greedy(cands: &Candidates<'_>, size: usize, restarts: usize, seed: u64) -> Vec<usize> {
    let family = StreamFamily::new(seed, Domain::Search);
    let runs: Vec<(f64, Vec<usize>)> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| {
            let start = family.get(r).random_range(0..cands.count);
            greedy_from(cands, size, start)
        })
        .collect();
    // Highest score wins; ties go to the earliest restart.
    runs.into_iter()
        .fold(None::<(f64, Vec<usize>)>, |best, run| match best {
            Some(b) if b.0 >= run.0 => Some(b),
            _ => Some(run),
        })
        .expect("restarts >= 1")
        .1
}

fn greedy_from(cands: &Candidates<'_>, size: usize, start: usize) -> (f64, Vec<usize>) {
    let mut chosen = vec![start];
    let first = cands.word(start);
    let mut nearest: Vec<f64> = (0..cands.count).map(|i| sq_dist(&first, &cands.word(i))).collect();
    let mut score = f64::INFINITY;
    while chosen.len() < size {
        let (pick, d) = nearest
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .fold((usize::MAX, f64::NEG_INFINITY), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
        score = score.min(d);
        chosen.push(pick);
        let w = cands.word(pick);
        for (i, slot) in nearest.iter_mut().enumerate() {
            *slot = slot.min(sq_dist(&w, &cands.word(i)));
        }
    }
    chosen.sort_unstable();
    (score, chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, cols: usize, v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real(rows, cols, v).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert!((spectral_norm(&ComplexMatrix::identity(2)) - 1.0).abs() < 1e-15);
        assert!((spectral_norm(&real(2, 2, &[0.0, 1.0, 0.0, 0.0])) - 1.0).abs() < 1e-15);
        assert!((spectral_norm(&real(2, 2, &[1.0, 1.0, 1.0, 1.0])) - 2.0).abs() < 1e-15);
        assert!((frobenius_norm(&ComplexMatrix::identity(2)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(2, 2)), 0.0);
        assert!((frobenius_norm(&real(2, 2, &[1.0, 1.0, 1.0, 1.0])) - 2.0).abs() < 1e-15);
        // Tall input goes through the smaller Gram matrix.
        assert!((spectral_norm(&real(3, 1, &[3.0, 0.0, 4.0])) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn diff_gram_examples() {
        let e = ComplexMatrix::identity(2);
        assert_eq!(diff_gram(&e, &e).unwrap(), ComplexMatrix::zeros(2, 2));
        assert_eq!(diff_gram(&ComplexMatrix::zeros(2, 2), &e).unwrap(), ComplexMatrix::identity(2));
        assert!(diff_gram(&e, &ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn codebook_validation() {
        let a = ComplexMatrix::identity(2);
        assert!(Codebook::new(vec![a.clone()]).is_err());
        assert!(Codebook::new(vec![a.clone(), a.clone()]).is_err());
        assert!(Codebook::new(vec![a.clone(), ComplexMatrix::zeros(2, 3)]).is_err());
        assert!(Codebook::new(vec![a, ComplexMatrix::zeros(2, 2)]).is_ok());
    }

    #[test]
    fn two_word_book_differing_by_identity() {
        let book = Codebook::new(vec![ComplexMatrix::zeros(3, 3), ComplexMatrix::identity(3)]).unwrap();
        let rd = rank_det_report(&book, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(rd.min_rank, 3);
        assert!((rd.min_det_product - 1.0).abs() < 1e-14);
        assert_eq!(rd.satisfied, Some(true));
        assert!((trace_report(&book).unwrap().min_trace - 3.0).abs() < 1e-14);
    }

    #[test]
    fn lmax_report_two_words_at_distance_three() {
        let book = Codebook::new(vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::identity(2).scale(c(3.0, 0.0))]).unwrap();
        let r = lmax_criterion_report(&book).unwrap();
        assert!((r.min_sq_spectral_dist - 9.0).abs() < 1e-13);
        assert_eq!(r.worst_pair, (0, 1));
        assert_eq!(r.satisfied, None);
    }

    #[test]
    fn example_families() {
        let bin = example_codebook(&ExampleCode::BinarySingular).unwrap();
        assert_eq!(bin.len(), 9);
        for w in bin.words() {
            let det = w[(0, 0)] * w[(1, 1)] - w[(0, 1)] * w[(1, 0)];
            assert_eq!(det, c(0.0, 0.0));
        }
        assert_eq!(example_codebook(&ExampleCode::Quaternion).unwrap().len(), 8);
        assert_eq!(example_codebook(&ExampleCode::QuaternionModified).unwrap().len(), 8);
        let tl = example_codebook(&ExampleCode::Traceless(vec![(1.0, c(0.0, 0.0)), (0.0, c(1.0, 1.0))])).unwrap();
        assert_eq!(tl.words()[0], mat2(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)));
        assert_eq!(tl.words()[0].trace(), c(0.0, 0.0));
        assert!("nope".parse::<ExampleCode>().is_err());
    }

    #[test]
    fn quaternion_code_is_full_rank() {
        let q = example_codebook(&ExampleCode::Quaternion).unwrap();
        let r = rank_det_report(&q, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.min_rank, 2);
        assert_eq!(r.satisfied, Some(true));
        // Adjacent group elements: A = 2|Δq|² I with |Δq|² = 2, so det = 16.
        assert!((r.min_det_product - 16.0).abs() < 1e-12);
    }

    #[test]
    fn binary_singular_is_rank_deficient() {
        let b = example_codebook(&ExampleCode::BinarySingular).unwrap();
        let r = rank_det_report(&b, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.min_rank, 1);
        assert_eq!(r.satisfied, Some(false));
    }

    #[test]
    fn worst_pair_reattains_minimum() {
        let b = example_codebook(&ExampleCode::QuaternionModified).unwrap();
        for r in [
            rank_det_report(&b, DEFAULT_RANK_TOL).unwrap(),
            trace_report(&b).unwrap(),
            lmax_criterion_report(&b).unwrap(),
        ] {
            let (i, j) = r.worst_pair;
            assert!(i < j && j < b.len());
            let m = PairMetrics::evaluate(&b.words()[i], &b.words()[j], DEFAULT_RANK_TOL).unwrap();
            match r.criterion {
                Criterion::RankDet => {
                    assert_eq!(m.rank, r.min_rank);
                    assert_eq!(m.det_product, r.min_det_product);
                }
                Criterion::Trace => assert_eq!(m.trace, r.min_trace),
                Criterion::Lmax => assert_eq!(m.sq_spectral_dist, r.min_sq_spectral_dist),
            }
        }
    }

    #[test]
    fn search_small_instances() {
        let bits = [c(0.0, 0.0), c(1.0, 0.0)];
        let (book, r) = search_codebook(&bits, 1, 1, 2, SearchStrategy::Exhaustive, 10, 0).unwrap();
        assert_eq!(book.len(), 2);
        assert!((r.min_sq_spectral_dist - 1.0).abs() < 1e-14);

        let pm = [c(-1.0, 0.0), c(1.0, 0.0)];
        let (_, r) = search_codebook(&pm, 2, 2, 2, SearchStrategy::Exhaustive, 1000, 0).unwrap();
        assert!((r.min_sq_spectral_dist - 16.0).abs() < 1e-12);

        assert!(matches!(
            search_codebook(&pm, 2, 2, 4, SearchStrategy::Exhaustive, 10, 0),
            Err(Error::Infeasible(_))
        ));
        assert!(search_codebook(&bits, 1, 1, 3, SearchStrategy::Exhaustive, 10, 0).is_err());
    }

    #[test]
    fn greedy_is_deterministic_and_bounded_by_exhaustive() {
        let alphabet = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)];
        let a = search_codebook(&alphabet, 2, 1, 3, SearchStrategy::RandomRestartGreedy, 5, 42).unwrap();
        let b = search_codebook(&alphabet, 2, 1, 3, SearchStrategy::RandomRestartGreedy, 5, 42).unwrap();
        assert_eq!(a, b);
        let ex = search_codebook(&alphabet, 2, 1, 3, SearchStrategy::Exhaustive, 1000, 0).unwrap();
        assert!(ex.1.min_sq_spectral_dist >= a.1.min_sq_spectral_dist - 1e-12);
    }
}
