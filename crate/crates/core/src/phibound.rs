//! Certificates and refutations for boundedness of `d_plus(w) * |rho(w^-1)|`
//! over the fundamental group of an oriented reduction graph.

use num_rational::Ratio;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::padic::{newton_slopes, valuation, Norm, Prime, Valuation};
use crate::redgraph::{
    all_letters, d_plus, path_report, proof_constant, walk_words_from, FreeBasis, GraphError, ProofConstant,
    ReductionGraph,
};
use crate::word::{reduced_words, FreeWord, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhiError {
    #[error("representation needs at least one generator image")]
    NoGenerators,
    #[error("generator image {0} is not a {1}x{1} matrix")]
    Shape(usize, usize),
    #[error("generator image {0} is singular")]
    Singular(usize),
    #[error("graph has {expected} free generators but the representation has {found}")]
    GeneratorCount { expected: usize, found: usize },
    #[error("scan depth too small: the proof bound needs depth {required}")]
    DepthInsufficient { required: u64 },
    #[error("scan depth must be at least 1")]
    ZeroDepth,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Images of the free generators in `GL_r(Q)`, read p-adically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    prime: Prime,
    rank: usize,
    generators: Vec<Matrix>,
    inverses: Vec<Matrix>,
}

impl Representation {
    pub fn new(prime: Prime, generators: Vec<Matrix>) -> Result<Representation, PhiError> {
        let rank = generators.first().ok_or(PhiError::NoGenerators)?.rows();
        let mut inverses = Vec::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if g.rows() != rank || g.cols() != rank {
                return Err(PhiError::Shape(i, rank));
            }
            inverses.push(g.inverse().ok_or(PhiError::Singular(i))?);
        }
        Ok(Representation { prime, rank, generators, inverses })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn letter(&self, l: Letter) -> &Matrix {
        if l.inverse {
            &self.inverses[l.generator]
        } else {
            &self.generators[l.generator]
        }
    }

    pub fn image(&self, w: &FreeWord) -> Matrix {
        w.letters().iter().fold(Matrix::identity(self.rank), |acc, &l| &acc * self.letter(l))
    }

    fn check_basis(&self, basis: &FreeBasis) -> Result<(), PhiError> {
        if basis.rank() == 0 {
            return Err(GraphError::NoCycles.into());
        }
        if basis.rank() != self.generators.len() {
            return Err(PhiError::GeneratorCount { expected: basis.rank(), found: self.generators.len() });
        }
        Ok(())
    }
}

fn ser_ratio<S: Serializer>(x: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    if x.is_integer() {
        s.serialize_str(&x.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
    }
}

/// Exponent `e` with `|A| = p^e`; `A` is nonzero.
fn norm_exp(a: &Matrix, p: Prime) -> i64 {
    a.norm(p).exponent().expect("invertible matrices are nonzero")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Every generator and its inverse has norm at most 1.
    Certified,
    NotApplicable { reason: String },
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Certificate::Certified => s.serialize_str("integral"),
            Certificate::NotApplicable { reason } => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("not_applicable", reason)?;
                m.end()
            }
        }
    }
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified)
    }
}

/// Integral entries and unit determinant for every generator image.
pub fn integral_certificate(rho: &Representation) -> Certificate {
    let p = rho.prime;
    for (i, g) in rho.generators.iter().enumerate() {
        if !g.is_integral(p) {
            return Certificate::NotApplicable { reason: format!("generator g{} has norm {}", i + 1, fmt_norm(g.norm(p), p)) };
        }
        if valuation(&g.det(), p) != Valuation::Finite(0) {
            return Certificate::NotApplicable { reason: format!("determinant of g{} is not a unit", i + 1) };
        }
    }
    Certificate::Certified
}

fn fmt_norm(n: Norm, p: Prime) -> String {
    match n {
        Norm::Zero => "0".into(),
        Norm::Pow(e) => format!("{p}^{e}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Finiteness {
    /// Every word in the level set has length at most `length_bound`, and
    /// all such words were scanned.
    Proven { length_bound: u64, proof_constant: usize },
    NotProven,
}

/// Result of scanning `m(w) = d_plus(w) * |rho(w^-1)|` over reduced words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupScan {
    pub depth: usize,
    pub eps_exp: i64,
    /// `max m(w) = p^max_exp`.
    pub max_exp: i64,
    pub argmax: FreeWord,
    /// Words with `m(w) >= p^-eps_exp`, in shortlex order.
    pub level_set: Vec<FreeWord>,
    pub words_scanned: u64,
    pub finiteness: Finiteness,
}

/// `m` exponent of every reduced word up to `depth`, identity included,
/// via an incremental depth-first walk split over first letters.
fn scan_words<F>(rho: &Representation, g: &ReductionGraph, basis: &FreeBasis, depth: usize, keep: F) -> (u64, Vec<(FreeWord, i64)>)
where
    F: Fn(i64) -> bool + Sync,
{
    let p = rho.prime;
    let parts: Vec<(u64, Vec<(FreeWord, i64)>)> = all_letters(basis.rank())
        .into_par_iter()
        .map(|first| {
            let mut count = 0u64;
            let mut found = Vec::new();
            // stack[k] = rho(w^-1) for the prefix of length k
            let mut stack = vec![Matrix::identity(rho.rank)];
            walk_words_from(basis, first, depth, &mut |letters, path| {
                stack.truncate(letters.len());
                let last = *letters.last().expect("nonempty");
                let next = rho.letter(last.inv()) * &stack[letters.len() - 1];
                let m = norm_exp(&next, p) - path_report(g, path).d_plus_exp as i64;
                stack.push(next);
                count += 1;
                if keep(m) {
                    found.push((FreeWord::new(letters.to_vec()).expect("walk yields reduced words"), m));
                }
                true
            });
            (count, found)
        })
        .collect();
    let mut count = 1;
    let mut all = Vec::new();
    if keep(0) {
        all.push((FreeWord::identity(), 0));
    }
    for (c, f) in parts {
        count += c;
        all.extend(f);
    }
    all.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    (count, all)
}

/// Exact maximum of `m` over words of length at most `depth` and the level
/// set `{w : m(w) >= p^-eps_exp}`. When the representation is integral, the
/// level set consists of words of geodesic length at most `n * eps_exp`;
/// a depth reaching that bound proves the level set is finite and complete.
pub fn bounded_sup_scan(
    rho: &Representation,
    g: &ReductionGraph,
    basis: &FreeBasis,
    eps_exp: i64,
    depth: usize,
) -> Result<SupScan, PhiError> {
    rho.check_basis(basis)?;
    if depth == 0 {
        return Err(PhiError::ZeroDepth);
    }
    let finiteness = if integral_certificate(rho).is_certified() {
        let pc: ProofConstant = proof_constant(g, basis)?;
        let bound = pc.length_bound(eps_exp.max(0) as u64);
        if (depth as u64) < bound {
            return Err(PhiError::DepthInsufficient { required: bound });
        }
        Finiteness::Proven { length_bound: bound, proof_constant: pc.n }
    } else {
        Finiteness::NotProven
    };
    let (count, words) = scan_words(rho, g, basis, depth, |_| true);
    let (argmax, max_exp) = words
        .iter()
        .fold((FreeWord::identity(), 0), |best, (w, m)| if *m > best.1 { (w.clone(), *m) } else { best });
    let level_set = words.into_iter().filter(|(_, m)| *m >= -eps_exp).map(|(w, _)| w).collect();
    Ok(SupScan { depth, eps_exp, max_exp, argmax, level_set, words_scanned: count, finiteness })
}

/// A word along whose powers `m` grows geometrically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub word: FreeWord,
    /// `m(w^k) >= p^(k * growth_exponent - offset)`.
    #[serde(serialize_with = "ser_ratio")]
    pub growth_exponent: Ratio<i64>,
    /// Positive-width displacement per period.
    pub delta_exp: u64,
    /// Smallest root valuation of the characteristic polynomial of `rho(w^-1)`.
    #[serde(serialize_with = "ser_ratio")]
    pub sigma: Ratio<i64>,
    pub offset: i64,
    /// `(k, exponent of m(w^k))` for the checked powers.
    pub checked: Vec<(u32, i64)>,
}

fn m_exp(rho: &Representation, g: &ReductionGraph, basis: &FreeBasis, w: &FreeWord) -> i64 {
    norm_exp(&rho.image(&w.inverse()), rho.prime) - d_plus(g, basis, w).d_plus_exp as i64
}

/// Searches cyclically reduced words up to `max_period` for `sigma + delta < 0`
/// and confirms the predicted growth on powers `1..=power_check`.
pub fn periodic_witness(
    rho: &Representation,
    g: &ReductionGraph,
    basis: &FreeBasis,
    max_period: usize,
    power_check: u32,
) -> Result<Option<Witness>, PhiError> {
    rho.check_basis(basis)?;
    if integral_certificate(rho).is_certified() {
        return Ok(None);
    }
    let p = rho.prime;
    for w in reduced_words(basis.rank(), max_period).into_iter().skip(1) {
        if !w.is_cyclically_reduced() {
            continue;
        }
        let d1 = d_plus(g, basis, &w).d_plus_exp;
        let d2 = d_plus(g, basis, &w.pow(2)).d_plus_exp;
        let delta = d2 as i64 - d1 as i64;
        let inv = rho.image(&w.inverse());
        let sigma = newton_slopes(inv.char_poly().coeffs(), p).min_slope().expect("invertible image has roots");
        let growth = -sigma - Ratio::from_integer(delta);
        if !growth.is_positive() {
            continue;
        }
        let offset = d1 as i64 - delta;
        let mut checked = Vec::new();
        let mut ok = true;
        for k in 1..=power_check.max(1) {
            let m = m_exp(rho, g, basis, &w.pow(k));
            checked.push((k, m));
            if Ratio::from_integer(m + offset) < growth * Ratio::from_integer(k as i64) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(Witness { word: w, growth_exponent: growth, delta_exp: delta as u64, sigma, offset, checked }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub depth: usize,
    pub eps_exp: i64,
    pub max_period: usize,
    pub power_check: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { depth: 6, eps_exp: 2, max_period: 4, power_check: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum PhiVerdict {
    PhiBounded { certificate: Certificate, proof_constant: ProofConstant },
    NotPhiBounded { witness: Witness },
    Unknown { scan: SupScan, reason: String },
}

/// Certificate first, then a periodic witness, then a plain scan.
pub fn classify_phi(
    rho: &Representation,
    g: &ReductionGraph,
    basis: &FreeBasis,
    budget: Budget,
) -> Result<PhiVerdict, PhiError> {
    rho.check_basis(basis)?;
    let cert = integral_certificate(rho);
    if cert.is_certified() {
        let pc = proof_constant(g, basis)?;
        return Ok(PhiVerdict::PhiBounded { certificate: cert, proof_constant: pc });
    }
    if let Some(witness) = periodic_witness(rho, g, basis, budget.max_period, budget.power_check)? {
        return Ok(PhiVerdict::NotPhiBounded { witness });
    }
    let scan = bounded_sup_scan(rho, g, basis, budget.eps_exp, budget.depth)?;
    let reason = match cert {
        Certificate::NotApplicable { reason } => format!("{reason}; no periodic witness up to period {}", budget.max_period),
        Certificate::Certified => unreachable!(),
    };
    Ok(PhiVerdict::Unknown { scan, reason })
}

/// `|A^k| >= rho(A)^k` where `rho(A) = p^-sigma` is the largest eigenvalue norm.
pub fn spectral_bound_holds(a: &Matrix, p: Prime, k: u32) -> bool {
    let Some(sigma) = newton_slopes(a.char_poly().coeffs(), p).min_slope() else { return true };
    let ak = a.pow(k);
    if ak.is_zero() {
        return false;
    }
    Ratio::from_integer(norm_exp(&ak, p)) >= -sigma * Ratio::from_integer(k as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Rational;
    use crate::redgraph::{free_basis, tate_cycle_graph, theta_graph};
    use num_bigint::BigInt;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    fn scalar(x: Rational) -> Matrix {
        Matrix::diag(&[x])
    }

    fn tate(j: i64) -> (ReductionGraph, FreeBasis, Representation) {
        let g = tate_cycle_graph(3, p5()).unwrap();
        let b = free_basis(&g);
        let rho = Representation::new(p5(), vec![scalar(p5().rational_pow(j))]).unwrap();
        (g, b, rho)
    }

    #[test]
    fn certificates() {
        let unit = Representation::new(p5(), vec![scalar(Rational::from_integer(BigInt::from(2)))]).unwrap();
        assert!(integral_certificate(&unit).is_certified());
        let m = Matrix::diag(&[p5().rational_pow(-1), p5().rational_pow(1)]);
        let r = Representation::new(p5(), vec![m]).unwrap();
        assert!(!integral_certificate(&r).is_certified());
        let triv = Representation::new(p5(), vec![Matrix::identity(2), Matrix::identity(2)]).unwrap();
        assert!(integral_certificate(&triv).is_certified());
        assert_eq!(Representation::new(p5(), vec![Matrix::zeros(1, 1)]), Err(PhiError::Singular(0)));
    }

    #[test]
    fn scan_trivial_rep() {
        let (g, b, rho) = tate(0);
        let s = bounded_sup_scan(&rho, &g, &b, 2, 6).unwrap();
        assert_eq!(s.max_exp, 0);
        let want: Vec<String> = vec!["e", "g1", "g1^-1", "g1^-2"].into_iter().map(String::from).collect();
        assert_eq!(s.level_set.iter().map(|w| w.to_string()).collect::<Vec<_>>(), want);
        assert!(matches!(s.finiteness, Finiteness::Proven { length_bound: 6, proof_constant: 3 }));
        assert_eq!(bounded_sup_scan(&rho, &g, &b, 2, 5), Err(PhiError::DepthInsufficient { required: 6 }));
        let s0 = bounded_sup_scan(&rho, &g, &b, 0, 4).unwrap();
        assert_eq!(s0.level_set, vec![FreeWord::identity()]);
        assert_eq!(s0.words_scanned, 9);
    }

    #[test]
    fn scan_interior_exponent() {
        let (g, b, rho) = tate(1);
        let s = bounded_sup_scan(&rho, &g, &b, 3, 8).unwrap();
        assert_eq!((s.max_exp, s.argmax.clone()), (0, FreeWord::identity()));
        for k in 1..=8u32 {
            let gk = FreeWord::generator(0).pow(k);
            assert_eq!(m_exp(&rho, &g, &b, &gk), -(k as i64));
            assert_eq!(m_exp(&rho, &g, &b, &gk.inverse()), -2 * k as i64);
        }
        assert_eq!(s.finiteness, Finiteness::NotProven);
        match classify_phi(&rho, &g, &b, Budget::default()).unwrap() {
            PhiVerdict::Unknown { scan, .. } => assert_eq!(scan.max_exp, 0),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn witnesses() {
        let (g, b, rho) = tate(3);
        let w = periodic_witness(&rho, &g, &b, 3, 6).unwrap().unwrap();
        assert_eq!(w.word, FreeWord::generator(0));
        assert_eq!(w.growth_exponent, Ratio::from_integer(1));
        assert_eq!(w.offset, 0);
        assert!(w.checked.iter().all(|&(k, m)| m == k as i64));
        assert!(matches!(classify_phi(&rho, &g, &b, Budget::default()).unwrap(), PhiVerdict::NotPhiBounded { .. }));
        let (g, b, rho) = tate(2);
        assert_eq!(periodic_witness(&rho, &g, &b, 4, 6).unwrap(), None);
        for k in 1..=6 {
            assert_eq!(m_exp(&rho, &g, &b, &FreeWord::generator(0).pow(k)), 0);
        }
    }

    #[test]
    fn integral_theta_is_bounded() {
        let theta = theta_graph(p5());
        let b = free_basis(&theta);
        let a = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        let c = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        let rho = Representation::new(p5(), vec![a, c]).unwrap();
        let v = classify_phi(&rho, &theta, &b, Budget::default()).unwrap();
        assert!(matches!(v, PhiVerdict::PhiBounded { .. }));
        let s = bounded_sup_scan(&rho, &theta, &b, 1, 4).unwrap();
        assert_eq!(s.max_exp, 0);
        // g1^-1 g2 and g2^-1 g1 backtrack through the tree edge and keep d_plus = p^-1
        let want: Vec<FreeWord> =
            reduced_words(2, 4).into_iter().filter(|w| d_plus(&theta, &b, w).d_plus_exp <= 1).collect();
        assert_eq!(s.level_set, want);
        assert_eq!(s.level_set.len(), 7);
    }

    #[test]
    fn generator_count_checked() {
        let theta = theta_graph(p5());
        let b = free_basis(&theta);
        let rho = Representation::new(p5(), vec![Matrix::identity(1)]).unwrap();
        assert_eq!(
            bounded_sup_scan(&rho, &theta, &b, 1, 2),
            Err(PhiError::GeneratorCount { expected: 2, found: 1 })
        );
    }
}
