//! Tensor products, duals and direct sums of representations, mod `p^n`
//! reduction towers, and isomorphism testing.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::covers::{image_group, reduce_generators, CoverError};
use crate::group::FiniteGroup;
use crate::matrix::Matrix;
use crate::normalforms::rcf;
use crate::padic::{format_rational, Rational};
use crate::phibound::{PhiError, Representation};
use crate::word::{reduced_words, FreeWord};
use crate::zmod::ZnMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("representations differ in prime, generator count or rank")]
    ShapeMismatch,
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

fn same_group(a: &Representation, b: &Representation) -> Result<(), RepError> {
    if a.prime() != b.prime() || a.generators().len() != b.generators().len() {
        return Err(RepError::ShapeMismatch);
    }
    Ok(())
}

/// Generator-wise Kronecker product.
pub fn tensor(a: &Representation, b: &Representation) -> Result<Representation, RepError> {
    same_group(a, b)?;
    let gens = a.generators().iter().zip(b.generators()).map(|(x, y)| x.kron(y)).collect();
    Ok(Representation::new(a.prime(), gens)?)
}

/// Generator-wise inverse transpose.
pub fn dual(a: &Representation) -> Representation {
    let gens = a
        .generators()
        .iter()
        .map(|g| g.inverse().expect("representation images are invertible").transpose())
        .collect();
    Representation::new(a.prime(), gens).expect("duals of invertible matrices are invertible")
}

/// Generator-wise block diagonal sum.
pub fn direct_sum(a: &Representation, b: &Representation) -> Result<Representation, RepError> {
    same_group(a, b)?;
    let gens = a.generators().iter().zip(b.generators()).map(|(x, y)| x.block_diag(y)).collect();
    Ok(Representation::new(a.prime(), gens)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerLevel {
    pub level: u32,
    pub modulus: u64,
    pub images: Vec<Vec<Vec<u64>>>,
    pub quotient_order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionTower {
    pub levels: Vec<TowerLevel>,
    /// Level `k` images reduce to level `k - 1` images.
    pub compatible: bool,
}

pub fn reduction_tower(rho: &Representation, n_max: u32, guard: usize) -> Result<ReductionTower, RepError> {
    if n_max == 0 {
        return Err(RepError::ZeroLevel);
    }
    let mut levels = Vec::new();
    let mut previous: Option<Vec<ZnMatrix>> = None;
    let mut compatible = true;
    for n in 1..=n_max {
        let (gens, _) = reduce_generators(rho, n)?;
        let q = image_group(rho, n, guard)?;
        if let Some(prev) = &previous {
            let m = prev[0].modulus();
            compatible &= gens.iter().zip(prev).all(|(g, h)| g.reduce_to(m) == *h);
        }
        levels.push(TowerLevel {
            level: n,
            modulus: gens[0].modulus(),
            images: gens.iter().map(ZnMatrix::row_vecs).collect(),
            quotient_order: q.order(),
        });
        previous = Some(gens);
    }
    Ok(ReductionTower { levels, compatible })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "invariant", rename_all = "snake_case")]
pub enum IsoWitness {
    Trace { word: FreeWord, left: String, right: String },
    InvariantFactors { word: FreeWord, left: Vec<String>, right: Vec<String> },
    /// No nonzero intertwiner.
    HomZero,
    /// The determinant of a general intertwiner vanishes on a grid of
    /// `(r + 1)^k` points, hence identically.
    SingularHom { grid_points: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoVerdict {
    /// `conjugator * rho_1(g) * conjugator^-1 = rho_2(g)` for every generator.
    Isomorphic { conjugator: Matrix },
    NotIsomorphic { witness: IsoWitness },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoReport {
    pub verdict: IsoVerdict,
    /// Dimension of the space of intertwiners `X rho_1 = rho_2 X`, when computed.
    pub hom_dimension: Option<usize>,
}

const GRID_LIMIT: u64 = 100_000;
const RANDOM_TRIES: usize = 64;

/// Intertwiner basis: solutions of `X A_i = B_i X` for all generators.
pub fn hom_space(a: &Representation, b: &Representation) -> Vec<Matrix> {
    let r = a.rank();
    let s = b.rank();
    // X is s x r; unknown x[k*r + l] = X[k][l]
    let mut rows = Vec::new();
    for (ai, bi) in a.generators().iter().zip(b.generators()) {
        for k in 0..s {
            for l in 0..r {
                let mut row = vec![Rational::zero(); s * r];
                for m in 0..r {
                    row[k * r + m] += ai.get(m, l);
                }
                for m in 0..s {
                    row[m * r + l] -= bi.get(k, m);
                }
                rows.push(row);
            }
        }
    }
    let system = Matrix::from_rows(rows).expect("uniform rows");
    system.nullspace().into_iter().map(|v| Matrix::from_fn(s, r, |k, l| v[k * r + l].clone())).collect()
}

fn combination(basis: &[Matrix], coeffs: &[i64]) -> Matrix {
    let n = basis[0].rows();
    basis.iter().zip(coeffs).fold(Matrix::zeros(n, basis[0].cols()), |acc, (m, &c)| {
        &acc + &m.scale(&Rational::from_integer(BigInt::from(c)))
    })
}

pub fn iso_check(a: &Representation, b: &Representation) -> Result<IsoReport, RepError> {
    same_group(a, b)?;
    if a.rank() != b.rank() {
        return Err(RepError::ShapeMismatch);
    }
    let short = reduced_words(a.generators().len(), 2);
    for w in &short {
        let (ta, tb) = (a.image(w).trace(), b.image(w).trace());
        if ta != tb {
            let witness = IsoWitness::Trace { word: w.clone(), left: format_rational(&ta), right: format_rational(&tb) };
            return Ok(IsoReport { verdict: IsoVerdict::NotIsomorphic { witness }, hom_dimension: None });
        }
    }
    for w in &short {
        let fa = rcf(&a.image(w)).expect("square").factors;
        let fb = rcf(&b.image(w)).expect("square").factors;
        if fa != fb {
            let show = |f: Vec<crate::poly::Poly>| f.iter().map(ToString::to_string).collect();
            let witness = IsoWitness::InvariantFactors { word: w.clone(), left: show(fa), right: show(fb) };
            return Ok(IsoReport { verdict: IsoVerdict::NotIsomorphic { witness }, hom_dimension: None });
        }
    }
    let basis = hom_space(a, b);
    let dim = Some(basis.len());
    if basis.is_empty() {
        return Ok(IsoReport { verdict: IsoVerdict::NotIsomorphic { witness: IsoWitness::HomZero }, hom_dimension: dim });
    }
    let found = |x: Matrix| -> Option<IsoReport> {
        let xinv = x.inverse()?;
        let ok = a.generators().iter().zip(b.generators()).all(|(ai, bi)| &(&x * ai) * &xinv == *bi);
        ok.then_some(IsoReport { verdict: IsoVerdict::Isomorphic { conjugator: x }, hom_dimension: dim })
    };
    let k = basis.len();
    let mut candidates: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
    for i in 0..k {
        for j in i + 1..k {
            candidates.push((0..k).map(|l| i64::from(l == i || l == j)).collect());
        }
    }
    candidates.push(vec![1; k]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..RANDOM_TRIES {
        candidates.push((0..k).map(|_| rng.gen_range(-9..=9)).collect());
    }
    for c in candidates {
        if let Some(report) = found(combination(&basis, &c)) {
            return Ok(report);
        }
    }
    // det of a general intertwiner has degree <= r in each coefficient
    let r = a.rank() as u64;
    let points = (r + 1).checked_pow(k as u32).filter(|&n| n <= GRID_LIMIT);
    if let Some(points) = points {
        let mut coeffs = vec![0i64; k];
        loop {
            let x = combination(&basis, &coeffs);
            if !x.det().is_zero() {
                if let Some(report) = found(x) {
                    return Ok(report);
                }
            }
            let mut i = 0;
            while i < k && coeffs[i] == r as i64 {
                coeffs[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
            coeffs[i] += 1;
        }
        let witness = IsoWitness::SingularHom { grid_points: points };
        return Ok(IsoReport { verdict: IsoVerdict::NotIsomorphic { witness }, hom_dimension: dim });
    }
    Ok(IsoReport { verdict: IsoVerdict::Inconclusive, hom_dimension: dim })
}

/// Trivial representation of the given rank.
pub fn trivial(prime: crate::padic::Prime, generators: usize, rank: usize) -> Representation {
    Representation::new(prime, vec![Matrix::identity(rank); generators]).expect("identity is invertible")
}

/// `P rho P^-1`.
pub fn conjugate(rho: &Representation, p: &Matrix) -> Representation {
    let pinv = p.inverse().expect("invertible conjugator");
    Representation::new(rho.prime(), rho.generators().iter().map(|g| &(p * g) * &pinv).collect())
        .expect("conjugates are invertible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::DEFAULT_GUARD;
    use crate::padic::Prime;
    use crate::phibound::integral_certificate;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn rep(pr: u64, gens: &[&[&[i64]]]) -> Representation {
        Representation::new(p(pr), gens.iter().map(|g| Matrix::from_i64(g)).collect()).unwrap()
    }

    #[test]
    fn tensor_dual_sum() {
        let a = rep(5, &[&[&[2]]]);
        let b = rep(5, &[&[&[3]]]);
        assert_eq!(tensor(&a, &b).unwrap().generators()[0], Matrix::from_i64(&[&[6]]));
        let r2 = rep(5, &[&[&[1, 1], &[0, 1]]]);
        assert_eq!(tensor(&r2, &trivial(p(5), 1, 1)).unwrap(), r2);
        let r2b = rep(5, &[&[&[2, 1], &[1, 1]]]);
        let t = tensor(&r2, &r2b).unwrap();
        assert_eq!(t.rank(), 4);
        assert!(integral_certificate(&t).is_certified());
        assert_eq!(dual(&a).generators()[0], Matrix::diag(&[Rational::new(1.into(), 2.into())]));
        assert_eq!(dual(&dual(&r2b)), r2b);
        assert!(integral_certificate(&dual(&r2b)).is_certified());
        let s = direct_sum(&trivial(p(5), 1, 1), &trivial(p(5), 1, 1)).unwrap();
        assert_eq!(s, trivial(p(5), 1, 2));
        assert_eq!(tensor(&a, &rep(3, &[&[&[2]]])), Err(RepError::ShapeMismatch));
    }

    #[test]
    fn towers() {
        let t = reduction_tower(&rep(3, &[&[&[1, 1], &[0, 1]]]), 2, DEFAULT_GUARD).unwrap();
        assert!(t.compatible);
        assert_eq!(t.levels.iter().map(|l| l.quotient_order).collect::<Vec<_>>(), vec![3, 9]);
        let t = reduction_tower(&rep(5, &[&[&[2]]]), 2, DEFAULT_GUARD).unwrap();
        assert_eq!(t.levels.iter().map(|l| l.quotient_order).collect::<Vec<_>>(), vec![4, 20]);
        let t = reduction_tower(&trivial(p(3), 2, 2), 3, DEFAULT_GUARD).unwrap();
        assert!(t.levels.iter().all(|l| l.quotient_order == 1));
    }

    #[test]
    fn isomorphisms() {
        let r = rep(5, &[&[&[1, 1], &[0, 1]], &[&[2, 1], &[1, 1]]]);
        let pm = Matrix::from_i64(&[&[1, 2], &[3, 7]]);
        let c = conjugate(&r, &pm);
        assert!(matches!(iso_check(&r, &c).unwrap().verdict, IsoVerdict::Isomorphic { .. }));
        let same = iso_check(&r, &r).unwrap();
        assert_eq!(same.verdict, IsoVerdict::Isomorphic { conjugator: Matrix::identity(2) });
        let v = iso_check(&rep(5, &[&[&[2]]]), &rep(5, &[&[&[3]]])).unwrap().verdict;
        assert!(matches!(v, IsoVerdict::NotIsomorphic { witness: IsoWitness::Trace { .. } }));
        let v = iso_check(&trivial(p(5), 1, 2), &rep(5, &[&[&[1, 1], &[0, 1]]])).unwrap().verdict;
        assert!(matches!(v, IsoVerdict::NotIsomorphic { witness: IsoWitness::InvariantFactors { .. } }));
    }

    #[test]
    fn swapped_unipotent() {
        let a = rep(5, &[&[&[1, 1], &[0, 1]], &[&[1, 0], &[0, 1]]]);
        let b = rep(5, &[&[&[1, 0], &[0, 1]], &[&[1, 1], &[0, 1]]]);
        let report = iso_check(&a, &b).unwrap();
        assert!(matches!(report.verdict, IsoVerdict::NotIsomorphic { .. }), "{report:?}");
    }

    #[test]
    fn split_versus_nonsplit_extension() {
        // same diagonal characters; the second pair has no common complement
        let a = rep(5, &[&[&[2, 0], &[0, 3]], &[&[1, 0], &[0, 2]]]);
        let b = rep(5, &[&[&[2, 0], &[0, 3]], &[&[1, 1], &[0, 2]]]);
        let report = iso_check(&a, &b).unwrap();
        assert_eq!(report.hom_dimension, Some(1));
        assert_eq!(report.verdict, IsoVerdict::NotIsomorphic { witness: IsoWitness::SingularHom { grid_points: 3 } });
    }
}
