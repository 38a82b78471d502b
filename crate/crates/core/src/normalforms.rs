//! Characteristic polynomials, rational canonical forms, integral conjugates,
//! 2x2 p-adic diagonalisation and normal forms of generic 2x2 pairs.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::padic::{
    format_rational, hensel_sqrt, rational_sqrt, valuation, ApproxScalar, PadicError, Prime, Rational, Valuation,
};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("expected a 2x2 matrix")]
    NotTwoByTwo,
    #[error("eigenvalues do not lie in Q_p")]
    NotSplitOverBase,
    #[error("repeated eigenvalue with a nontrivial Jordan block")]
    NotSemisimple,
    #[error("traceless part of A squares to zero")]
    DegenerateT,
    #[error("invariant c vanishes")]
    DegenerateC,
    #[error("1/2 tr A'^2 is neither a rational nor a p-adic square")]
    SqrtUnavailable,
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("could not reach the requested precision")]
    PrecisionNotReached,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// A p-adic number that is either known exactly or to finitely many digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PadicNumber {
    Exact(Rational),
    Approx(ApproxScalar),
}

impl PadicNumber {
    /// The exact value, or the rational truncation of the approximation.
    pub fn value(&self) -> Rational {
        match self {
            PadicNumber::Exact(x) => x.clone(),
            PadicNumber::Approx(a) => a.to_rational(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PadicNumber::Exact(_))
    }
}

impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PadicNumber::Exact(x) => s.serialize_str(&format_rational(x)),
            PadicNumber::Approx(a) => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("precision", &a.precision)?;
                m.serialize_entry("unit_residue", &a.unit_residue.to_string())?;
                m.serialize_entry("valuation", &a.valuation)?;
                m.end()
            }
        }
    }
}

pub fn char_poly(m: &Matrix) -> Result<Poly, NormalFormError> {
    if !m.is_square() {
        return Err(NormalFormError::NotSquare);
    }
    Ok(m.char_poly())
}

/// Companion matrix: subdiagonal ones, last column `-a_0, ..., -a_(d-1)`.
pub fn companion(q: &Poly) -> Matrix {
    let d = q.degree().expect("nonzero polynomial");
    let q = q.monic();
    Matrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -q.coeff(i)
        } else if i == j + 1 {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// Coefficients of `t` in the span of the independent columns `k`, if any.
fn solve_in_span(k: &[Vec<Rational>], t: &[Rational]) -> Option<Vec<Rational>> {
    let mut cols = k.to_vec();
    cols.push(t.to_vec());
    let (r, pivots) = Matrix::from_columns(&cols).rref();
    if pivots.contains(&k.len()) {
        return None;
    }
    Some((0..k.len()).map(|i| r.get(i, k.len()).clone()).collect())
}

/// Krylov basis `v, Av, ...` and the monic minimal polynomial of `v`.
fn local_min_poly(a: &Matrix, v: &[Rational]) -> (Vec<Vec<Rational>>, Poly) {
    let mut krylov: Vec<Vec<Rational>> = Vec::new();
    let mut cur = v.to_vec();
    loop {
        if let Some(c) = solve_in_span(&krylov, &cur) {
            let mut coeffs: Vec<Rational> = c.into_iter().map(|x| -x).collect();
            coeffs.push(Rational::one());
            return (krylov, Poly::new(coeffs));
        }
        let next = a.mul_vec(&cur);
        krylov.push(cur);
        cur = next;
    }
}

fn unit_vector(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()
}

/// A vector whose local minimal polynomial is the minimal polynomial of `a`.
/// Vectors with a smaller local polynomial lie in at most `n` proper
/// subspaces, each meeting the moment curve in fewer than `n` points.
fn maximal_vector(a: &Matrix) -> (Vec<Vec<Rational>>, Poly) {
    let n = a.rows();
    let mu = (0..n).fold(Poly::one(), |acc, i| acc.lcm(&local_min_poly(a, &unit_vector(n, i)).1));
    let target = mu.degree().unwrap_or(0);
    for c in 0..=(n * n + 1) as i64 {
        let v: Vec<Rational> = (0..n).map(|i| Rational::from_integer(BigInt::from(c).pow(i as u32))).collect();
        let (k, q) = local_min_poly(a, &v);
        if q.degree() == Some(target) {
            return (k, q);
        }
    }
    unreachable!("moment curve always meets a maximal vector")
}

/// Cyclic decomposition `(Q_i, Krylov basis)` with the largest factor first.
fn cyclic_decomposition(a: &Matrix) -> Vec<(Poly, Vec<Vec<Rational>>)> {
    let n = a.rows();
    if n == 0 {
        return Vec::new();
    }
    let (krylov, q) = maximal_vector(a);
    let d = krylov.len();
    if d == n {
        return vec![(q, krylov)];
    }
    // f vanishes on A^i v for i < d - 1 and is 1 on A^(d-1) v, so the Hankel
    // matrix f(A^(i+j) v) is anti-triangular with unit anti-diagonal.
    let mut basis = krylov.clone();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let e = unit_vector(n, i);
        if solve_in_span(&basis, &e).is_none() {
            basis.push(e);
        }
    }
    let binv = Matrix::from_columns(&basis).inverse().expect("completed basis");
    let mut f: Vec<Rational> = (0..n).map(|j| binv.get(d - 1, j).clone()).collect();
    let mut rows = Vec::with_capacity(d);
    for _ in 0..d {
        rows.push(f.clone());
        // f <- f A
        f = (0..n).map(|j| (0..n).fold(Rational::zero(), |acc, k| acc + &f[k] * a.get(k, j))).collect();
    }
    let complement = Matrix::from_rows(rows).expect("d rows of length n").nullspace();
    debug_assert_eq!(complement.len(), n - d);
    // A restricted to the complement, in the coordinates of its basis
    let mut full = krylov.clone();
    full.extend(complement.iter().cloned());
    let finv = Matrix::from_columns(&full).inverse().expect("direct sum");
    let sub = Matrix::from_fn(n - d, n - d, |i, j| {
        let img = a.mul_vec(&complement[j]);
        (0..n).fold(Rational::zero(), |acc, k| acc + finv.get(d + i, k) * &img[k])
    });
    let mut out = vec![(q, krylov)];
    for (qi, ki) in cyclic_decomposition(&sub) {
        let lifted = ki
            .iter()
            .map(|c| (0..n).map(|r| (0..n - d).fold(Rational::zero(), |acc, j| acc + &c[j] * &complement[j][r])).collect())
            .collect();
        out.push((qi, lifted));
    }
    out
}

/// Invariant factors `Q_1 | Q_2 | ... | Q_s`, the block-diagonal companion
/// form and `P` with `P M P^-1 = canonical`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rcf {
    pub factors: Vec<Poly>,
    pub canonical: Matrix,
    pub conjugator: Matrix,
}

pub fn rcf(m: &Matrix) -> Result<Rcf, NormalFormError> {
    if !m.is_square() {
        return Err(NormalFormError::NotSquare);
    }
    let mut parts = cyclic_decomposition(m);
    parts.reverse();
    let factors: Vec<Poly> = parts.iter().map(|(q, _)| q.clone()).collect();
    let canonical = factors
        .iter()
        .map(companion)
        .reduce(|acc, c| acc.block_diag(&c))
        .unwrap_or_else(|| Matrix::zeros(0, 0));
    let columns: Vec<Vec<Rational>> = parts.into_iter().flat_map(|(_, k)| k).collect();
    let conjugator = Matrix::from_columns(&columns).inverse().expect("cyclic bases span");
    Ok(Rcf { factors, canonical, conjugator })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegralConjugacy {
    /// `conjugator * M * conjugator^-1 = conjugate`, which is integral.
    Yes { conjugate: Matrix, conjugator: Matrix },
    /// Coefficient of `X^degree` in the characteristic polynomial is not integral.
    No { degree: usize, coefficient: Rational, valuation: i64 },
}

/// `M` is conjugate to an integral matrix iff its characteristic polynomial
/// is integral. Integral inputs are returned unchanged; otherwise the
/// conjugate is the rational canonical form.
pub fn integral_conjugacy(m: &Matrix, p: Prime) -> Result<IntegralConjugacy, NormalFormError> {
    let chi = char_poly(m)?;
    for (i, c) in chi.coeffs().iter().enumerate() {
        if let Valuation::Finite(v) = valuation(c, p) {
            if v < 0 {
                return Ok(IntegralConjugacy::No { degree: i, coefficient: c.clone(), valuation: v });
            }
        }
    }
    if m.is_integral(p) {
        return Ok(IntegralConjugacy::Yes { conjugate: m.clone(), conjugator: Matrix::identity(m.rows()) });
    }
    let r = rcf(m)?;
    Ok(IntegralConjugacy::Yes { conjugate: r.canonical, conjugator: r.conjugator })
}

fn two() -> Rational {
    Rational::from_integer(BigInt::from(2))
}

/// Valuation of a nonzero rational; zero counts as 0, which is only used
/// for sizing precision margins.
fn val(x: &Rational, p: Prime) -> i64 {
    valuation(x, p).finite().unwrap_or(0)
}

/// Eigenvalues of a semisimple 2x2 matrix whose spectrum lies in `Q_p`,
/// larger norm first, each to `precision` significant digits.
pub fn jordan_padic(m: &Matrix, p: Prime, precision: u32) -> Result<[PadicNumber; 2], NormalFormError> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(NormalFormError::NotTwoByTwo);
    }
    if precision == 0 {
        return Err(NormalFormError::ZeroPrecision);
    }
    let (t, d) = (m.trace(), m.det());
    let disc = &t * &t - &d * Rational::from_integer(BigInt::from(4));
    let order = |a: Rational, b: Rational| if valuation(&a, p) <= valuation(&b, p) { (a, b) } else { (b, a) };
    if disc.is_zero() {
        if !m.is_scalar() {
            return Err(NormalFormError::NotSemisimple);
        }
        let l = m.get(0, 0).clone();
        return Ok([PadicNumber::Exact(l.clone()), PadicNumber::Exact(l)]);
    }
    if let Some(s) = rational_sqrt(&disc) {
        let (a, b) = order((&t + &s) / two(), (&t - &s) / two());
        return Ok([PadicNumber::Exact(a), PadicNumber::Exact(b)]);
    }
    if p.get() == 2 {
        return Err(PadicError::EvenPrimeUnsupported.into());
    }
    if val(&disc, p) % 2 != 0 {
        return Err(NormalFormError::NotSplitOverBase);
    }
    let extra = 2 * (val(&disc, p).unsigned_abs() + val(&t, p).unsigned_abs() + val(&d, p).unsigned_abs()) as u32 + 4;
    let s = match hensel_sqrt(&disc, p, precision + extra) {
        Ok(s) => s.to_rational(),
        Err(PadicError::NonResidue) => return Err(NormalFormError::NotSplitOverBase),
        Err(e) => return Err(e.into()),
    };
    let (big, _) = order((&t + &s) / two(), (&t - &s) / two());
    let small = &d / &big;
    Ok([
        PadicNumber::Approx(ApproxScalar::from_rational(&big, p, precision)?),
        PadicNumber::Approx(ApproxScalar::from_rational(&small, p, precision)?),
    ])
}

/// Normal form `(diag(t, -t), [[s, 1], [c, -s]])` of the traceless parts
/// of a generic pair, with `conjugator * A' * conjugator^-1 = diag(t, -t)`
/// and likewise for `B'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairClassification {
    pub t: PadicNumber,
    pub s: PadicNumber,
    pub c: Rational,
    pub shift_a: Rational,
    pub shift_b: Rational,
    pub canonical_a: Matrix,
    pub canonical_b: Matrix,
    pub conjugator: Matrix,
    /// `None` when exact; otherwise the conjugation holds modulo `p^N`.
    pub precision: Option<u32>,
}

fn traceless(m: &Matrix) -> (Rational, Matrix) {
    let shift = m.trace() / two();
    (shift.clone(), m - &Matrix::scalar(2, &shift))
}

/// An eigenvector of traceless `a` with eigenvalue `l`, where `a^2 = l^2`:
/// a column of `a + l` that is not too close to zero, scaled to lead with 1.
fn eigenvector(a: &Matrix, l: &Rational, p: Prime) -> Vec<Rational> {
    let shifted = a + &Matrix::scalar(2, l);
    let cols = [shifted.column(0), shifted.column(1)];
    let size = |c: &Vec<Rational>| c.iter().map(|x| valuation(x, p)).min().expect("two entries");
    let col = if size(&cols[0]) <= size(&cols[1]) { &cols[0] } else { &cols[1] };
    let lead = col.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(Rational::one);
    col.iter().map(|x| x / &lead).collect()
}

/// Conjugator and canonical pair for a given root `t` of `1/2 tr A'^2`.
fn normalise(a: &Matrix, b: &Matrix, t: &Rational, p: Prime) -> Option<(Matrix, Rational, Matrix, Matrix)> {
    let q = Matrix::from_columns(&[eigenvector(a, t, p), eigenvector(a, &-t, p)]);
    let qinv = q.inverse()?;
    let bq = &(&qinv * b) * &q;
    let x = bq.get(0, 1).clone();
    if x.is_zero() {
        return None;
    }
    let s = Matrix::from_columns(&[q.column(0), q.column(1).iter().map(|y| y / &x).collect()]);
    let conj = s.inverse()?;
    let ca = &(&conj * a) * &s;
    let cb = &(&conj * b) * &s;
    Some((conj, x, ca, cb))
}

fn residual(m: &Matrix, target: &Matrix, p: Prime) -> Valuation {
    (m - target).min_valuation(p)
}

pub fn pair_classify(a: &Matrix, b: &Matrix, p: Prime, precision: u32) -> Result<PairClassification, NormalFormError> {
    for m in [a, b] {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(NormalFormError::NotTwoByTwo);
        }
    }
    if precision == 0 {
        return Err(NormalFormError::ZeroPrecision);
    }
    let (shift_a, a1) = traceless(a);
    let (shift_b, b1) = traceless(b);
    let t2 = (&a1 * &a1).trace() / two();
    if t2.is_zero() {
        return Err(NormalFormError::DegenerateT);
    }
    let x = (&a1 * &b1).trace();
    // c = 1/2 tr B'^2 - (tr A'B')^2 / (4 t^2) is exact even when t is not
    let c = (&b1 * &b1).trace() / two() - &x * &x / (Rational::from_integer(BigInt::from(4)) * &t2);
    if c.is_zero() {
        return Err(NormalFormError::DegenerateC);
    }
    let canonical = |t: &Rational, s: &Rational| {
        let z = Rational::zero;
        (
            Matrix::from_rows(vec![vec![t.clone(), z()], vec![z(), -t]]).expect("2x2"),
            Matrix::from_rows(vec![vec![s.clone(), Rational::one()], vec![c.clone(), -s]]).expect("2x2"),
        )
    };
    if let Some(t) = rational_sqrt(&t2) {
        let t = t.abs();
        let s = &x / (two() * &t);
        let (conj, _, ca, cb) = normalise(&a1, &b1, &t, p).ok_or(NormalFormError::DegenerateC)?;
        let (want_a, want_b) = canonical(&t, &s);
        if ca != want_a || cb != want_b {
            return Err(NormalFormError::PrecisionNotReached);
        }
        return Ok(PairClassification {
            t: PadicNumber::Exact(t),
            s: PadicNumber::Exact(s),
            c,
            shift_a,
            shift_b,
            canonical_a: want_a,
            canonical_b: want_b,
            conjugator: conj,
            precision: None,
        });
    }
    if p.get() == 2 {
        return Err(NormalFormError::SqrtUnavailable);
    }
    let mut internal = precision + 4;
    for _ in 0..8 {
        let t_approx = match hensel_sqrt(&t2, p, internal) {
            Ok(t) => t,
            Err(PadicError::NonResidue | PadicError::OddValuation(_)) => return Err(NormalFormError::SqrtUnavailable),
            Err(e) => return Err(e.into()),
        };
        let t = t_approx.to_rational();
        let s = &x / (two() * &t);
        if let Some((conj, _, ca, cb)) = normalise(&a1, &b1, &t, p) {
            let (want_a, want_b) = canonical(&t, &s);
            let need = Valuation::Finite(precision as i64);
            if residual(&ca, &want_a, p) >= need && residual(&cb, &want_b, p) >= need {
                let s_num = if s.is_zero() {
                    PadicNumber::Exact(s)
                } else {
                    PadicNumber::Approx(ApproxScalar::from_rational(&s, p, precision)?)
                };
                return Ok(PairClassification {
                    t: PadicNumber::Approx(ApproxScalar::from_rational(&t, p, precision)?),
                    s: s_num,
                    c,
                    shift_a,
                    shift_b,
                    canonical_a: want_a,
                    canonical_b: want_b,
                    conjugator: conj,
                    precision: Some(precision),
                });
            }
        }
        internal *= 2;
    }
    Err(NormalFormError::PrecisionNotReached)
}
