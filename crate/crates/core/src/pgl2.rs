//! Elements of `PGL_2(Q_p)`: dynamical type, fixed points, the Tate and
//! Whittaker generator sets, and a ping-pong test on discs of `P^1(Q_p)`.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::matrix::Matrix;
use crate::padic::{hensel_sqrt, rational_sqrt, valuation, PadicError, Prime, Rational, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Pgl2Error {
    #[error("expected a 2x2 matrix")]
    NotTwoByTwo,
    #[error("matrix is singular")]
    Singular,
    #[error("element is not hyperbolic")]
    NotHyperbolic,
    #[error("multiplier must satisfy 0 < |q| < 1")]
    BadMultiplier,
    #[error("element {0} is not an involution of PGL_2")]
    NotInvolution(usize),
    #[error("involutions {0} and {1} coincide in PGL_2")]
    RepeatedInvolution(usize, usize),
    #[error("need at least two involutions, got {0}")]
    TooFewInvolutions(usize),
    #[error("the pole of the map lies in the ball")]
    PoleInBall,
    #[error("balls {0} and {1} are not disjoint")]
    BallsNotDisjoint(usize, usize),
    #[error("{generators} generators but {pairs} ball pairs")]
    LengthMismatch { generators: usize, pairs: usize },
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// An invertible 2x2 matrix, taken up to scalars.
#[derive(Debug, Clone, Eq)]
pub struct MoebiusElement {
    prime: Prime,
    matrix: Matrix,
}

impl PartialEq for MoebiusElement {
    /// Projective equality.
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime && proportional(&self.matrix, &other.matrix)
    }
}

fn proportional(a: &Matrix, b: &Matrix) -> bool {
    let av: Vec<&Rational> = a.entries().collect();
    let bv: Vec<&Rational> = b.entries().collect();
    (0..4).all(|i| (0..4).all(|j| av[i] * bv[j] == av[j] * bv[i]))
}

impl MoebiusElement {
    pub fn new(matrix: Matrix, prime: Prime) -> Result<Self, Pgl2Error> {
        if matrix.rows() != 2 || matrix.cols() != 2 {
            return Err(Pgl2Error::NotTwoByTwo);
        }
        if matrix.det().is_zero() {
            return Err(Pgl2Error::Singular);
        }
        Ok(MoebiusElement { prime, matrix })
    }

    pub fn from_i64(rows: [[i64; 2]; 2], prime: Prime) -> Result<Self, Pgl2Error> {
        MoebiusElement::new(Matrix::from_i64(&[&rows[0], &rows[1]]), prime)
    }

    pub fn identity(prime: Prime) -> Self {
        MoebiusElement { prime, matrix: Matrix::identity(2) }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    fn entry(&self, i: usize, j: usize) -> &Rational {
        self.matrix.get(i, j)
    }

    pub fn trace(&self) -> Rational {
        self.matrix.trace()
    }

    pub fn det(&self) -> Rational {
        self.matrix.det()
    }

    pub fn compose(&self, other: &MoebiusElement) -> MoebiusElement {
        assert_eq!(self.prime, other.prime);
        MoebiusElement { prime: self.prime, matrix: &self.matrix * &other.matrix }
    }

    /// Inverse in `PGL_2`, represented by the adjugate.
    pub fn inverse(&self) -> MoebiusElement {
        let (a, b, c, d) = (self.entry(0, 0), self.entry(0, 1), self.entry(1, 0), self.entry(1, 1));
        let m = Matrix::from_rows(vec![vec![d.clone(), -b.clone()], vec![-c.clone(), a.clone()]]).unwrap();
        MoebiusElement { prime: self.prime, matrix: m }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_scalar()
    }

    pub fn apply(&self, z: &ProjPoint) -> ProjPoint {
        let (a, b, c, d) = (self.entry(0, 0), self.entry(0, 1), self.entry(1, 0), self.entry(1, 1));
        ProjPoint::new(a * &z.x + b * &z.y, c * &z.x + d * &z.y).expect("invertible map")
    }

    /// The point sent to infinity.
    pub fn pole(&self) -> ProjPoint {
        ProjPoint::new(-self.entry(1, 1).clone(), self.entry(1, 0).clone()).expect("invertible map")
    }
}

/// A point `(x : y)` of the projective line, normalised to `(z : 1)` or `(1 : 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    x: Rational,
    y: Rational,
}

impl ProjPoint {
    pub fn new(x: Rational, y: Rational) -> Option<ProjPoint> {
        if y.is_zero() {
            if x.is_zero() {
                return None;
            }
            return Some(ProjPoint::infinity());
        }
        Some(ProjPoint { x: x / &y, y: Rational::one() })
    }

    pub fn affine(z: Rational) -> ProjPoint {
        ProjPoint { x: z, y: Rational::one() }
    }

    pub fn infinity() -> ProjPoint {
        ProjPoint { x: Rational::one(), y: Rational::zero() }
    }

    pub fn is_infinity(&self) -> bool {
        self.y.is_zero()
    }

    /// Affine coordinate, `None` at infinity.
    pub fn coordinate(&self) -> Option<&Rational> {
        (!self.is_infinity()).then_some(&self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum Classification {
    Hyperbolic { translation_length: i64 },
    Parabolic,
    EllipticOrFiniteOrder,
}

/// Dynamical type from the valuations of trace and determinant: the
/// eigenvalues have distinct norms exactly when `2 v(tr) < v(det)`.
pub fn classify(g: &MoebiusElement) -> Classification {
    let p = g.prime;
    let (tr, det) = (g.trace(), g.det());
    let vdet = valuation(&det, p).finite().expect("det is nonzero");
    if let Valuation::Finite(vtr) = valuation(&tr, p) {
        if 2 * vtr < vdet {
            return Classification::Hyperbolic { translation_length: vdet - 2 * vtr };
        }
    }
    if !g.is_identity() && &tr * &tr == det * Rational::from_integer(4.into()) {
        return Classification::Parabolic;
    }
    Classification::EllipticOrFiniteOrder
}

/// Attracting and repelling fixed points of a hyperbolic element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoints {
    pub attracting: ProjPoint,
    pub repelling: ProjPoint,
    /// `None` when exact; otherwise the eigenvalues were Hensel-lifted to
    /// this many p-adic digits.
    pub precision: Option<u32>,
}

fn eigen_direction(m: &Matrix, lambda: &Rational) -> ProjPoint {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    ProjPoint::new(b.clone(), lambda - a)
        .or_else(|| ProjPoint::new(lambda - d, c.clone()))
        .expect("lambda is an eigenvalue of a non-scalar matrix")
}

/// Fixed points, attracting first. Exact when the eigenvalues are rational;
/// otherwise they are Hensel-lifted to `precision` digits (odd `p` only).
pub fn fixed_points(g: &MoebiusElement, precision: u32) -> Result<FixedPoints, Pgl2Error> {
    if !matches!(classify(g), Classification::Hyperbolic { .. }) {
        return Err(Pgl2Error::NotHyperbolic);
    }
    let p = g.prime;
    let (tr, det) = (g.trace(), g.det());
    let disc = &tr * &tr - &det * Rational::from_integer(4.into());
    let two = Rational::from_integer(2.into());
    let (root, approx) = match rational_sqrt(&disc) {
        Some(s) => (s, None),
        None => {
            let v_tr = valuation(&tr, p).finite().expect("hyperbolic trace is nonzero");
            // extra digits so the smaller root keeps `precision` digits as well
            let gap = (valuation(&det, p).finite().expect("det is nonzero") - 2 * v_tr) as u32;
            let s = hensel_sqrt(&disc, p, precision + gap)?;
            (s.to_rational(), Some(precision))
        }
    };
    let l1 = (&tr + &root) / &two;
    let l2 = (&tr - &root) / &two;
    // larger eigenvalue norm attracts
    let (big, small) = if valuation(&l1, p) <= valuation(&l2, p) { (l1, l2) } else { (l2, l1) };
    let small = if approx.is_some() { &det / &big } else { small };
    Ok(FixedPoints {
        attracting: eigen_direction(&g.matrix, &big),
        repelling: eigen_direction(&g.matrix, &small),
        precision: approx,
    })
}

/// Generator `diag(q, 1)` of the Tate group.
pub fn tate_group(q: &Rational, p: Prime) -> Result<Vec<MoebiusElement>, Pgl2Error> {
    match valuation(q, p) {
        Valuation::Finite(v) if v > 0 => {
            Ok(vec![MoebiusElement::new(Matrix::diag(&[q.clone(), Rational::one()]), p)?])
        }
        _ => Err(Pgl2Error::BadMultiplier),
    }
}

/// Free generators `s_1 s_0, ..., s_g s_0` of the Whittaker group attached to
/// involutions `s_0, ..., s_g`.
pub fn whittaker_group(involutions: &[MoebiusElement]) -> Result<Vec<MoebiusElement>, Pgl2Error> {
    if involutions.len() < 2 {
        return Err(Pgl2Error::TooFewInvolutions(involutions.len()));
    }
    for (i, s) in involutions.iter().enumerate() {
        if s.is_identity() || !s.compose(s).is_identity() {
            return Err(Pgl2Error::NotInvolution(i));
        }
    }
    for i in 0..involutions.len() {
        for j in i + 1..involutions.len() {
            if involutions[i] == involutions[j] {
                return Err(Pgl2Error::RepeatedInvolution(i, j));
            }
        }
    }
    let s0 = &involutions[0];
    Ok(involutions[1..].iter().map(|s| s.compose(s0)).collect())
}

/// A disc of `P^1(Q_p)`: the closed ball `{z : v(z - c) >= r}`, or with
/// `complement` set, its complement `{z : v(z - c) < r} u {inf}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PadicBall {
    #[serde(serialize_with = "crate::padic::ser_rational")]
    pub center: Rational,
    pub radius_exp: i64,
    pub complement: bool,
}

impl PadicBall {
    pub fn closed(center: Rational, radius_exp: i64) -> Self {
        PadicBall { center, radius_exp, complement: false }
    }

    pub fn outside(center: Rational, radius_exp: i64) -> Self {
        PadicBall { center, radius_exp, complement: true }
    }

    pub fn complement(&self) -> Self {
        PadicBall { complement: !self.complement, ..self.clone() }
    }

    fn bounded(&self) -> Self {
        PadicBall { complement: false, ..self.clone() }
    }

    fn vdist_p(&self, z: &Rational, p: Prime) -> Valuation {
        valuation(&(z - &self.center), p)
    }

    pub fn contains(&self, z: &ProjPoint, p: Prime) -> bool {
        let inside_ball = match z.coordinate() {
            None => false,
            Some(x) => self.vdist_p(x, p) >= Valuation::Finite(self.radius_exp),
        };
        inside_ball != self.complement
    }

    pub fn subset_of(&self, other: &PadicBall, p: Prime) -> bool {
        match (self.complement, other.complement) {
            (false, false) => {
                self.radius_exp >= other.radius_exp
                    && other.vdist_p(&self.center, p) >= Valuation::Finite(other.radius_exp)
            }
            (false, true) => self.disjoint_from(&other.bounded(), p),
            (true, false) => false,
            (true, true) => other.bounded().subset_of(&self.bounded(), p),
        }
    }

    pub fn disjoint_from(&self, other: &PadicBall, p: Prime) -> bool {
        match (self.complement, other.complement) {
            (false, false) => {
                other.vdist_p(&self.center, p) < Valuation::Finite(self.radius_exp.min(other.radius_exp))
            }
            (false, true) => self.subset_of(&other.bounded(), p),
            (true, false) => other.subset_of(&self.bounded(), p),
            (true, true) => false,
        }
    }

    pub fn same_set(&self, other: &PadicBall, p: Prime) -> bool {
        self.subset_of(other, p) && other.subset_of(self, p)
    }

    fn affine_image(&self, alpha: &Rational, beta: &Rational, p: Prime) -> PadicBall {
        let shift = valuation(alpha, p).finite().expect("nonzero scale");
        PadicBall { center: alpha * &self.center + beta, radius_exp: self.radius_exp + shift, complement: self.complement }
    }

    fn inversion_image(&self, p: Prime) -> PadicBall {
        let r = self.radius_exp;
        let image = match valuation(&self.center, p) {
            Valuation::Finite(vc) if vc < r => PadicBall::closed(self.center.recip(), r - 2 * vc),
            _ => PadicBall::outside(Rational::zero(), 1 - r),
        };
        if self.complement {
            image.complement()
        } else {
            image
        }
    }
}

/// Image of any disc under `g`; always a disc of `P^1(Q_p)`.
pub fn disc_image(g: &MoebiusElement, disc: &PadicBall) -> PadicBall {
    let p = g.prime;
    let (a, b, c, d) = (g.entry(0, 0), g.entry(0, 1), g.entry(1, 0), g.entry(1, 1));
    if c.is_zero() {
        return disc.affine_image(&(a / d), &(b / d), p);
    }
    // z -> cz + d -> 1/w -> -det/c * w + a/c
    let det = g.det();
    let step = disc.affine_image(c, d, p).inversion_image(p);
    step.affine_image(&(-det / c), &(a / c), p)
}

/// Image of a ball that avoids the pole of `g`.
pub fn ball_image(g: &MoebiusElement, ball: &PadicBall) -> Result<PadicBall, Pgl2Error> {
    if ball.contains(&g.pole(), g.prime) {
        return Err(Pgl2Error::PoleInBall);
    }
    Ok(disc_image(g, ball))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum SchottkyVerdict {
    GoodPosition,
    Violation { generator: usize, detail: String },
}

/// Ping-pong check: for each generator `g_i` with discs `(B_i^-, B_i^+)`,
/// `g_i` must map the complement of `B_i^-` strictly into `B_i^+` and
/// `g_i^{-1}` the complement of `B_i^+` strictly into `B_i^-`, all discs
/// pairwise disjoint. Success certifies a free discontinuous group; failure
/// is not a proof of the converse.
pub fn schottky_ball_check(
    generators: &[MoebiusElement],
    domains: &[(PadicBall, PadicBall)],
) -> Result<SchottkyVerdict, Pgl2Error> {
    if generators.len() != domains.len() {
        return Err(Pgl2Error::LengthMismatch { generators: generators.len(), pairs: domains.len() });
    }
    let Some(p) = generators.first().map(MoebiusElement::prime) else {
        return Ok(SchottkyVerdict::GoodPosition);
    };
    let discs: Vec<&PadicBall> = domains.iter().flat_map(|(m, pl)| [m, pl]).collect();
    for i in 0..discs.len() {
        for j in i + 1..discs.len() {
            if !discs[i].disjoint_from(discs[j], p) {
                return Err(Pgl2Error::BallsNotDisjoint(i, j));
            }
        }
    }
    for (i, (g, (minus, plus))) in generators.iter().zip(domains).enumerate() {
        let checks = [(g.clone(), minus, plus, "g"), (g.inverse(), plus, minus, "g^-1")];
        for (map, source, target, name) in checks {
            let image = disc_image(&map, &source.complement());
            if !image.subset_of(target, p) {
                return Ok(SchottkyVerdict::Violation {
                    generator: i,
                    detail: format!("{name} does not map the complement of its source disc into its target disc"),
                });
            }
            if image.same_set(target, p) {
                return Ok(SchottkyVerdict::Violation {
                    generator: i,
                    detail: format!("{name} maps the complement of its source disc onto its target disc"),
                });
            }
        }
    }
    Ok(SchottkyVerdict::GoodPosition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn m(rows: [[i64; 2]; 2], prime: u64) -> MoebiusElement {
        MoebiusElement::from_i64(rows, p(prime)).unwrap()
    }

    #[test]
    fn classify_examples() {
        let g = MoebiusElement::new(Matrix::diag(&[q(25, 1), q(1, 1)]), p(5)).unwrap();
        assert_eq!(classify(&g), Classification::Hyperbolic { translation_length: 2 });
        assert_eq!(classify(&m([[1, 1], [0, 1]], 5)), Classification::Parabolic);
        assert_eq!(classify(&m([[0, 1], [1, 0]], 5)), Classification::EllipticOrFiniteOrder);
        assert_eq!(classify(&MoebiusElement::identity(p(5))), Classification::EllipticOrFiniteOrder);
    }

    #[test]
    fn fixed_point_examples() {
        let g = MoebiusElement::new(Matrix::diag(&[q(5, 1), q(1, 1)]), p(5)).unwrap();
        let fp = fixed_points(&g, 4).unwrap();
        assert_eq!(fp.attracting, ProjPoint::affine(q(0, 1)));
        assert_eq!(fp.repelling, ProjPoint::infinity());
        assert_eq!(fp.precision, None);
        // X^2 - (p+2)X + 1 has both roots of valuation 0
        assert_eq!(fixed_points(&m([[6, 5], [1, 1]], 5), 4), Err(Pgl2Error::NotHyperbolic));
        assert_eq!(fixed_points(&m([[1, 1], [0, 1]], 5), 4), Err(Pgl2Error::NotHyperbolic));
    }

    #[test]
    fn approximate_fixed_points_are_nearly_fixed() {
        // tr = 1, det = 5: hyperbolic at 5, disc = -19 is not a rational square
        let g = m([[1, 1], [-5, 0]], 5);
        let fp = fixed_points(&g, 6).unwrap();
        assert_eq!(fp.precision, Some(6));
        for z in [&fp.attracting, &fp.repelling] {
            let x = z.coordinate().unwrap();
            let moved = g.apply(z);
            let diff = moved.coordinate().unwrap() - x;
            assert!(valuation(&diff, p(5)) >= Valuation::Finite(5));
        }
    }

    #[test]
    fn tate_examples() {
        let gens = tate_group(&q(5, 1), p(5)).unwrap();
        assert_eq!(gens, vec![MoebiusElement::new(Matrix::diag(&[q(5, 1), q(1, 1)]), p(5)).unwrap()]);
        assert_eq!(tate_group(&q(1, 5), p(5)), Err(Pgl2Error::BadMultiplier));
        assert_eq!(tate_group(&q(0, 1), p(5)), Err(Pgl2Error::BadMultiplier));
        let g = &tate_group(&q(18, 1), p(3)).unwrap()[0];
        assert_eq!(classify(g), Classification::Hyperbolic { translation_length: 2 });
    }

    #[test]
    fn whittaker_examples() {
        let s0 = m([[0, 1], [1, 0]], 5);
        let s1 = m([[0, 5], [1, 0]], 5);
        let gens = whittaker_group(&[s0.clone(), s1.clone()]).unwrap();
        assert_eq!(gens, vec![MoebiusElement::new(Matrix::diag(&[q(5, 1), q(1, 1)]), p(5)).unwrap()]);
        assert_eq!(whittaker_group(&[s0.clone(), m([[1, 1], [0, 1]], 5)]), Err(Pgl2Error::NotInvolution(1)));
        let s2 = m([[1, 25], [1, -1]], 5);
        let gens = whittaker_group(&[s0.clone(), s1, s2.clone()]).unwrap();
        assert_eq!(gens.len(), 2);
        assert_eq!(gens[1], s2.compose(&s0));
        assert_eq!(whittaker_group(&[s0.clone(), s0.clone()]), Err(Pgl2Error::RepeatedInvolution(0, 1)));
    }

    #[test]
    fn ball_image_examples() {
        let five = p(5);
        let shift = m([[1, 1], [0, 1]], 5);
        assert_eq!(ball_image(&shift, &PadicBall::closed(q(0, 1), 1)).unwrap(), PadicBall::closed(q(1, 1), 1));
        let scale = m([[5, 0], [0, 1]], 5);
        assert_eq!(ball_image(&scale, &PadicBall::closed(q(0, 1), 0)).unwrap(), PadicBall::closed(q(0, 1), 1));
        let inv = m([[0, 1], [1, 0]], 5);
        let img = ball_image(&inv, &PadicBall::closed(q(1, 1), 1)).unwrap();
        assert!(img.same_set(&PadicBall::closed(q(1, 1), 1), five));
        assert_eq!(ball_image(&inv, &PadicBall::closed(q(0, 1), 1)), Err(Pgl2Error::PoleInBall));
        // the pole at infinity sits in every complement
        assert_eq!(ball_image(&scale, &PadicBall::outside(q(0, 1), 0)), Err(Pgl2Error::PoleInBall));
    }

    #[test]
    fn schottky_examples() {
        let g = m([[25, 0], [0, 1]], 5);
        let plus = PadicBall::closed(q(0, 1), 1);
        let minus = PadicBall::outside(q(0, 1), 0);
        let good = schottky_ball_check(&[g], &[(minus.clone(), plus.clone())]).unwrap();
        assert_eq!(good, SchottkyVerdict::GoodPosition);

        let id = MoebiusElement::identity(p(5));
        let v = schottky_ball_check(std::slice::from_ref(&id), &[(minus.clone(), plus.clone())]).unwrap();
        assert!(matches!(v, SchottkyVerdict::Violation { generator: 0, .. }));
        // complementary discs: identity maps one onto the other
        let v = schottky_ball_check(std::slice::from_ref(&id), &[(minus, PadicBall::closed(q(0, 1), 0))]).unwrap();
        assert!(matches!(v, SchottkyVerdict::Violation { generator: 0, .. }));

        let overlap = schottky_ball_check(&[id], &[(PadicBall::closed(q(0, 1), 0), PadicBall::closed(q(5, 1), 1))]);
        assert_eq!(overlap, Err(Pgl2Error::BallsNotDisjoint(0, 1)));
    }

    #[test]
    fn two_generator_schottky_group() {
        // g1 = z -> 5^8 z with discs at inf and 0, g2 conjugated to act near 2 and 1
        let five = p(5);
        let g1 = m([[390625, 0], [0, 1]], 5);
        let h = m([[2, 1], [1, 1]], 5); // 0 -> 1, inf -> 2
        let g2 = h.compose(&g1).compose(&h.inverse());
        let d1 = (PadicBall::outside(q(0, 1), -3), PadicBall::closed(q(0, 1), 4));
        let d2 = (disc_image(&h, &d1.0), disc_image(&h, &d1.1));
        for a in [&d1.0, &d1.1] {
            for b in [&d2.0, &d2.1] {
                assert!(a.disjoint_from(b, five), "{a:?} {b:?}");
            }
        }
        let v = schottky_ball_check(&[g1, g2], &[d1, d2]).unwrap();
        assert_eq!(v, SchottkyVerdict::GoodPosition);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-30i64..30, prop::sample::select(vec![1i64, 2, 3, 5, 25, 125])).prop_map(|(n, d)| q(n, d))
    }

    fn moebius() -> impl Strategy<Value = MoebiusElement> {
        prop::array::uniform4(small_rational())
            .prop_filter_map("singular", |[a, b, c, d]| {
                MoebiusElement::new(Matrix::from_rows(vec![vec![a, b], vec![c, d]]).unwrap(), p(5)).ok()
            })
    }

    fn disc() -> impl Strategy<Value = PadicBall> {
        (small_rational(), -3i64..4, any::<bool>())
            .prop_map(|(c, r, comp)| PadicBall { center: c, radius_exp: r, complement: comp })
    }

    proptest! {
        #[test]
        fn classification_is_conjugation_invariant(g in moebius(), h in moebius()) {
            let conj = h.compose(&g).compose(&h.inverse());
            prop_assert_eq!(classify(&conj), classify(&g));
        }

        #[test]
        fn disc_images_compose(g in moebius(), h in moebius(), d in disc()) {
            let five = p(5);
            let lhs = disc_image(&g.compose(&h), &d);
            let rhs = disc_image(&g, &disc_image(&h, &d));
            prop_assert!(lhs.same_set(&rhs, five));
            if let (Ok(a), Ok(b)) = (ball_image(&h, &d), ball_image(&g, &disc_image(&h, &d))) {
                prop_assert!(disc_image(&g, &a).same_set(&b, five));
            }
        }

        #[test]
        fn disc_images_map_points(g in moebius(), d in disc(), z in small_rational()) {
            let five = p(5);
            let pt = ProjPoint::affine(z);
            prop_assert_eq!(d.contains(&pt, five), disc_image(&g, &d).contains(&g.apply(&pt), five));
        }

        #[test]
        fn exact_fixed_points_are_fixed(a in small_rational(), b in small_rational(), k in 1i64..4) {
            // diag(5^k a, b) conjugated by a fixed matrix has rational eigenvalues
            prop_assume!(!a.is_zero() && !b.is_zero());
            let five = p(5);
            let d = MoebiusElement::new(Matrix::diag(&[&a * q(5i64.pow(k as u32), 1), b]), five).unwrap();
            let h = m([[1, 2], [3, 7]], 5);
            let g = h.compose(&d).compose(&h.inverse());
            if matches!(classify(&g), Classification::Hyperbolic { .. }) {
                let fp = fixed_points(&g, 4).unwrap();
                prop_assert_eq!(fp.precision, None);
                prop_assert_eq!(g.apply(&fp.attracting), fp.attracting.clone());
                prop_assert_eq!(g.apply(&fp.repelling), fp.repelling.clone());
            }
        }

        #[test]
        fn tate_translation_length(n in 1i64..50, k in 1u32..5) {
            prop_assume!(n % 5 != 0);
            let qv = q(n * 5i64.pow(k), 1);
            let g = &tate_group(&qv, p(5)).unwrap()[0];
            prop_assert_eq!(classify(g), Classification::Hyperbolic { translation_length: k as i64 });
        }
    }
}
