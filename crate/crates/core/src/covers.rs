//! Finite quotients of the free group through `GL_r(Z/p^n)`, Schreier bases
//! of their kernels, and the transport of the fiber action through the
//! finite-level module of equivariant functions.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::group::FiniteGroup;
use crate::padic::{PadicError, Prime};
use crate::phibound::{integral_certificate, Representation};
use crate::word::{FreeWord, Letter};
use crate::zmod::{ZnMatrix, MAX_MODULUS};

pub const DEFAULT_GUARD: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("representation is not integral with unit determinants")]
    NotIntegral,
    #[error("image group has more than {guard} elements")]
    OrderExceedsGuard { guard: usize },
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("p^n exceeds the supported modulus {MAX_MODULUS}")]
    ModulusTooLarge,
    #[error("basepoint {0} is not a group element")]
    BadBasepoint(usize),
    #[error("genus and index must be at least 1")]
    InvalidGenus,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// The subgroup of `GL_r(Z/p^n)` generated by the reduced generator images.
/// Element 0 is the identity; elements are numbered in BFS order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuotient {
    prime: Prime,
    level: u32,
    elements: Vec<ZnMatrix>,
    index: HashMap<ZnMatrix, usize>,
    generators: Vec<usize>,
    /// `right[h][i]` is the index of `h * x_i`.
    right: Vec<Vec<usize>>,
    /// `right_inv[h][i]` is the index of `h * x_i^-1`.
    right_inv: Vec<Vec<usize>>,
}

fn check_level(p: Prime, n: u32) -> Result<u64, CoverError> {
    if n == 0 {
        return Err(CoverError::ZeroLevel);
    }
    p.pow(n).to_u64().filter(|&m| m <= MAX_MODULUS).ok_or(CoverError::ModulusTooLarge)
}

/// Reductions of the generator images and their inverses modulo `p^n`.
pub fn reduce_generators(rho: &Representation, n: u32) -> Result<(Vec<ZnMatrix>, Vec<ZnMatrix>), CoverError> {
    if !integral_certificate(rho).is_certified() {
        return Err(CoverError::NotIntegral);
    }
    check_level(rho.prime(), n)?;
    let p = rho.prime();
    let gens = rho.generators().iter().map(|g| ZnMatrix::reduce(g, p, n)).collect::<Result<Vec<_>, _>>()?;
    let invs = gens.iter().map(|g| g.inverse(p).ok_or(CoverError::NotIntegral)).collect::<Result<Vec<_>, _>>()?;
    Ok((gens, invs))
}

pub fn image_group(rho: &Representation, n: u32, guard: usize) -> Result<FiniteQuotient, CoverError> {
    let (gens, _) = reduce_generators(rho, n)?;
    let id = ZnMatrix::identity(rho.rank(), check_level(rho.prime(), n)?);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut right: Vec<Vec<usize>> = Vec::new();
    let mut h = 0;
    while h < elements.len() {
        let mut row = Vec::with_capacity(gens.len());
        for x in &gens {
            let y = elements[h].mul(x);
            let k = match index.get(&y) {
                Some(&k) => k,
                None => {
                    if elements.len() == guard {
                        return Err(CoverError::OrderExceedsGuard { guard });
                    }
                    index.insert(y.clone(), elements.len());
                    elements.push(y);
                    elements.len() - 1
                }
            };
            row.push(k);
        }
        right.push(row);
        h += 1;
    }
    let mut right_inv = vec![vec![0; gens.len()]; elements.len()];
    for (h, row) in right.iter().enumerate() {
        for (i, &k) in row.iter().enumerate() {
            right_inv[k][i] = h;
        }
    }
    let generators = (0..gens.len()).map(|i| right[0][i]).collect();
    Ok(FiniteQuotient { prime: rho.prime(), level: n, elements, index, generators, right, right_inv })
}

impl FiniteQuotient {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn elements(&self) -> &[ZnMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ZnMatrix {
        &self.elements[i]
    }

    pub fn index_of(&self, m: &ZnMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Indices of the generator images.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Index of `h * l`.
    pub fn act(&self, h: usize, l: Letter) -> usize {
        if l.inverse {
            self.right_inv[h][l.generator]
        } else {
            self.right[h][l.generator]
        }
    }

    /// Image of a word.
    pub fn evaluate(&self, w: &FreeWord) -> usize {
        w.letters().iter().fold(0, |h, &l| self.act(h, l))
    }

    pub fn inverse_of(&self, a: usize) -> usize {
        let inv = self.elements[a].inverse(self.prime).expect("group elements are invertible");
        self.index[&inv]
    }
}

impl FiniteGroup for FiniteQuotient {
    fn order(&self) -> usize {
        self.elements.len()
    }

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].mul(&self.elements[b])]
    }
}

/// Coset graph spanning tree and the Schreier generators of the kernel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchreierData {
    pub order: usize,
    pub generator_count: usize,
    /// `transversal[h]` is the tree word reaching element `h`.
    pub transversal: Vec<FreeWord>,
    /// Non-tree coset edges `(h, i)`.
    pub chords: Vec<(usize, usize)>,
    pub kernel_basis: Vec<FreeWord>,
}

/// BFS tree over edges `h -> h x_i`; one kernel generator `w_h x_i w_(h x_i)^-1`
/// per non-tree edge.
pub fn schreier_basis(q: &FiniteQuotient) -> SchreierData {
    let order = q.order();
    let g = q.generator_count();
    let mut transversal: Vec<Option<FreeWord>> = vec![None; order];
    let mut tree = vec![vec![false; g]; order];
    transversal[0] = Some(FreeWord::identity());
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(h) = queue.pop_front() {
        for i in 0..g {
            let k = q.right[h][i];
            if transversal[k].is_none() {
                let w = transversal[h].as_ref().expect("visited").mul(&FreeWord::generator(i));
                transversal[k] = Some(w);
                tree[h][i] = true;
                queue.push_back(k);
            }
        }
    }
    let transversal: Vec<FreeWord> = transversal.into_iter().map(|w| w.expect("group is generated")).collect();
    let mut chords = Vec::new();
    let mut kernel_basis = Vec::new();
    for h in 0..order {
        for i in 0..g {
            if tree[h][i] {
                continue;
            }
            let k = q.right[h][i];
            chords.push((h, i));
            kernel_basis.push(transversal[h].mul(&FreeWord::generator(i)).mul(&transversal[k].inverse()));
        }
    }
    SchreierData { order, generator_count: g, transversal, chords, kernel_basis }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RestrictCheck {
    TrivialModPn,
    Counterexample { word: FreeWord },
}

/// Evaluates `rho` modulo `p^n` on every kernel generator.
pub fn restrict_check(rho: &Representation, data: &SchreierData, n: u32) -> Result<RestrictCheck, CoverError> {
    let (gens, invs) = reduce_generators(rho, n)?;
    let id = ZnMatrix::identity(rho.rank(), check_level(rho.prime(), n)?);
    for w in &data.kernel_basis {
        let m = w.letters().iter().fold(id.clone(), |acc, l| {
            acc.mul(if l.inverse { &invs[l.generator] } else { &gens[l.generator] })
        });
        if !m.is_identity() {
            return Ok(RestrictCheck::Counterexample { word: w.clone() });
        }
    }
    Ok(RestrictCheck::TrivialModPn)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportedGenerator {
    pub generator: usize,
    pub rho_n: Vec<Vec<u64>>,
    pub transported: Vec<Vec<u64>>,
    /// `transported == rho_n` entrywise.
    pub equal: bool,
    /// `transported == b rho_n b^-1` for the basepoint `b`.
    pub equal_to_conjugate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DwReport {
    pub order: usize,
    pub level: u32,
    pub modulus: u64,
    pub rank: usize,
    pub kernel_basis: Vec<FreeWord>,
    /// The basepoint element `b`; the transported action is `b sigma b^-1`.
    pub conjugator: Vec<Vec<u64>>,
    pub basepoint_is_identity: bool,
    /// Every function built from a fiber value satisfied `f(x h) = x f(h)`.
    pub module_consistent: bool,
    pub generators: Vec<TransportedGenerator>,
    pub all_equal: bool,
}

/// Builds the module `M = {f : G -> (Z/p^n)^r, f(x h) = x f(h)}`, identifies
/// it with the fiber by evaluation at `basepoint`, and reads off the action
/// of each generator by right translation `(sigma f)(h) = f(h sigma)`.
pub fn dw_transport(rho: &Representation, n: u32, basepoint: usize, guard: usize) -> Result<DwReport, CoverError> {
    let q = image_group(rho, n, guard)?;
    if basepoint >= q.order() {
        return Err(CoverError::BadBasepoint(basepoint));
    }
    let r = rho.rank();
    let modulus = check_level(rho.prime(), n)?;
    let data = schreier_basis(&q);
    let gens: Vec<&ZnMatrix> = q.generators().iter().map(|&i| q.element(i)).collect();
    let mut consistent = true;
    // columns[j][h] = f_j(h) where f_j(b) = e_j, propagated by left multiplication
    let mut columns: Vec<Vec<Vec<u64>>> = Vec::with_capacity(r);
    for j in 0..r {
        let mut f: Vec<Option<Vec<u64>>> = vec![None; q.order()];
        f[basepoint] = Some((0..r).map(|i| u64::from(i == j)).collect());
        let mut queue = std::collections::VecDeque::from([basepoint]);
        while let Some(h) = queue.pop_front() {
            let fh = f[h].clone().expect("visited");
            for x in &gens {
                let xh = q.index_of(&x.mul(q.element(h))).expect("closed under left multiplication");
                let val = x.mul_vec(&fh);
                match &f[xh] {
                    Some(existing) => consistent &= *existing == val,
                    None => {
                        f[xh] = Some(val);
                        queue.push_back(xh);
                    }
                }
            }
        }
        columns.push(f.into_iter().map(|v| v.expect("left action is transitive")).collect());
    }
    let b = q.element(basepoint);
    let binv = b.inverse(rho.prime()).expect("group element");
    let mut generators = Vec::with_capacity(gens.len());
    for (i, x) in gens.iter().enumerate() {
        let bs = q.act(basepoint, Letter::new(i, false));
        let data_t: Vec<u64> = (0..r * r).map(|k| columns[k % r][bs][k / r]).collect();
        let transported = ZnMatrix::new(r, modulus, data_t);
        let conj = b.mul(x).mul(&binv);
        generators.push(TransportedGenerator {
            generator: i,
            rho_n: x.row_vecs(),
            transported: transported.row_vecs(),
            equal: transported == **x,
            equal_to_conjugate: transported == conj,
        });
    }
    let all_equal = generators.iter().all(|g| g.equal);
    Ok(DwReport {
        order: q.order(),
        level: n,
        modulus,
        rank: r,
        kernel_basis: data.kernel_basis,
        conjugator: b.row_vecs(),
        basepoint_is_identity: basepoint == 0,
        module_consistent: consistent,
        generators,
        all_equal,
    })
}

/// Genus `(g - 1) * index + 1` of a degree-`index` unramified cover.
pub fn cover_genus(g: u64, index: u64) -> Result<u64, CoverError> {
    if g == 0 || index == 0 {
        return Err(CoverError::InvalidGenus);
    }
    Ok((g - 1) * index + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn rep(p: u64, gens: &[&[&[i64]]]) -> Representation {
        Representation::new(Prime::new(p).unwrap(), gens.iter().map(|g| Matrix::from_i64(g)).collect()).unwrap()
    }

    #[test]
    fn image_groups() {
        assert_eq!(image_group(&rep(5, &[&[&[1]]]), 1, DEFAULT_GUARD).unwrap().order(), 1);
        assert_eq!(image_group(&rep(5, &[&[&[2]]]), 1, DEFAULT_GUARD).unwrap().order(), 4);
        assert_eq!(image_group(&rep(5, &[&[&[2]], &[&[-1]]]), 1, DEFAULT_GUARD).unwrap().order(), 4);
        assert_eq!(image_group(&rep(5, &[&[&[5]]]), 1, DEFAULT_GUARD), Err(CoverError::NotIntegral));
        assert_eq!(
            image_group(&rep(5, &[&[&[2]]]), 2, 10),
            Err(CoverError::OrderExceedsGuard { guard: 10 })
        );
    }

    #[test]
    fn schreier_sizes() {
        let triv = image_group(&rep(5, &[&[&[1]], &[&[1]]]), 1, DEFAULT_GUARD).unwrap();
        let d = schreier_basis(&triv);
        assert_eq!(d.kernel_basis, vec![FreeWord::generator(0), FreeWord::generator(1)]);
        let c4 = image_group(&rep(5, &[&[&[2]]]), 1, DEFAULT_GUARD).unwrap();
        let d = schreier_basis(&c4);
        assert_eq!(d.kernel_basis, vec![FreeWord::generator(0).pow(4)]);
        // S_3 inside GL_2(F_5)
        let s3 = image_group(&rep(5, &[&[&[0, 1], &[1, 0]], &[&[0, -1], &[1, -1]]]), 1, DEFAULT_GUARD).unwrap();
        assert_eq!(s3.order(), 6);
        let d = schreier_basis(&s3);
        assert_eq!(d.kernel_basis.len(), 7);
        for w in &d.kernel_basis {
            assert_eq!(s3.evaluate(w), 0);
        }
    }

    #[test]
    fn restriction() {
        let r = rep(5, &[&[&[2]]]);
        let d = schreier_basis(&image_group(&r, 1, DEFAULT_GUARD).unwrap());
        assert_eq!(restrict_check(&r, &d, 1).unwrap(), RestrictCheck::TrivialModPn);
        let other = rep(5, &[&[&[4]]]);
        let d2 = schreier_basis(&image_group(&other, 1, DEFAULT_GUARD).unwrap());
        assert_eq!(
            restrict_check(&r, &d2, 1).unwrap(),
            RestrictCheck::Counterexample { word: FreeWord::generator(0).pow(2) }
        );
    }

    #[test]
    fn transport() {
        let r = rep(5, &[&[&[2]]]);
        let t = dw_transport(&r, 1, 0, DEFAULT_GUARD).unwrap();
        assert!(t.all_equal && t.module_consistent);
        assert_eq!(t.order, 4);
        let r = rep(3, &[&[&[1, 1], &[0, 1]], &[&[2, 1], &[1, 1]]]);
        let t = dw_transport(&r, 2, 0, DEFAULT_GUARD).unwrap();
        assert!(t.all_equal && t.module_consistent);
        let moved = dw_transport(&r, 2, 1, DEFAULT_GUARD).unwrap();
        assert!(moved.generators.iter().all(|g| g.equal_to_conjugate));
        assert!(!moved.all_equal);
        let triv = rep(3, &[&[&[1, 0], &[0, 1]]]);
        assert!(dw_transport(&triv, 1, 0, DEFAULT_GUARD).unwrap().all_equal);
    }

    #[test]
    fn genus() {
        assert_eq!(cover_genus(1, 7), Ok(1));
        assert_eq!(cover_genus(2, 3), Ok(4));
        assert_eq!(cover_genus(1, 1), Ok(1));
        assert_eq!(cover_genus(0, 1), Err(CoverError::InvalidGenus));
    }
}
