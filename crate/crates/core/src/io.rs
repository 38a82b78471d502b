//! JSON file schemas for graphs, representations, matrices and Schottky
//! generator sets. Scalars are integers or literal strings such as `"p^2/3"`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{Matrix, MatrixError};
use crate::padic::{format_rational, parse_scalar, PadicError, Prime, Rational};
use crate::pgl2::{MoebiusElement, PadicBall, Pgl2Error};
use crate::phibound::{PhiError, Representation};
use crate::redgraph::{GraphError, ReductionGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("declared rank {declared} but generator {generator} has size {found}")]
    RankMismatch { declared: usize, generator: usize, found: usize },
    #[error("{generators} generators but {pairs} ball pairs")]
    BallCount { generators: usize, pairs: usize },
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Pgl2(#[from] Pgl2Error),
}

/// A scalar or label written either as a JSON integer or a string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Str(String),
}

impl Literal {
    pub fn label(&self) -> String {
        match self {
            Literal::Int(n) => n.to_string(),
            Literal::Str(s) => s.clone(),
        }
    }

    pub fn scalar(&self, p: Prime) -> Result<Rational, PadicError> {
        match self {
            Literal::Int(n) => Ok(Rational::from_integer((*n).into())),
            Literal::Str(s) => parse_scalar(s, p),
        }
    }

    pub fn from_rational(x: &Rational) -> Literal {
        Literal::Str(format_rational(x))
    }
}

pub type MatrixLiteral = Vec<Vec<Literal>>;

pub fn parse_matrix(rows: &MatrixLiteral, p: Prime) -> Result<Matrix, IoError> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|x| x.scalar(p)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows)?)
}

pub fn matrix_literal(m: &Matrix) -> MatrixLiteral {
    m.row_vecs().iter().map(|r| r.iter().map(Literal::from_rational).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeFile {
    pub id: Literal,
    pub from: Literal,
    pub to: Literal,
    pub width_exp: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub p: u64,
    pub vertices: Vec<Literal>,
    pub edges: Vec<EdgeFile>,
    pub base: Literal,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<ReductionGraph, IoError> {
        let p = Prime::new(self.p)?;
        let edges = self.edges.iter().map(|e| (e.id.label(), e.from.label(), e.to.label(), e.width_exp)).collect();
        Ok(ReductionGraph::new(p, self.vertices.iter().map(Literal::label).collect(), edges, &self.base.label())?)
    }

    pub fn from_graph(g: &ReductionGraph) -> GraphFile {
        let v = |i: usize| Literal::Str(g.vertices()[i].clone());
        GraphFile {
            p: g.prime().get(),
            vertices: g.vertices().iter().cloned().map(Literal::Str).collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeFile { id: Literal::Str(e.id.clone()), from: v(e.from), to: v(e.to), width_exp: e.width_exp })
                .collect(),
            base: v(g.base()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepFile {
    pub p: u64,
    pub rank: usize,
    pub generators: Vec<MatrixLiteral>,
}

impl RepFile {
    pub fn to_rep(&self) -> Result<Representation, IoError> {
        let p = Prime::new(self.p)?;
        let gens = self.generators.iter().map(|m| parse_matrix(m, p)).collect::<Result<Vec<_>, _>>()?;
        for (i, g) in gens.iter().enumerate() {
            if g.rows() != self.rank || g.cols() != self.rank {
                return Err(IoError::RankMismatch { declared: self.rank, generator: i, found: g.rows() });
            }
        }
        Ok(Representation::new(p, gens)?)
    }

    pub fn from_rep(r: &Representation) -> RepFile {
        RepFile { p: r.prime().get(), rank: r.rank(), generators: r.generators().iter().map(matrix_literal).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub p: u64,
    pub matrix: MatrixLiteral,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<(Prime, Matrix), IoError> {
        let p = Prime::new(self.p)?;
        Ok((p, parse_matrix(&self.matrix, p)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFile {
    pub p: u64,
    pub a: MatrixLiteral,
    pub b: MatrixLiteral,
}

impl PairFile {
    pub fn to_pair(&self) -> Result<(Prime, Matrix, Matrix), IoError> {
        let p = Prime::new(self.p)?;
        Ok((p, parse_matrix(&self.a, p)?, parse_matrix(&self.b, p)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallFile {
    pub center: Literal,
    pub radius_exp: i64,
    #[serde(default)]
    pub complement: bool,
}

impl BallFile {
    fn to_ball(&self, p: Prime) -> Result<PadicBall, IoError> {
        let center = self.center.scalar(p)?;
        Ok(if self.complement { PadicBall::outside(center, self.radius_exp) } else { PadicBall::closed(center, self.radius_exp) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallPairFile {
    pub minus: BallFile,
    pub plus: BallFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSetFile {
    pub p: u64,
    pub generators: Vec<MatrixLiteral>,
    pub balls: Vec<BallPairFile>,
}

pub type BallPair = (PadicBall, PadicBall);

impl GeneratorSetFile {
    pub fn to_generators(&self) -> Result<(Vec<MoebiusElement>, Vec<BallPair>), IoError> {
        let p = Prime::new(self.p)?;
        if self.generators.len() != self.balls.len() {
            return Err(IoError::BallCount { generators: self.generators.len(), pairs: self.balls.len() });
        }
        let gens = self
            .generators
            .iter()
            .map(|m| Ok(MoebiusElement::new(parse_matrix(m, p)?, p)?))
            .collect::<Result<Vec<_>, IoError>>()?;
        let balls = self
            .balls
            .iter()
            .map(|b| Ok((b.minus.to_ball(p)?, b.plus.to_ball(p)?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok((gens, balls))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::redgraph::tate_cycle_graph;

    #[test]
    fn literals() {
        let p = Prime::new(5).unwrap();
        assert_eq!(Literal::Int(-3).scalar(p).unwrap(), Rational::from_integer((-3).into()));
        assert_eq!(Literal::Str("p^2/3".into()).scalar(p).unwrap(), Rational::new(25.into(), 3.into()));
        assert!(Literal::Str("q".into()).scalar(p).is_err());
    }

    #[test]
    fn graph_round_trip() {
        let g = tate_cycle_graph(4, Prime::new(3).unwrap()).unwrap();
        assert_eq!(GraphFile::from_graph(&g).to_graph().unwrap(), g);
        let f = GraphFile {
            p: 3,
            vertices: vec![Literal::Int(0), Literal::Int(1)],
            edges: vec![
                EdgeFile { id: Literal::Int(0), from: Literal::Int(0), to: Literal::Int(1), width_exp: 1 },
                EdgeFile { id: Literal::Int(1), from: Literal::Int(0), to: Literal::Int(1), width_exp: 2 },
            ],
            base: Literal::Int(0),
        };
        let g = f.to_graph().unwrap();
        assert_eq!(GraphFile::from_graph(&g).to_graph().unwrap(), g);
    }

    #[test]
    fn rep_round_trip() {
        let f = RepFile {
            p: 5,
            rank: 2,
            generators: vec![vec![vec![Literal::Int(1), Literal::Str("1/p".into())], vec![Literal::Int(0), Literal::Int(1)]]],
        };
        let r = f.to_rep().unwrap();
        assert_eq!(RepFile::from_rep(&r).to_rep().unwrap(), r);
        let bad = RepFile { rank: 3, ..f };
        assert!(matches!(bad.to_rep(), Err(IoError::RankMismatch { .. })));
    }
}
