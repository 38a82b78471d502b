//! Finite groups given by elements `0..order`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),
}

/// A finite group whose elements are the indices `0..order()`.
pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
}

/// A group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl CayleyTable {
    /// Validates closure, associativity, identity and inverses.
    pub fn new(table: Vec<Vec<usize>>) -> Result<CayleyTable, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::NotAGroup("empty table".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(GroupError::NotAGroup("table is not closed".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| GroupError::NotAGroup("no identity".into()))?;
        for x in 0..n {
            if !(0..n).any(|y| table[x][y] == identity && table[y][x] == identity) {
                return Err(GroupError::NotAGroup(format!("element {x} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAGroup(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
                    }
                }
            }
        }
        Ok(CayleyTable { table, identity })
    }

    /// `Z/n` written additively.
    pub fn cyclic(n: usize) -> CayleyTable {
        assert!(n >= 1);
        CayleyTable { table: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(), identity: 0 }
    }

    pub fn trivial() -> CayleyTable {
        CayleyTable::cyclic(1)
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

impl FiniteGroup for CayleyTable {
    fn order(&self) -> usize {
        self.table.len()
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_groups() {
        assert!(CayleyTable::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(CayleyTable::new(vec![vec![0, 2], vec![1, 0]]).is_err());
        assert!(CayleyTable::new(vec![]).is_err());
        // a loop that is not associative: the Latin square of order 5 below
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(CayleyTable::new(t).is_err());
        assert!(CayleyTable::new(CayleyTable::cyclic(6).table().to_vec()).is_ok());
    }
}
