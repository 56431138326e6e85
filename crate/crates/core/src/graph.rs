use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64, SYMMETRY_TOL};

/// Undirected graph with complex edge weights, stored as its symmetric
/// adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: ComplexMatrix,
}

impl Graph {
    /// Validates squareness and symmetry (relative 1e-10), then stores the
    /// exactly symmetrized matrix.
    pub fn new(adjacency: ComplexMatrix) -> Result<Self> {
        adjacency.require_square()?;
        let asym = adjacency.asymmetry();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self { adjacency: adjacency.symmetrized() })
    }

    /// Unweighted graph from an edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = ComplexMatrix::zeros(n, n);
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidArgument(format!("bad edge ({i}, {j}) for n = {n}")));
            }
            adj[(i, j)] = C64::new(1.0, 0.0);
            adj[(j, i)] = C64::new(1.0, 0.0);
        }
        Ok(Self { adjacency: adj })
    }

    pub fn empty() -> Self {
        Self { adjacency: ComplexMatrix::zeros(0, 0) }
    }

    pub fn n(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn adjacency(&self) -> &ComplexMatrix {
        &self.adjacency
    }

    pub fn weight(&self, i: usize, j: usize) -> C64 {
        self.adjacency[(i, j)]
    }

    /// Induced subgraph on `vertices` (in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        Graph { adjacency: self.adjacency.principal(vertices) }
    }

    /// True when every weight is real and nonnegative.
    pub fn is_real_nonnegative(&self) -> bool {
        self.adjacency.as_slice().iter().all(|z| z.im == 0.0 && z.re >= 0.0)
    }

    /// Checks that `subset` holds distinct in-range vertices.
    pub fn check_subset(&self, subset: &[usize]) -> Result<()> {
        let n = self.n();
        let mut seen = vec![false; n];
        for &v in subset {
            if v >= n {
                return Err(Error::InvalidArgument(format!("vertex {v} out of range for n = {n}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidArgument(format!("vertex {v} repeated in subset")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.5, 0.0]).unwrap();
        assert!(matches!(Graph::new(m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn subset_checks() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(g.check_subset(&[0, 2]).is_ok());
        assert!(g.check_subset(&[0, 0]).is_err());
        assert!(g.check_subset(&[3]).is_err());
    }
}
