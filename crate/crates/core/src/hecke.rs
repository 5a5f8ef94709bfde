//! Hecke operators T_ℓ on the divisor group of the supersingular classes.
//!
//! Divisors are row vectors indexed by the canonical class order and T_ℓ
//! acts on the right: (C_i) ↦ Σ_j M[i][j]·(C_j), where M[i][j] is the
//! multiplicity of j_j as a root of Φ_ℓ(j_i, Y) over GF(p²).

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::roots_with_multiplicity;
use crate::lattice::IntMatrix;
use crate::modpoly::{reduce_mod_p, ModularPolynomial};
use crate::supersingular::SupersingularClassSet;

/// Integer vector indexed by the supersingular classes.
pub type Divisor = Vec<BigInt>;

/// Matrix of T_ℓ in the class basis, under the row-action convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeMatrix {
    ell: u64,
    dim: usize,
    entries: Vec<u32>,
}

impl HeckeMatrix {
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.dim.max(1)).take(self.dim).map(<[u32]>::to_vec).collect()
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.rows())
    }

    /// Row sums, each expected to be ℓ + 1.
    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) as u64).sum())
            .collect()
    }

    /// M[i][j]·w_j = M[j][i]·w_i for all i, j.
    pub fn is_self_adjoint(&self, weights: &[u32]) -> bool {
        (0..self.dim).all(|i| {
            (0..i).all(|j| self.get(i, j) * weights[j] == self.get(j, i) * weights[i])
        })
    }

    pub fn commutes_with(&self, other: &HeckeMatrix) -> bool {
        let (a, b) = (self.to_int_matrix(), other.to_int_matrix());
        a.mul(&b).ok() == b.mul(&a).ok()
    }

    /// Check the row sums and self-adjointness against the class weights,
    /// naming the first class that violates either.
    pub fn check_invariants(&self, cs: &SupersingularClassSet) -> Result<()> {
        let target = self.ell + 1;
        for (i, s) in self.row_sums().into_iter().enumerate() {
            if s != target {
                return Err(Error::invariant(
                    "Hecke row sum",
                    format!(
                        "row of class j = {} sums to {s} for T_{}, expected {target}",
                        cs.classes()[i].j,
                        self.ell
                    ),
                ));
            }
        }
        let w = cs.weights();
        for i in 0..self.dim {
            for j in 0..i {
                if self.get(i, j) * w[j] != self.get(j, i) * w[i] {
                    return Err(Error::invariant(
                        "Hecke self-adjointness",
                        format!(
                            "T_{} fails M·diag(w) symmetry between classes j = {} and j = {}",
                            self.ell,
                            cs.classes()[i].j,
                            cs.classes()[j].j
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for HeckeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Build T_ℓ from the root multiplicities of Φ_ℓ(j_i, Y).
pub fn build_hecke(cs: &SupersingularClassSet, phi: &ModularPolynomial) -> Result<HeckeMatrix> {
    let k = cs.field();
    let reduced = reduce_mod_p(phi, cs.p())?;
    let n = cs.len();
    let mut entries = vec![0u32; n * n];
    for (i, class) in cs.classes().iter().enumerate() {
        let roots = roots_with_multiplicity(&k, &reduced.specialize_x(&k, class.j))?;
        for (r, m) in roots {
            let j = cs.index_of(r).ok_or_else(|| {
                Error::DataCorruption(format!(
                    "Φ_{}(j = {}, Y) has the non-supersingular root {r} mod {}",
                    phi.level(),
                    class.j,
                    cs.p()
                ))
            })?;
            entries[i * n + j] = m;
        }
    }
    let m = HeckeMatrix {
        ell: phi.level(),
        dim: n,
        entries,
    };
    m.check_invariants(cs)?;
    Ok(m)
}

/// v ↦ v·M.
pub fn act_on_divisor(m: &HeckeMatrix, v: &[BigInt]) -> Result<Divisor> {
    if v.len() != m.dim {
        return Err(Error::domain(format!(
            "divisor of length {} against T_{} of dimension {}",
            v.len(),
            m.ell,
            m.dim
        )));
    }
    let mut out = vec![BigInt::zero(); m.dim];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            let e = m.get(i, j);
            if e != 0 {
                *o += vi * e;
            }
        }
    }
    Ok(out)
}

/// The degree-zero lattice X with basis D_i = (C_i) − (C_0), i = 1..n−1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CuspLattice {
    n: usize,
}

impl CuspLattice {
    /// X inside Z^n, for n ≥ 1 classes.
    pub fn new(n: usize) -> Self {
        CuspLattice { n }
    }

    pub fn for_classes(cs: &SupersingularClassSet) -> Self {
        CuspLattice::new(cs.len())
    }

    /// Number of classes n.
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.n.saturating_sub(1)
    }

    pub fn basis_vector(&self, i: usize) -> Divisor {
        assert!(i >= 1 && i < self.n, "basis index {i} out of range");
        let mut v = vec![BigInt::zero(); self.n];
        v[0] = BigInt::from(-1);
        v[i] = BigInt::from(1);
        v
    }

    pub fn basis(&self) -> Vec<Divisor> {
        (1..self.n).map(|i| self.basis_vector(i)).collect()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        v.len() == self.n && v.iter().sum::<BigInt>().is_zero()
    }

    /// Coordinates of a degree-zero divisor in the D_i basis.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if !self.contains(v) {
            return Err(Error::domain("divisor does not lie in X (degree ≠ 0)"));
        }
        Ok(v[1..].to_vec())
    }
}

/// Matrix A of T_ℓ on X: (D_i)·M = Σ_j A[i][j]·D_j.
pub fn restrict_to_cusp(m: &HeckeMatrix, x: &CuspLattice) -> Result<IntMatrix> {
    if m.dim != x.ambient_dim() {
        return Err(Error::domain("Hecke matrix and lattice index different class sets"));
    }
    let rows = x
        .basis()
        .iter()
        .map(|d| x.coordinates(&act_on_divisor(m, d)?))
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_big_rows(&rows, x.rank())
}
