//! Rational eigenforms: one-dimensional simultaneous eigenspaces of the T_ℓ on X.
//!
//! X ⊗ Q is refined one operator at a time. For T_ℓ, each current piece is
//! cut into its intersections with ker(T_ℓ − a) for the integers a in the
//! Hasse window |a| ≤ 2√ℓ, plus the orthogonal complement of those
//! eigenspaces under the monodromy pairing. That complement carries only
//! irrational T_ℓ-eigenvalues and so can never contain a rational eigenform;
//! it is still refined by later operators and ends up in the residual list.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hecke::{act_on_divisor, CuspLattice, Divisor, HeckeMatrix};
use crate::lattice::{primitive_scale, rational_kernel, IntMatrix};
use crate::supersingular::SupersingularClassSet;

/// A primitive integer eigenvector λ ∈ X with its Hecke eigenvalues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalEigenform {
    /// Degree zero, content 1, first nonzero coordinate positive.
    pub lambda: Divisor,
    /// a_ℓ for every operator the search used.
    pub eigenvalues: BTreeMap<u64, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SplitReport {
    pub eigenforms: Vec<RationalEigenform>,
    /// Dimensions of the pieces of X ⊗ Q that hold no rational eigenform.
    pub residual_dimensions: Vec<usize>,
}

impl SplitReport {
    /// Total dimension accounted for; equals rank X.
    pub fn accounted_rank(&self) -> usize {
        self.eigenforms.len() + self.residual_dimensions.iter().sum::<usize>()
    }
}

/// ⌊2√ℓ⌋.
pub fn hasse_bound(ell: u64) -> i64 {
    (4 * ell).sqrt() as i64
}

/// The integer a with λ·M = a·λ.
pub fn eigenvalue_of(lambda: &[BigInt], m: &HeckeMatrix) -> Result<i64> {
    let image = act_on_divisor(m, lambda)?;
    let (i, li) = lambda
        .iter()
        .enumerate()
        .find(|(_, x)| !x.is_zero())
        .ok_or_else(|| Error::domain("the zero vector has no eigenvalue"))?;
    let not_eigen = || Error::domain(format!("vector is not an eigenvector of T_{}", m.ell()));
    if !(&image[i] % li).is_zero() {
        return Err(not_eigen());
    }
    let a = &image[i] / li;
    if image.iter().zip(lambda).any(|(y, x)| *y != &a * x) {
        return Err(not_eigen());
    }
    a.to_i64().ok_or_else(not_eigen)
}

struct Piece {
    basis: Vec<Divisor>,
    eigenvalues: BTreeMap<u64, i64>,
}

/// Split X ⊗ Q under the given Hecke operators (processed in ascending ℓ).
pub fn split_eigenspaces(cs: &SupersingularClassSet, heckes: &[HeckeMatrix]) -> Result<SplitReport> {
    let x = CuspLattice::for_classes(cs);
    if x.rank() == 0 {
        return Ok(SplitReport::default());
    }
    if heckes.is_empty() {
        return Err(Error::InsufficientHeckeData(x.rank()));
    }
    if let Some(m) = heckes.iter().find(|m| m.dim() != cs.len()) {
        return Err(Error::domain(format!(
            "T_{} has dimension {}, expected {}",
            m.ell(),
            m.dim(),
            cs.len()
        )));
    }
    let mut ordered: Vec<&HeckeMatrix> = heckes.iter().collect();
    ordered.sort_by_key(|m| m.ell());
    let weights = cs.weights();

    let mut pieces = vec![Piece {
        basis: x.basis(),
        eigenvalues: BTreeMap::new(),
    }];
    for m in ordered {
        let mut next = Vec::new();
        for piece in pieces {
            if piece.basis.len() == 1 {
                let mut piece = piece;
                let a = eigenvalue_of(&piece.basis[0], m).map_err(|_| {
                    Error::invariant(
                        "Hecke stability",
                        format!("a one-dimensional piece of X is not stable under T_{}", m.ell()),
                    )
                })?;
                piece.eigenvalues.insert(m.ell(), a);
                next.push(piece);
                continue;
            }
            next.extend(refine(&piece, m, &weights)?);
        }
        pieces = next;
    }

    let mut report = SplitReport::default();
    for piece in pieces {
        if piece.basis.len() == 1 && piece.eigenvalues.len() == heckes.len() {
            let lambda = primitive_scale(&piece.basis[0])?;
            report.eigenforms.push(RationalEigenform {
                lambda,
                eigenvalues: piece.eigenvalues,
            });
        } else {
            report.residual_dimensions.push(piece.basis.len());
        }
    }
    report
        .eigenforms
        .sort_by(|a, b| a.eigenvalues.values().cmp(b.eigenvalues.values()));
    check_report(&report, &x, heckes)?;
    Ok(report)
}

fn refine(piece: &Piece, m: &HeckeMatrix, weights: &[u32]) -> Result<Vec<Piece>> {
    let n = weights.len();
    let h = hasse_bound(m.ell());
    let images = piece
        .basis
        .iter()
        .map(|v| act_on_divisor(m, v))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::new();
    let mut found: Vec<Divisor> = Vec::new();
    for a in -h..=h {
        // Rows of B·(M − a), one per basis vector of the piece.
        let shifted: Vec<Divisor> = images
            .iter()
            .zip(&piece.basis)
            .map(|(img, v)| img.iter().zip(v).map(|(y, x)| y - x * a).collect())
            .collect();
        let basis = span_combinations(&piece.basis, &shifted, n)?;
        if basis.is_empty() {
            continue;
        }
        found.extend(basis.iter().cloned());
        let mut eigenvalues = piece.eigenvalues.clone();
        eigenvalues.insert(m.ell(), a);
        out.push(Piece { basis, eigenvalues });
    }

    if found.len() < piece.basis.len() {
        // Complement of the eigenspaces: combinations x·B with ⟨x·B, u⟩ = 0
        // for every eigenvector u found above.
        let gram: Vec<Divisor> = piece
            .basis
            .iter()
            .map(|v| {
                found
                    .iter()
                    .map(|u| {
                        v.iter()
                            .zip(u)
                            .zip(weights)
                            .map(|((a, b), &w)| a * b * w)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let rest = span_combinations(&piece.basis, &gram, found.len())?;
        if found.len() + rest.len() != piece.basis.len() {
            return Err(Error::invariant(
                "eigenspace decomposition",
                format!(
                    "T_{} eigenspaces and their complement do not fill a piece of dimension {}",
                    m.ell(),
                    piece.basis.len()
                ),
            ));
        }
        out.push(Piece {
            basis: rest,
            eigenvalues: piece.eigenvalues.clone(),
        });
    }
    Ok(out)
}

/// Given rows B (the basis) and rows R (one per basis vector), return a
/// primitive basis of { x·B : x·R = 0 }.
fn span_combinations(basis: &[Divisor], relations: &[Divisor], width: usize) -> Result<Vec<Divisor>> {
    let r = IntMatrix::from_big_rows(relations, width)?;
    let b = IntMatrix::from_big_rows(basis, basis.first().map_or(0, Vec::len))?;
    rational_kernel(&r.transpose())
        .into_iter()
        .map(|x| primitive_scale(&b.left_apply(&x)?))
        .collect()
}

fn check_report(report: &SplitReport, x: &CuspLattice, heckes: &[HeckeMatrix]) -> Result<()> {
    if report.accounted_rank() != x.rank() {
        return Err(Error::invariant(
            "rank partition",
            format!(
                "{} eigenforms and residuals {:?} do not add up to rank {}",
                report.eigenforms.len(),
                report.residual_dimensions,
                x.rank()
            ),
        ));
    }
    for f in &report.eigenforms {
        if !x.contains(&f.lambda) {
            return Err(Error::invariant("eigenform degree", "λ does not lie in X"));
        }
        for m in heckes {
            let a = eigenvalue_of(&f.lambda, m)?;
            if f.eigenvalues.get(&m.ell()) != Some(&a) {
                return Err(Error::invariant(
                    "eigen-equation",
                    format!("recorded a_{} disagrees with λ·T_{}", m.ell(), m.ell()),
                ));
            }
            if a.abs() > hasse_bound(m.ell()) {
                return Err(Error::invariant(
                    "Hasse bound",
                    format!("a_{} = {a} exceeds 2√{}", m.ell(), m.ell()),
                ));
            }
        }
    }
    Ok(())
}
