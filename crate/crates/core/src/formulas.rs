//! Monodromy pairing, the component group Φ of J₀(p), and the three
//! eigenform formulas.
//!
//! The pairing on Z^𝒞 is ⟨(C), (C′)⟩ = δ_{C,C′}·w_C and restricts to X. For
//! an eigenform vector λ = Σ λ_C (C):
//!
//! * the cokernel of Φ → Ψ has order gcd(λ_C);
//! * card Ψ = gcd over pairs of (λ_C w_C − λ_C′ w_C′);
//! * n·card Ψ = Σ λ_C² w_C, where n is the modular degree.
//!
//! Only orders are reported. The cokernel of Φ → Ψ is, strictly, dual to the
//! torsion of X/X_E rather than equal to it; a finite abelian group and its
//! dual have the same order, so the numbers are unaffected.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::eigen::RationalEigenform;
use crate::error::{Error, Result};
use crate::hecke::{CuspLattice, Divisor};
use crate::lattice::{gcd_list, smith_invariants, IntMatrix, SmithForm};
use crate::supersingular::SupersingularClassSet;

/// The pairing ⟨u, v⟩ = Σ u_C v_C w_C.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyPairing {
    weights: Vec<u32>,
}

impl MonodromyPairing {
    pub fn new(weights: Vec<u32>) -> Result<Self> {
        if weights.contains(&0) {
            return Err(Error::domain("monodromy weights must be positive"));
        }
        Ok(MonodromyPairing { weights })
    }

    pub fn for_classes(cs: &SupersingularClassSet) -> Self {
        MonodromyPairing {
            weights: cs.weights(),
        }
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Gram matrix on the D_i basis of X: G[i][j] = w_0 + δ_ij·w_i.
    pub fn gram(&self, x: &CuspLattice) -> Result<IntMatrix> {
        let basis = x.basis();
        let mut g = IntMatrix::zeros(basis.len(), basis.len());
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                g[(i, j)] = pairing(self, u, v)?;
            }
        }
        Ok(g)
    }
}

pub fn pairing(w: &MonodromyPairing, u: &[BigInt], v: &[BigInt]) -> Result<BigInt> {
    if u.len() != w.dim() || v.len() != w.dim() {
        return Err(Error::domain(format!(
            "pairing of vectors of lengths {} and {} with {} weights",
            u.len(),
            v.len(),
            w.dim()
        )));
    }
    Ok(u.iter()
        .zip(v)
        .zip(&w.weights)
        .map(|((a, b), &c)| a * b * c)
        .sum())
}

/// Invariant factors of Φ = coker(X → Hom(X, Z)).
pub fn phi_group(cs: &SupersingularClassSet) -> SmithForm {
    let x = CuspLattice::for_classes(cs);
    let g = MonodromyPairing::for_classes(cs)
        .gram(&x)
        .expect("weights match the class set");
    smith_invariants(&g)
}

/// numerator((p − 1)/12), the order of Φ.
pub fn expected_phi_order(p: u64) -> BigInt {
    let n = p - 1;
    BigInt::from(n / n.gcd(&12))
}

fn check_lambda(lambda: &[BigInt]) -> Result<()> {
    if lambda.iter().all(Zero::is_zero) {
        return Err(Error::domain("λ must be nonzero"));
    }
    if !lambda.iter().sum::<BigInt>().is_zero() {
        return Err(Error::domain("λ must have degree zero"));
    }
    Ok(())
}

fn check_lambda_with(lambda: &[BigInt], w: &MonodromyPairing) -> Result<()> {
    check_lambda(lambda)?;
    if lambda.len() != w.dim() {
        return Err(Error::domain(format!(
            "λ has {} coordinates but there are {} weights",
            lambda.len(),
            w.dim()
        )));
    }
    if lambda.len() < 2 {
        return Err(Error::domain("card Ψ needs at least two classes"));
    }
    Ok(())
}

/// Order of coker(Φ → Ψ): gcd of the coordinates of λ.
///
/// Any integer multiple of the eigenform vector is accepted; for the
/// primitive λ produced by the eigenform search this is always 1.
pub fn coker_order(lambda: &[BigInt]) -> Result<BigInt> {
    check_lambda(lambda)?;
    Ok(gcd_list(lambda))
}

/// card Ψ from the pairs (C₀, C_i); telescoping makes this the gcd over all pairs.
pub fn psi_order(lambda: &[BigInt], w: &MonodromyPairing) -> Result<BigInt> {
    check_lambda_with(lambda, w)?;
    let base = &lambda[0] * w.weights[0];
    let diffs: Vec<BigInt> = lambda
        .iter()
        .zip(&w.weights)
        .skip(1)
        .map(|(l, &c)| l * c - &base)
        .collect();
    Ok(gcd_list(&diffs))
}

/// Index of γ(X) in Hom(X_E, Z): gcd of ⟨λ, D_i⟩ over the basis of X.
pub fn gamma_index(lambda: &[BigInt], w: &MonodromyPairing, x: &CuspLattice) -> Result<BigInt> {
    check_lambda_with(lambda, w)?;
    if x.ambient_dim() != w.dim() {
        return Err(Error::domain("lattice and pairing index different class sets"));
    }
    let values = x
        .basis()
        .iter()
        .map(|d| pairing(w, lambda, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(gcd_list(&values))
}

/// ⟨λ, λ⟩ = Σ λ_C² w_C.
pub fn self_pairing(lambda: &[BigInt], w: &MonodromyPairing) -> Result<BigInt> {
    pairing(w, lambda, lambda)
}

/// n = Σ λ_C² w_C / card Ψ.
pub fn modular_degree(lambda: &[BigInt], w: &MonodromyPairing) -> Result<BigInt> {
    let psi = psi_order(lambda, w)?;
    let total = self_pairing(lambda, w)?;
    let (n, r) = total.div_rem(&psi);
    if !r.is_zero() || n < BigInt::one() {
        return Err(Error::invariant(
            "modular degree",
            format!("λ is not an eigenform image: Σλ²w = {total} is not a positive multiple of card Ψ = {psi}"),
        ));
    }
    Ok(n)
}

/// The integer m with π_*(η) = m·g, namely ⟨λ, η⟩ / card Ψ.
pub fn pi_star_on_x(lambda: &[BigInt], w: &MonodromyPairing, eta: &[BigInt]) -> Result<BigInt> {
    let psi = psi_order(lambda, w)?;
    if !eta.iter().sum::<BigInt>().is_zero() {
        return Err(Error::domain("η must lie in X (degree zero)"));
    }
    let value = pairing(w, lambda, eta)?;
    let (m, r) = value.div_rem(&psi);
    if !r.is_zero() {
        return Err(Error::invariant(
            "π_* integrality",
            format!("⟨λ, η⟩ = {value} is not divisible by card Ψ = {psi}"),
        ));
    }
    Ok(m)
}

/// Everything the formulas say about one rational eigenform at level p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentGroupReport {
    pub phi: SmithForm,
    pub psi_order: BigInt,
    pub coker_order: BigInt,
    pub modular_degree: BigInt,
    /// ⟨λ, λ⟩ = n·card Ψ.
    pub self_pairing: BigInt,
    pub lambda: Divisor,
    pub eigenvalues: BTreeMap<u64, i64>,
}

/// Apply the formulas to one eigenform, verifying every report invariant.
pub fn component_report(cs: &SupersingularClassSet, f: &RationalEigenform) -> Result<ComponentGroupReport> {
    component_report_with_phi(cs, &phi_group(cs), f)
}

/// Reports for several eigenforms of the same level, sharing one Φ computation.
pub fn component_reports(
    cs: &SupersingularClassSet,
    forms: &[RationalEigenform],
) -> Result<Vec<ComponentGroupReport>> {
    let phi = phi_group(cs);
    forms
        .iter()
        .map(|f| component_report_with_phi(cs, &phi, f))
        .collect()
}

fn component_report_with_phi(
    cs: &SupersingularClassSet,
    phi: &SmithForm,
    f: &RationalEigenform,
) -> Result<ComponentGroupReport> {
    if cs.rank_x() == 0 {
        return Err(Error::NoEigenforms);
    }
    let w = MonodromyPairing::for_classes(cs);
    let x = CuspLattice::for_classes(cs);
    let lambda = &f.lambda;

    let psi = psi_order(lambda, &w)?;
    let gamma = gamma_index(lambda, &w, &x)?;
    if psi != gamma {
        return Err(Error::invariant(
            "dual-path card Ψ",
            format!("pair gcd {psi} differs from γ index {gamma}"),
        ));
    }
    let coker = coker_order(lambda)?;
    if !(&psi % &coker).is_zero() {
        return Err(Error::invariant(
            "coker divides card Ψ",
            format!("{coker} does not divide {psi}"),
        ));
    }
    let degree = modular_degree(lambda, &w)?;
    let total = self_pairing(lambda, &w)?;
    if &degree * &psi != total {
        return Err(Error::invariant("n·card Ψ = Σλ²w", format!("{degree}·{psi} ≠ {total}")));
    }
    let expected = expected_phi_order(cs.p().get());
    if phi.torsion_order() != expected || phi.invariant_factors.iter().any(Zero::is_zero) {
        return Err(Error::invariant(
            "order of Φ",
            format!("|Φ| = {} but numerator((p−1)/12) = {expected}", phi.torsion_order()),
        ));
    }
    if phi.nontrivial().len() > 1 {
        return Err(Error::invariant("Φ cyclic", format!("Φ has factors {:?}", phi.nontrivial())));
    }
    Ok(ComponentGroupReport {
        phi: phi.clone(),
        psi_order: psi,
        coker_order: coker.abs(),
        modular_degree: degree,
        self_pairing: total,
        lambda: lambda.clone(),
        eigenvalues: f.eigenvalues.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeModulus;
    use crate::supersingular::enumerate;
    use proptest::prelude::*;

    fn big(xs: &[i64]) -> Divisor {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn w(ws: &[u32]) -> MonodromyPairing {
        MonodromyPairing::new(ws.to_vec()).unwrap()
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    // The gcd over every ordered pair, kept independent of the spanning-set shortcut.
    fn psi_all_pairs(lambda: &[BigInt], w: &MonodromyPairing) -> BigInt {
        let terms: Vec<BigInt> = lambda
            .iter()
            .zip(w.weights())
            .map(|(l, &c)| l * c)
            .collect();
        let mut diffs = Vec::new();
        for a in &terms {
            for c in &terms {
                diffs.push(a - c);
            }
        }
        gcd_list(&diffs)
    }

    #[test]
    fn pairing_fixtures() {
        let w11 = w(&[3, 2]);
        assert_eq!(pairing(&w11, &big(&[1, -1]), &big(&[1, -1])).unwrap(), b(5));
        assert_eq!(pairing(&w11, &big(&[1, -1]), &big(&[0, 0])).unwrap(), b(0));
        assert_eq!(pairing(&w11, &big(&[1, -1]), &big(&[2, 3])).unwrap(), b(0));
        assert!(pairing(&w11, &big(&[1]), &big(&[1, 1])).is_err());
    }

    #[test]
    fn phi_fixtures() {
        let phi = |p| phi_group(&enumerate(PrimeModulus::new(p).unwrap()).unwrap());
        assert_eq!(phi(11).invariant_factors, vec![b(5)]);
        assert_eq!(phi(23).invariant_factors, vec![b(1), b(11)]);
        assert!(phi(13).invariant_factors.is_empty());
        assert_eq!(phi(13).torsion_order(), b(1));
    }

    #[test]
    fn gram_at_23() {
        let g = w(&[3, 2, 1]).gram(&CuspLattice::new(3)).unwrap();
        assert_eq!(g, IntMatrix::from_rows(&[vec![5, 3], vec![3, 4]]));
    }

    #[test]
    fn coker_fixtures() {
        assert_eq!(coker_order(&big(&[1, -1])).unwrap(), b(1));
        assert_eq!(coker_order(&big(&[2, -2])).unwrap(), b(2));
        assert_eq!(coker_order(&big(&[6, -10, 4])).unwrap(), b(2));
        assert!(coker_order(&big(&[0, 0])).is_err());
        assert!(coker_order(&big(&[1, 1])).is_err());
    }

    #[test]
    fn psi_fixtures() {
        assert_eq!(psi_order(&big(&[1, -1]), &w(&[3, 2])).unwrap(), b(5));
        assert_eq!(psi_order(&big(&[1, -1]), &w(&[1, 1])).unwrap(), b(2));
        assert_eq!(psi_order(&big(&[2, -2]), &w(&[3, 2])).unwrap(), b(10));
        assert!(psi_order(&big(&[0]), &w(&[1])).is_err());
        assert!(psi_order(&big(&[0, 0]), &w(&[1, 1])).is_err());
    }

    #[test]
    fn gamma_fixtures() {
        let x = CuspLattice::new(2);
        assert_eq!(gamma_index(&big(&[1, -1]), &w(&[3, 2]), &x).unwrap(), b(5));
        assert_eq!(gamma_index(&big(&[1, -1]), &w(&[1, 1]), &x).unwrap(), b(2));
    }

    #[test]
    fn degree_fixtures() {
        assert_eq!(modular_degree(&big(&[1, -1]), &w(&[3, 2])).unwrap(), b(1));
        assert_eq!(modular_degree(&big(&[1, -1]), &w(&[1, 1])).unwrap(), b(1));
        assert_eq!(modular_degree(&big(&[2, -2]), &w(&[3, 2])).unwrap(), b(2));
        // Σλ²w = 6, card Ψ = gcd(2 + 1, −1 + 1) = 3.
        assert_eq!(modular_degree(&big(&[-1, 2, -1]), &w(&[1, 1, 1])).unwrap(), b(2));
    }

    #[test]
    fn pi_star_fixtures() {
        let ww = w(&[3, 2]);
        let l = big(&[1, -1]);
        assert_eq!(pi_star_on_x(&l, &ww, &big(&[1, -1])).unwrap(), b(1));
        assert_eq!(pi_star_on_x(&l, &ww, &big(&[0, 0])).unwrap(), b(0));
        assert_eq!(pi_star_on_x(&l, &ww, &big(&[2, -2])).unwrap(), b(2));
        assert!(pi_star_on_x(&l, &ww, &big(&[1, 0])).is_err());
    }

    #[test]
    fn report_at_11() {
        let cs = enumerate(PrimeModulus::new(11).unwrap()).unwrap();
        let f = RationalEigenform {
            lambda: big(&[1, -1]),
            eigenvalues: BTreeMap::from([(2, -2)]),
        };
        let r = component_report(&cs, &f).unwrap();
        assert_eq!(r.phi.invariant_factors, vec![b(5)]);
        assert_eq!((r.psi_order, r.coker_order, r.modular_degree), (b(5), b(1), b(1)));
    }

    #[test]
    fn report_at_13_has_no_forms() {
        let cs = enumerate(PrimeModulus::new(13).unwrap()).unwrap();
        let f = RationalEigenform {
            lambda: big(&[0]),
            eigenvalues: BTreeMap::new(),
        };
        assert!(matches!(component_report(&cs, &f), Err(Error::NoEigenforms)));
    }

    fn degree_zero_vector() -> impl Strategy<Value = (Vec<i64>, Vec<u32>)> {
        (2usize..9).prop_flat_map(|n| {
            (
                prop::collection::vec(-50i64..=50, n - 1),
                prop::collection::vec(1u32..=3, n),
            )
        })
        .prop_map(|(mut v, ws)| {
            let s: i64 = v.iter().sum();
            v.push(-s);
            (v, ws)
        })
        .prop_filter("nonzero", |(v, _)| v.iter().any(|&x| x != 0))
    }

    proptest! {
        #[test]
        fn psi_paths_agree((v, ws) in degree_zero_vector()) {
            let lambda = big(&v);
            let ww = w(&ws);
            let psi = psi_order(&lambda, &ww).unwrap();
            prop_assert_eq!(&psi, &psi_all_pairs(&lambda, &ww));
            prop_assert_eq!(&psi, &gamma_index(&lambda, &ww, &CuspLattice::new(v.len())).unwrap());
        }

        #[test]
        fn scaling_and_sign((v, ws) in degree_zero_vector(), c in -6i64..=6) {
            prop_assume!(c != 0);
            let lambda = big(&v);
            let ww = w(&ws);
            let scaled: Divisor = lambda.iter().map(|x| x * c).collect();
            let neg: Divisor = lambda.iter().map(|x| -x).collect();
            let ac = b(c.abs());
            prop_assert_eq!(coker_order(&scaled).unwrap(), coker_order(&lambda).unwrap() * &ac);
            prop_assert_eq!(psi_order(&scaled, &ww).unwrap(), psi_order(&lambda, &ww).unwrap() * &ac);
            prop_assert_eq!(psi_order(&neg, &ww).unwrap(), psi_order(&lambda, &ww).unwrap());
            prop_assert_eq!(coker_order(&neg).unwrap(), coker_order(&lambda).unwrap());
            // Σ(cλ)²w / psi(cλ) = |c|·Σλ²w / psi(λ) holds as rationals for any λ.
            let lhs = self_pairing(&scaled, &ww).unwrap() * psi_order(&lambda, &ww).unwrap();
            let rhs = self_pairing(&lambda, &ww).unwrap() * psi_order(&scaled, &ww).unwrap() * &ac;
            prop_assert_eq!(lhs, rhs);
        }

        // λ_C w_C ≡ λ_0 w_0 mod card Ψ, so for degree-zero λ and η both
        // Σλ²w and ⟨λ, η⟩ are multiples of card Ψ.
        #[test]
        fn divisibility_chain((v, ws) in degree_zero_vector(), eta in prop::collection::vec(-20i64..=20, 8)) {
            let lambda = big(&v);
            let ww = w(&ws);
            let psi = psi_order(&lambda, &ww).unwrap();
            prop_assert!((&psi % coker_order(&lambda).unwrap()).is_zero());
            prop_assert!((self_pairing(&lambda, &ww).unwrap() % &psi).is_zero());
            let mut eta: Vec<i64> = eta[..v.len() - 1].to_vec();
            eta.push(-eta.iter().sum::<i64>());
            prop_assert!(pi_star_on_x(&lambda, &ww, &big(&eta)).is_ok());
        }
    }
}
