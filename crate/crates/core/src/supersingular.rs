//! The set of supersingular j-invariants in characteristic p, with weights.
//!
//! The set is found by breadth-first search in the 2-isogeny graph, starting
//! from a GF(p)-rational supersingular j and following the roots of
//! Φ₂(j, Y) over GF(p²). The graph is connected, so the search is complete.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{least_nonresidue, roots_with_multiplicity, Fp2, Fp2Elem, PrimeModulus};
use crate::modpoly::{embedded_phi, reduce_mod_p, ModularPolynomial};

/// One supersingular class: its j-invariant and w = |Aut|/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupersingularClass {
    pub j: Fp2Elem,
    pub weight: u32,
}

/// The supersingular classes in canonical j order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupersingularClassSet {
    p: PrimeModulus,
    d: u64,
    classes: Vec<SupersingularClass>,
}

/// 1728 reduced mod p.
pub fn j1728(p: PrimeModulus) -> u64 {
    1728 % p.get()
}

/// w = 3 at j = 0, 2 at j = 1728, 1 elsewhere.
pub fn weight_of(p: PrimeModulus, j: Fp2Elem) -> u32 {
    if j.is_zero() {
        3
    } else if j.b == 0 && j.a == j1728(p) {
        2
    } else {
        1
    }
}

/// Number of supersingular classes, from p mod 12.
pub fn expected_class_count(p: PrimeModulus) -> usize {
    let p = p.get() as usize;
    match p % 12 {
        1 => (p - 1) / 12,
        5 => (p + 7) / 12,
        7 => (p + 5) / 12,
        11 => (p + 13) / 12,
        _ => unreachable!("p ≥ 5 is prime"),
    }
}

/// (p − 1)/12 as an exact rational.
pub fn expected_mass(p: PrimeModulus) -> BigRational {
    BigRational::new(BigInt::from(p.get() - 1), BigInt::from(12))
}

/// Number of GF(p)-points (including infinity) on a curve with invariant j ∈ GF(p).
///
/// Models: y² = x³ + 1 at j = 0, y² = x³ + x at j = 1728, otherwise
/// y² = x³ + 3kx + 2k with k = j/(1728 − j).
pub fn count_points(p: PrimeModulus, j: u64) -> u64 {
    let pp = p.get();
    let j = j % pp;
    let (a, b) = if j == 0 {
        (0, 1)
    } else if j == j1728(p) {
        (1, 0)
    } else {
        let k = Fp2::new(p);
        let kk = k
            .div(k.elem(j, 0), k.elem((j1728(p) + pp - j) % pp, 0))
            .expect("j ≠ 1728")
            .a;
        (3 * kk % pp, 2 * kk % pp)
    };
    let mut is_square = vec![false; pp as usize];
    for y in 0..pp {
        is_square[(y * y % pp) as usize] = true;
    }
    let mut count = 1; // point at infinity
    for x in 0..pp {
        let v = ((x * x % pp * x + a * x) % pp + b) % pp;
        count += if v == 0 {
            1
        } else if is_square[v as usize] {
            2
        } else {
            0
        };
    }
    count
}

/// Whether the curve with invariant j is supersingular.
///
/// GF(p)-rational j are decided by point counting (supersingular iff the
/// count is p + 1); other j by membership in the enumerated set.
pub fn is_supersingular(p: PrimeModulus, j: Fp2Elem) -> Result<bool> {
    if j.in_base_field() {
        Ok(count_points(p, j.a) == p.get() + 1)
    } else {
        Ok(enumerate(p)?.index_of(j).is_some())
    }
}

/// A GF(p)-rational supersingular j-invariant.
pub fn find_seed(p: PrimeModulus) -> Fp2Elem {
    let pp = p.get();
    let a = if pp % 4 == 3 {
        j1728(p)
    } else if pp % 3 == 2 {
        0
    } else {
        (0..pp)
            .find(|&j| count_points(p, j) == pp + 1)
            .expect("a GF(p)-rational supersingular j always exists")
    };
    Fp2Elem { a, b: 0 }
}

/// Enumerate all supersingular classes using the embedded Φ₂.
pub fn enumerate(p: PrimeModulus) -> Result<SupersingularClassSet> {
    let phi2 = embedded_phi(2)?;
    enumerate_from(p, &phi2, find_seed(p))
}

/// Breadth-first search along Φ_ℓ from `seed`.
pub fn enumerate_from(
    p: PrimeModulus,
    phi: &ModularPolynomial,
    seed: Fp2Elem,
) -> Result<SupersingularClassSet> {
    let k = Fp2::new(p);
    let seed = k.elem(seed.a, seed.b);
    if seed.in_base_field() && count_points(p, seed.a) != p.get() + 1 {
        return Err(Error::domain(format!("seed j = {seed} is not supersingular mod {p}")));
    }
    let reduced = reduce_mod_p(phi, p)?;
    let bound = expected_class_count(p);

    let mut seen = BTreeSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    while let Some(j) = queue.pop_front() {
        for (r, _) in roots_with_multiplicity(&k, &reduced.specialize_x(&k, j))? {
            if seen.insert(r) {
                if seen.len() > bound {
                    return Err(Error::DataCorruption(format!(
                        "isogeny search at p = {p} passed the class bound {bound} (bad Φ_{} data?)",
                        phi.level()
                    )));
                }
                queue.push_back(r);
            }
        }
    }

    let classes = seen
        .into_iter()
        .map(|j| SupersingularClass {
            j,
            weight: weight_of(p, j),
        })
        .collect();
    let set = SupersingularClassSet {
        p,
        d: k.d(),
        classes,
    };
    set.check_invariants()?;
    Ok(set)
}

impl SupersingularClassSet {
    /// Rebuild a set from stored parts, checking every invariant.
    pub fn from_parts(p: PrimeModulus, d: u64, classes: Vec<SupersingularClass>) -> Result<Self> {
        let set = SupersingularClassSet { p, d, classes };
        set.check_invariants()?;
        Ok(set)
    }

    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    /// The non-residue d defining GF(p²) = GF(p)[t]/(t² − d).
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn field(&self) -> Fp2 {
        Fp2::new(self.p)
    }

    pub fn classes(&self) -> &[SupersingularClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Rank of the degree-zero lattice X.
    pub fn rank_x(&self) -> usize {
        self.classes.len().saturating_sub(1)
    }

    pub fn weights(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c.weight).collect()
    }

    pub fn index_of(&self, j: Fp2Elem) -> Option<usize> {
        self.classes.binary_search_by(|c| c.j.cmp(&j)).ok()
    }

    /// Σ 1/w over the classes.
    pub fn mass(&self) -> BigRational {
        self.classes
            .iter()
            .map(|c| BigRational::new(1.into(), c.weight.into()))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn is_frobenius_stable(&self) -> bool {
        let k = self.field();
        self.classes
            .iter()
            .all(|c| self.index_of(k.conj(c.j)).is_some())
    }

    pub fn check_invariants(&self) -> Result<()> {
        let p = self.p;
        if self.d != least_nonresidue(p) {
            return Err(Error::invariant(
                "field representation",
                format!("d = {} is not the least non-residue mod {p}", self.d),
            ));
        }
        if let Some(c) = self
            .classes
            .iter()
            .find(|c| c.j.a >= p.get() || c.j.b >= p.get())
        {
            return Err(Error::invariant(
                "field representation",
                format!("j = ({}, {}) is not reduced mod {p}", c.j.a, c.j.b),
            ));
        }
        if !self.classes.windows(2).all(|w| w[0].j < w[1].j) {
            return Err(Error::invariant(
                "canonical order",
                "classes are not strictly increasing in canonical order",
            ));
        }
        if let Some(c) = self.classes.iter().find(|c| c.weight != weight_of(p, c.j)) {
            return Err(Error::invariant(
                "weights",
                format!("class j = {} carries weight {}", c.j, c.weight),
            ));
        }
        let expected = expected_class_count(p);
        if self.len() != expected {
            return Err(Error::invariant(
                "class count",
                format!("{} classes at p = {p}, expected {expected}", self.len()),
            ));
        }
        if self.mass() != expected_mass(p) {
            return Err(Error::invariant(
                "mass formula",
                format!("Σ 1/w = {} at p = {p}, expected {}", self.mass(), expected_mass(p)),
            ));
        }
        if !self.is_frobenius_stable() {
            return Err(Error::invariant(
                "Frobenius stability",
                format!("class set at p = {p} is not closed under conjugation"),
            ));
        }
        if let Some(c) = self
            .classes
            .iter()
            .find(|c| c.j.in_base_field() && count_points(p, c.j.a) != p.get() + 1)
        {
            return Err(Error::invariant(
                "supersingularity",
                format!("j = {} is ordinary mod {p}", c.j),
            ));
        }
        Ok(())
    }
}
