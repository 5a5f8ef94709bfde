//! JSON schemas shared by the CLI and the on-disk cache.
//!
//! j-invariants travel as coordinate pairs `[a, b]` meaning a + b·t with
//! t² = d, and d is stored alongside so files are self-describing. Big
//! integers are written as plain JSON numbers of any length.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::eigen::{RationalEigenform, SplitReport};
use crate::error::{Error, Result};
use crate::field::{Fp2Elem, PrimeModulus};
use crate::formulas::ComponentGroupReport;
use crate::hecke::HeckeMatrix;
use crate::lattice::SmithForm;
use crate::supersingular::{SupersingularClass, SupersingularClassSet};

mod big {
    use std::str::FromStr;

    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::ser::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Number;

    pub fn to_number(v: &BigInt) -> Result<Number, serde_json::Error> {
        Number::from_str(&v.to_string())
    }

    pub fn from_number(n: &Number) -> Result<BigInt, String> {
        BigInt::from_str(&n.to_string()).map_err(|e| format!("{n} is not an integer: {e}"))
    }

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        to_number(v).map_err(S::Error::custom)?.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_number(&Number::deserialize(d)?).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            v.iter()
                .map(to_number)
                .collect::<Result<Vec<_>, _>>()
                .map_err(S::Error::custom)?
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            Vec::<Number>::deserialize(d)?
                .iter()
                .map(from_number)
                .collect::<Result<_, _>>()
                .map_err(D::Error::custom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub j: [u64; 2],
    pub w: u32,
}

/// `{"p":11,"d":2,"classes":[{"j":[0,0],"w":3},{"j":[1,0],"w":2}]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSetJson {
    pub p: u64,
    pub d: u64,
    pub classes: Vec<ClassJson>,
}

impl From<&SupersingularClassSet> for ClassSetJson {
    fn from(cs: &SupersingularClassSet) -> Self {
        ClassSetJson {
            p: cs.p().get(),
            d: cs.d(),
            classes: cs
                .classes()
                .iter()
                .map(|c| ClassJson {
                    j: [c.j.a, c.j.b],
                    w: c.weight,
                })
                .collect(),
        }
    }
}

impl ClassSetJson {
    /// Rebuild the class set; every invariant is re-checked.
    pub fn into_class_set(self) -> Result<SupersingularClassSet> {
        let p = PrimeModulus::new(self.p)?;
        let classes = self
            .classes
            .into_iter()
            .map(|c| SupersingularClass {
                j: Fp2Elem { a: c.j[0], b: c.j[1] },
                weight: c.w,
            })
            .collect();
        SupersingularClassSet::from_parts(p, self.d, classes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeJson {
    pub p: u64,
    pub l: u64,
    pub matrix: Vec<Vec<u32>>,
}

impl HeckeJson {
    pub fn new(cs: &SupersingularClassSet, m: &HeckeMatrix) -> Self {
        HeckeJson {
            p: cs.p().get(),
            l: m.ell(),
            matrix: m.rows(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenformJson {
    pub eigenvalues: BTreeMap<u64, i64>,
    #[serde(with = "big::vec")]
    pub lambda: Vec<BigInt>,
}

impl From<&RationalEigenform> for EigenformJson {
    fn from(f: &RationalEigenform) -> Self {
        EigenformJson {
            eigenvalues: f.eigenvalues.clone(),
            lambda: f.lambda.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitJson {
    pub p: u64,
    pub eigenforms: Vec<EigenformJson>,
    pub unsplit: Vec<usize>,
}

impl SplitJson {
    pub fn new(cs: &SupersingularClassSet, split: &SplitReport) -> Self {
        SplitJson {
            p: cs.p().get(),
            eigenforms: split.eigenforms.iter().map(EigenformJson::from).collect(),
            unsplit: split.residual_dimensions.clone(),
        }
    }
}

/// Φ as its nontrivial invariant factors (the empty list for the trivial group).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiJson {
    pub p: u64,
    #[serde(with = "big::vec")]
    pub phi: Vec<BigInt>,
    #[serde(with = "big")]
    pub order: BigInt,
}

impl PhiJson {
    pub fn new(cs: &SupersingularClassSet, phi: &SmithForm) -> Self {
        PhiJson {
            p: cs.p().get(),
            phi: phi.nontrivial(),
            order: phi.torsion_order(),
        }
    }
}

/// `{"eigenvalues":{"2":-2},"lambda":[1,-1],"phi":[5],"psi":5,"coker":1,"degree":1}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub eigenvalues: BTreeMap<u64, i64>,
    #[serde(with = "big::vec")]
    pub lambda: Vec<BigInt>,
    #[serde(with = "big::vec")]
    pub phi: Vec<BigInt>,
    #[serde(with = "big")]
    pub psi: BigInt,
    #[serde(with = "big")]
    pub coker: BigInt,
    #[serde(with = "big")]
    pub degree: BigInt,
}

impl From<&ComponentGroupReport> for ComponentJson {
    fn from(r: &ComponentGroupReport) -> Self {
        ComponentJson {
            eigenvalues: r.eigenvalues.clone(),
            lambda: r.lambda.clone(),
            phi: r.phi.nontrivial(),
            psi: r.psi_order.clone(),
            coker: r.coker_order.clone(),
            degree: r.modular_degree.clone(),
        }
    }
}

pub fn to_string<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("schema types always serialize")
}

pub fn from_str<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}
