//! Classical modular polynomials Φ_ℓ(X, Y).
//!
//! Φ₂ and Φ₃ ship with the crate; other levels are read from text files in
//! the common exponent-pair format, one `[i,j] c` line per symmetric orbit:
//!
//! ```text
//! [3,0] 1
//! [2,2] -1
//! [2,1] 1488
//! ```
//!
//! Absent pairs are zero and each line fills both (i, j) and (j, i). Every
//! loaded polynomial is checked for symmetry, the monic leading term and the
//! Kronecker congruence Φ_ℓ ≡ (X^ℓ − Y)(X − Y^ℓ) mod ℓ.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{is_prime, Fp2, Fp2Elem, Poly, PrimeModulus};

const PHI_2: &str = include_str!("../data/phi_2.txt");
const PHI_3: &str = include_str!("../data/phi_3.txt");

/// Φ_ℓ with integer coefficients, stored once per symmetric orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularPolynomial {
    level: u64,
    /// Keys (i, j) with i ≥ j; zero coefficients are not stored.
    coeffs: BTreeMap<(u32, u32), BigInt>,
}

impl ModularPolynomial {
    pub fn level(&self) -> u64 {
        self.level
    }

    /// Degree in each variable, ℓ + 1.
    pub fn degree(&self) -> u32 {
        self.level as u32 + 1
    }

    /// Coefficient of X^i Y^j.
    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        let key = if i >= j { (i, j) } else { (j, i) };
        self.coeffs.get(&key).cloned().unwrap_or_default()
    }

    /// Nonzero orbit representatives (i ≥ j) in storage order.
    pub fn orbits(&self) -> impl Iterator<Item = ((u32, u32), &BigInt)> {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    /// Degree of the polynomial in Y, for generic X.
    pub fn degree_in_y(&self) -> u32 {
        self.coeffs.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    /// Text in the exponent-pair format, highest orbit first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (&(i, j), c) in self.coeffs.iter().rev() {
            writeln!(out, "[{i},{j}] {c}").expect("writing to a String");
        }
        out
    }

    /// Dense coefficient table reduced into [0, m): `t[i][j]` is the X^i Y^j entry.
    pub fn reduce_coefficients(&self, m: u64) -> Vec<Vec<u64>> {
        let n = self.degree() as usize + 1;
        let modulus = BigInt::from(m);
        let mut t = vec![vec![0u64; n]; n];
        for (&(i, j), c) in &self.coeffs {
            let r = ((c % &modulus) + &modulus) % &modulus;
            let r = r.to_u64().expect("residue fits in u64");
            t[i as usize][j as usize] = r;
            t[j as usize][i as usize] = r;
        }
        t
    }

    fn validate(&self) -> Result<()> {
        let l = self.level;
        let top = self.degree();
        if let Some((&(i, j), _)) = self.coeffs.iter().find(|(&(i, _), _)| i > top) {
            return Err(Error::validation(
                "degree",
                format!("term [{i},{j}] exceeds degree {top} of Φ_{l}"),
            ));
        }
        if !self.coeff(top, 0).is_one() {
            return Err(Error::validation(
                "monic leading term",
                format!("coefficient of Y^{top} must be 1 (missing [{top},0] 1)"),
            ));
        }
        if let Some(j) = (1..=top).find(|&j| !self.coeff(top, j).is_zero()) {
            return Err(Error::validation(
                "monic leading term",
                format!("term [{top},{j}] breaks monicity in Y"),
            ));
        }
        let reduced = self.reduce_coefficients(l);
        let expected = kronecker_table(l);
        for (i, (row, exp_row)) in reduced.iter().zip(&expected).enumerate() {
            for (j, (got, want)) in row.iter().zip(exp_row).enumerate() {
                if got != want {
                    return Err(Error::validation(
                        "Kronecker congruence",
                        format!("coefficient of X^{i} Y^{j} is {got} mod {l}, expected {want}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Dense table of (X^ℓ − Y)(X − Y^ℓ) mod ℓ.
pub fn kronecker_table(l: u64) -> Vec<Vec<u64>> {
    let n = l as usize + 2;
    let m1 = l - 1;
    let mut t = vec![vec![0u64; n]; n];
    let (a, b) = (l as usize + 1, l as usize);
    t[a][0] = 1;
    t[0][a] = 1;
    t[b][b] = m1;
    t[1][1] = m1;
    t
}

/// Φ₂ or Φ₃ from the built-in tables.
pub fn embedded_phi(level: u64) -> Result<ModularPolynomial> {
    let text = match level {
        2 => PHI_2,
        3 => PHI_3,
        _ => {
            return Err(Error::Usage(format!(
                "Φ_{level} is not embedded, supply a database file phi_{level}.txt"
            )))
        }
    };
    Ok(parse_phi_file(text, level).expect("embedded tables are valid"))
}

/// Parse and validate a modular polynomial file.
pub fn parse_phi_file(text: &str, level: u64) -> Result<ModularPolynomial> {
    if !is_prime(level) {
        return Err(Error::domain(format!("level {level} is not prime")));
    }
    let mut coeffs: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let ((i, j), c) = parse_line(line).map_err(|message| Error::Parse {
            line: lineno,
            message,
        })?;
        let key = if i >= j { (i, j) } else { (j, i) };
        if let Some(prev) = coeffs.get(&key) {
            if *prev != c {
                return Err(Error::validation(
                    "symmetry",
                    format!(
                        "line {lineno}: [{i},{j}] = {c} conflicts with its mirror value {prev}"
                    ),
                ));
            }
            continue;
        }
        if !c.is_zero() {
            coeffs.insert(key, c);
        }
    }
    let phi = ModularPolynomial { level, coeffs };
    phi.validate()?;
    Ok(phi)
}

fn parse_line(line: &str) -> std::result::Result<((u32, u32), BigInt), String> {
    let rest = line
        .strip_prefix('[')
        .ok_or_else(|| format!("expected '[' at start of {line:?}"))?;
    let (pair, value) = rest
        .split_once(']')
        .ok_or_else(|| format!("missing ']' in {line:?}"))?;
    let (i, j) = pair
        .split_once(',')
        .ok_or_else(|| format!("expected an exponent pair 'i,j' in {line:?}"))?;
    let exp = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| format!("bad exponent {:?}", s.trim()))
    };
    let (i, j) = (exp(i)?, exp(j)?);
    let value = value.trim();
    let digits = value.strip_prefix(['-', '+']).unwrap_or(value);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("bad coefficient {value:?}"));
    }
    let c = BigInt::from_str(value).map_err(|e| format!("bad coefficient {value:?}: {e}"))?;
    Ok(((i, j), c))
}

/// Φ_ℓ with coefficients in GF(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedModularPolynomial {
    level: u64,
    p: PrimeModulus,
    /// Dense, `coeffs[i][j]` multiplies X^i Y^j.
    coeffs: Vec<Vec<u64>>,
}

impl ReducedModularPolynomial {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn coeff(&self, i: usize, j: usize) -> u64 {
        self.coeffs[i][j]
    }

    /// Φ_ℓ(x, Y) as a polynomial in Y over GF(p²).
    pub fn specialize_x(&self, k: &Fp2, x: Fp2Elem) -> Poly {
        let n = self.coeffs.len();
        let ys = (0..n)
            .map(|j| {
                (0..n).rev().fold(Fp2Elem::ZERO, |acc, i| {
                    k.add(k.mul(acc, x), k.elem(self.coeffs[i][j], 0))
                })
            })
            .collect();
        Poly::new(ys)
    }
}

/// Reduce Φ_ℓ modulo p. Fails when ℓ = p.
pub fn reduce_mod_p(phi: &ModularPolynomial, p: PrimeModulus) -> Result<ReducedModularPolynomial> {
    if phi.level == p.get() {
        return Err(Error::domain(format!(
            "T_{p} not available via Φ_{p}: the level must differ from p"
        )));
    }
    Ok(ReducedModularPolynomial {
        level: phi.level,
        p,
        coeffs: phi.reduce_coefficients(p.get()),
    })
}

/// Source of modular polynomials: `phi_l.txt` files in an optional
/// directory, falling back to the embedded Φ₂ and Φ₃.
///
/// Loaded polynomials are cached; a file in the directory takes precedence
/// over the embedded table of the same level.
#[derive(Debug, Default)]
pub struct ModPolyDb {
    dir: Option<PathBuf>,
    loaded: Mutex<HashMap<u64, Arc<ModularPolynomial>>>,
}

impl ModPolyDb {
    pub fn embedded() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        ModPolyDb {
            dir: Some(dir.into()),
            loaded: Mutex::default(),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn get(&self, level: u64) -> Result<Arc<ModularPolynomial>> {
        if let Some(phi) = self.loaded.lock().expect("modpoly cache poisoned").get(&level) {
            return Ok(phi.clone());
        }
        let phi = Arc::new(self.load(level)?);
        self.loaded
            .lock()
            .expect("modpoly cache poisoned")
            .insert(level, phi.clone());
        Ok(phi)
    }

    fn load(&self, level: u64) -> Result<ModularPolynomial> {
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("phi_{level}.txt"));
            if path.is_file() {
                let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                return parse_phi_file(&text, level);
            }
        }
        embedded_phi(level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    #[test]
    fn phi2_coefficients() {
        let phi = embedded_phi(2).unwrap();
        assert_eq!(phi.coeff(2, 2), BigInt::from(-1));
        assert_eq!(phi.coeff(3, 0), BigInt::one());
        assert_eq!(phi.coeff(1, 2), BigInt::from(1488));
        assert_eq!(phi.coeff(0, 0), BigInt::from(-157_464_000_000_000i64));
        assert_eq!(phi.degree_in_y(), 3);
    }

    #[test]
    fn phi_is_symmetric() {
        for l in [2, 3] {
            let phi = embedded_phi(l).unwrap();
            for i in 0..=phi.degree() {
                for j in 0..=phi.degree() {
                    assert_eq!(phi.coeff(i, j), phi.coeff(j, i));
                }
            }
        }
    }

    #[test]
    fn phi3_degree() {
        let phi = embedded_phi(3).unwrap();
        assert_eq!(phi.degree_in_y(), 4);
        assert_eq!(
            phi.coeff(0, 1),
            BigInt::from_str("1855425871872000000000").unwrap()
        );
    }

    #[test]
    fn other_levels_are_not_embedded() {
        let err = embedded_phi(5).unwrap_err();
        assert!(err.to_string().contains("supply a database file"));
    }

    #[test]
    fn serialized_table_regenerates_byte_for_byte() {
        assert_eq!(embedded_phi(2).unwrap().to_text(), PHI_2);
        assert_eq!(embedded_phi(3).unwrap().to_text(), PHI_3);
        let reparsed = parse_phi_file(&embedded_phi(2).unwrap().to_text(), 2).unwrap();
        assert_eq!(reparsed, embedded_phi(2).unwrap());
    }

    #[test]
    fn line_order_and_blank_lines_do_not_matter() {
        for l in [2, 3] {
            let phi = embedded_phi(l).unwrap();
            let src = if l == 2 { PHI_2 } else { PHI_3 };
            let mut lines: Vec<&str> = src.lines().collect();
            lines.reverse();
            assert_eq!(parse_phi_file(&lines.join("\n\n"), l).unwrap(), phi);
        }
    }

    #[test]
    fn mirrored_lines_are_accepted() {
        let text = PHI_2.replace("[2,1] 1488", "[1,2] 1488");
        assert_eq!(parse_phi_file(&text, 2).unwrap(), embedded_phi(2).unwrap());
    }

    #[test]
    fn incomplete_file_fails_validation() {
        let err = parse_phi_file("[0,3] 1\n", 2).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }), "{err}");
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let text = "[3,0] 1\n[2,2 −1\n";
        match parse_phi_file(text, 2).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        for bad in ["3,0] 1", "[3;0] 1", "[3,0]", "[a,0] 1", "[3,0] 1.5", "[3,0] --1"] {
            assert!(
                matches!(parse_phi_file(bad, 2), Err(Error::Parse { line: 1, .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn missing_leading_term_is_rejected() {
        let text = PHI_2.replace("[3,0] 1\n", "");
        let err = parse_phi_file(&text, 2).unwrap_err();
        assert!(err.to_string().contains("monic"), "{err}");
    }

    #[test]
    fn asymmetric_file_is_rejected() {
        let text = format!("{PHI_2}[1,2] 1489\n");
        let err = parse_phi_file(&text, 2).unwrap_err();
        assert!(err.to_string().contains("symmetry"), "{err}");
    }

    #[test]
    fn corrupted_coefficient_fails_kronecker() {
        // 40773375 is odd; making it even breaks the XY term mod 2.
        let text = PHI_2.replace("40773375", "40773376");
        let err = parse_phi_file(&text, 2).unwrap_err();
        assert!(err.to_string().contains("Kronecker"), "{err}");
    }

    #[test]
    fn over_degree_term_is_rejected() {
        let text = format!("{PHI_2}[4,0] 2\n");
        assert!(parse_phi_file(&text, 2).unwrap_err().to_string().contains("degree"));
    }

    #[test]
    fn phi2_mod_2_is_kronecker_product() {
        // (X² − Y)(X − Y²) = X³ − X²Y² − XY + Y³ over GF(2).
        let t = embedded_phi(2).unwrap().reduce_coefficients(2);
        let mut expected = vec![vec![0u64; 4]; 4];
        expected[3][0] = 1;
        expected[0][3] = 1;
        expected[2][2] = 1;
        expected[1][1] = 1;
        assert_eq!(t, expected);
    }

    #[test]
    fn phi2_mod_11_specializations() {
        let k = Fp2::new(p(11));
        let red = reduce_mod_p(&embedded_phi(2).unwrap(), p(11)).unwrap();
        assert_eq!(
            red.specialize_x(&k, Fp2Elem::ZERO),
            Poly::from_i64s(&k, &[-1, 3, -3, 1])
        );
        assert_eq!(
            red.specialize_x(&k, Fp2Elem::ONE),
            Poly::from_i64s(&k, &[0, 0, -1, 1])
        );
    }

    #[test]
    fn reduction_at_the_level_itself_fails() {
        let phi = embedded_phi(2).unwrap();
        // Any p ≥ 5 is fine; ℓ = p only arises for file-supplied levels.
        assert!(reduce_mod_p(&phi, p(5)).is_ok());
        let phi5 = ModularPolynomial {
            level: 5,
            coeffs: BTreeMap::new(),
        };
        assert!(reduce_mod_p(&phi5, p(5)).is_err());
    }

    #[test]
    fn directory_files_override_embedded() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("phi_2.txt"), PHI_2).unwrap();
        let db = ModPolyDb::with_dir(dir.path());
        assert_eq!(*db.get(2).unwrap(), embedded_phi(2).unwrap());
        assert_eq!(*db.get(3).unwrap(), embedded_phi(3).unwrap());
        assert!(db.get(5).is_err());
        std::fs::write(dir.path().join("phi_5.txt"), "[6,0] 1\n").unwrap();
        assert!(matches!(
            ModPolyDb::with_dir(dir.path()).get(5),
            Err(Error::Validation { .. })
        ));
    }

    // Integer evaluation of Φ_ℓ(x, Y) followed by reduction, independent of
    // the dense reduced table.
    fn specialize_then_reduce(phi: &ModularPolynomial, x: i64, p: u64) -> Vec<i64> {
        let n = phi.degree();
        let modulus = BigInt::from(p);
        (0..=n)
            .map(|j| {
                let v: BigInt = (0..=n)
                    .map(|i| phi.coeff(i, j) * BigInt::from(x).pow(i))
                    .sum();
                (((v % &modulus) + &modulus) % &modulus).to_i64().unwrap()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn reduction_commutes_with_specialization(
            l in prop::sample::select(vec![2u64, 3]),
            pr in prop::sample::select(vec![5u64, 7, 11, 13, 101, 199, 1009]),
            x in -10_000i64..10_000,
        ) {
            let phi = embedded_phi(l).unwrap();
            let k = Fp2::new(p(pr));
            let red = reduce_mod_p(&phi, p(pr)).unwrap();
            let lhs = red.specialize_x(&k, k.from_i64(x));
            let rhs = Poly::from_i64s(&k, &specialize_then_reduce(&phi, x, pr));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
