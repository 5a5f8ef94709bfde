//! Arithmetic in GF(p) and GF(p²), and root extraction for polynomials over GF(p²).
//!
//! GF(p²) is realized as GF(p)[t]/(t² − d) where d is the least quadratic
//! non-residue mod p, so every element is a pair (a, b) meaning a + b·t.
//! Elements are plain values; all arithmetic goes through an [`Fp2`]
//! context that carries p and d.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A prime p ≥ 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 5 || !is_prime(p) {
            return Err(Error::Usage(format!("p must be a prime ≥ 5 (got {p})")));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every u64.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest d ≥ 2 with d^((p−1)/2) ≡ −1 (mod p).
pub fn least_nonresidue(p: PrimeModulus) -> u64 {
    let p = p.get();
    (2..p)
        .find(|&d| pow_mod(d, (p - 1) / 2, p) == p - 1)
        .expect("odd primes always have a non-residue")
}

/// Quadratic character of a residue mod p: 0, 1 or −1.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        0
    } else if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// The element a + b·t of GF(p²), with a, b reduced into [0, p).
///
/// Ordering is the canonical one: lexicographic on (b, a), so the
/// GF(p)-rational elements come first in their natural order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp2Elem {
    pub a: u64,
    pub b: u64,
}

impl Fp2Elem {
    pub const ZERO: Fp2Elem = Fp2Elem { a: 0, b: 0 };
    pub const ONE: Fp2Elem = Fp2Elem { a: 1, b: 0 };

    #[inline]
    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    #[inline]
    pub fn in_base_field(self) -> bool {
        self.b == 0
    }
}

impl Ord for Fp2Elem {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.b, self.a).cmp(&(other.b, other.a))
    }
}

impl PartialOrd for Fp2Elem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fp2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "t"),
            (0, b) => write!(f, "{b}t"),
            (a, 1) => write!(f, "{a}+t"),
            (a, b) => write!(f, "{a}+{b}t"),
        }
    }
}

/// Field context for GF(p²) = GF(p)[t]/(t² − d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp2 {
    p: u64,
    d: u64,
}

impl Fp2 {
    pub fn new(p: PrimeModulus) -> Self {
        Fp2 {
            p: p.get(),
            d: least_nonresidue(p),
        }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The non-residue d with t² = d.
    #[inline]
    pub fn d(&self) -> u64 {
        self.d
    }

    /// Field order p².
    pub fn order(&self) -> u128 {
        self.p as u128 * self.p as u128
    }

    pub fn elem(&self, a: u64, b: u64) -> Fp2Elem {
        Fp2Elem {
            a: a % self.p,
            b: b % self.p,
        }
    }

    pub fn from_i64(&self, v: i64) -> Fp2Elem {
        let r = v.rem_euclid(self.p as i64) as u64;
        Fp2Elem { a: r, b: 0 }
    }

    /// The generator t.
    pub fn t(&self) -> Fp2Elem {
        Fp2Elem { a: 0, b: 1 }
    }

    #[inline]
    pub fn add(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        Fp2Elem {
            a: (x.a + y.a) % self.p,
            b: (x.b + y.b) % self.p,
        }
    }

    #[inline]
    pub fn neg(&self, x: Fp2Elem) -> Fp2Elem {
        Fp2Elem {
            a: (self.p - x.a) % self.p,
            b: (self.p - x.b) % self.p,
        }
    }

    #[inline]
    pub fn sub(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        let p = self.p;
        let aa = mul_mod(x.a, y.a, p);
        let bb = mul_mod(mul_mod(x.b, y.b, p), self.d, p);
        let ab = mul_mod(x.a, y.b, p);
        let ba = mul_mod(x.b, y.a, p);
        Fp2Elem {
            a: (aa + bb) % p,
            b: (ab + ba) % p,
        }
    }

    /// Frobenius conjugate: a + b·t ↦ a − b·t.
    #[inline]
    pub fn conj(&self, x: Fp2Elem) -> Fp2Elem {
        Fp2Elem {
            a: x.a,
            b: (self.p - x.b) % self.p,
        }
    }

    /// Norm to GF(p): a² − d·b².
    pub fn norm(&self, x: Fp2Elem) -> u64 {
        let p = self.p;
        let a2 = mul_mod(x.a, x.a, p);
        let db2 = mul_mod(self.d, mul_mod(x.b, x.b, p), p);
        (a2 + p - db2) % p
    }

    pub fn inv(&self, x: Fp2Elem) -> Result<Fp2Elem> {
        if x.is_zero() {
            return Err(Error::domain("inversion of zero in GF(p²)"));
        }
        // x⁻¹ = conj(x) / norm(x); the norm is nonzero because d is a non-residue.
        let n_inv = pow_mod(self.norm(x), self.p - 2, self.p);
        let c = self.conj(x);
        Ok(Fp2Elem {
            a: mul_mod(c.a, n_inv, self.p),
            b: mul_mod(c.b, n_inv, self.p),
        })
    }

    pub fn div(&self, x: Fp2Elem, y: Fp2Elem) -> Result<Fp2Elem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, mut x: Fp2Elem, mut e: u128) -> Fp2Elem {
        let mut acc = Fp2Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// All p² elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Fp2Elem> + '_ {
        let p = self.p;
        (0..p).flat_map(move |b| (0..p).map(move |a| Fp2Elem { a, b }))
    }
}

/// Dense polynomial over GF(p²), coefficients low to high.
///
/// Always normalized: no trailing zero coefficients, so the zero
/// polynomial has an empty coefficient list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Fp2Elem>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Fp2Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Fp2Elem) -> Self {
        Poly::new(vec![c])
    }

    /// Y − r.
    pub fn linear(k: &Fp2, r: Fp2Elem) -> Self {
        Poly::new(vec![k.neg(r), Fp2Elem::ONE])
    }

    /// Build from integer coefficients, low to high.
    pub fn from_i64s(k: &Fp2, cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| k.from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[Fp2Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Fp2Elem> {
        self.coeffs.last().copied()
    }

    pub fn eval(&self, k: &Fp2, x: Fp2Elem) -> Fp2Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Fp2Elem::ZERO, |acc, &c| k.add(k.mul(acc, x), c))
    }

    pub fn add(&self, k: &Fp2, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Fp2Elem], i: usize| v.get(i).copied().unwrap_or(Fp2Elem::ZERO);
        Poly::new(
            (0..n)
                .map(|i| k.add(get(&self.coeffs, i), get(&other.coeffs, i)))
                .collect(),
        )
    }

    pub fn sub(&self, k: &Fp2, other: &Poly) -> Poly {
        let neg = Poly::new(other.coeffs.iter().map(|&c| k.neg(c)).collect());
        self.add(k, &neg)
    }

    pub fn mul(&self, k: &Fp2, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fp2Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(x, y));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, k: &Fp2, c: Fp2Elem) -> Poly {
        Poly::new(self.coeffs.iter().map(|&x| k.mul(x, c)).collect())
    }

    pub fn monic(&self, k: &Fp2) -> Result<Poly> {
        let lc = self
            .leading()
            .ok_or_else(|| Error::domain("zero polynomial has no monic form"))?;
        Ok(self.scale(k, k.inv(lc)?))
    }

    /// Euclidean division: returns (quotient, remainder).
    pub fn div_rem(&self, k: &Fp2, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::domain("polynomial division by zero"))?;
        let lc_inv = k.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), Poly::new(rem)));
        }
        let mut quot = vec![Fp2Elem::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = k.mul(rem[i], lc_inv);
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = k.sub(rem[idx], k.mul(c, dc));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn rem(&self, k: &Fp2, divisor: &Poly) -> Result<Poly> {
        Ok(self.div_rem(k, divisor)?.1)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, k: &Fp2, other: &Poly) -> Result<Poly> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(k, &b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic(k)
        }
    }

    /// base^e mod m by square-and-multiply.
    pub fn pow_mod(&self, k: &Fp2, mut e: u128, m: &Poly) -> Result<Poly> {
        let mut acc = Poly::constant(Fp2Elem::ONE).rem(k, m)?;
        let mut base = self.rem(k, m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(k, &base).rem(k, m)?;
            }
            base = base.mul(k, &base).rem(k, m)?;
            e >>= 1;
        }
        Ok(acc)
    }
}

/// Below this field order, distinct roots are found by scanning GF(p²).
const SCAN_THRESHOLD: u128 = 128;

/// Roots of `f` in GF(p²) with their multiplicities, in canonical element order.
pub fn roots_with_multiplicity(k: &Fp2, f: &Poly) -> Result<Vec<(Fp2Elem, u32)>> {
    if f.is_zero() {
        return Err(Error::domain("roots of the zero polynomial"));
    }
    let f = f.monic(k)?;
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    // The product of the distinct GF(p²)-rational linear factors.
    let y = Poly::new(vec![Fp2Elem::ZERO, Fp2Elem::ONE]);
    let frob = y.pow_mod(k, k.order(), &f)?;
    let split = f.gcd(k, &frob.sub(k, &y))?;

    let mut roots = if k.order() <= SCAN_THRESHOLD {
        k.elements()
            .filter(|&r| split.eval(k, r).is_zero())
            .collect()
    } else {
        let mut acc = Vec::new();
        split_distinct(k, &split, &mut acc)?;
        acc
    };
    roots.sort();

    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let lin = Poly::linear(k, r);
        let mut rest = f.clone();
        let mut m = 0u32;
        loop {
            let (q, rem) = rest.div_rem(k, &lin)?;
            if !rem.is_zero() {
                break;
            }
            rest = q;
            m += 1;
        }
        debug_assert!(m > 0);
        out.push((r, m));
    }
    Ok(out)
}

/// Equal-degree splitting of a monic squarefree product of distinct linear
/// factors. Shifts c are tried in canonical order, so the recursion is
/// deterministic; some shift always separates any two distinct roots.
fn split_distinct(k: &Fp2, g: &Poly, out: &mut Vec<Fp2Elem>) -> Result<()> {
    match g.degree() {
        None | Some(0) => return Ok(()),
        Some(1) => {
            out.push(k.neg(k.div(g.coeffs[0], g.coeffs[1])?));
            return Ok(());
        }
        _ => {}
    }
    let half = (k.order() - 1) / 2;
    let deg = g.degree().unwrap_or(0);
    for c in k.elements() {
        let shifted = Poly::new(vec![c, Fp2Elem::ONE]);
        let h = shifted
            .pow_mod(k, half, g)?
            .sub(k, &Poly::constant(Fp2Elem::ONE));
        let h = g.gcd(k, &h)?;
        let hd = h.degree().unwrap_or(0);
        if hd > 0 && hd < deg {
            let (rest, _) = g.div_rem(k, &h)?;
            split_distinct(k, &h, out)?;
            split_distinct(k, &rest.monic(k)?, out)?;
            return Ok(());
        }
    }
    Err(Error::invariant(
        "root splitting",
        "no shift separated the roots of a split polynomial",
    ))
}
