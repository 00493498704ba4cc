//! Exact coefficient arithmetic: Q and simple extensions Q[t]/(m(t)),
//! sparse multivariate polynomials with weighted degrees, truncated
//! power series, and exact Gaussian elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from(BigInt::from(n))
}

/// Floor of a rational as an i64-backed BigInt fraction.
pub fn q_floor(x: &Q) -> Q {
    Q::from(x.floor().to_integer())
}

/// Fractional part {x} = x - floor(x), in [0,1).
pub fn q_frac(x: &Q) -> Q {
    x - q_floor(x)
}

#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("declared modulus is reducible: discovered factor {factor}")]
    ReducibleModulus { factor: String },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0}")]
    Domain(String),
}

/// The coefficient field Q[t]/(m(t)) for a declared monic m.
/// Plain Q is represented by m(t) = t (degree 1, coords of length 1,
/// and t itself reduces to 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    /// Coefficients of m, low to high; last entry is 1 (monic).
    modulus: Vec<Q>,
}

impl Field {
    pub fn rationals() -> Arc<Field> {
        Arc::new(Field {
            modulus: vec![Q::zero(), Q::one()],
        })
    }

    /// `modulus`: coefficients of a monic m(t), low to high.
    pub fn extension(modulus: Vec<Q>) -> Result<Arc<Field>, AlgebraError> {
        if modulus.len() < 2 {
            return Err(AlgebraError::Domain("modulus must have degree >= 1".into()));
        }
        if !modulus.last().unwrap().is_one() {
            return Err(AlgebraError::Domain("modulus must be monic".into()));
        }
        Ok(Arc::new(Field { modulus }))
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1 && self.modulus[0].is_zero()
    }
}

/// An element of Q[t]/(m); `coords` always has length deg(m).
#[derive(Debug, Clone)]
pub struct FieldElement {
    pub field: Arc<Field>,
    pub coords: Vec<Q>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}
impl Eq for FieldElement {}

impl FieldElement {
    pub fn zero(field: &Arc<Field>) -> Self {
        FieldElement {
            field: field.clone(),
            coords: vec![Q::zero(); field.degree()],
        }
    }

    pub fn one(field: &Arc<Field>) -> Self {
        Self::from_rational(field, Q::one())
    }

    pub fn from_rational(field: &Arc<Field>, r: Q) -> Self {
        let mut coords = vec![Q::zero(); field.degree()];
        coords[0] = r;
        FieldElement {
            field: field.clone(),
            coords,
        }
    }

    /// The residue class of t (zero in plain Q, where m(t) = t).
    pub fn generator(field: &Arc<Field>) -> Self {
        let mut coords = vec![Q::zero(); field.degree()];
        if field.degree() >= 2 {
            coords[1] = Q::one();
        }
        FieldElement {
            field: field.clone(),
            coords,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Q> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        FieldElement {
            field: self.field.clone(),
            coords,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        FieldElement {
            field: self.field.clone(),
            coords,
        }
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.field.degree();
        let mut prod = vec![Q::zero(); 2 * n];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        let coords = reduce_mod(&prod, &self.field.modulus);
        FieldElement {
            field: self.field.clone(),
            coords,
        }
    }

    pub fn scale(&self, r: &Q) -> Self {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|a| a * r).collect(),
        }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm in
    /// Q[t].  A gcd of positive degree certifies the modulus reducible
    /// and is reported verbatim.
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if self.field.degree() == 1 {
            return Ok(Self::from_rational(
                &self.field,
                self.coords[0].recip(),
            ));
        }
        // (g, s) with g = gcd(a, m), s*a = g mod m
        let (g, s) = half_ext_gcd(&self.coords, &self.field.modulus);
        if poly_deg(&g) != 0 {
            return Err(AlgebraError::ReducibleModulus {
                factor: poly_to_string(&g),
            });
        }
        let lead = g[0].recip();
        let inv = s.iter().map(|c| c * &lead).collect::<Vec<_>>();
        let coords = reduce_mod(&inv, &self.field.modulus);
        Ok(FieldElement {
            field: self.field.clone(),
            coords,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{}", i),
            };
            let coeff = if i > 0 && c.is_one() {
                String::new()
            } else if i > 0 && (-c).is_one() {
                "-".into()
            } else if i > 0 {
                format!("{}*", c)
            } else {
                format!("{}", c)
            };
            parts.push(format!("{}{}", coeff, var));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
        write!(f, "{}", s)
    }
}

fn poly_deg(p: &[Q]) -> isize {
    for i in (0..p.len()).rev() {
        if !p[i].is_zero() {
            return i as isize;
        }
    }
    -1
}

fn poly_to_string(p: &[Q]) -> String {
    let mut parts = vec![];
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        match i {
            0 => parts.push(format!("{}", c)),
            1 => parts.push(format!("{}*t", c)),
            _ => parts.push(format!("{}*t^{}", c, i)),
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Remainder of p modulo monic m, returned with length deg(m).
fn reduce_mod(p: &[Q], m: &[Q]) -> Vec<Q> {
    let n = m.len() - 1;
    let mut r: Vec<Q> = p.to_vec();
    if r.len() < n {
        r.resize(n, Q::zero());
    }
    for i in (n..r.len()).rev() {
        if r[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut r[i], Q::zero());
        for j in 0..n {
            let sub = &c * &m[j];
            r[i - n + j] -= sub;
        }
    }
    r.truncate(n);
    r.resize(n, Q::zero());
    r
}

/// Extended gcd in Q[t] tracking only the first Bezout coefficient:
/// returns (g, s) with s*a ≡ g (mod b).
fn half_ext_gcd(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut r0 = b.to_vec();
    let mut r1 = a.to_vec();
    let mut s0 = vec![Q::zero()];
    let mut s1 = vec![Q::one()];
    while poly_deg(&r1) >= 0 {
        let (quot, rem) = poly_divmod(&r0, &r1);
        let s_new = poly_sub(&s0, &poly_mul(&quot, &s1));
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s_new;
    }
    (r0, s0)
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    let mut out = vec![Q::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    out
}

fn poly_divmod(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let db = poly_deg(b);
    assert!(db >= 0, "division by zero polynomial");
    let db = db as usize;
    let lead = b[db].clone();
    let mut rem = a.to_vec();
    let da = poly_deg(&rem);
    if da < db as isize {
        return (vec![], rem);
    }
    let mut quot = vec![Q::zero(); da as usize - db + 1];
    for i in (db..=da as usize).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / &lead;
        quot[i - db] = c.clone();
        for j in 0..=db {
            let sub = &c * &b[j];
            rem[i - db + j] -= sub;
        }
    }
    while rem.last().map(|c| c.is_zero()).unwrap_or(false) {
        rem.pop();
    }
    (quot, rem)
}

/// Sparse multivariate polynomial; exponent tuples of fixed arity map
/// to nonzero coefficients.  Keys are stored in plain lex order;
/// graded-lex listings are produced on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    pub arity: usize,
    pub field: Arc<Field>,
    pub terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl SparsePoly {
    pub fn zero(field: &Arc<Field>, arity: usize) -> Self {
        SparsePoly {
            arity,
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Arc<Field>, arity: usize, c: FieldElement) -> Self {
        let mut p = Self::zero(field, arity);
        p.add_term(vec![0; arity], c);
        p
    }

    pub fn monomial(field: &Arc<Field>, expo: Vec<u32>, c: FieldElement) -> Self {
        let mut p = Self::zero(field, expo.len());
        p.add_term(expo, c);
        p
    }

    pub fn var(field: &Arc<Field>, arity: usize, idx: usize) -> Self {
        let mut e = vec![0; arity];
        e[idx] = 1;
        Self::monomial(field, e, FieldElement::one(field))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, expo: Vec<u32>, c: FieldElement) {
        assert_eq!(expo.len(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(expo) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.field, self.arity);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c.neg());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.field, self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let mut out = Self::zero(&self.field, self.arity);
        for (e, co) in &self.terms {
            out.add_term(e.clone(), co.mul(c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(&self.field, self.arity, FieldElement::one(&self.field));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn w_degree(expo: &[u32], w: &[i64]) -> i64 {
        expo.iter().zip(w).map(|(e, wi)| *e as i64 * wi).sum()
    }

    /// Common w-degree of all terms, or the two offending exponents.
    pub fn homogeneous_w_degree(&self, w: &[i64]) -> Result<i64, (Vec<u32>, Vec<u32>)> {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(e) => e,
            None => return Ok(0),
        };
        let d = Self::w_degree(first, w);
        for e in it {
            if Self::w_degree(e, w) != d {
                return Err((first.clone(), e.clone()));
            }
        }
        Ok(d)
    }

    /// Coefficient-wise substitution t -> value of the field generator
    /// is not needed; this substitutes variables by polynomials.
    pub fn substitute_polys(&self, images: &[SparsePoly]) -> SparsePoly {
        assert_eq!(images.len(), self.arity);
        let arity = images[0].arity;
        let mut out = SparsePoly::zero(&self.field, arity);
        for (e, c) in &self.terms {
            let mut term = SparsePoly::constant(&self.field, arity, c.clone());
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    term = term.mul(&images[i].pow(ei));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Exponent keys in graded-lex order (total degree, then lex).
    pub fn monomials_graded_lex(&self) -> Vec<Vec<u32>> {
        let mut keys: Vec<_> = self.terms.keys().cloned().collect();
        keys.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
        keys
    }

    pub fn coeff(&self, expo: &[u32]) -> FieldElement {
        self.terms
            .get(expo)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(&self.field))
    }
}

pub fn monomial_string(expo: &[u32], vars: &[&str]) -> String {
    let mut parts = vec![];
    for (e, v) in expo.iter().zip(vars) {
        match e {
            0 => {}
            1 => parts.push(v.to_string()),
            _ => parts.push(format!("{}^{}", v, e)),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let vars: &[&str] = match self.arity {
            1 => &["x"],
            2 => &["x", "y"],
            _ => &["x", "y", "z"],
        };
        let mut first = true;
        for e in self.monomials_graded_lex() {
            let c = &self.terms[&e];
            let m = monomial_string(&e, vars);
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m == "1" {
                write!(f, "{}", c)?;
            } else if c.as_rational().map(|r| r.is_one()).unwrap_or(false) {
                write!(f, "{}", m)?;
            } else {
                write!(f, "({})*{}", c, m)?;
            }
        }
        Ok(())
    }
}

/// Two-variable jet: all terms of total degree >= `order` are unknown
/// and never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub poly: SparsePoly,
    pub order: u32,
}

impl TruncatedSeries {
    pub fn new(mut poly: SparsePoly, order: u32) -> Self {
        assert!(order >= 1);
        poly.terms.retain(|e, _| e.iter().sum::<u32>() < order);
        TruncatedSeries { poly, order }
    }

    pub fn zero(field: &Arc<Field>, order: u32) -> Self {
        Self::new(SparsePoly::zero(field, 2), order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        Self::new(self.poly.add(&other.poly), order)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        Self::new(self.poly.mul(&other.poly), order)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::new(
            SparsePoly::constant(&self.poly.field, 2, FieldElement::one(&self.poly.field)),
            self.order,
        );
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Jet of f(images) to total degree < order.  `images` must cover all
/// variables of f, in variable order.
pub fn substitute(f: &SparsePoly, images: &[TruncatedSeries], order: u32) -> TruncatedSeries {
    assert_eq!(images.len(), f.arity);
    let field = &f.field;
    let mut out = TruncatedSeries::zero(field, order);
    for (e, c) in &f.terms {
        let mut term = TruncatedSeries::new(
            SparsePoly::constant(field, 2, c.clone()),
            order,
        );
        for (i, &ei) in e.iter().enumerate() {
            if ei > 0 {
                let img = TruncatedSeries::new(images[i].poly.clone(), order);
                term = term.mul(&img.pow(ei));
            }
        }
        out = out.add(&term);
    }
    out
}

/// Exact rank and right-kernel basis over the declared field.
/// Gaussian elimination, first-nonzero pivot in column order.
pub fn rank_kernel(
    matrix: &[Vec<FieldElement>],
    ncols: usize,
    field: &Arc<Field>,
) -> Result<(usize, Vec<Vec<FieldElement>>), AlgebraError> {
    let mut rows: Vec<Vec<FieldElement>> = matrix.to_vec();
    let nrows = rows.len();
    let mut pivot_cols = vec![];
    let mut r = 0usize;
    for c in 0..ncols {
        let mut piv = None;
        for i in r..nrows {
            if !rows[i][c].is_zero() {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv()?;
        for j in 0..ncols {
            rows[r][j] = rows[r][j].mul(&inv);
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let s = rows[r][j].mul(&f);
                    rows[i][j] = rows[i][j].sub(&s);
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    let rank = pivot_cols.len();
    // Kernel: one basis vector per free column.
    let mut kernel = vec![];
    let piv_set: std::collections::BTreeSet<usize> = pivot_cols.iter().cloned().collect();
    for c in 0..ncols {
        if piv_set.contains(&c) {
            continue;
        }
        let mut v = vec![FieldElement::zero(field); ncols];
        v[c] = FieldElement::one(field);
        for (ri, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = rows[ri][c].neg();
        }
        kernel.push(v);
    }
    Ok((rank, kernel))
}

/// Reduced row echelon form: the nonzero rows (a canonical basis of
/// the row space) together with the pivot column indices.
pub fn rref(
    matrix: &[Vec<FieldElement>],
    ncols: usize,
) -> Result<(Vec<Vec<FieldElement>>, Vec<usize>), AlgebraError> {
    let mut rows: Vec<Vec<FieldElement>> = matrix.to_vec();
    let nrows = rows.len();
    let mut pivot_cols = vec![];
    let mut r = 0usize;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let mut piv = None;
        for i in r..nrows {
            if !rows[i][c].is_zero() {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv()?;
        for j in 0..ncols {
            rows[r][j] = rows[r][j].mul(&inv);
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let s = rows[r][j].mul(&f);
                    rows[i][j] = rows[i][j].sub(&s);
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    rows.truncate(pivot_cols.len());
    Ok((rows, pivot_cols))
}

/// Exact solve M x = b over Q; None when the system is singular or
/// inconsistent.  Used for small dense systems (adjunction, pull-back).
pub fn solve_linear_q(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = m.len();
    if n == 0 {
        return Some(vec![]);
    }
    let ncols = m[0].len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut r = 0;
    let mut pivots = vec![];
    for c in 0..ncols {
        let piv = (r..n).find(|&i| !a[i][c].is_zero());
        let Some(p) = piv else { continue };
        a.swap(r, p);
        let lead = a[r][c].clone();
        for j in c..=ncols {
            a[r][j] = &a[r][j] / &lead;
        }
        for i in 0..n {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..=ncols {
                    let s = &f * &a[r][j];
                    a[i][j] -= s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    for i in r..n {
        if !a[i][ncols].is_zero() {
            return None;
        }
    }
    if pivots.len() < ncols {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][ncols].clone();
    }
    Some(x)
}

/// Determinant over Q by fraction-free-enough elimination (exact).
pub fn det_q(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let piv = (c..n).find(|&i| !a[i][c].is_zero());
        let Some(p) = piv else { return Q::zero() };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= a[c][c].clone();
        let lead = a[c][c].clone();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &lead;
            for j in c..n {
                let s = &f * &a[c][j];
                a[i][j] -= s;
            }
        }
    }
    det
}

// ---------------------------------------------------------------------------
// Polynomial parser.  Variables x,y,z (arity-dependent); `t` is the
// generator of the declared extension.  Supports + - * / ^, implicit
// multiplication (4z, xy), parentheses, and rational constants.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Gen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(input: &str, arity: usize) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let mut out = vec![];
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = input[start..i].parse().unwrap();
                out.push((start, Tok::Num(n)));
            }
            'x' => {
                out.push((i, Tok::Var(0)));
                i += 1;
            }
            'y' => {
                if arity < 2 {
                    return Err(AlgebraError::Parse {
                        pos: i,
                        msg: "variable y not available".into(),
                    });
                }
                out.push((i, Tok::Var(1)));
                i += 1;
            }
            'z' => {
                if arity < 3 {
                    return Err(AlgebraError::Parse {
                        pos: i,
                        msg: "variable z not available in a 2-variable context".into(),
                    });
                }
                out.push((i, Tok::Var(2)));
                i += 1;
            }
            't' => {
                out.push((i, Tok::Gen));
                i += 1;
            }
            _ => {
                return Err(AlgebraError::Parse {
                    pos: i,
                    msg: format!("unexpected character '{}'", c),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    field: &'a Arc<Field>,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn next_pos(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(usize::MAX)
    }

    fn expr(&mut self) -> Result<SparsePoly, AlgebraError> {
        let mut neg = false;
        while matches!(self.peek(), Some(Tok::Minus) | Some(Tok::Plus)) {
            if matches!(self.peek(), Some(Tok::Minus)) {
                neg = !neg;
            }
            self.pos += 1;
        }
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SparsePoly, AlgebraError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let p = self.next_pos();
                    let f = self.factor()?;
                    // Division only by nonzero constants.
                    let c = if f.terms.len() == 1 {
                        f.terms.get(vec![0u32; self.arity].as_slice()).cloned()
                    } else {
                        None
                    };
                    let c = c.ok_or(AlgebraError::Parse {
                        pos: p,
                        msg: "division only by constants".into(),
                    })?;
                    acc = acc.scale(&c.inv()?);
                }
                // implicit multiplication: a factor follows directly
                Some(Tok::Num(_)) | Some(Tok::Var(_)) | Some(Tok::Gen) | Some(Tok::LParen) => {
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SparsePoly, AlgebraError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.pos += 1;
            let p = self.next_pos();
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.to_string().parse().map_err(|_| AlgebraError::Parse {
                        pos: p,
                        msg: "exponent too large".into(),
                    })?;
                    return Ok(base.pow(e));
                }
                _ => {
                    return Err(AlgebraError::Parse {
                        pos: p,
                        msg: "expected integer exponent after ^".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SparsePoly, AlgebraError> {
        let p = self.next_pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(SparsePoly::constant(
                    self.field,
                    self.arity,
                    FieldElement::from_rational(self.field, Q::from(n)),
                ))
            }
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(SparsePoly::var(self.field, self.arity, i))
            }
            Some(Tok::Gen) => {
                self.pos += 1;
                Ok(SparsePoly::constant(
                    self.field,
                    self.arity,
                    FieldElement::generator(self.field),
                ))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(AlgebraError::Parse {
                        pos: self.next_pos(),
                        msg: "expected ')'".into(),
                    }),
                }
            }
            _ => Err(AlgebraError::Parse {
                pos: p,
                msg: "expected a number, variable, or '('".into(),
            }),
        }
    }
}

/// Parse a polynomial string over the declared field in `arity`
/// variables (x / x,y / x,y,z).
pub fn parse_poly(
    input: &str,
    field: &Arc<Field>,
    arity: usize,
) -> Result<SparsePoly, AlgebraError> {
    let toks = lex(input, arity)?;
    if toks.is_empty() {
        return Err(AlgebraError::Parse {
            pos: 0,
            msg: "empty polynomial".into(),
        });
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        field,
        arity,
    };
    let p = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(AlgebraError::Parse {
            pos: parser.next_pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(p)
}

pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q, AlgebraError> {
    let s = s.trim();
    let (neg, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let parts: Vec<&str> = s.split('/').collect();
    let bad = || AlgebraError::Parse {
        pos: 0,
        msg: format!("bad rational '{}'", s),
    };
    let v = match parts.as_slice() {
        [n] => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            Q::from(n)
        }
        [n, d] => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Q::new(n, d)
        }
        _ => return Err(bad()),
    };
    Ok(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_cubes_to_one_in_eisenstein_field() {
        // t^3 mod t^2+t+1: long-division oracle computed inline.
        // t^3 = (t-1)(t^2+t+1) + 1, so the remainder is 1.
        let f = Field::extension(vec![qi(1), qi(1), qi(1)]).unwrap();
        let t = FieldElement::generator(&f);
        let t3 = t.mul(&t).mul(&t);
        assert_eq!(t3, FieldElement::one(&f));
        // t*t = -t-1
        let t2 = t.mul(&t);
        let expect = FieldElement {
            field: f.clone(),
            coords: vec![qi(-1), qi(-1)],
        };
        assert_eq!(t2, expect);
    }

    #[test]
    fn rational_inverse() {
        let f = Field::rationals();
        let a = FieldElement::from_rational(&f, q(3, 5));
        assert_eq!(a.inv().unwrap(), FieldElement::from_rational(&f, q(5, 3)));
        assert!(FieldElement::zero(&f).inv().is_err());
    }

    #[test]
    fn reducible_modulus_reports_factor() {
        // t^2-1 is reducible; inverting t-1 must fail with a factor.
        let f = Field::extension(vec![qi(-1), qi(0), qi(1)]).unwrap();
        let t = FieldElement::generator(&f);
        let a = t.sub(&FieldElement::one(&f));
        match a.inv() {
            Err(AlgebraError::ReducibleModulus { factor }) => {
                assert!(factor.contains('t'), "factor was {}", factor);
            }
            other => panic!("expected ReducibleModulus, got {:?}", other),
        }
    }

    #[test]
    fn substitution_cusp_chart() {
        // x^2+y^3 with x -> t^3 u, y -> t^2 gives t^6(u^2+1); here the
        // series variables are called (x,y) internally.
        let f = Field::rationals();
        let cusp = parse_poly("x^2+y^3", &f, 2).unwrap();
        let im_x = TruncatedSeries::new(parse_poly("x^3*y", &f, 2).unwrap(), 8);
        let im_y = TruncatedSeries::new(parse_poly("x^2", &f, 2).unwrap(), 8);
        let out = substitute(&cusp, &[im_x, im_y], 8);
        let expect = TruncatedSeries::new(parse_poly("x^6*y^2+x^6", &f, 2).unwrap(), 8);
        assert_eq!(out, expect);
    }

    #[test]
    fn substitution_identity_and_shear() {
        let f = Field::rationals();
        let fx = parse_poly("x", &f, 2).unwrap();
        let id = [
            TruncatedSeries::new(parse_poly("x", &f, 2).unwrap(), 5),
            TruncatedSeries::new(parse_poly("y", &f, 2).unwrap(), 5),
        ];
        assert_eq!(substitute(&fx, &id, 5).poly, fx);
        let fxy = parse_poly("xy", &f, 2).unwrap();
        let shear = [
            TruncatedSeries::new(parse_poly("x", &f, 2).unwrap(), 3),
            TruncatedSeries::new(parse_poly("x+y", &f, 2).unwrap(), 3),
        ];
        let out = substitute(&fxy, &shear, 3);
        assert_eq!(out.poly, parse_poly("x^2+xy", &f, 2).unwrap());
    }

    #[test]
    fn rank_kernel_identity() {
        let f = Field::rationals();
        let one = FieldElement::one(&f);
        let zero = FieldElement::zero(&f);
        let m = vec![
            vec![one.clone(), zero.clone(), zero.clone()],
            vec![zero.clone(), one.clone(), zero.clone()],
            vec![zero.clone(), zero.clone(), one.clone()],
        ];
        let (r, k) = rank_kernel(&m, 3, &f).unwrap();
        assert_eq!(r, 3);
        assert!(k.is_empty());
    }

    #[test]
    fn solve_small_system() {
        // 2x + y = 5, x - y = 1 -> x = 2, y = 1
        let m = vec![vec![qi(2), qi(1)], vec![qi(1), qi(-1)]];
        let b = vec![qi(5), qi(1)];
        assert_eq!(solve_linear_q(&m, &b), Some(vec![qi(2), qi(1)]));
    }

    #[test]
    fn parse_with_implicit_products() {
        let f = Field::rationals();
        let p = parse_poly("x-4z", &f, 3).unwrap();
        let q_ = parse_poly("x - 4*z", &f, 3).unwrap();
        assert_eq!(p, q_);
        let r = parse_poly("2xy^2", &f, 3).unwrap();
        let r2 = parse_poly("2*x*y^2", &f, 3).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn parse_rejects_garbage() {
        let f = Field::rationals();
        assert!(parse_poly("x + @", &f, 2).is_err());
        assert!(parse_poly("", &f, 2).is_err());
        assert!(parse_poly("x +", &f, 2).is_err());
    }

    #[test]
    fn w_homogeneity() {
        let f = Field::rationals();
        let p = parse_poly("x^2+y^3", &f, 2).unwrap();
        assert_eq!(p.homogeneous_w_degree(&[3, 2]), Ok(6));
        assert!(p.homogeneous_w_degree(&[1, 1]).is_err());
    }
}
