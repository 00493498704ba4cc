//! Cyclic quotient surface singularities 1/d(p,q): normalization,
//! eigen-module monomial bases, Hirzebruch-Jung resolutions (with the
//! toric ray data needed for exceptional valuations), and Riemann-Roch
//! correction terms.

use crate::exact_algebra::{q, q_frac, qi, solve_linear_q, AlgebraError, Q};
use num_traits::{One, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn mod_inv(a: u64, d: u64) -> Option<u64> {
    // extended Euclid on (a, d)
    let (mut r0, mut r1) = (d as i128, (a % d) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(d as i128) as u64)
}

/// A cyclic quotient singularity in normalized form 1/d(1,q).
/// The smooth case is d = 1 (q = 0).
#[derive(Debug, Clone, Copy, Eq)]
pub struct QuotientType {
    pub d: u64,
    pub q: u64,
}

impl PartialEq for QuotientType {
    /// Same analytic type: equal d and equal action exponent up to the
    /// coordinate swap (1/d(1,q) vs 1/d(q,1), i.e. q vs q^{-1} mod d).
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d
            && (self.q == other.q || mod_inv(self.q, self.d) == Some(other.q % self.d))
    }
}

impl QuotientType {
    pub fn smooth() -> Self {
        QuotientType { d: 1, q: 0 }
    }

    pub fn is_smooth(&self) -> bool {
        self.d == 1
    }
}

impl std::fmt::Display for QuotientType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_smooth() {
            write!(f, "smooth")
        } else {
            write!(f, "1/{}(1,{})", self.d, self.q)
        }
    }
}

/// Normalize 1/d(p,q) to the representative 1/d(1, q*p^{-1} mod d).
/// Inputs with gcd(d,p) != 1 or gcd(d,q) != 1 describe actions with
/// pseudo-reflections or non-faithful actions and are rejected.
pub fn normalize(d: u64, p: i64, q_exp: i64) -> Result<QuotientType, AlgebraError> {
    if d == 0 {
        return Err(AlgebraError::Domain("group order must be positive".into()));
    }
    if d == 1 {
        return Ok(QuotientType::smooth());
    }
    let pm = p.rem_euclid(d as i64) as u64;
    let qm = q_exp.rem_euclid(d as i64) as u64;
    if gcd(d, pm) != 1 || gcd(d, qm) != 1 {
        return Err(AlgebraError::Domain(format!(
            "1/{}({},{}) is not normalizable: action exponents must be coprime to the order",
            d, p, q_exp
        )));
    }
    let p_inv = mod_inv(pm, d).unwrap();
    Ok(QuotientType {
        d,
        q: (qm * p_inv) % d,
    })
}

/// Class of the monomial x^i y^j in Weil/Cart = Z_d for the
/// (pre-normalization) action (d; p, q): (p*i + q*j) mod d.
pub fn monomial_class(d: u64, p: i64, q_exp: i64, i: u64, j: u64) -> u64 {
    if d == 1 {
        return 0;
    }
    let pm = p.rem_euclid(d as i64) as u64 as u128;
    let qm = q_exp.rem_euclid(d as i64) as u64 as u128;
    ((pm * i as u128 + qm * j as u128) % d as u128) as u64
}

/// Monomial order used for all basis listings: total degree ascending,
/// then x-exponent descending (so x^2, xy, y^2).
pub fn order_monomials(mons: &mut Vec<(u32, u32)>) {
    mons.sort_by_key(|&(i, j)| (i + j, std::cmp::Reverse(i)));
    mons.dedup();
}

/// All monomials x^i y^j of total degree <= n and class k.
pub fn eigenmodule_basis(t: &QuotientType, k: u64, n: u32) -> Vec<(u32, u32)> {
    let mut out = vec![];
    for deg in 0..=n {
        for i in (0..=deg).rev() {
            let j = deg - i;
            if monomial_class(t.d, 1, t.q as i64, i as u64, j as u64) == k % t.d.max(1) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Minimal resolution of 1/d(1,q): the Hirzebruch-Jung chain together
/// with the toric rays that compute exceptional valuations of
/// monomials.
#[derive(Debug, Clone)]
pub struct HJResolution {
    /// Self-intersection of E_i is -cs[i], cs[i] >= 2.
    pub cs: Vec<u64>,
    /// Ray of E_i in the refined lattice; val_{E_i}(x^a y^b) =
    /// a*rays[i].0 + b*rays[i].1.
    pub rays: Vec<(Q, Q)>,
    /// Discrepancies: K_pi = sum (nu_i - 1) E_i.
    pub nu: Vec<Q>,
    /// Tridiagonal intersection matrix.
    pub matrix: Vec<Vec<Q>>,
}

/// Ceil-type continued fraction d/q = c_1 - 1/(c_2 - ...), c_i >= 2.
pub fn hj_expansion(d: u64, q_exp: u64) -> Vec<u64> {
    let mut out = vec![];
    let (mut a, mut b) = (d, q_exp);
    while b > 0 {
        let c = a.div_ceil(b);
        out.push(c);
        let nb = c * b - a;
        a = b;
        b = nb;
    }
    out
}

pub fn hj_resolve(t: &QuotientType) -> HJResolution {
    if t.is_smooth() {
        return HJResolution {
            cs: vec![],
            rays: vec![],
            nu: vec![],
            matrix: vec![],
        };
    }
    let cs = hj_expansion(t.d, t.q);
    let r = cs.len();
    // Rays: v_0 = (0,1), v_1 = (1/d)(1,q), v_{i+1} = c_i v_i - v_{i-1};
    // the recursion ends at v_{r+1} = (1,0).
    let mut rays = vec![];
    let mut v_prev = (Q::zero(), Q::one());
    let mut v = (q(1, t.d as i64), q(t.q as i64, t.d as i64));
    for &c in &cs {
        rays.push(v.clone());
        let next = (
            qi(c as i64) * &v.0 - &v_prev.0,
            qi(c as i64) * &v.1 - &v_prev.1,
        );
        v_prev = v;
        v = next;
    }
    debug_assert_eq!(v, (Q::one(), Q::zero()));
    let mut matrix = vec![vec![Q::zero(); r]; r];
    for i in 0..r {
        matrix[i][i] = qi(-(cs[i] as i64));
        if i + 1 < r {
            matrix[i][i + 1] = Q::one();
            matrix[i + 1][i] = Q::one();
        }
    }
    // Adjunction E_i.(K + E_i) = -2 with K = sum (nu_v - 1) E_v gives
    // M (nu - 1) = (c_i - 2)_i.
    let rhs: Vec<Q> = cs.iter().map(|&c| qi(c as i64 - 2)).collect();
    let sol = solve_linear_q(&matrix, &rhs).expect("HJ intersection matrix is invertible");
    let nu: Vec<Q> = sol.into_iter().map(|s| s + Q::one()).collect();
    // The toric discrepancy nu_i = <(1,1), ray_i> must agree.
    for (i, ray) in rays.iter().enumerate() {
        debug_assert_eq!(nu[i], &ray.0 + &ray.1);
    }
    HJResolution {
        cs,
        rays,
        nu,
        matrix,
    }
}

impl HJResolution {
    pub fn len(&self) -> usize {
        self.cs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cs.is_empty()
    }

    /// Valuation of the monomial x^a y^b along E_i.
    pub fn monomial_valuation(&self, i: usize, a: &Q, b: &Q) -> Q {
        a * &self.rays[i].0 + b * &self.rays[i].1
    }
}

/// A formal rational combination of monomial divisor germs
/// sum c_m * div(x^{i_m} y^{j_m}).
pub type DivisorCombination = Vec<(Q, (u32, u32))>;

/// Pull-back coefficients of a formal monomial combination: the
/// valuations are linear, so l_v = sum c * val_v(monomial).
pub fn pullback_of_combination(res: &HJResolution, combo: &DivisorCombination) -> Vec<Q> {
    (0..res.len())
        .map(|v| {
            combo
                .iter()
                .map(|(c, (i, j))| c * res.monomial_valuation(v, &qi(*i as i64), &qi(*j as i64)))
                .sum()
        })
        .collect()
}

/// Riemann-Roch correction term R_{X,P}(D) for D given by exceptional
/// pull-back coefficients l_v (pi^* D = D-hat + sum l_v E_v):
///   R(D) = 1/2 sum_{v,b} {l_v} ({l_b} + nu_b - 1) E_v.E_b.
/// Depends only on the Weil class of D.
pub fn correction_from_coefficients(res: &HJResolution, ell: &[Q]) -> Q {
    let fr: Vec<Q> = ell.iter().map(q_frac).collect();
    let mut acc = Q::zero();
    for v in 0..res.len() {
        for b in 0..res.len() {
            if res.matrix[v][b].is_zero() {
                continue;
            }
            acc += &fr[v] * (&fr[b] + &res.nu[b] - Q::one()) * &res.matrix[v][b];
        }
    }
    acc / qi(2)
}

pub fn correction_term(t: &QuotientType, combo: &DivisorCombination) -> Q {
    if t.is_smooth() {
        return Q::zero();
    }
    let res = hj_resolve(t);
    let ell = pullback_of_combination(&res, combo);
    correction_from_coefficients(&res, &ell)
}

/// R_{X,P} as a function of the Weil divisor class, using c * div(x)
/// as representative (x has class 1 in normalized coordinates).
pub fn correction_for_class(t: &QuotientType, class: &Q) -> Q {
    correction_term(t, &vec![(class.clone(), (1, 0))])
}

/// Class of the canonical divisor K_X = -div(x) - div(y): -(1+q) mod d.
pub fn canonical_class(t: &QuotientType) -> u64 {
    if t.is_smooth() {
        return 0;
    }
    (-(1 + t.q as i64)).rem_euclid(t.d as i64) as u64
}
