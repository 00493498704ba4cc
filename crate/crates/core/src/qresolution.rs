//! Embedded Q-resolution of curve germs at cyclic quotient surface
//! points: weighted blow-up charts, strict/total transform
//! bookkeeping, an automatic resolution driver with a normal-crossing
//! certificate, dual-graph numerics (self-intersections,
//! discrepancies, multiplicities) and exceptional valuations of
//! arbitrary germs by exact replay through the chart maps.

use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclic_quotient::{gcd, mod_inv, normalize, QuotientType};
use crate::exact_algebra::{
    det_q, q, qi, solve_linear_q, AlgebraError, Field, FieldElement, Q, SparsePoly,
};

/// Unnormalized chart data (d; p, q): the order-d action
/// (x, y) -> (zeta^p x, zeta^q y).
pub type Triple = (u64, i64, i64);

fn domain(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Domain(msg.into())
}

/// Common eigenvalue class of a quasi-invariant germ in the chart.
pub fn germ_class(raw: Triple, germ: &SparsePoly) -> Result<u64, AlgebraError> {
    let (d, p, qe) = raw;
    let mut class: Option<u64> = None;
    for e in germ.terms.keys() {
        let c = (p * e[0] as i64 + qe * e[1] as i64).rem_euclid(d as i64) as u64;
        match class {
            None => class = Some(c),
            Some(c0) if c0 != c => {
                return Err(domain(format!(
                    "germ is not quasi-invariant on 1/{}({},{}): classes {} and {}",
                    d, p, qe, c0, c
                )))
            }
            _ => {}
        }
    }
    Ok(class.unwrap_or(0))
}

// ---------------------------------------------------------------------------
// Weighted blow-up charts
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ChartInfo {
    pub raw: Triple,
    pub qtype: QuotientType,
}

/// The two charts of the (a,b)-weighted blow-up of the origin of a
/// (d; p, q) chart, together with e = gcd(d, aq - bp).  In the first
/// chart the map downstairs is (x, y) = (u^{a/e}, u^{b/e} v) with the
/// exceptional divisor {u = 0}; in the second (x, y) = (u v^{a/e},
/// v^{b/e}) with the exceptional divisor {v = 0}.
pub fn blowup_charts(t: Triple, a: u64, b: u64) -> Result<(ChartInfo, ChartInfo, u64), AlgebraError> {
    if a == 0 || b == 0 || gcd(a, b) != 1 {
        return Err(domain(format!("blow-up weights ({a},{b}) must be coprime and positive")));
    }
    let (d, p, qe) = t;
    let r = (a as i64 * qe - b as i64 * p).rem_euclid(d as i64) as u64;
    let e = gcd(d, r);
    let (pp, qp) = if d == 1 {
        (0i64, 0i64)
    } else {
        let pi = mod_inv(p.rem_euclid(d as i64) as u64, d)
            .ok_or_else(|| domain(format!("non-faithful action 1/{}({},{})", d, p, qe)))?;
        let qi_ = mod_inv(qe.rem_euclid(d as i64) as u64, d)
            .ok_or_else(|| domain(format!("non-faithful action 1/{}({},{})", d, p, qe)))?;
        (pi as i64, qi_ as i64)
    };
    let n1 = -(b as i64) + pp * a as i64 * qe;
    let n2 = -(a as i64) + qp * b as i64 * p;
    debug_assert_eq!(n1.rem_euclid(e as i64), 0);
    debug_assert_eq!(n2.rem_euclid(e as i64), 0);
    let raw1 = (a * d / e, 1, n1.div_euclid(e as i64));
    let raw2 = (b * d / e, n2.div_euclid(e as i64), 1);
    let c1 = ChartInfo { raw: raw1, qtype: normalize(raw1.0, raw1.1, raw1.2)? };
    let c2 = ChartInfo { raw: raw2, qtype: normalize(raw2.0, raw2.1, raw2.2)? };
    Ok((c1, c2, e))
}

// ---------------------------------------------------------------------------
// Germ transforms under a single blow-up
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GermTransform {
    /// w-multiplicity min(a i + b j) over the germ's support.
    pub w_multiplicity: u64,
    /// Coefficient of the exceptional divisor in the total transform.
    pub exceptional_coefficient: Q,
    pub strict_chart1: SparsePoly,
    pub strict_chart2: SparsePoly,
}

#[derive(Debug, Clone)]
pub struct TransformData {
    pub e: u64,
    pub chart1: ChartInfo,
    pub chart2: ChartInfo,
    /// E . E for the new exceptional divisor: -e^2/(d a b).
    pub self_intersection: Q,
    pub germs: Vec<GermTransform>,
    /// E . strict transform, per germ: e nu/(a b d).
    pub strict_dot_e: Vec<Q>,
}

pub fn transform_data(
    t: Triple,
    a: u64,
    b: u64,
    germs: &[SparsePoly],
) -> Result<TransformData, AlgebraError> {
    let (c1, c2, e) = blowup_charts(t, a, b)?;
    let d = t.0;
    let mut out_germs = vec![];
    let mut dots = vec![];
    for g in germs {
        if g.is_zero() {
            return Err(domain("cannot transform the zero germ"));
        }
        let mult = g
            .terms
            .keys()
            .map(|ex| a * ex[0] as u64 + b * ex[1] as u64)
            .min()
            .unwrap();
        let mut s1 = SparsePoly::zero(&g.field, 2);
        let mut s2 = SparsePoly::zero(&g.field, 2);
        for (ex, c) in &g.terms {
            let w = a * ex[0] as u64 + b * ex[1] as u64 - mult;
            if w % e != 0 {
                return Err(domain(format!(
                    "germ not quasi-invariant for the ({a},{b}) blow-up on 1/{}({},{})",
                    t.0, t.1, t.2
                )));
            }
            s1.add_term(vec![(w / e) as u32, ex[1]], c.clone());
            s2.add_term(vec![ex[0], (w / e) as u32], c.clone());
        }
        dots.push(q((e * mult) as i64, (a * b * d) as i64));
        out_germs.push(GermTransform {
            w_multiplicity: mult,
            exceptional_coefficient: q(mult as i64, e as i64),
            strict_chart1: s1,
            strict_chart2: s2,
        });
    }
    Ok(TransformData {
        e,
        chart1: c1,
        chart2: c2,
        self_intersection: -q((e * e) as i64, (d * a * b) as i64),
        germs: out_germs,
        strict_dot_e: dots,
    })
}

// ---------------------------------------------------------------------------
// Chart operation chains and exact replay
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum ChartOp {
    /// Weighted blow-up; `chart` is 1 or 2.
    Blowup { a: u64, b: u64, e: u64, chart: u8 },
    /// Move the origin: var -> var + value.
    Translate { var: usize, value: FieldElement },
    /// Polynomial coordinate change with invertible linear part.
    Change { x_image: SparsePoly, y_image: SparsePoly },
}

/// A germ written as x^{r1} y^{r2} * (polynomial), with rational
/// exponents r1, r2 collected from the chart monomial maps.
#[derive(Debug, Clone)]
pub struct MonomialTimesPoly {
    pub offset: (Q, Q),
    pub poly: SparsePoly,
}

fn q_to_u32(x: &Q) -> Result<u32, AlgebraError> {
    if !x.is_integer() || x.is_negative() {
        return Err(domain(format!("expected a non-negative integer exponent, got {x}")));
    }
    x.to_integer()
        .to_u32()
        .ok_or_else(|| domain("exponent overflow"))
}

fn fold_offset(rg: &mut MonomialTimesPoly, var: usize) -> Result<(), AlgebraError> {
    let off = if var == 0 { rg.offset.0.clone() } else { rg.offset.1.clone() };
    let shift = q_to_u32(&off)?;
    if shift > 0 {
        let mut p = SparsePoly::zero(&rg.poly.field, 2);
        for (ex, c) in &rg.poly.terms {
            let mut e = ex.clone();
            e[var] += shift;
            p.terms.insert(e, c.clone());
        }
        rg.poly = p;
    }
    if var == 0 {
        rg.offset.0 = Q::zero();
    } else {
        rg.offset.1 = Q::zero();
    }
    Ok(())
}

fn apply_op(rg: &MonomialTimesPoly, op: &ChartOp) -> Result<MonomialTimesPoly, AlgebraError> {
    let field = &rg.poly.field;
    match op {
        ChartOp::Blowup { a, b, e, chart } => {
            let (a, b, e) = (qi(*a as i64), qi(*b as i64), qi(*e as i64));
            let mut abs: Vec<((Q, Q), FieldElement)> = vec![];
            for (ex, c) in &rg.poly.terms {
                let ax = &rg.offset.0 + qi(ex[0] as i64);
                let ay = &rg.offset.1 + qi(ex[1] as i64);
                let w = (&a * &ax + &b * &ay) / &e;
                let pair = if *chart == 1 { (w, ay) } else { (ax, w) };
                abs.push((pair, c.clone()));
            }
            if abs.is_empty() {
                return Ok(MonomialTimesPoly {
                    offset: (Q::zero(), Q::zero()),
                    poly: SparsePoly::zero(field, 2),
                });
            }
            let min0 = abs.iter().map(|(p, _)| p.0.clone()).min().unwrap();
            let min1 = abs.iter().map(|(p, _)| p.1.clone()).min().unwrap();
            let mut poly = SparsePoly::zero(field, 2);
            for ((x0, x1), c) in abs {
                let e0 = q_to_u32(&(x0 - &min0))?;
                let e1 = q_to_u32(&(x1 - &min1))?;
                poly.add_term(vec![e0, e1], c);
            }
            Ok(MonomialTimesPoly { offset: (min0, min1), poly })
        }
        ChartOp::Translate { var, value } => {
            let mut out = rg.clone();
            fold_offset(&mut out, *var)?;
            let mut images = vec![SparsePoly::var(field, 2, 0), SparsePoly::var(field, 2, 1)];
            images[*var] =
                images[*var].add(&SparsePoly::constant(field, 2, value.clone()));
            out.poly = out.poly.substitute_polys(&images);
            Ok(out)
        }
        ChartOp::Change { x_image, y_image } => {
            let mut out = rg.clone();
            fold_offset(&mut out, 0)?;
            fold_offset(&mut out, 1)?;
            out.poly = out.poly.substitute_polys(&[x_image.clone(), y_image.clone()]);
            Ok(out)
        }
    }
}

/// Push a germ written in the original coordinates through a chart
/// chain.  Exact: polynomial arithmetic only, no truncation.
pub fn replay_germ(germ: &SparsePoly, ops: &[ChartOp]) -> Result<MonomialTimesPoly, AlgebraError> {
    let mut rg = MonomialTimesPoly {
        offset: (Q::zero(), Q::zero()),
        poly: germ.clone(),
    };
    for op in ops {
        rg = apply_op(&rg, op)?;
    }
    Ok(rg)
}

// ---------------------------------------------------------------------------
// Resolution graphs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CurveGerm {
    pub equation: SparsePoly,
    pub multiplicity: u64,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    /// Discrepancy coefficient: K_pi = sum (nu_v - 1) E_v.
    pub nu: Q,
    /// Multiplicity of E_v in the total transform of each component.
    pub m: Vec<Q>,
    /// Chart chain from the original coordinates to a chart where E_v
    /// is cut out by the coordinate `exc_coord`.
    pub ops: Vec<ChartOp>,
    pub exc_coord: usize,
}

/// A terminal (normal-crossing) point of the total transform.
#[derive(Debug, Clone)]
pub struct TerminalSite {
    pub raw: Triple,
    pub qtype: QuotientType,
    /// Vertex of the exceptional divisor {x = 0} through this point.
    pub exc_x: Option<usize>,
    pub exc_y: Option<usize>,
    /// Strict transform germs at this point, per component index.
    pub strict: Vec<(usize, SparsePoly)>,
    pub ops: Vec<ChartOp>,
}

#[derive(Debug, Clone)]
pub struct ResolutionGraph {
    pub field: Arc<Field>,
    pub center: Triple,
    pub germs: Vec<CurveGerm>,
    pub vertices: Vec<Vertex>,
    /// E_v . E_b, including self-intersections on the diagonal.
    pub exc_int: Vec<Vec<Q>>,
    /// E_v . strict transform of component j.
    pub strict_int: Vec<Vec<Q>>,
    pub sites: Vec<TerminalSite>,
}

impl ResolutionGraph {
    /// Coefficient of E_v in the total transform of div(g).
    pub fn exceptional_valuation(&self, v: usize, germ: &SparsePoly) -> Result<Q, AlgebraError> {
        if germ.is_zero() {
            return Err(domain("valuation of the zero germ"));
        }
        let vx = &self.vertices[v];
        let rg = replay_germ(germ, &vx.ops)?;
        let min = rg
            .poly
            .terms
            .keys()
            .map(|e| e[vx.exc_coord])
            .min()
            .unwrap();
        let off = if vx.exc_coord == 0 { rg.offset.0 } else { rg.offset.1 };
        Ok(off + qi(min as i64))
    }

    /// l_v for a formal rational combination of germs, via valuations.
    pub fn pullback_coefficients(
        &self,
        combo: &[(Q, SparsePoly)],
    ) -> Result<Vec<Q>, AlgebraError> {
        let mut out = vec![Q::zero(); self.vertices.len()];
        for (c, g) in combo {
            for v in 0..self.vertices.len() {
                out[v] += c * self.exceptional_valuation(v, g)?;
            }
        }
        Ok(out)
    }

    /// l_v for D = sum n_j C_j, solving (E_v . pi* D) = 0 from the
    /// stored intersection numbers.
    pub fn pullback_from_components(&self, n: &[Q]) -> Vec<Q> {
        let nv = self.vertices.len();
        if nv == 0 {
            return vec![];
        }
        let rhs: Vec<Q> = (0..nv)
            .map(|v| {
                -n.iter()
                    .zip(&self.strict_int[v])
                    .map(|(nj, s)| nj * s)
                    .sum::<Q>()
            })
            .collect();
        // negative definiteness makes the system uniquely solvable
        solve_linear_q(&self.exc_int, &rhs).expect("exceptional intersection matrix is singular")
    }

    pub fn is_negative_definite(&self) -> bool {
        let n = self.vertices.len();
        for k in 1..=n {
            let minor: Vec<Vec<Q>> = (0..k)
                .map(|i| (0..k).map(|j| self.exc_int[i][j].clone()).collect())
                .collect();
            let det = det_q(&minor);
            let expected_positive = k % 2 == 0;
            if det.is_zero() || det.is_positive() != expected_positive {
                return false;
            }
        }
        true
    }

    /// delta invariant of the resolved germ D = sum n_j C_j from the
    /// graph numerics: -1/2 E_D (E_D + Z) with E_D = sum m_v E_v and
    /// Z = -sum (nu_v - 1) E_v.
    pub fn delta_top(&self, n: &[Q]) -> Q {
        let nv = self.vertices.len();
        let m: Vec<Q> = (0..nv)
            .map(|v| {
                n.iter()
                    .zip(&self.vertices[v].m)
                    .map(|(nj, mv)| nj * mv)
                    .sum()
            })
            .collect();
        let mut acc = Q::zero();
        for v in 0..nv {
            for b in 0..nv {
                let zb = -(&self.vertices[b].nu - Q::one());
                acc += &m[v] * (&m[b] + zb) * &self.exc_int[v][b];
            }
        }
        -acc / qi(2)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "center 1/{}({},{}), {} exceptional divisor(s), {} site(s)\n",
            self.center.0,
            self.center.1,
            self.center.2,
            self.vertices.len(),
            self.sites.len()
        ));
        for (i, v) in self.vertices.iter().enumerate() {
            let ms: Vec<String> = v.m.iter().map(|m| m.to_string()).collect();
            s.push_str(&format!(
                "E{}: E^2 = {}, nu = {}, m = [{}]\n",
                i,
                self.exc_int[i][i],
                v.nu,
                ms.join(", ")
            ));
        }
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                if !self.exc_int[i][j].is_zero() {
                    s.push_str(&format!("E{} . E{} = {}\n", i, j, self.exc_int[i][j]));
                }
            }
            for (j, d) in self.strict_int[i].iter().enumerate() {
                if !d.is_zero() {
                    s.push_str(&format!("E{} . C{} = {}\n", i, j, d));
                }
            }
        }
        for site in &self.sites {
            s.push_str(&format!(
                "site {}: exc ({:?},{:?}), {} strict germ(s)\n",
                site.qtype,
                site.exc_x,
                site.exc_y,
                site.strict.len()
            ));
        }
        s
    }

    pub fn render_dot(&self) -> String {
        let mut s = String::from("graph resolution {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            s.push_str(&format!(
                "  E{} [label=\"E{}\\nE2={} nu={}\"];\n",
                i, i, self.exc_int[i][i], v.nu
            ));
        }
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                if !self.exc_int[i][j].is_zero() {
                    s.push_str(&format!("  E{} -- E{};\n", i, j));
                }
            }
        }
        for j in 0..self.germs.len() {
            s.push_str(&format!("  C{} [shape=box];\n", j));
            for i in 0..self.vertices.len() {
                if !self.strict_int[i][j].is_zero() {
                    s.push_str(&format!("  E{} -- C{};\n", i, j));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

// ---------------------------------------------------------------------------
// Univariate helpers over the coefficient field
// ---------------------------------------------------------------------------

type Uni = Vec<FieldElement>;

fn uni_trim(f: &mut Uni) {
    while f.last().map(|c| c.is_zero()).unwrap_or(false) {
        f.pop();
    }
}

fn uni_mul(a: &Uni, b: &Uni, field: &Arc<Field>) -> Uni {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![FieldElement::zero(field); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        for (j, cb) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ca.mul(cb));
        }
    }
    uni_trim(&mut out);
    out
}

fn uni_derivative(f: &Uni, field: &Arc<Field>) -> Uni {
    let mut out = vec![];
    for (i, c) in f.iter().enumerate().skip(1) {
        out.push(c.mul(&FieldElement::from_rational(field, qi(i as i64))));
    }
    uni_trim(&mut out);
    out
}

fn uni_rem(a: &Uni, b: &Uni) -> Result<Uni, AlgebraError> {
    let mut r = a.clone();
    uni_trim(&mut r);
    let lead = b.last().expect("division by zero polynomial").inv()?;
    while r.len() >= b.len() {
        let c = r.last().unwrap().mul(&lead);
        let shift = r.len() - b.len();
        for (i, bc) in b.iter().enumerate() {
            let t = r[shift + i].sub(&c.mul(bc));
            r[shift + i] = t;
        }
        uni_trim(&mut r);
        if r.len() >= b.len() + shift + 1 {
            break; // defensive; cannot happen
        }
        if r.len() == b.len() + shift {
            // leading term failed to cancel: numerical impossibility
            return Err(domain("univariate division failed to reduce degree"));
        }
    }
    Ok(r)
}

fn uni_gcd(a: &Uni, b: &Uni) -> Result<Uni, AlgebraError> {
    let (mut f, mut g) = (a.clone(), b.clone());
    uni_trim(&mut f);
    uni_trim(&mut g);
    while !g.is_empty() {
        let r = uni_rem(&f, &g)?;
        f = g;
        g = r;
    }
    if let Some(lead) = f.last().cloned() {
        let inv = lead.inv()?;
        for c in &mut f {
            *c = c.mul(&inv);
        }
    }
    Ok(f)
}

/// Divide out the gcd with the derivative: the square-free part.
fn uni_squarefree_part(f: &Uni, field: &Arc<Field>) -> Result<Uni, AlgebraError> {
    let g = uni_gcd(f, &uni_derivative(f, field))?;
    if g.len() <= 1 {
        let mut out = f.clone();
        uni_trim(&mut out);
        return Ok(out);
    }
    // exact division f / g by repeated remainder steps
    let mut quot = vec![FieldElement::zero(field); f.len() - g.len() + 1];
    let mut r = f.clone();
    uni_trim(&mut r);
    let lead = g.last().unwrap().inv()?;
    while r.len() >= g.len() {
        let c = r.last().unwrap().mul(&lead);
        let shift = r.len() - g.len();
        quot[shift] = c.clone();
        for (i, gc) in g.iter().enumerate() {
            let t = r[shift + i].sub(&c.mul(gc));
            r[shift + i] = t;
        }
        uni_trim(&mut r);
    }
    debug_assert!(r.is_empty());
    uni_trim(&mut quot);
    Ok(quot)
}

// ---------------------------------------------------------------------------
// Resolution driver
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ScriptStep {
    /// Coordinate change applied before blowing up.
    pub change: Option<(SparsePoly, SparsePoly)>,
    pub weights: (u64, u64),
    /// Chart (1 or 2) whose origin receives the next step.
    pub chart: u8,
}

#[derive(Debug, Clone)]
struct PointState {
    raw: Triple,
    ops: Vec<ChartOp>,
    exc_x: Option<usize>,
    exc_y: Option<usize>,
    strict: Vec<(usize, SparsePoly)>,
    depth: usize,
    /// Next script step to execute here; None means this point is off
    /// the scripted path.
    script_pos: Option<usize>,
}

const MAX_DEPTH: usize = 64;

fn check_change(field: &Arc<Field>, xi: &SparsePoly, yi: &SparsePoly) -> Result<(), AlgebraError> {
    for img in [xi, yi] {
        if !img.coeff(&[0, 0]).is_zero() {
            return Err(domain("coordinate change must fix the origin"));
        }
    }
    let a = xi.coeff(&[1, 0]);
    let b = xi.coeff(&[0, 1]);
    let c = yi.coeff(&[1, 0]);
    let d = yi.coeff(&[0, 1]);
    let det = a.mul(&d).sub(&b.mul(&c));
    if det.is_zero() {
        return Err(domain("coordinate change has a singular linear part"));
    }
    let _ = field;
    Ok(())
}

/// Germs that vanish at the chart origin; units dropped.
fn vanishing(strict: &[(usize, SparsePoly)]) -> Vec<(usize, SparsePoly)> {
    strict
        .iter()
        .filter(|(_, g)| !g.is_zero() && g.coeff(&[0, 0]).is_zero())
        .cloned()
        .collect()
}

/// Normal-crossing certificate: the through divisors form at most two
/// smooth branches with pairwise distinct tangent lines.  Branches and
/// tangents of each germ are read off its tangent cone; a square-free
/// cone certifies that every branch is smooth with the cone lines as
/// tangents.
fn is_normal_crossing(state: &PointState, field: &Arc<Field>) -> Result<bool, AlgebraError> {
    let mut count = 0usize;
    let mut line_x = false; // tangent line {x = 0} already taken
    let mut line_y = false;
    if state.exc_x.is_some() {
        count += 1;
        line_x = true;
    }
    if state.exc_y.is_some() {
        count += 1;
        line_y = true;
    }
    let mut slopes: Vec<Uni> = vec![];
    for (_, g) in vanishing(&state.strict) {
        let ix = g.terms.keys().map(|e| e[0]).min().unwrap();
        let iy = g.terms.keys().map(|e| e[1]).min().unwrap();
        if ix > 0 {
            if line_x {
                return Ok(false);
            }
            line_x = true;
            count += 1;
        }
        if iy > 0 {
            if line_y {
                return Ok(false);
            }
            line_y = true;
            count += 1;
        }
        let mut h = SparsePoly::zero(field, 2);
        for (e, c) in &g.terms {
            h.terms.insert(vec![e[0] - ix, e[1] - iy], c.clone());
        }
        if !h.coeff(&[0, 0]).is_zero() {
            continue; // unit factor: axis branches only
        }
        let mdeg = h.terms.keys().map(|e| e[0] + e[1]).min().unwrap();
        let cone: Vec<(&Vec<u32>, &FieldElement)> = h
            .terms
            .iter()
            .filter(|(e, _)| e[0] + e[1] == mdeg)
            .collect();
        let ku = cone.iter().map(|(e, _)| e[0]).min().unwrap();
        let kv = cone.iter().map(|(e, _)| e[1]).min().unwrap();
        if ku > 1 || kv > 1 {
            return Ok(false); // repeated tangent: not certifiable
        }
        if ku == 1 {
            if line_x {
                return Ok(false);
            }
            line_x = true;
            count += 1;
        }
        if kv == 1 {
            if line_y {
                return Ok(false);
            }
            line_y = true;
            count += 1;
        }
        let md = (mdeg - ku - kv) as usize;
        if md > 0 {
            // slope polynomial of the off-axis cone lines
            let mut f = vec![FieldElement::zero(field); md + 1];
            for (e, c) in &cone {
                if e[0] >= ku && e[1] >= kv {
                    f[(e[0] - ku) as usize] = (*c).clone();
                }
            }
            uni_trim(&mut f);
            let sf = uni_gcd(&f, &uni_derivative(&f, field))?;
            if sf.len() > 1 {
                return Ok(false); // repeated off-axis tangent
            }
            for prev in &slopes {
                if uni_gcd(&f, prev)?.len() > 1 {
                    return Ok(false); // shared tangent with another germ
                }
            }
            count += md;
            slopes.push(f);
        }
        if count > 2 {
            return Ok(false);
        }
    }
    Ok(count <= 2)
}

/// Lexicographically smallest primitive inner normal of a compact
/// Newton-polygon face of the product of the through divisors.
fn auto_weights(state: &PointState, field: &Arc<Field>) -> Result<(u64, u64), AlgebraError> {
    let mut prod = SparsePoly::constant(field, 2, FieldElement::one(field));
    if state.exc_x.is_some() {
        prod = prod.mul(&SparsePoly::var(field, 2, 0));
    }
    if state.exc_y.is_some() {
        prod = prod.mul(&SparsePoly::var(field, 2, 1));
    }
    for (_, g) in vanishing(&state.strict) {
        prod = prod.mul(&g);
    }
    let mut pts: Vec<(i64, i64)> = prod
        .terms
        .keys()
        .map(|e| (e[0] as i64, e[1] as i64))
        .collect();
    pts.sort();
    // lower convex hull (monotone chain)
    let mut hull: Vec<(i64, i64)> = vec![];
    for p in pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut best: Option<(u64, u64)> = None;
    for w in hull.windows(2) {
        let (i1, j1) = w[0];
        let (i2, j2) = w[1];
        if j1 > j2 {
            let (mut a, mut b) = ((j1 - j2) as u64, (i2 - i1) as u64);
            let g = gcd(a, b);
            a /= g;
            b /= g;
            if best.map(|x| (a, b) < x).unwrap_or(true) {
                best = Some((a, b));
            }
        }
    }
    best.ok_or_else(|| {
        domain(
            "Newton polygon has no compact face; supply a coordinate change or resolution script",
        )
    })
}

struct Driver<'a> {
    graph: ResolutionGraph,
    script: Option<&'a [ScriptStep]>,
}

impl<'a> Driver<'a> {
    fn process(&mut self, mut state: PointState, queue: &mut Vec<PointState>) -> Result<(), AlgebraError> {
        if state.depth > MAX_DEPTH {
            return Err(domain("resolution driver exceeded the depth limit"));
        }
        let field = self.graph.field.clone();
        let scripted_step = match (self.script, state.script_pos) {
            (Some(s), Some(i)) if i < s.len() => Some(&s[i]),
            _ => None,
        };
        if scripted_step.is_none() {
            if is_normal_crossing(&state, &field)? {
                self.record_site(state);
                return Ok(());
            }
            if self.script.is_some() {
                return Err(domain(format!(
                    "script leaves a non-normal-crossing point on 1/{}({},{}): {}",
                    state.raw.0,
                    state.raw.1,
                    state.raw.2,
                    state
                        .strict
                        .iter()
                        .map(|(_, g)| g.to_string())
                        .collect::<Vec<_>>()
                        .join("; ")
                )));
            }
        }
        let (a, b) = match scripted_step {
            Some(step) => {
                if let Some((xi, yi)) = &step.change {
                    check_change(&field, xi, yi)?;
                    state.ops.push(ChartOp::Change {
                        x_image: xi.clone(),
                        y_image: yi.clone(),
                    });
                    for (_, g) in &mut state.strict {
                        *g = g.substitute_polys(&[xi.clone(), yi.clone()]);
                        germ_class(state.raw, g)?;
                    }
                }
                step.weights
            }
            None => auto_weights(&state, &field)?,
        };
        self.blow_up(state, a, b, queue)
    }

    fn record_site(&mut self, state: PointState) {
        self.graph.sites.push(TerminalSite {
            raw: state.raw,
            qtype: normalize(state.raw.0, state.raw.1, state.raw.2)
                .expect("chart type is a faithful quotient"),
            exc_x: state.exc_x,
            exc_y: state.exc_y,
            strict: vanishing(&state.strict),
            ops: state.ops,
        });
    }

    fn blow_up(
        &mut self,
        state: PointState,
        a: u64,
        b: u64,
        queue: &mut Vec<PointState>,
    ) -> Result<(), AlgebraError> {
        let field = self.graph.field.clone();
        let through = vanishing(&state.strict);
        let eqs: Vec<SparsePoly> = through.iter().map(|(_, g)| g.clone()).collect();
        let td = transform_data(state.raw, a, b, &eqs)?;
        let d = state.raw.0;
        let e = td.e;
        let (vx, vy) = (state.exc_x, state.exc_y);

        // new vertex with composed discrepancy
        let mut nu = q((a + b) as i64, e as i64);
        if let Some(v) = vx {
            nu += (&self.graph.vertices[v].nu - Q::one()) * q(a as i64, e as i64);
        }
        if let Some(v) = vy {
            nu += (&self.graph.vertices[v].nu - Q::one()) * q(b as i64, e as i64);
        }
        let mut ops1 = state.ops.clone();
        ops1.push(ChartOp::Blowup { a, b, e, chart: 1 });
        let w = self.graph.vertices.len();
        self.graph.vertices.push(Vertex {
            nu,
            m: vec![],
            ops: ops1.clone(),
            exc_coord: 0,
        });

        // intersection updates
        let ncomp = self.graph.germs.len();
        for row in &mut self.graph.exc_int {
            row.push(Q::zero());
        }
        self.graph.exc_int.push(vec![Q::zero(); w + 1]);
        self.graph.strict_int.push(vec![Q::zero(); ncomp]);
        let dab = (d * a * b) as i64;
        self.graph.exc_int[w][w] = -q((e * e) as i64, dab);
        if let Some(v) = vx {
            let t = q((e * a) as i64, dab);
            self.graph.exc_int[w][v] = t.clone();
            self.graph.exc_int[v][w] = t;
            self.graph.exc_int[v][v] -= q((a * a) as i64, dab);
        }
        if let Some(v) = vy {
            let t = q((e * b) as i64, dab);
            self.graph.exc_int[w][v] = t.clone();
            self.graph.exc_int[v][w] = t;
            self.graph.exc_int[v][v] -= q((b * b) as i64, dab);
        }
        if let (Some(v1), Some(v2)) = (vx, vy) {
            self.graph.exc_int[v1][v2] -= q((a * b) as i64, dab);
            self.graph.exc_int[v2][v1] -= q((a * b) as i64, dab);
        }
        for ((comp, _), gt) in through.iter().zip(&td.germs) {
            let nu_g = gt.w_multiplicity as i64;
            self.graph.strict_int[w][*comp] += q(e as i64 * nu_g, dab);
            if let Some(v) = vx {
                self.graph.strict_int[v][*comp] -= q(a as i64 * nu_g, dab);
            }
            if let Some(v) = vy {
                self.graph.strict_int[v][*comp] -= q(b as i64 * nu_g, dab);
            }
        }

        // chart origins
        let strict1: Vec<(usize, SparsePoly)> = through
            .iter()
            .zip(&td.germs)
            .map(|((c, _), gt)| (*c, gt.strict_chart1.clone()))
            .collect();
        let strict2: Vec<(usize, SparsePoly)> = through
            .iter()
            .zip(&td.germs)
            .map(|((c, _), gt)| (*c, gt.strict_chart2.clone()))
            .collect();
        let mut ops2 = state.ops.clone();
        ops2.push(ChartOp::Blowup { a, b, e, chart: 2 });
        let next_script = match (self.script, state.script_pos) {
            (Some(s), Some(i)) if i < s.len() => {
                let cont = i + 1;
                if cont < s.len() {
                    Some((s[i].chart, cont))
                } else {
                    None
                }
            }
            _ => None,
        };
        let pos_for = |chart: u8| -> Option<usize> {
            match next_script {
                Some((c, i)) if c == chart => Some(i),
                _ => None,
            }
        };
        queue.push(PointState {
            raw: td.chart1.raw,
            ops: ops1.clone(),
            exc_x: Some(w),
            exc_y: state.exc_y,
            strict: strict1.clone(),
            depth: state.depth + 1,
            script_pos: pos_for(1),
        });
        queue.push(PointState {
            raw: td.chart2.raw,
            ops: ops2,
            exc_x: state.exc_x,
            exc_y: Some(w),
            strict: strict2,
            depth: state.depth + 1,
            script_pos: pos_for(2),
        });

        // points of the new divisor away from both chart origins, seen
        // in the first chart as roots of the restriction to {u = 0}
        let mut s: Uni = vec![FieldElement::one(&field)];
        for (_, g) in &strict1 {
            let deg = g.terms.keys().map(|e| e[1]).max().unwrap_or(0) as usize;
            let mut slice = vec![FieldElement::zero(&field); deg + 1];
            for (ex, c) in &g.terms {
                if ex[0] == 0 {
                    slice[ex[1] as usize] = c.clone();
                }
            }
            uni_trim(&mut slice);
            s = uni_mul(&s, &slice, &field);
        }
        while s.first().map(|c| c.is_zero()).unwrap_or(false) {
            s.remove(0); // root at the chart origin, handled above
        }
        let mut g = uni_gcd(&s, &uni_derivative(&s, &field))?;
        while g.first().map(|c| c.is_zero()).unwrap_or(false) {
            g.remove(0);
        }
        if g.len() > 1 {
            // a non-transverse point away from the origins
            if !td.chart1.qtype.is_smooth() {
                return Err(domain(format!(
                    "tangential point away from the chart origins on singular chart {}; \
                     supply a coordinate change or resolution script",
                    td.chart1.qtype
                )));
            }
            let sf = uni_squarefree_part(&g, &field)?;
            if sf.len() != 2 {
                return Err(domain(
                    "several (or irrational) tangential points away from the chart origins; \
                     supply a coordinate change or resolution script",
                ));
            }
            let root = sf[0].neg().div(&sf[1])?;
            let mut ops_t = ops1;
            ops_t.push(ChartOp::Translate { var: 1, value: root.clone() });
            let shift_imgs = [
                SparsePoly::var(&field, 2, 0),
                SparsePoly::var(&field, 2, 1)
                    .add(&SparsePoly::constant(&field, 2, root)),
            ];
            let strict_t: Vec<(usize, SparsePoly)> = strict1
                .iter()
                .map(|(c, g)| (*c, g.substitute_polys(&shift_imgs)))
                .collect();
            queue.push(PointState {
                raw: td.chart1.raw,
                ops: ops_t,
                exc_x: Some(w),
                exc_y: None,
                strict: strict_t,
                depth: state.depth + 1,
                script_pos: None,
            });
        }
        Ok(())
    }
}

/// Resolve the germs at the origin of a (d; p, q) chart into a
/// Q-normal crossing total transform.  An optional coordinate change
/// is applied first; an optional script of weighted blow-up centers is
/// executed verbatim instead of the automatic Newton-polygon driver.
pub fn resolve_germ(
    field: &Arc<Field>,
    center: Triple,
    germs: &[CurveGerm],
    change: Option<(SparsePoly, SparsePoly)>,
    script: Option<&[ScriptStep]>,
) -> Result<ResolutionGraph, AlgebraError> {
    normalize(center.0, center.1, center.2)?;
    if germs.is_empty() {
        return Err(domain("no curve germs supplied"));
    }
    let mut initial_ops = vec![];
    let mut strict: Vec<(usize, SparsePoly)> = vec![];
    for (j, g) in germs.iter().enumerate() {
        if g.equation.is_zero() {
            return Err(domain("component germ is identically zero"));
        }
        germ_class(center, &g.equation)?;
        strict.push((j, g.equation.clone()));
    }
    if let Some((xi, yi)) = &change {
        check_change(field, xi, yi)?;
        initial_ops.push(ChartOp::Change {
            x_image: xi.clone(),
            y_image: yi.clone(),
        });
        for (_, g) in &mut strict {
            *g = g.substitute_polys(&[xi.clone(), yi.clone()]);
            germ_class(center, g)?;
        }
    }
    let mut driver = Driver {
        graph: ResolutionGraph {
            field: field.clone(),
            center,
            germs: germs.to_vec(),
            vertices: vec![],
            exc_int: vec![],
            strict_int: vec![],
            sites: vec![],
        },
        script,
    };
    let mut queue = vec![PointState {
        raw: center,
        ops: initial_ops,
        exc_x: None,
        exc_y: None,
        strict,
        depth: 0,
        script_pos: script.map(|_| 0),
    }];
    while let Some(state) = queue.pop() {
        driver.process(state, &mut queue)?;
    }
    // multiplicities of each component by exact replay
    for v in 0..driver.graph.vertices.len() {
        let m: Result<Vec<Q>, AlgebraError> = germs
            .iter()
            .map(|g| driver.graph.exceptional_valuation(v, &g.equation))
            .collect();
        driver.graph.vertices[v].m = m?;
    }
    Ok(driver.graph)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::parse_poly;

    fn rp(f: &Arc<Field>, s: &str) -> SparsePoly {
        parse_poly(s, f, 2).unwrap()
    }

    fn single(f: &Arc<Field>, s: &str) -> Vec<CurveGerm> {
        vec![CurveGerm {
            equation: rp(f, s),
            multiplicity: 1,
        }]
    }

    /// (E_v . pi* C_j) = 0 for every vertex and component.
    fn assert_pullback_identity(g: &ResolutionGraph) {
        for v in 0..g.vertices.len() {
            for j in 0..g.germs.len() {
                let mut acc = g.strict_int[v][j].clone();
                for b in 0..g.vertices.len() {
                    acc += &g.vertices[b].m[j] * &g.exc_int[v][b];
                }
                assert!(acc.is_zero(), "pullback identity fails at v={v}, j={j}: {acc}");
            }
        }
    }

    #[test]
    fn charts_of_smooth_point_with_weights_2_3() {
        let (c1, c2, e) = blowup_charts((1, 0, 0), 2, 3).unwrap();
        assert_eq!(e, 1);
        assert_eq!(c1.qtype, QuotientType { d: 2, q: 1 });
        assert_eq!(c2.qtype, QuotientType { d: 3, q: 1 });
    }

    #[test]
    fn charts_of_one_third_1_1_fold_to_smooth() {
        let (c1, c2, e) = blowup_charts((3, 1, 1), 1, 1).unwrap();
        assert_eq!(e, 3);
        assert!(c1.qtype.is_smooth());
        assert!(c2.qtype.is_smooth());
    }

    #[test]
    fn ordinary_blowup_of_smooth_point() {
        let (c1, c2, e) = blowup_charts((1, 0, 0), 1, 1).unwrap();
        assert_eq!(e, 1);
        assert!(c1.qtype.is_smooth() && c2.qtype.is_smooth());
        assert!(blowup_charts((1, 0, 0), 2, 4).is_err());
    }

    #[test]
    fn cusp_transform_numbers() {
        let f = Field::rationals();
        let td = transform_data((1, 0, 0), 3, 2, &[rp(&f, "x^2+y^3")]).unwrap();
        assert_eq!(td.e, 1);
        assert_eq!(td.germs[0].w_multiplicity, 6);
        assert_eq!(td.germs[0].exceptional_coefficient, qi(6));
        assert_eq!(td.self_intersection, -q(1, 6));
        assert_eq!(td.strict_dot_e[0], qi(1));
    }

    #[test]
    fn axis_transform_on_one_third_1_1() {
        let f = Field::rationals();
        let td = transform_data((3, 1, 1), 1, 1, &[rp(&f, "x")]).unwrap();
        assert_eq!(td.e, 3);
        assert_eq!(td.germs[0].exceptional_coefficient, q(1, 3));
        assert_eq!(td.self_intersection, qi(-3));
    }

    #[test]
    fn cusp_resolves_in_one_weighted_blowup() {
        let f = Field::rationals();
        let g = resolve_germ(&f, (1, 0, 0), &single(&f, "y^2-x^3"), None, None).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.vertices[0].m[0], qi(6));
        assert_eq!(g.vertices[0].nu, qi(5));
        assert_eq!(g.exc_int[0][0], -q(1, 6));
        assert_eq!(g.strict_int[0][0], qi(1));
        // val(x^i y^j) = 2i + 3j for the (2,3)-valuation
        assert_eq!(g.exceptional_valuation(0, &rp(&f, "x")).unwrap(), qi(2));
        assert_eq!(g.exceptional_valuation(0, &rp(&f, "y")).unwrap(), qi(3));
        assert_eq!(g.exceptional_valuation(0, &rp(&f, "x*y^2")).unwrap(), qi(8));
        assert_eq!(g.exceptional_valuation(0, &rp(&f, "1")).unwrap(), qi(0));
        assert_pullback_identity(&g);
        assert!(g.is_negative_definite());
        assert_eq!(g.delta_top(&[qi(1)]), qi(1));
    }

    #[test]
    fn cusp_by_three_ordinary_blowups() {
        let f = Field::rationals();
        let script = [
            ScriptStep { change: None, weights: (1, 1), chart: 2 },
            ScriptStep { change: None, weights: (1, 1), chart: 1 },
            ScriptStep { change: None, weights: (1, 1), chart: 1 },
        ];
        let g = resolve_germ(&f, (1, 0, 0), &single(&f, "x^2+y^3"), None, Some(&script)).unwrap();
        assert_eq!(g.vertices.len(), 3);
        assert_eq!(g.exc_int[0][0], qi(-3));
        assert_eq!(g.exc_int[1][1], qi(-2));
        assert_eq!(g.exc_int[2][2], qi(-1));
        assert_eq!(g.exc_int[0][1], qi(0));
        assert_eq!(g.exc_int[0][2], qi(1));
        assert_eq!(g.exc_int[1][2], qi(1));
        let m: Vec<Q> = g.vertices.iter().map(|v| v.m[0].clone()).collect();
        assert_eq!(m, vec![qi(2), qi(3), qi(6)]);
        let nu: Vec<Q> = g.vertices.iter().map(|v| v.nu.clone()).collect();
        assert_eq!(nu, vec![qi(2), qi(3), qi(5)]);
        assert_eq!(g.strict_int[2][0], qi(1));
        assert_pullback_identity(&g);
        assert!(g.is_negative_definite());
        // same delta invariant as the one-step Q-resolution
        assert_eq!(g.delta_top(&[qi(1)]), qi(1));
    }

    #[test]
    fn node_is_normal_crossing_and_has_delta_one() {
        let f = Field::rationals();
        let auto = resolve_germ(&f, (1, 0, 0), &single(&f, "x*y"), None, None).unwrap();
        assert!(auto.vertices.is_empty());
        assert_eq!(auto.sites.len(), 1);
        // forcing one blow-up gives a good resolution, delta = 1
        let script = [ScriptStep { change: None, weights: (1, 1), chart: 1 }];
        let g = resolve_germ(&f, (1, 0, 0), &single(&f, "x*y"), None, Some(&script)).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.delta_top(&[qi(1)]), qi(1));
        // a smooth germ has delta zero
        let s = resolve_germ(&f, (1, 0, 0), &single(&f, "y-x^2"), None, None).unwrap();
        assert!(s.vertices.is_empty());
        assert_eq!(s.delta_top(&[qi(1)]), qi(0));
    }

    #[test]
    fn quasi_invariant_axes_at_quotient_point_need_no_blowup() {
        let f = Field::rationals();
        let g = resolve_germ(&f, (3, 1, 2), &single(&f, "x*y"), None, None).unwrap();
        assert!(g.vertices.is_empty());
        assert_eq!(g.sites.len(), 1);
        assert_eq!(g.sites[0].qtype, QuotientType { d: 3, q: 2 });
    }

    #[test]
    fn non_quasi_invariant_germ_is_rejected() {
        let f = Field::rationals();
        assert!(resolve_germ(&f, (3, 1, 2), &single(&f, "x+y"), None, None).is_err());
    }

    #[test]
    fn surface_resolution_of_one_third_1_1() {
        let f = Field::rationals();
        let script = [ScriptStep { change: None, weights: (1, 1), chart: 1 }];
        let g = resolve_germ(&f, (3, 1, 1), &single(&f, "x"), None, Some(&script)).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.exc_int[0][0], qi(-3));
        assert_eq!(g.vertices[0].nu, q(2, 3));
        assert_eq!(g.exceptional_valuation(0, &rp(&f, "x")).unwrap(), q(1, 3));
        let ell = g.pullback_coefficients(&[(qi(1), rp(&f, "x"))]).unwrap();
        assert_eq!(ell, vec![q(1, 3)]);
        // the two definitions of the pull-back coefficients agree
        assert_eq!(g.pullback_from_components(&[qi(1)]), ell);
        assert_pullback_identity(&g);
    }

    #[test]
    fn cusp_on_one_fifth_2_3() {
        let f = Field::rationals();
        let g = resolve_germ(&f, (5, 2, 3), &single(&f, "x^3-y^2"), None, None).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.vertices[0].m[0], q(6, 5));
        assert_eq!(g.vertices[0].nu, qi(1));
        assert_eq!(g.exc_int[0][0], -q(5, 6));
        assert_eq!(g.exceptional_valuation(0, &rp(&f, "x")).unwrap(), q(2, 5));
        assert_eq!(g.exceptional_valuation(0, &rp(&f, "y")).unwrap(), q(3, 5));
        let mut types: Vec<String> = g.sites.iter().map(|s| s.qtype.to_string()).collect();
        types.sort();
        assert_eq!(types, vec!["1/2(1,1)", "1/3(1,2)"]);
        assert_pullback_identity(&g);
        assert!(g.is_negative_definite());
    }

    #[test]
    fn tacnode_resolves_in_one_weighted_blowup() {
        let f = Field::rationals();
        let g = resolve_germ(&f, (1, 0, 0), &single(&f, "x^2-y^4"), None, None).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.vertices[0].m[0], qi(4));
        assert_eq!(g.vertices[0].nu, qi(3));
        assert_pullback_identity(&g);
    }

    #[test]
    fn high_weight_germ_gets_m_30_and_nu_13() {
        let f = Field::rationals();
        let g = resolve_germ(&f, (1, 0, 0), &single(&f, "x^3+2y^10"), None, None).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.vertices[0].m[0], qi(30));
        assert_eq!(g.vertices[0].nu, qi(13));
    }

    #[test]
    fn sheared_cusp_resolves_through_an_automatic_translation() {
        let f = Field::rationals();
        let g = resolve_germ(&f, (1, 0, 0), &single(&f, "(y-x)^2-x^3"), None, None).unwrap();
        assert_eq!(g.vertices.len(), 2);
        let m: Vec<Q> = g.vertices.iter().map(|v| v.m[0].clone()).collect();
        assert_eq!(m, vec![qi(2), qi(6)]);
        let nu: Vec<Q> = g.vertices.iter().map(|v| v.nu.clone()).collect();
        assert_eq!(nu, vec![qi(2), qi(5)]);
        assert_eq!(g.exc_int[0][0], qi(-3));
        assert_eq!(g.exc_int[1][1], -q(1, 2));
        assert_pullback_identity(&g);
        assert!(g.is_negative_definite());
        assert_eq!(g.delta_top(&[qi(1)]), qi(1));
    }

    #[test]
    fn concurrent_lines_resolve_in_one_ordinary_blowup() {
        let f = Field::rationals();
        let one = resolve_germ(&f, (1, 0, 0), &single(&f, "x*y*(x+y)"), None, None).unwrap();
        assert_eq!(one.vertices.len(), 1);
        assert_eq!(one.exc_int[0][0], qi(-1));
        assert_eq!(one.vertices[0].m[0], qi(3));
        assert_eq!(one.vertices[0].nu, qi(2));
        // split into three components: multiplicities add up
        let comps: Vec<CurveGerm> = ["x", "y", "x+y"]
            .iter()
            .map(|s| CurveGerm { equation: rp(&f, s), multiplicity: 1 })
            .collect();
        let three = resolve_germ(&f, (1, 0, 0), &comps, None, None).unwrap();
        assert_eq!(three.vertices.len(), 1);
        assert_eq!(three.vertices[0].m, vec![qi(1), qi(1), qi(1)]);
        assert_pullback_identity(&three);
    }

    #[test]
    fn monomial_germs_are_always_normal_crossing() {
        let f = Field::rationals();
        for (d, p, qe) in [(1, 0, 0), (3, 1, 1), (5, 2, 3), (7, 1, 3)] {
            for (i, j) in [(1u32, 0u32), (0, 1), (2, 3), (4, 1)] {
                let germ = SparsePoly::monomial(&f, vec![i, j], FieldElement::one(&f));
                let g = resolve_germ(
                    &f,
                    (d, p, qe),
                    &[CurveGerm { equation: germ, multiplicity: 1 }],
                    None,
                    None,
                )
                .unwrap();
                assert!(g.vertices.is_empty(), "monomial at 1/{d}({p},{qe})");
            }
        }
    }
}
