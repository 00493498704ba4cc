//! Cyclic covers of a weighted projective plane branched along a
//! (possibly non-reduced) quasi-homogeneous curve: validation of the
//! cover data, graded global sections, localization at the declared
//! singular points, the evaluation matrix into the local quotients,
//! irregularity and monodromy data, and an exact Riemann-Roch
//! self-check at every declared point.

use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use crate::cyclic_quotient::{correction_from_coefficients, gcd, hj_resolve, HJResolution};
use crate::exact_algebra::{
    format_q, q, q_floor, q_frac, qi, rank_kernel, AlgebraError, Field, FieldElement, Q,
    SparsePoly,
};
use crate::qresolution::{
    germ_class, replay_germ, resolve_germ, ChartOp, CurveGerm, ResolutionGraph, ScriptStep,
    TerminalSite, Triple,
};
use crate::quasi_adjunction::{quotient_basis, thresholds, QuasiAdjunctionModule};

fn domain(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Domain(msg.into())
}

/// One branch-locus component: a w-homogeneous equation with its
/// assigned multiplicity and computed w-degree.
#[derive(Debug, Clone)]
pub struct ComponentDecl {
    pub equation: SparsePoly,
    pub multiplicity: u64,
    pub degree: i64,
}

/// A declared point of the branch curve to be resolved.  The chart
/// index tells which homogeneous coordinate is set to 1; coordinates
/// are given in that chart (and must be the origin at a quotient
/// vertex).
#[derive(Debug, Clone)]
pub struct PointDecl {
    pub chart: usize,
    pub coords: (FieldElement, FieldElement),
    pub change: Option<(SparsePoly, SparsePoly)>,
    pub script: Option<Vec<ScriptStep>>,
}

#[derive(Debug, Clone)]
pub struct CoverSpec {
    pub field: Arc<Field>,
    pub w: [i64; 3],
    pub components: Vec<ComponentDecl>,
    /// Cover degree: sum of multiplicity * degree.
    pub d: u64,
    pub points: Vec<PointDecl>,
}

fn eval_at(f: &SparsePoly, at: &[FieldElement]) -> FieldElement {
    let field = &f.field;
    let mut acc = FieldElement::zero(field);
    for (e, c) in &f.terms {
        let mut t = c.clone();
        for (i, v) in at.iter().enumerate() {
            if e[i] > 0 {
                t = t.mul(&v.pow(e[i] as u64));
            }
        }
        acc = acc.add(&t);
    }
    acc
}

fn point_string(decl: &PointDecl) -> String {
    let c = |fe: &FieldElement| -> String {
        match fe.as_rational() {
            Some(r) => format_q(r),
            None => "*".to_string(),
        }
    };
    let mut h = vec![String::new(); 3];
    h[decl.chart] = "1".to_string();
    let (a, b) = other_indices(decl.chart);
    h[a] = c(&decl.coords.0);
    h[b] = c(&decl.coords.1);
    format!("[{}:{}:{}]", h[0], h[1], h[2])
}

fn other_indices(chart: usize) -> (usize, usize) {
    match chart {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Local quotient type at the declared point.
pub fn point_center(w: &[i64; 3], decl: &PointDecl) -> Triple {
    let wc = w[decl.chart];
    if wc <= 1 {
        (1, 0, 0)
    } else {
        let (a, b) = other_indices(decl.chart);
        (wc as u64, w[a], w[b])
    }
}

pub fn validate(
    field: &Arc<Field>,
    w: [i64; 3],
    components: Vec<(SparsePoly, u64)>,
    points: Vec<PointDecl>,
) -> Result<CoverSpec, AlgebraError> {
    for wi in w {
        if wi < 1 {
            return Err(domain("weights must be positive"));
        }
    }
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let g = gcd(w[i] as u64, w[j] as u64);
        if g > 1 {
            return Err(domain(format!(
                "weights ({},{},{}) are not pairwise coprime: gcd = {g} in positions {i},{j}; \
                 the plane is isomorphic to one with reduced weights via the degree-{g} \
                 substitution in coordinate {j} -- supply the reduced model",
                w[0], w[1], w[2]
            )));
        }
    }
    if components.is_empty() {
        return Err(domain("at least one component required"));
    }
    let mut comps = vec![];
    let mut d: u64 = 0;
    for (f, n) in components {
        if f.is_zero() {
            return Err(domain("component equation is identically zero"));
        }
        if n == 0 {
            return Err(domain("component multiplicity must be >= 1"));
        }
        let degree = f.homogeneous_w_degree(&w).map_err(|(e1, e2)| {
            domain(format!(
                "component is not w-homogeneous: monomials {} and {} have different w-degrees",
                crate::exact_algebra::monomial_string(&e1, &["x", "y", "z"]),
                crate::exact_algebra::monomial_string(&e2, &["x", "y", "z"]),
            ))
        })?;
        if degree <= 0 {
            return Err(domain("component must have positive degree"));
        }
        d += n * degree as u64;
        comps.push(ComponentDecl {
            equation: f,
            multiplicity: n,
            degree,
        });
    }
    for decl in &points {
        if decl.chart > 2 {
            return Err(domain("chart index must be 0, 1 or 2"));
        }
        if w[decl.chart] > 1 && !(decl.coords.0.is_zero() && decl.coords.1.is_zero()) {
            return Err(domain(format!(
                "point {} sits in the weight-{} chart away from the vertex; \
                 translation at a quotient point is not defined",
                point_string(decl),
                w[decl.chart]
            )));
        }
        let (a, b) = other_indices(decl.chart);
        let mut at = vec![FieldElement::zero(field); 3];
        at[decl.chart] = FieldElement::one(field);
        at[a] = decl.coords.0.clone();
        at[b] = decl.coords.1.clone();
        if !comps.iter().any(|c| eval_at(&c.equation, &at).is_zero()) {
            return Err(domain(format!(
                "declared point {} is not on the curve",
                point_string(decl)
            )));
        }
    }
    Ok(CoverSpec {
        field: field.clone(),
        w,
        components: comps,
        d,
        points,
    })
}

/// s_k = sum {k n_j / d} d_j; an integer for every 0 <= k < d.
pub fn s_k(spec: &CoverSpec, k: u64) -> i64 {
    let d = qi(spec.d as i64);
    let s: Q = spec
        .components
        .iter()
        .map(|c| q_frac(&(qi((k * c.multiplicity) as i64) / &d)) * qi(c.degree))
        .sum();
    assert!(s.is_integer(), "s_k must be an integer");
    s.to_integer().to_i64().unwrap()
}

/// Monomial basis of the w-homogeneous polynomials of degree `deg`,
/// listed in the graded chart order (z-exponent, then y-exponent,
/// ascending).
pub fn sections_basis(w: &[i64; 3], deg: i64) -> Vec<Vec<u32>> {
    let mut out = vec![];
    if deg < 0 {
        return out;
    }
    for i in 0..=(deg / w[0]) as u32 {
        let rem1 = deg - w[0] * i as i64;
        for j in 0..=(rem1 / w[1]) as u32 {
            let rem2 = rem1 - w[1] * j as i64;
            if rem2 % w[2] == 0 {
                out.push(vec![i, j, (rem2 / w[2]) as u32]);
            }
        }
    }
    out.sort_by_key(|e| (e[2], e[1]));
    out
}

/// Express a w-homogeneous polynomial in the local coordinates of a
/// declared point: dehomogenize in its chart, translate to the point,
/// apply the declared coordinate change, and (optionally) discard
/// monomials above the truncation order.
pub fn localize(
    spec: &CoverSpec,
    decl: &PointDecl,
    f: &SparsePoly,
    truncate: Option<u32>,
) -> Result<SparsePoly, AlgebraError> {
    let field = &spec.field;
    let (a, b) = other_indices(decl.chart);
    let mut images = vec![SparsePoly::zero(field, 2); 3];
    images[decl.chart] = SparsePoly::constant(field, 2, FieldElement::one(field));
    images[a] = SparsePoly::var(field, 2, 0);
    images[b] = SparsePoly::var(field, 2, 1);
    let mut g = f.substitute_polys(&images);
    if !(decl.coords.0.is_zero() && decl.coords.1.is_zero()) {
        let tr = vec![
            SparsePoly::var(field, 2, 0)
                .add(&SparsePoly::constant(field, 2, decl.coords.0.clone())),
            SparsePoly::var(field, 2, 1)
                .add(&SparsePoly::constant(field, 2, decl.coords.1.clone())),
        ];
        g = g.substitute_polys(&tr);
    }
    if let Some((xi, yi)) = &decl.change {
        g = g.substitute_polys(&[xi.clone(), yi.clone()]);
    }
    if let Some(n) = truncate {
        let mut t = SparsePoly::zero(field, 2);
        for (e, c) in &g.terms {
            if e[0] + e[1] <= n {
                t.add_term(e.clone(), c.clone());
            }
        }
        g = t;
    }
    let center = point_center(&spec.w, decl);
    if center.0 > 1 && !g.is_zero() {
        let deg = f
            .homogeneous_w_degree(&spec.w)
            .map_err(|_| domain("localize requires a w-homogeneous input"))?;
        let expect = deg.rem_euclid(center.0 as i64) as u64;
        if germ_class(center, &g)? != expect {
            return Err(domain(
                "localized germ does not lie in the expected eigen-class",
            ));
        }
    }
    Ok(g)
}

/// A declared point together with its local curve germs, resolution
/// graph, and the monomial germ chosen to represent a hyperplane
/// section locally (quotient vertices only).
#[derive(Debug, Clone)]
pub struct PreparedPoint {
    pub decl: PointDecl,
    pub center: Triple,
    pub graph: ResolutionGraph,
    /// Local germ of the representative and its global w-degree; the
    /// hyperplane class is 1/degree times the germ's divisor.
    pub h_rep: Option<(SparsePoly, i64)>,
}

pub fn prepare_point(spec: &CoverSpec, index: usize) -> Result<PreparedPoint, AlgebraError> {
    let decl = spec.points[index].clone();
    let center = point_center(&spec.w, &decl);
    let mut germs = vec![];
    for c in &spec.components {
        let local = localize(spec, &decl, &c.equation, None)?;
        if local.is_zero() {
            return Err(domain("component vanishes identically in the chart"));
        }
        germs.push(CurveGerm {
            equation: local,
            multiplicity: c.multiplicity,
        });
    }
    let graph = resolve_germ(
        &spec.field,
        center,
        &germs,
        None,
        decl.script.as_deref(),
    )?;
    let h_rep = if center.0 > 1 {
        let (a, b) = other_indices(decl.chart);
        let (idx, deg) = if spec.w[a] <= spec.w[b] {
            (a, spec.w[a])
        } else {
            (b, spec.w[b])
        };
        let coord = SparsePoly::monomial(
            &spec.field,
            {
                let mut e = vec![0u32; 3];
                e[idx] = 1;
                e
            },
            FieldElement::one(&spec.field),
        );
        Some((localize(spec, &decl, &coord, None)?, deg))
    } else {
        None
    };
    Ok(PreparedPoint {
        decl,
        center,
        graph,
        h_rep,
    })
}

pub fn prepare_points(spec: &CoverSpec) -> Result<Vec<PreparedPoint>, AlgebraError> {
    (0..spec.points.len()).map(|i| prepare_point(spec, i)).collect()
}

fn wsum(spec: &CoverSpec) -> u64 {
    (spec.w[0] + spec.w[1] + spec.w[2]) as u64
}

/// Evaluation data for a single eigenvalue index k.
#[derive(Debug, Clone)]
pub struct EvaluationData {
    pub k: u64,
    pub s_k: i64,
    pub columns: Vec<Vec<u32>>,
    pub modules: Vec<QuasiAdjunctionModule>,
    pub local_dims: Vec<usize>,
    pub matrix: Vec<Vec<FieldElement>>,
    pub rank: usize,
    pub kernel: Vec<Vec<FieldElement>>,
    pub ker_dim: usize,
    pub coker_dim: usize,
}

pub fn evaluation_matrix(
    spec: &CoverSpec,
    points: &[PreparedPoint],
    k: u64,
) -> Result<EvaluationData, AlgebraError> {
    let field = &spec.field;
    let lam = q(k as i64, spec.d as i64);
    let sk = s_k(spec, k);
    let columns = sections_basis(&spec.w, sk - (spec.w[0] + spec.w[1] + spec.w[2]));
    let mut modules = vec![];
    let mut local_dims = vec![];
    for p in points {
        let m = quotient_basis(&p.graph, wsum(spec), &lam, k as i64)?;
        local_dims.push(m.dim());
        modules.push(m);
    }
    let total_rows: usize = local_dims.iter().sum();
    let mut matrix = vec![vec![FieldElement::zero(field); columns.len()]; total_rows];
    for (col, e) in columns.iter().enumerate() {
        let mono = SparsePoly::monomial(field, e.clone(), FieldElement::one(field));
        let mut row0 = 0;
        for (p, m) in points.iter().zip(&modules) {
            let loc = localize(spec, &p.decl, &mono, Some(m.jet_order))?;
            for (i, c) in m.reduce(&loc)?.into_iter().enumerate() {
                matrix[row0 + i][col] = c;
            }
            row0 += m.dim();
        }
    }
    let (rank, kernel) = rank_kernel(&matrix, columns.len(), field)?;
    // cross-check: every kernel section must satisfy the strict
    // valuation conditions at every exceptional divisor directly
    for v in &kernel {
        let mut f = SparsePoly::zero(field, 3);
        for (c, e) in v.iter().zip(&columns) {
            if !c.is_zero() {
                f.add_term(e.clone(), c.clone());
            }
        }
        for p in points {
            let loc = localize(spec, &p.decl, &f, None)?;
            let ts = thresholds(&p.graph, &lam);
            for (vx, t) in ts.iter().enumerate() {
                if p.graph.exceptional_valuation(vx, &loc)? <= *t {
                    return Err(domain(
                        "internal check failed: kernel section violates a valuation bound",
                    ));
                }
            }
        }
    }
    Ok(EvaluationData {
        k,
        s_k: sk,
        ker_dim: columns.len() - rank,
        coker_dim: total_rows - rank,
        columns,
        modules,
        local_dims,
        matrix,
        rank,
        kernel,
    })
}

#[derive(Debug, Clone)]
pub struct IrregularityReport {
    pub d: u64,
    pub rows: Vec<EvaluationData>,
    pub h1: usize,
    pub charpoly_factored: String,
    pub charpoly_expanded: Option<String>,
}

fn cyclotomic(d: u64) -> Option<Vec<Q>> {
    let c: &[i64] = match d {
        1 => &[-1, 1],
        2 => &[1, 1],
        3 => &[1, 1, 1],
        4 => &[1, 0, 1],
        5 => &[1, 1, 1, 1, 1],
        6 => &[1, -1, 1],
        7 => &[1, 1, 1, 1, 1, 1, 1],
        8 => &[1, 0, 0, 0, 1],
        9 => &[1, 0, 0, 1, 0, 0, 1],
        10 => &[1, -1, 1, -1, 1],
        11 => &[1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
        12 => &[1, 0, -1, 0, 1],
        _ => return None,
    };
    Some(c.iter().map(|&x| qi(x)).collect())
}

fn render_coefficient(c: &FieldElement) -> String {
    match c.as_rational() {
        Some(r) => format_q(r),
        None => {
            let parts: Vec<String> = c
                .coords
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| match i {
                    0 => format_q(x),
                    1 => format!("{}*z", format_q(x)),
                    _ => format!("{}*z^{i}", format_q(x)),
                })
                .collect();
            format!("({})", parts.join(" + "))
        }
    }
}

fn render_t_poly(coeffs: &[FieldElement]) -> String {
    let mut parts = vec![];
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = render_coefficient(c);
        let body = match i {
            0 => cs,
            1 if cs == "1" => "t".to_string(),
            1 if cs == "-1" => "-t".to_string(),
            1 => format!("{cs}*t"),
            _ if cs == "1" => format!("t^{i}"),
            _ if cs == "-1" => format!("-t^{i}"),
            _ => format!("{cs}*t^{i}"),
        };
        parts.push(body);
    }
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = parts.remove(0);
    for p in parts {
        if let Some(stripped) = p.strip_prefix('-') {
            out.push_str(&format!(" - {stripped}"));
        } else {
            out.push_str(&format!(" + {p}"));
        }
    }
    out
}

/// Expand prod_k [(t - z^k)(t - z^{d-k})]^{c_k} over Q[z]/(Phi_d(z)).
fn expand_charpoly(d: u64, coker: &[usize]) -> Option<String> {
    let phi = cyclotomic(d)?;
    let field = if phi.len() == 2 {
        // degree-1 modulus z - a: work over plain Q with z = a
        Field::rationals()
    } else {
        Field::extension(phi.clone()).ok()?
    };
    let zeta = if phi.len() == 2 {
        FieldElement::from_rational(&field, -phi[0].clone())
    } else {
        FieldElement::generator(&field)
    };
    let mut poly = vec![FieldElement::one(&field)];
    let mul_root = |p: &Vec<FieldElement>, root: &FieldElement| -> Vec<FieldElement> {
        // multiply by (t - root)
        let mut out = vec![FieldElement::zero(&field); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            out[i + 1] = out[i + 1].add(c);
            out[i] = out[i].sub(&c.mul(root));
        }
        out
    };
    for (k, &c) in coker.iter().enumerate() {
        for _ in 0..c {
            poly = mul_root(&poly, &zeta.pow(k as u64));
            poly = mul_root(&poly, &zeta.pow((d - k as u64) % d));
        }
    }
    Some(render_t_poly(&poly))
}

fn factored_charpoly(d: u64, coker: &[usize]) -> String {
    let mut parts = vec![];
    for (k, &c) in coker.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let pair = format!("(t - z^{k})(t - z^{})", d - k as u64);
        parts.push(if c == 1 {
            pair
        } else {
            format!("[{pair}]^{c}")
        });
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        format!("{}   (z a primitive {d}-th root of unity)", parts.join(" "))
    }
}

pub fn irregularity(spec: &CoverSpec) -> Result<IrregularityReport, AlgebraError> {
    let points = prepare_points(spec)?;
    let mut rows = vec![];
    for k in 0..spec.d {
        rows.push(evaluation_matrix(spec, &points, k)?);
    }
    if rows[0].coker_dim != 0 {
        return Err(domain("internal check failed: nonzero cokernel at k = 0"));
    }
    let coker: Vec<usize> = rows.iter().map(|r| r.coker_dim).collect();
    let h1 = 2 * coker.iter().sum::<usize>();
    Ok(IrregularityReport {
        d: spec.d,
        charpoly_factored: factored_charpoly(spec.d, &coker),
        charpoly_expanded: expand_charpoly(spec.d, &coker),
        rows,
        h1,
    })
}

pub fn render_report(report: &IrregularityReport) -> String {
    let mut out = String::new();
    out.push_str("  k   s_k  sections  local-dims  rank  h2(L)  coker\n");
    for r in &report.rows {
        let dims = r
            .local_dims
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "{:>3} {:>5} {:>9} {:>11} {:>5} {:>6} {:>6}\n",
            r.k,
            r.s_k,
            r.columns.len(),
            dims,
            r.rank,
            r.ker_dim,
            r.coker_dim
        ));
    }
    out.push_str(&format!("h1 = {}\n", report.h1));
    out.push_str(&format!("monodromy charpoly on h1: {}\n", report.charpoly_factored));
    if let Some(e) = &report.charpoly_expanded {
        out.push_str(&format!("expanded: {e}\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// Riemann-Roch self-check
// ---------------------------------------------------------------------------

/// Valuation of the total transform of a germ along a toric ray of a
/// terminal site (exact for the rays of a Hirzebruch-Jung chain).
fn total_valuation(
    germ: &SparsePoly,
    ops: &[ChartOp],
    ray: &(Q, Q),
) -> Result<Q, AlgebraError> {
    let rg = replay_germ(germ, ops)?;
    let base = &rg.offset.0 * &ray.0 + &rg.offset.1 * &ray.1;
    let min = rg
        .poly
        .terms
        .keys()
        .map(|e| qi(e[0] as i64) * &ray.0 + qi(e[1] as i64) * &ray.1)
        .min()
        .ok_or_else(|| domain("valuation of the zero germ"))?;
    Ok(base + min)
}

fn site_correction(
    spec: &CoverSpec,
    p: &PreparedPoint,
    site: &TerminalSite,
    k: u64,
    exc_coeff: &[Q],
) -> Result<Q, AlgebraError> {
    if site.qtype.is_smooth() {
        return Ok(Q::zero());
    }
    let res: HJResolution = hj_resolve(&site.qtype);
    let mut ell = vec![Q::zero(); res.len()];
    let d = qi(spec.d as i64);
    for (i, ray) in res.rays.iter().enumerate() {
        if let Some((h, e)) = &p.h_rep {
            ell[i] += qi(-(k as i64)) / qi(*e) * total_valuation(h, &site.ops, ray)?;
        }
        for (c, g) in spec.components.iter().zip(&p.graph.germs) {
            let fl = q_floor(&(qi((k * c.multiplicity) as i64) / &d));
            if !fl.is_zero() {
                ell[i] += fl * total_valuation(&g.equation, &site.ops, ray)?;
            }
        }
        if let Some(v) = site.exc_x {
            ell[i] += &exc_coeff[v] * &ray.0;
        }
        if let Some(v) = site.exc_y {
            ell[i] += &exc_coeff[v] * &ray.1;
        }
    }
    Ok(correction_from_coefficients(&res, &ell))
}

/// The local Riemann-Roch balance at a declared point: the alpha term
/// built from the exceptional coefficients of the cover divisor, plus
/// the local quotient dimension, plus the residual correction terms on
/// the resolved surface, minus the correction term downstairs.  The
/// theory predicts exactly zero.
pub fn beta_check(spec: &CoverSpec, p: &PreparedPoint, k: u64) -> Result<Q, AlgebraError> {
    let g = &p.graph;
    let d = qi(spec.d as i64);
    let nv = g.vertices.len();
    // pull-back coefficients of the hyperplane class
    let mut ell_h = vec![Q::zero(); nv];
    if let Some((h, e)) = &p.h_rep {
        for (v, l) in ell_h.iter_mut().enumerate() {
            *l = g.exceptional_valuation(v, h)? / qi(*e);
        }
    }
    let mut alpha = Q::zero();
    let mut c_v = vec![Q::zero(); nv];
    let mut exc_coeff = vec![Q::zero(); nv];
    for v in 0..nv {
        let vx = &g.vertices[v];
        let mut m_v = Q::zero();
        let mut e_vk = Q::zero();
        for (c, m) in spec.components.iter().zip(&vx.m) {
            m_v += qi(c.multiplicity as i64) * m;
            e_vk += q_floor(&(qi((k * c.multiplicity) as i64) / &d)) * m;
        }
        let kq = qi(k as i64);
        exc_coeff[v] = q_floor(&(&kq * (&m_v - &d * &ell_h[v]) / &d));
        c_v[v] = &exc_coeff[v] + &kq * &ell_h[v] - e_vk;
    }
    for v in 0..nv {
        for b in 0..nv {
            if g.exc_int[v][b].is_zero() {
                continue;
            }
            alpha += &c_v[v]
                * (&c_v[b] - (&g.vertices[b].nu - Q::one()))
                * &g.exc_int[v][b];
        }
    }
    alpha /= qi(2);
    let lam = q(k as i64, spec.d as i64);
    let dim_q = qi(quotient_basis(g, wsum(spec), &lam, k as i64)?.dim() as i64);
    // the residual corrections replay total transforms, so the
    // exceptional part to add on top is c_v, not the raw floor
    let mut r_y = Q::zero();
    for site in &g.sites {
        r_y += site_correction(spec, p, site, k, &c_v)?;
    }
    // correction term downstairs for -kH + sum floor(k n_j / d) C_j
    let r_x = if p.center.0 > 1 {
        let t = crate::cyclic_quotient::normalize(p.center.0, p.center.1, p.center.2)?;
        let res = hj_resolve(&t);
        let mut ell = vec![Q::zero(); res.len()];
        for (i, ray) in res.rays.iter().enumerate() {
            if let Some((h, e)) = &p.h_rep {
                ell[i] += qi(-(k as i64)) / qi(*e) * total_valuation(h, &[], ray)?;
            }
            for (c, g) in spec.components.iter().zip(&p.graph.germs) {
                let fl = q_floor(&(qi((k * c.multiplicity) as i64) / &d));
                if !fl.is_zero() {
                    ell[i] += fl * total_valuation(&g.equation, &[], ray)?;
                }
            }
        }
        correction_from_coefficients(&res, &ell)
    } else {
        Q::zero()
    };
    Ok(alpha + dim_q + r_y - r_x)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::parse_poly;

    fn rp3(f: &Arc<Field>, s: &str) -> SparsePoly {
        parse_poly(s, f, 3).unwrap()
    }

    fn rp2(f: &Arc<Field>, s: &str) -> SparsePoly {
        parse_poly(s, f, 2).unwrap()
    }

    fn origin(f: &Arc<Field>, chart: usize) -> PointDecl {
        PointDecl {
            chart,
            coords: (FieldElement::zero(f), FieldElement::zero(f)),
            change: None,
            script: None,
        }
    }

    fn cusp23_spec(f: &Arc<Field>) -> CoverSpec {
        validate(
            f,
            [3, 2, 1],
            vec![(rp3(f, "x^2+y^3"), 1)],
            vec![origin(f, 2)],
        )
        .unwrap()
    }

    // the curve with three concurrent multiple lines
    fn lines_spec(f: &Arc<Field>) -> CoverSpec {
        validate(
            f,
            [1, 1, 1],
            vec![(rp3(f, "x"), 1), (rp3(f, "y"), 2), (rp3(f, "x+y"), 3)],
            vec![origin(f, 2)],
        )
        .unwrap()
    }

    fn zariski_curve(f: &Arc<Field>, lam: &FieldElement) -> SparsePoly {
        let term = |cx: FieldElement, cy: FieldElement, cm: FieldElement| {
            // cx*yz + cy*xz + cm*xy^3
            SparsePoly::monomial(f, vec![0, 1, 1], cx)
                .add(&SparsePoly::monomial(f, vec![1, 0, 1], cy))
                .add(&SparsePoly::monomial(f, vec![1, 3, 0], cm))
        };
        let one = FieldElement::one(f);
        let a = term(lam.clone(), one.clone(), one.neg());
        let b = term(one.clone(), one.neg(), one.clone());
        let c = term(lam.neg(), lam.clone(), one.clone());
        a.pow(3).add(&b.pow(3)).add(&c.pow(3))
    }

    fn zariski_spec(f: &Arc<Field>, lam: &FieldElement) -> CoverSpec {
        let l2 = lam.mul(lam);
        let p1 = PointDecl {
            chart: 0,
            coords: (FieldElement::zero(f), FieldElement::zero(f)),
            // (y, z) = (y1, lam^2 (z1 - y1^3))
            change: Some((
                rp2(f, "x"),
                rp2(f, "y-x^3").scale(&l2),
            )),
            script: None,
        };
        let p2 = PointDecl {
            chart: 1,
            coords: (FieldElement::zero(f), FieldElement::zero(f)),
            change: Some((rp2(f, "x"), rp2(f, "y-x"))),
            script: None,
        };
        let p3 = PointDecl {
            chart: 2,
            coords: (FieldElement::zero(f), FieldElement::zero(f)),
            change: Some((rp2(f, "x"), rp2(f, "y-x").scale(&l2))),
            script: None,
        };
        validate(f, [1, 1, 3], vec![(zariski_curve(f, lam), 1)], vec![p1, p2, p3]).unwrap()
    }

    #[test]
    fn weights_must_be_pairwise_coprime() {
        let f = Field::rationals();
        let err = validate(&f, [2, 2, 3], vec![(rp3(&f, "x+y"), 1)], vec![]).unwrap_err();
        assert!(err.to_string().contains("pairwise coprime"), "{err}");
    }

    #[test]
    fn non_homogeneous_component_names_the_monomials() {
        let f = Field::rationals();
        let err = validate(&f, [1, 1, 3], vec![(rp3(&f, "x^2+z"), 1)], vec![]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("x^2") && msg.contains('z'), "{msg}");
    }

    #[test]
    fn point_off_the_curve_is_rejected() {
        let f = Field::rationals();
        let err = validate(
            &f,
            [9, 5, 2],
            vec![(rp3(&f, "x^2z+y^2z^5+y^4"), 1)],
            vec![origin(&f, 1)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("[0:1:0]"), "{err}");
    }

    #[test]
    fn s_k_is_k_for_reduced_curves_and_drops_otherwise() {
        let f = Field::rationals();
        let spec = cusp23_spec(&f);
        for k in 0..6 {
            assert_eq!(s_k(&spec, k), k as i64);
        }
        let lines = lines_spec(&f);
        assert_eq!(lines.d, 6);
        assert_eq!(s_k(&lines, 5), 2);
        assert_eq!(s_k(&lines, 0), 0);
    }

    #[test]
    fn section_bases_follow_the_chart_order() {
        let _f = Field::rationals();
        let b = sections_basis(&[1, 1, 3], 5);
        let strings: Vec<String> = b
            .iter()
            .map(|e| crate::exact_algebra::monomial_string(e, &["x", "y", "z"]))
            .collect();
        assert_eq!(
            strings,
            vec![
                "x^5", "x^4*y", "x^3*y^2", "x^2*y^3", "x*y^4", "y^5", "x^2*z", "x*y*z", "y^2*z"
            ]
        );
        assert!(sections_basis(&[1, 1, 3], -1).is_empty());
        let b2 = sections_basis(&[1, 2, 1], 1);
        assert_eq!(b2, vec![vec![1, 0, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn localization_applies_chart_and_declared_change() {
        let f = Field::extension(vec![qi(1), qi(1), qi(1)]).unwrap(); // t^2+t+1
        let lam = FieldElement::generator(&f);
        let spec = zariski_spec(&f, &lam);
        let xyz = rp3(&f, "xyz");
        // at P2 (chart y): x z -> x (y - x)
        let at_p2 = localize(&spec, &spec.points[1], &xyz, None).unwrap();
        assert!(at_p2.sub(&rp2(&f, "xy-x^2")).is_zero());
        // at P3 (chart z): x y -> lam^2 (x y - x^2)
        let at_p3 = localize(&spec, &spec.points[2], &xyz, None).unwrap();
        let l2 = lam.mul(&lam);
        let expected = rp2(&f, "xy-x^2").scale(&l2);
        assert!(at_p3.sub(&expected).is_zero());
    }

    #[test]
    fn cusp23_cover_has_irregularity_two() {
        let f = Field::rationals();
        let spec = cusp23_spec(&f);
        assert_eq!(spec.d, 6);
        let pts = prepare_points(&spec).unwrap();
        let g = &pts[0].graph;
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.vertices[0].m, vec![qi(6)]);
        assert_eq!(g.vertices[0].nu, qi(5));
        assert_eq!(g.exc_int[0][0], q(-1, 6));
        let rep = irregularity(&spec).unwrap();
        let coker: Vec<usize> = rep.rows.iter().map(|r| r.coker_dim).collect();
        assert_eq!(coker, vec![0, 0, 0, 0, 0, 1]);
        assert_eq!(rep.h1, 2);
        assert_eq!(rep.charpoly_expanded.as_deref(), Some("t^2 - t + 1"));
    }

    #[test]
    fn concurrent_multiple_lines_cover() {
        let f = Field::rationals();
        let spec = lines_spec(&f);
        let rep = irregularity(&spec).unwrap();
        let coker: Vec<usize> = rep.rows.iter().map(|r| r.coker_dim).collect();
        assert_eq!(coker, vec![0, 0, 0, 0, 0, 1]);
        assert_eq!(rep.h1, 2);
    }

    #[test]
    fn quasi_smooth_curve_needs_no_blowups_and_is_regular() {
        let f = Field::rationals();
        let spec = validate(
            &f,
            [9, 5, 2],
            vec![(rp3(&f, "x^2z+y^2z^5+y^4"), 1)],
            vec![origin(&f, 0), origin(&f, 2)],
        )
        .unwrap();
        assert_eq!(spec.d, 20);
        let pts = prepare_points(&spec).unwrap();
        for p in &pts {
            assert!(p.graph.vertices.is_empty(), "no blow-ups expected");
        }
        let rep = irregularity(&spec).unwrap();
        assert_eq!(rep.h1, 0);
        for r in &rep.rows {
            assert_eq!(r.coker_dim, 0);
        }
    }

    #[test]
    fn nodal_cubic_on_the_plain_plane_is_regular() {
        let f = Field::rationals();
        let spec = validate(
            &f,
            [1, 1, 1],
            vec![(rp3(&f, "zy^2-x^3-x^2z"), 1)],
            vec![origin(&f, 2)],
        )
        .unwrap();
        let rep = irregularity(&spec).unwrap();
        assert_eq!(rep.h1, 0);
    }

    #[test]
    fn zariski_pair_local_quotients_match_the_three_profiles() {
        let f = Field::extension(vec![qi(1), qi(1), qi(1)]).unwrap();
        let lam = FieldElement::generator(&f);
        let spec = zariski_spec(&f, &lam);
        assert_eq!(spec.d, 12);
        let pts = prepare_points(&spec).unwrap();
        let mut dims = vec![vec![]; 3];
        for k in 0..12u64 {
            let ev = evaluation_matrix(&spec, &pts, k).unwrap();
            for i in 0..3 {
                dims[i].push(ev.local_dims[i]);
            }
        }
        assert_eq!(dims[0], vec![0, 0, 0, 0, 0, 0, 1, 2, 3, 4, 6, 7]);
        assert_eq!(dims[1], vec![0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 2, 3]);
        assert_eq!(dims[2], vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn zariski_pair_is_distinguished_by_the_k_10_matrix() {
        // lam = zeta (primitive cube root): rank 9, no cokernel
        let f = Field::extension(vec![qi(1), qi(1), qi(1)]).unwrap();
        let lam = FieldElement::generator(&f);
        let spec = zariski_spec(&f, &lam);
        let pts = prepare_points(&spec).unwrap();
        let ev = evaluation_matrix(&spec, &pts, 10).unwrap();
        assert_eq!(ev.matrix.len(), 9);
        assert_eq!(ev.columns.len(), 9);
        assert_eq!(ev.rank, 9);
        assert_eq!(ev.coker_dim, 0);

        // lam = 1: rank 8, kernel generated by y(xy^3 + xz + yz)
        let fq = Field::rationals();
        let one = FieldElement::one(&fq);
        let spec1 = zariski_spec(&fq, &one);
        let pts1 = prepare_points(&spec1).unwrap();
        let ev1 = evaluation_matrix(&spec1, &pts1, 10).unwrap();
        assert_eq!(ev1.rank, 8);
        assert_eq!(ev1.ker_dim, 1);
        assert_eq!(ev1.coker_dim, 1);
        let kv = &ev1.kernel[0];
        let f_ker = rp3(&fq, "xy^4+xyz+y^2z");
        // compare against the kernel vector up to scale
        let pivot = kv.iter().position(|c| !c.is_zero()).unwrap();
        let scale = kv[pivot].inv().unwrap();
        for (c, e) in kv.iter().zip(&ev1.columns) {
            let want = f_ker.coeff(e);
            assert!(c.mul(&scale).sub(&want).is_zero());
        }
    }

    #[test]
    fn zariski_pair_irregularities() {
        let fq = Field::rationals();
        let one = FieldElement::one(&fq);
        let rep1 = irregularity(&zariski_spec(&fq, &one)).unwrap();
        assert_eq!(rep1.h1, 2);
        let coker: Vec<usize> = rep1.rows.iter().map(|r| r.coker_dim).collect();
        assert_eq!(coker[10], 1);
        assert_eq!(coker.iter().sum::<usize>(), 1);

        let f = Field::extension(vec![qi(1), qi(1), qi(1)]).unwrap();
        let lam = FieldElement::generator(&f);
        let repz = irregularity(&zariski_spec(&f, &lam)).unwrap();
        assert_eq!(repz.h1, 0);
    }

    #[test]
    fn beta_vanishes_on_the_calibration_covers() {
        let f = Field::rationals();
        for spec in [cusp23_spec(&f), lines_spec(&f)] {
            let pts = prepare_points(&spec).unwrap();
            for p in &pts {
                for k in 0..spec.d {
                    assert_eq!(beta_check(&spec, p, k).unwrap(), Q::zero(), "k = {k}");
                }
            }
        }
    }

    #[test]
    fn beta_vanishes_on_the_quasi_smooth_cover() {
        let f = Field::rationals();
        let spec = validate(
            &f,
            [9, 5, 2],
            vec![(rp3(&f, "x^2z+y^2z^5+y^4"), 1)],
            vec![origin(&f, 0), origin(&f, 2)],
        )
        .unwrap();
        let pts = prepare_points(&spec).unwrap();
        for p in &pts {
            for k in 0..spec.d {
                assert_eq!(
                    beta_check(&spec, p, k).unwrap(),
                    Q::zero(),
                    "center {:?}, k = {k}",
                    p.center
                );
            }
        }
    }

    #[test]
    fn beta_vanishes_on_the_zariski_cover() {
        let fq = Field::rationals();
        let one = FieldElement::one(&fq);
        let spec = zariski_spec(&fq, &one);
        let pts = prepare_points(&spec).unwrap();
        for p in &pts {
            for k in 0..12 {
                assert_eq!(
                    beta_check(&spec, p, k).unwrap(),
                    Q::zero(),
                    "center {:?}, k = {k}",
                    p.center
                );
            }
        }
    }
}
