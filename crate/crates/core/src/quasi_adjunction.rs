//! Quasi-adjunction modules of a resolved curve germ: eigenvalue
//! classes, fractional-part thresholds per exceptional divisor,
//! quotient bases inside the eigen-modules (by exact linear algebra on
//! jets), and the stratification of the parameter interval [0,1) into
//! half-open intervals with constant module.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclic_quotient::{monomial_class, order_monomials};
use crate::exact_algebra::{
    monomial_string, q_floor, q_frac, qi, rref, AlgebraError, FieldElement, Q, SparsePoly,
};
use crate::qresolution::{germ_class, replay_germ, ResolutionGraph};

fn domain(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Domain(msg.into())
}

fn q_ceil(x: &Q) -> Q {
    -q_floor(&-x)
}

/// sigma = k - |w| - sum floor(lambda n_i) [f_i]  (mod d).
pub fn sigma_class(d: u64, wsum: u64, comps: &[(u64, u64)], lambda: &Q, k: i64) -> u64 {
    if d <= 1 {
        return 0;
    }
    let mut s = k - wsum as i64;
    for (class, n) in comps {
        let fl = q_floor(&(lambda * qi(*n as i64)))
            .to_integer()
            .to_i64()
            .expect("floor overflow");
        s -= fl * *class as i64;
    }
    s.rem_euclid(d as i64) as u64
}

/// T_v = sum_i {lambda n_i} m_{vi} - nu_v, one per exceptional divisor.
pub fn thresholds(graph: &ResolutionGraph, lambda: &Q) -> Vec<Q> {
    graph
        .vertices
        .iter()
        .map(|v| {
            let mut t = -&v.nu;
            for (g, m) in graph.germs.iter().zip(&v.m) {
                t += q_frac(&(lambda * qi(g.multiplicity as i64))) * m;
            }
            t
        })
        .collect()
}

fn component_classes(graph: &ResolutionGraph) -> Result<Vec<(u64, u64)>, AlgebraError> {
    graph
        .germs
        .iter()
        .map(|g| Ok((germ_class(graph.center, &g.equation)?, g.multiplicity)))
        .collect()
}

/// Direct membership test: g has class sigma and its valuation exceeds
/// the threshold strictly on every exceptional divisor.
pub fn module_membership(
    graph: &ResolutionGraph,
    wsum: u64,
    lambda: &Q,
    k: i64,
    g: &SparsePoly,
) -> Result<bool, AlgebraError> {
    let d = graph.center.0;
    let sigma = sigma_class(d, wsum, &component_classes(graph)?, lambda, k);
    if germ_class(graph.center, g)? != sigma {
        return Err(domain(format!(
            "germ class does not match the module class {sigma}"
        )));
    }
    let ts = thresholds(graph, lambda);
    for (v, t) in ts.iter().enumerate() {
        if graph.exceptional_valuation(v, g)? <= *t {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A quasi-adjunction module presented through its quotient: the
/// eigen-module modulo the module is spanned by the classes of
/// `quotient_basis`, and `reduce` maps any class-sigma germ to its
/// coordinate vector in that basis.
#[derive(Debug, Clone)]
pub struct QuasiAdjunctionModule {
    pub sigma: u64,
    pub thresholds: Vec<Q>,
    /// Jet degree bound: every class-sigma germ of larger order is a
    /// certified member.
    pub jet_order: u32,
    /// Class-sigma monomials of total degree <= jet_order.
    pub jet_monomials: Vec<(u32, u32)>,
    pub quotient_basis: Vec<(u32, u32)>,
    /// Canonical (reduced row echelon) matrix of the membership
    /// conditions; quotient coordinates of a jet vector c are R c.
    reduction: Vec<Vec<FieldElement>>,
    center: (u64, i64, i64),
    field: Arc<crate::exact_algebra::Field>,
}

impl QuasiAdjunctionModule {
    pub fn dim(&self) -> usize {
        self.quotient_basis.len()
    }

    /// Coordinates of [g] in the quotient basis.  Monomials of g above
    /// the jet order are members and are ignored.
    pub fn reduce(&self, g: &SparsePoly) -> Result<Vec<FieldElement>, AlgebraError> {
        for e in g.terms.keys() {
            if (e[0] + e[1]) <= self.jet_order
                && monomial_class(self.center.0, self.center.1, self.center.2, e[0] as u64, e[1] as u64)
                    != self.sigma
            {
                return Err(domain(format!(
                    "monomial of class != {} in a class-{} reduction",
                    self.sigma, self.sigma
                )));
            }
        }
        let c: Vec<FieldElement> = self
            .jet_monomials
            .iter()
            .map(|&(i, j)| g.coeff(&[i, j]))
            .collect();
        Ok(self
            .reduction
            .iter()
            .map(|row| {
                let mut acc = FieldElement::zero(&self.field);
                for (r, cv) in row.iter().zip(&c) {
                    acc = acc.add(&r.mul(cv));
                }
                acc
            })
            .collect())
    }

    pub fn contains(&self, g: &SparsePoly) -> Result<bool, AlgebraError> {
        Ok(self.reduce(g)?.iter().all(|c| c.is_zero()))
    }

    pub fn same_module(&self, other: &Self) -> bool {
        if self.sigma != other.sigma
            || self.jet_order != other.jet_order
            || self.jet_monomials != other.jet_monomials
            || self.reduction.len() != other.reduction.len()
        {
            return false;
        }
        self.reduction
            .iter()
            .zip(&other.reduction)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.sub(y).is_zero()))
    }

    pub fn basis_strings(&self) -> Vec<String> {
        self.quotient_basis
            .iter()
            .map(|&(i, j)| monomial_string(&[i, j], &["x", "y"]))
            .collect()
    }
}

fn certified_jet_order(graph: &ResolutionGraph, ts: &[Q]) -> Result<u32, AlgebraError> {
    let field = &graph.field;
    let x = SparsePoly::var(field, 2, 0);
    let y = SparsePoly::var(field, 2, 1);
    let mut n: i64 = 0;
    for (v, t) in ts.iter().enumerate() {
        let mu = graph
            .exceptional_valuation(v, &x)?
            .min(graph.exceptional_valuation(v, &y)?);
        assert!(mu.is_positive(), "coordinate valuations must be positive");
        let bound = 1 + q_floor(&(t / &mu)).to_integer().to_i64().unwrap();
        n = n.max(bound);
    }
    Ok(n.max(0) as u32)
}

/// Quotient of the class-sigma eigen-module by the quasi-adjunction
/// module, with an explicit jet order.
pub fn quotient_basis_with_order(
    graph: &ResolutionGraph,
    wsum: u64,
    lambda: &Q,
    k: i64,
    jet_order: u32,
) -> Result<QuasiAdjunctionModule, AlgebraError> {
    let (d, p, qe) = graph.center;
    let field = graph.field.clone();
    let sigma = sigma_class(d, wsum, &component_classes(graph)?, lambda, k);
    let ts = thresholds(graph, lambda);

    let mut jets: Vec<(u32, u32)> = vec![];
    for deg in 0..=jet_order {
        for i in 0..=deg {
            let j = deg - i;
            if monomial_class(d, p, qe, i as u64, j as u64) == sigma {
                jets.push((i, j));
            }
        }
    }
    order_monomials(&mut jets);

    // Membership conditions: for each divisor, each exceptional
    // exponent r <= T_v of a replayed jet (together with its transverse
    // exponent) must have vanishing total coefficient.
    let mut rows: Vec<Vec<FieldElement>> = vec![];
    for (v, t) in ts.iter().enumerate() {
        let vx = &graph.vertices[v];
        let exc = vx.exc_coord;
        let mut cond: BTreeMap<(Q, Q), Vec<FieldElement>> = BTreeMap::new();
        for (col, &(i, j)) in jets.iter().enumerate() {
            let mono = SparsePoly::monomial(&field, vec![i, j], FieldElement::one(&field));
            let rg = replay_germ(&mono, &vx.ops)?;
            for (e, c) in &rg.poly.terms {
                let r = (if exc == 0 { &rg.offset.0 } else { &rg.offset.1 }) + qi(e[exc] as i64);
                if r > *t {
                    continue;
                }
                let s = (if exc == 0 { &rg.offset.1 } else { &rg.offset.0 })
                    + qi(e[1 - exc] as i64);
                let row = cond
                    .entry((r, s))
                    .or_insert_with(|| vec![FieldElement::zero(&field); jets.len()]);
                row[col] = row[col].add(c);
            }
        }
        rows.extend(cond.into_values());
    }
    let (reduction, pivots) = rref(&rows, jets.len())?;
    let quotient_basis: Vec<(u32, u32)> = pivots.iter().map(|&c| jets[c]).collect();
    Ok(QuasiAdjunctionModule {
        sigma,
        thresholds: ts,
        jet_order,
        jet_monomials: jets,
        quotient_basis,
        reduction,
        center: graph.center,
        field,
    })
}

pub fn quotient_basis(
    graph: &ResolutionGraph,
    wsum: u64,
    lambda: &Q,
    k: i64,
) -> Result<QuasiAdjunctionModule, AlgebraError> {
    let ts = thresholds(graph, lambda);
    let n = certified_jet_order(graph, &ts)?;
    quotient_basis_with_order(graph, wsum, lambda, k, n)
}

/// One half-open interval [from, to) with constant quasi-adjunction
/// module.
#[derive(Debug, Clone)]
pub struct Stratum {
    pub from: Q,
    pub to: Q,
    pub module: QuasiAdjunctionModule,
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / crate::cyclic_quotient::gcd(a, b) * b
}

/// Stratify [0,1) into intervals of constant module.  Candidate cuts
/// are the fractional-part breakpoints of lambda n_i plus the values
/// where some threshold meets the valuation lattice of its divisor;
/// adjacent intervals with identical modules are merged.
pub fn jumping_values(
    graph: &ResolutionGraph,
    wsum: u64,
    k: i64,
) -> Result<Vec<Stratum>, AlgebraError> {
    use std::collections::BTreeSet;
    let field = &graph.field;
    let x = SparsePoly::var(field, 2, 0);
    let y = SparsePoly::var(field, 2, 1);
    let mut cuts: BTreeSet<Q> = BTreeSet::new();
    cuts.insert(Q::zero());
    for g in &graph.germs {
        for j in 1..g.multiplicity {
            cuts.insert(q_floor(&Q::zero()) + crate::exact_algebra::q(j as i64, g.multiplicity as i64));
        }
    }
    // valuation lattice denominator per divisor
    let mut dens = vec![];
    for v in 0..graph.vertices.len() {
        let dx = graph.exceptional_valuation(v, &x)?;
        let dy = graph.exceptional_valuation(v, &y)?;
        let den = lcm_u64(
            dx.denom().to_u64().unwrap_or(1),
            dy.denom().to_u64().unwrap_or(1),
        );
        dens.push(den);
    }
    // threshold-lattice crossings within each base interval
    let base: Vec<Q> = cuts.iter().cloned().collect();
    for (idx, c1) in base.iter().enumerate() {
        let c2 = if idx + 1 < base.len() {
            base[idx + 1].clone()
        } else {
            Q::one()
        };
        let t1 = thresholds(graph, c1);
        for v in 0..graph.vertices.len() {
            // slope of T_v in lambda on this interval
            let s: Q = graph
                .germs
                .iter()
                .zip(&graph.vertices[v].m)
                .map(|(g, m)| qi(g.multiplicity as i64) * m)
                .sum();
            if s.is_zero() {
                continue;
            }
            let den = qi(dens[v] as i64);
            let kq = &t1[v] - c1 * &s;
            let tv2 = &kq + &c2 * &s; // sup of T_v on [c1, c2)
            let lo = q_ceil(&(&t1[v] * &den)).to_integer().to_i64().unwrap();
            let hi = q_ceil(&(&tv2 * &den)).to_integer().to_i64().unwrap();
            for t in lo..hi {
                let lam = (qi(t) / &den - &kq) / &s;
                if &lam > c1 && lam < c2 {
                    cuts.insert(lam);
                }
            }
        }
    }
    let pts: Vec<Q> = cuts.into_iter().collect();
    let mut strata: Vec<Stratum> = vec![];
    for (idx, from) in pts.iter().enumerate() {
        let to = if idx + 1 < pts.len() {
            pts[idx + 1].clone()
        } else {
            Q::one()
        };
        let module = quotient_basis(graph, wsum, from, k)?;
        strata.push(Stratum {
            from: from.clone(),
            to,
            module,
        });
    }
    // merge adjacent strata with the same module (recompare at a
    // common jet order so the canonical forms are comparable)
    let mut merged: Vec<Stratum> = vec![];
    for s in strata {
        if let Some(last) = merged.last_mut() {
            if last.module.sigma == s.module.sigma {
                let n = last.module.jet_order.max(s.module.jet_order);
                let a = quotient_basis_with_order(graph, wsum, &last.from, k, n)?;
                let b = quotient_basis_with_order(graph, wsum, &s.from, k, n)?;
                if a.same_module(&b) {
                    last.to = s.to;
                    continue;
                }
            }
        }
        merged.push(s);
    }
    Ok(merged)
}

pub fn render_strata(strata: &[Stratum]) -> String {
    let mut out = String::new();
    for s in strata {
        let basis = if s.module.dim() == 0 {
            "(full module)".to_string()
        } else {
            s.module.basis_strings().join(", ")
        };
        out.push_str(&format!(
            "[{}, {})  class {}  quotient dim {}  basis: {}\n",
            s.from,
            s.to,
            s.module.sigma,
            s.module.dim(),
            basis
        ));
    }
    out
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{parse_poly, q, Field};
    use crate::qresolution::{resolve_germ, CurveGerm, ScriptStep};
    use num_traits::One;

    fn rp(f: &Arc<Field>, s: &str) -> SparsePoly {
        parse_poly(s, f, 2).unwrap()
    }

    fn resolve(
        f: &Arc<Field>,
        center: (u64, i64, i64),
        germs: &[(&str, u64)],
    ) -> ResolutionGraph {
        let gs: Vec<CurveGerm> = germs
            .iter()
            .map(|(s, n)| CurveGerm {
                equation: rp(f, s),
                multiplicity: *n,
            })
            .collect();
        resolve_germ(f, center, &gs, None, None).unwrap()
    }

    #[test]
    fn sigma_class_examples() {
        // 1/3 point with |w| = 5 and a reduced germ: k - 5 mod 3
        for k in 0..12i64 {
            let lam = q(k, 12);
            assert_eq!(sigma_class(3, 5, &[(0, 1)], &lam, k), (k - 5).rem_euclid(3) as u64);
        }
        // below 1/max(n_i) the class does not depend on lambda
        let comps = [(2u64, 3u64), (1, 2)];
        let s0 = sigma_class(7, 4, &comps, &q(0, 1), 5);
        assert_eq!(sigma_class(7, 4, &comps, &q(1, 4), 5), s0);
        assert_eq!(sigma_class(7, 4, &comps, &q(3, 10), 5), s0);
        // smooth ambient: always class 0
        assert_eq!(sigma_class(1, 6, &[(0, 2)], &q(1, 2), 4), 0);
    }

    #[test]
    fn reduced_divisor_at_lambda_zero_is_everything() {
        let f = Field::rationals();
        let g = resolve(&f, (1, 0, 0), &[("y^2-x^3", 1)]);
        let m = quotient_basis(&g, 0, &Q::zero(), 0).unwrap();
        assert_eq!(m.dim(), 0);
        assert!(module_membership(&g, 0, &Q::zero(), 0, &rp(&f, "1")).unwrap());
    }

    #[test]
    fn cusp_quotient_dimensions_follow_the_threshold() {
        let f = Field::rationals();
        let g = resolve(&f, (1, 0, 0), &[("y^2-x^3", 1)]);
        // T = 6{lambda} - 5; at lambda = k/6 the quotient jumps only at k=5
        let dims: Vec<usize> = (0..6)
            .map(|k| quotient_basis(&g, 0, &q(k, 6), k).unwrap().dim())
            .collect();
        assert_eq!(dims, vec![0, 0, 0, 0, 0, 1]);
        let m = quotient_basis(&g, 0, &q(5, 6), 5).unwrap();
        assert_eq!(m.quotient_basis, vec![(0, 0)]);
        assert!(!m.contains(&rp(&f, "1")).unwrap());
        assert!(m.contains(&rp(&f, "x")).unwrap());
        assert!(m.contains(&rp(&f, "y")).unwrap());
    }

    #[test]
    fn cusp_jumping_value_is_five_sixths() {
        let f = Field::rationals();
        let g = resolve(&f, (1, 0, 0), &[("y^2-x^3", 1)]);
        let strata = jumping_values(&g, 0, 0).unwrap();
        assert_eq!(strata.len(), 2);
        assert_eq!(strata[0].from, Q::zero());
        assert_eq!(strata[0].to, q(5, 6));
        assert_eq!(strata[0].module.dim(), 0);
        assert_eq!(strata[1].from, q(5, 6));
        assert_eq!(strata[1].module.dim(), 1);
    }

    #[test]
    fn node_has_no_jumping_values_below_one() {
        let f = Field::rationals();
        let script = [ScriptStep { change: None, weights: (1, 1), chart: 1 }];
        let gs = [CurveGerm { equation: rp(&f, "x*y"), multiplicity: 1 }];
        let g = resolve_germ(&f, (1, 0, 0), &gs, None, Some(&script)).unwrap();
        let strata = jumping_values(&g, 0, 0).unwrap();
        assert_eq!(strata.len(), 1);
        assert_eq!(strata[0].module.dim(), 0);
    }

    #[test]
    fn tacnode_jumps_at_three_quarters() {
        let f = Field::rationals();
        let g = resolve(&f, (1, 0, 0), &[("x^2-y^4", 1)]);
        let strata = jumping_values(&g, 0, 0).unwrap();
        assert_eq!(strata.len(), 2);
        assert_eq!(strata[1].from, q(3, 4));
        assert_eq!(strata[1].module.dim(), 1);
    }

    #[test]
    fn non_reduced_cusp_plus_double_line_stratification() {
        let f = Field::rationals();
        let g = resolve(&f, (1, 0, 0), &[("y^2+x^3", 1), ("y", 2)]);
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.vertices[0].m, vec![qi(6), qi(3)]);
        assert_eq!(g.vertices[0].nu, qi(5));
        let strata = jumping_values(&g, 0, 0).unwrap();
        let cuts: Vec<Q> = strata.iter().skip(1).map(|s| s.from.clone()).collect();
        assert_eq!(cuts, vec![q(5, 12), q(1, 2), q(2, 3), q(5, 6), q(11, 12)]);
        let dims: Vec<usize> = strata.iter().map(|s| s.module.dim()).collect();
        assert_eq!(dims, vec![0, 1, 0, 1, 2, 3]);
        // the [5/6, 11/12) module is (x^2, y): quotient basis 1, x
        assert_eq!(strata[4].module.quotient_basis, vec![(0, 0), (1, 0)]);
        let m = &strata[4].module;
        assert!(m.contains(&rp(&f, "y")).unwrap());
        assert!(m.contains(&rp(&f, "x^2")).unwrap());
        assert!(!m.contains(&rp(&f, "x")).unwrap());
        assert!(!m.contains(&rp(&f, "1")).unwrap());
        // the last module is m^2
        assert_eq!(strata[5].module.quotient_basis, vec![(0, 0), (1, 0), (0, 1)]);
    }

    #[test]
    fn quotient_cusp_jumps_at_five_sixths_into_the_maximal_class_zero_part() {
        let f = Field::rationals();
        let g = resolve(&f, (5, 2, 3), &[("x^3-y^2", 1)]);
        let strata = jumping_values(&g, 0, 0).unwrap();
        assert_eq!(strata.len(), 2);
        assert_eq!(strata[1].from, q(5, 6));
        let m = &strata[1].module;
        assert_eq!(m.quotient_basis, vec![(0, 0)]);
        // members: the class-0 monomials away from the unit
        assert!(m.contains(&rp(&f, "x*y")).unwrap());
        assert!(m.contains(&rp(&f, "x^5")).unwrap());
        assert!(m.contains(&rp(&f, "y^5")).unwrap());
        assert!(!m.contains(&rp(&f, "1")).unwrap());
    }

    #[test]
    fn synthetic_one_third_point_matches_the_threshold_table() {
        // germ y^3 - x^6 on 1/3(1,1): one (1,2) blow-up, m = 6, nu = 3,
        // val(x) = 1, val(y) = 2; with |w| = 5 and lambda = k/12 the
        // quotient is 0 for k <= 7 and x^((k+1) mod 3) for k = 8..11.
        let f = Field::rationals();
        let g = resolve(&f, (3, 1, 1), &[("y^3-x^6", 1)]);
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.vertices[0].m, vec![qi(6)]);
        assert_eq!(g.vertices[0].nu, qi(3));
        for k in 0..12i64 {
            let m = quotient_basis(&g, 5, &q(k, 12), k).unwrap();
            if k <= 7 {
                assert_eq!(m.dim(), 0, "k={k}");
            } else {
                let e = ((k + 1) % 3) as u32;
                assert_eq!(m.quotient_basis, vec![(e, 0)], "k={k}");
            }
        }
    }

    #[test]
    fn smooth_point_weight_3_10_dimension_profile() {
        // one (10,3)-blow-up graph: T = 30{lambda} - 13 at lambda=k/12
        let f = Field::rationals();
        let g = resolve(&f, (1, 0, 0), &[("x^3+2y^10", 1)]);
        let dims: Vec<usize> = (0..12)
            .map(|k| quotient_basis(&g, 0, &q(k, 12), k).unwrap().dim())
            .collect();
        assert_eq!(dims, vec![0, 0, 0, 0, 0, 0, 1, 2, 3, 4, 6, 7]);
        let m = quotient_basis(&g, 0, &q(10, 12), 10).unwrap();
        let mut basis = m.quotient_basis.clone();
        basis.sort();
        // 1, y, y^2, y^3, y^4, x with val(x)=10, val(y)=3
        assert_eq!(basis, vec![(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (1, 0)]);
    }

    #[test]
    fn resolution_independence_of_quotient_dimensions() {
        let f = Field::rationals();
        let one = resolve(&f, (1, 0, 0), &[("x^2+y^3", 1)]);
        let script = [
            ScriptStep { change: None, weights: (1, 1), chart: 2 },
            ScriptStep { change: None, weights: (1, 1), chart: 1 },
            ScriptStep { change: None, weights: (1, 1), chart: 1 },
        ];
        let gs = [CurveGerm { equation: rp(&f, "x^2+y^3"), multiplicity: 1 }];
        let three = resolve_germ(&f, (1, 0, 0), &gs, None, Some(&script)).unwrap();
        for j in 0..12i64 {
            let lam = q(j, 12);
            let a = quotient_basis(&one, 0, &lam, j).unwrap();
            let b = quotient_basis(&three, 0, &lam, j).unwrap();
            assert_eq!(a.dim(), b.dim(), "lambda = {lam}");
            assert_eq!(a.quotient_basis, b.quotient_basis);
        }
    }

    #[test]
    fn membership_is_monotone_below_the_first_breakpoint() {
        let f = Field::rationals();
        let g = resolve(&f, (1, 0, 0), &[("y^2+x^3", 1), ("y", 2)]);
        // on [0, 1/2) larger lambda gives a smaller module
        let probes = ["1", "x", "y", "x^2", "x*y", "y^2", "x^3"];
        for (l1, l2) in [(q(0, 1), q(1, 4)), (q(1, 4), q(5, 12)), (q(5, 12), q(49, 100))] {
            let m1 = quotient_basis(&g, 0, &l1, 0).unwrap();
            let m2 = quotient_basis(&g, 0, &l2, 0).unwrap();
            for p in probes {
                let gp = rp(&f, p);
                if m2.contains(&gp).unwrap() {
                    assert!(m1.contains(&gp).unwrap(), "{p} at {l1} vs {l2}");
                }
            }
            assert!(m1.dim() <= m2.dim());
        }
    }

    #[test]
    fn periodicity_shifts_the_class_by_the_divisor_class() {
        let f = Field::rationals();
        let g = resolve(&f, (5, 2, 3), &[("x^3-y^2", 1)]);
        // [C] = class of x^3 - y^2 = 1 on 1/5(2,3)
        let class_c = germ_class((5, 2, 3), &rp(&f, "x^3-y^2")).unwrap() as i64;
        for k in 0..5i64 {
            for lam in [q(1, 3), q(5, 6), q(11, 12)] {
                let shifted = quotient_basis(&g, 0, &(&lam + Q::one()), k).unwrap();
                let base = quotient_basis(&g, 0, &lam, k - class_c).unwrap();
                assert_eq!(shifted.sigma, base.sigma);
                assert_eq!(shifted.quotient_basis, base.quotient_basis);
            }
        }
    }

    #[test]
    fn membership_agrees_with_the_linear_algebra_quotient() {
        let f = Field::rationals();
        let g = resolve(&f, (1, 0, 0), &[("(y-x)^2-x^3", 1)]);
        for k in 0..6i64 {
            let lam = q(k, 6);
            let m = quotient_basis(&g, 0, &lam, k).unwrap();
            for i in 0..4u32 {
                for j in 0..4u32 {
                    let mono = SparsePoly::monomial(&f, vec![i, j], FieldElement::one(&f));
                    let direct = module_membership(&g, 0, &lam, k, &mono).unwrap();
                    if i + j <= m.jet_order {
                        assert_eq!(m.contains(&mono).unwrap(), direct, "x^{i} y^{j} at {lam}");
                    } else {
                        assert!(direct, "high monomials are members");
                    }
                }
            }
            // a non-monomial member through the translated branch
            let gm = rp(&f, "y-x");
            let direct = module_membership(&g, 0, &lam, k, &gm).unwrap();
            assert_eq!(m.contains(&gm).unwrap(), direct, "y-x at {lam}");
        }
    }
}
