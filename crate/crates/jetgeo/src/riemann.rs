//! Levi-Civita machinery on a chart: Christoffel symbols, curvature, Ricci
//! data, covariant and Lie derivatives, and the universal commutation and
//! Bianchi identity checks.
//!
//! Everything is computed through a "tower" of jets evaluated at one point:
//! the metric components enter as jets of a base order B, and each derived
//! quantity keeps the highest order the chain rule allows (Gamma at B-1,
//! curvature at B-2, ...). Differentiating a derived tensor is then exact.
//!
//! Index conventions:
//! - `gamma[k][i][j]` = Gamma^k_{ij}
//! - `riem[a][i][j][k]` = component a of R(e_i, e_j) e_k, with
//!   R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z
//! - `ric[j][k]` = sum_i riem[i][i][j][k]; `r` = g^{jk} ric[j][k]
//! - covariant derivatives append the derivative index last:
//!   `(nabla T)[..., m] = nabla_m T[...]`
//!
//! The sign convention makes the unit round sphere have r = +2 and the
//! contact models satisfy their curvature normalization; both are asserted
//! by tests rather than trusted.

use crate::chart::{Chart, Point};
use crate::error::{Error, Result};
use crate::field::TensorField;
use crate::jet::Jet;
use crate::report::ResidualStats;
use crate::tensor::{indices, JetTensor, Tensor};

/// A Riemannian metric on a chart with its derived Levi-Civita data.
#[derive(Clone)]
pub struct MetricGeometry {
    g: TensorField,
}

/// Metric, inverse metric and Christoffel jets at a point (base order >= 1).
pub struct ConnectionJets {
    pub g: JetTensor,
    pub g_inv: JetTensor,
    /// (1,2), order B-1.
    pub gamma: JetTensor,
}

/// Full curvature tower at a point (base order >= 2).
pub struct CurvatureTower {
    pub conn: ConnectionJets,
    /// (1,3), order B-2.
    pub riem: JetTensor,
    /// (0,2), order B-2.
    pub ric: JetTensor,
    /// Ricci operator (1,1), order B-2.
    pub q: JetTensor,
    /// Scalar curvature, order B-2.
    pub r: Jet,
}

impl MetricGeometry {
    pub fn new(g: TensorField) -> Result<MetricGeometry> {
        if g.rank() != (0, 2) {
            return Err(Error::InvalidArgument(format!(
                "metric must be a (0,2) field, got {:?}",
                g.rank()
            )));
        }
        Ok(MetricGeometry { g })
    }

    pub fn g(&self) -> &TensorField {
        &self.g
    }

    pub fn chart(&self) -> &Chart {
        self.g.chart()
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Builds metric/inverse/Christoffel jets with base order `base_order`.
    pub fn connection(&self, p: &Point, base_order: usize) -> Result<ConnectionJets> {
        if base_order < 1 {
            return Err(Error::Capability(
                "Christoffel symbols need metric jets of order >= 1".into(),
            ));
        }
        let g = self.g.evaluate(p, base_order)?;
        let dim = g.dim();
        // symmetry is an invariant of every admissible metric
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = g.get(&[i, j]).value();
                let b = g.get(&[j, i]).value();
                if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
                    return Err(Error::Numeric(format!(
                        "metric is not symmetric at {p:?}: g[{i}][{j}] = {a}, g[{j}][{i}] = {b}"
                    )));
                }
            }
        }
        if !cholesky_ok(&g.values()) {
            return Err(Error::Singular(format!(
                "metric is not positive definite at {p:?}"
            )));
        }
        let g_inv = invert_matrix_jets(&g)?;
        let m = base_order - 1;
        let ginv_lo = g_inv.truncated(m);
        let gamma = JetTensor::from_fn(dim, 1, 2, |idx| {
            let (k, i, j) = (idx[0], idx[1], idx[2]);
            let mut acc = Jet::zero(ginv_lo.get(&[0, 0]).spec());
            for l in 0..dim {
                let term = g.get(&[j, l]).partial(i) + g.get(&[i, l]).partial(j)
                    - g.get(&[i, j]).partial(l);
                acc = acc + ginv_lo.get(&[k, l]) * term;
            }
            acc.scale(0.5)
        });
        Ok(ConnectionJets { g, g_inv, gamma })
    }

    /// Builds the whole curvature tower with base order `base_order`.
    pub fn tower(&self, p: &Point, base_order: usize) -> Result<CurvatureTower> {
        if base_order < 2 {
            return Err(Error::Capability(
                "curvature needs metric jets of order >= 2".into(),
            ));
        }
        let conn = self.connection(p, base_order)?;
        let dim = conn.g.dim();
        let m = base_order - 2;
        let gamma_lo = conn.gamma.truncated(m);
        let riem = JetTensor::from_fn(dim, 1, 3, |idx| {
            let (a, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            let mut acc =
                conn.gamma.get(&[a, j, k]).partial(i) - conn.gamma.get(&[a, i, k]).partial(j);
            for c in 0..dim {
                acc = acc + gamma_lo.get(&[a, i, c]) * gamma_lo.get(&[c, j, k])
                    - gamma_lo.get(&[a, j, c]) * gamma_lo.get(&[c, i, k]);
            }
            acc
        });
        let ric = JetTensor::from_fn(dim, 0, 2, |idx| {
            let (j, k) = (idx[0], idx[1]);
            let mut acc = Jet::zero(riem.get(&[0, 0, 0, 0]).spec());
            for i in 0..dim {
                acc = acc + riem.get(&[i, i, j, k]);
            }
            acc
        });
        let ginv_lo = conn.g_inv.truncated(m);
        let q = JetTensor::from_fn(dim, 1, 1, |idx| {
            let (a, b) = (idx[0], idx[1]);
            let mut acc = Jet::zero(ginv_lo.get(&[0, 0]).spec());
            for c in 0..dim {
                acc = acc + ginv_lo.get(&[a, c]) * ric.get(&[c, b]);
            }
            acc
        });
        let mut r = Jet::zero(ric.get(&[0, 0]).spec());
        for j in 0..dim {
            for k in 0..dim {
                r = r + ginv_lo.get(&[j, k]) * ric.get(&[j, k]);
            }
        }
        Ok(CurvatureTower { conn, riem, ric, q, r })
    }

    /// Gamma^k_{ij} values at `p`.
    pub fn christoffel(&self, p: &Point) -> Result<Tensor> {
        Ok(self.connection(p, 1)?.gamma.values())
    }

    pub fn riemann_tensor(&self, p: &Point) -> Result<Tensor> {
        Ok(self.tower(p, 2)?.riem.values())
    }

    pub fn ricci(&self, p: &Point) -> Result<Tensor> {
        Ok(self.tower(p, 2)?.ric.values())
    }

    pub fn ricci_operator(&self, p: &Point) -> Result<Tensor> {
        Ok(self.tower(p, 2)?.q.values())
    }

    pub fn scalar_curvature(&self, p: &Point) -> Result<f64> {
        Ok(self.tower(p, 2)?.r.value())
    }

    /// Scalar curvature as a jet of the requested order (base order rises
    /// with it: r needs two derivative levels of g).
    pub fn scalar_curvature_jet(&self, p: &Point, order: usize) -> Result<Jet> {
        Ok(self.tower(p, order + 2)?.r)
    }

    /// nabla T at `p` (derivative index last), as values.
    pub fn covariant_derivative(&self, t: &TensorField, p: &Point) -> Result<Tensor> {
        let conn = self.connection(p, 1)?;
        let jt = t.evaluate(p, 1)?;
        Ok(covariant_derivative_jets(&conn.gamma, &jt).values())
    }

    /// (pounds_V nabla)(X, Y) values at `p`, via the closed form
    /// nabla_X nabla_Y V - nabla_{nabla_X Y} V + R(V, X) Y.
    pub fn lie_derivative_connection(&self, v: &TensorField, p: &Point) -> Result<Tensor> {
        let tower = self.tower(p, 3)?;
        let jv = v.evaluate(p, 3)?;
        Ok(lie_connection_jets(&tower, &jv).values())
    }

    /// Max componentwise |nabla g| over the points (metric compatibility).
    pub fn metric_compatibility(&self, points: &[Point]) -> Result<ResidualStats> {
        let mut vals = Vec::new();
        for p in points {
            let conn = self.connection(p, 2)?;
            let nabla_g = covariant_derivative_jets(&conn.gamma, &conn.g);
            vals.push(nabla_g.values().max_abs());
        }
        Ok(ResidualStats::from_values(&vals))
    }

    /// Raw commutation identity relating the second derivative of the
    /// metric's Lie derivative to the Lie derivative of the connection
    /// (a universal Riemannian identity), plus, optionally, its Ricci form
    /// that is valid once (g, V, lambda) solves the soliton equation.
    pub fn commutation_check_10(
        &self,
        v: &TensorField,
        points: &[Point],
        with_soliton_form: bool,
    ) -> Result<CommutationReport> {
        let dim = self.dim();
        let mut raw = Vec::new();
        let mut ricci_form = Vec::new();
        for p in points {
            let tower = self.tower(p, 3)?;
            let jv = v.evaluate(p, 3)?;
            let nabla_g = covariant_derivative_jets(&tower.conn.gamma, &tower.conn.g); // order 2
            let lvg = lie_derivative_jets(&jv, &tower.conn.g); // order 2
            let nabla_lvg = covariant_derivative_jets(&tower.conn.gamma.truncated(1), &lvg);
            let lc = lie_connection_jets(&tower, &jv); // order 1
            let gv = tower.conn.g.values();
            let lcv = lc.values();

            let mut worst: f64 = 0.0;
            for i in 0..dim {
                // S_i = nabla_{e_i} g as a (0,2) jet tensor
                let s_i = JetTensor::from_fn(dim, 0, 2, |jk| {
                    nabla_g.get(&[jk[0], jk[1], i]).clone()
                });
                let t1 = lie_derivative_jets(&jv, &s_i).values();
                for j in 0..dim {
                    for k in 0..dim {
                        let t2 = nabla_lvg.get(&[j, k, i]).value();
                        let mut t3 = 0.0;
                        for m in 0..dim {
                            // [V, e_i]^m = -d_i V^m
                            t3 -= jv.get(&[m]).partial(i).value()
                                * nabla_g.get(&[j, k, m]).value();
                        }
                        let lhs = t1.get(&[j, k]) - t2 - t3;
                        let mut rhs = 0.0;
                        for m in 0..dim {
                            rhs -= gv.get(&[k, m]) * lcv.get(&[m, i, j]);
                            rhs -= gv.get(&[j, m]) * lcv.get(&[m, i, k]);
                        }
                        worst = worst.max((lhs - rhs).abs());
                    }
                }
            }
            raw.push(worst);

            if with_soliton_form {
                let nabla_ric = covariant_derivative_jets(&tower.conn.gamma.truncated(0), &tower.ric);
                let nr = nabla_ric.values();
                let mut worst: f64 = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        for k in 0..dim {
                            let mut lhs = 0.0;
                            for m in 0..dim {
                                lhs += gv.get(&[k, m]) * lcv.get(&[m, i, j]);
                            }
                            let rhs = nr.get(&[i, j, k]) - nr.get(&[j, k, i]) - nr.get(&[i, k, j]);
                            worst = worst.max((lhs - rhs).abs());
                        }
                    }
                }
                ricci_form.push(worst);
            }
        }
        Ok(CommutationReport {
            raw: ResidualStats::from_values(&raw),
            ricci_form: if with_soliton_form {
                Some(ResidualStats::from_values(&ricci_form))
            } else {
                None
            },
        })
    }

    /// Universal commutation identity for the curvature: the Lie derivative
    /// of R computed directly against the antisymmetrized derivative of the
    /// Lie derivative of the connection.
    pub fn commutation_check_13(&self, v: &TensorField, points: &[Point]) -> Result<ResidualStats> {
        let dim = self.dim();
        let mut vals = Vec::new();
        for p in points {
            let tower = self.tower(p, 3)?;
            let jv = v.evaluate(p, 3)?;
            let lv_r = lie_derivative_jets(&jv.truncated(2), &tower.riem).values();
            let lc = lie_connection_jets(&tower, &jv); // order 1
            let d_lc = covariant_derivative_jets(&tower.conn.gamma.truncated(0), &lc).values();
            let mut worst: f64 = 0.0;
            for idx in indices(dim, 4) {
                let (a, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
                let rhs = d_lc.get(&[a, j, k, i]) - d_lc.get(&[a, i, k, j]);
                worst = worst.max((lv_r.get(&idx) - rhs).abs());
            }
            vals.push(worst);
        }
        Ok(ResidualStats::from_values(&vals))
    }

    /// First (algebraic) and contracted second Bianchi identities.
    pub fn bianchi_checks(&self, points: &[Point]) -> Result<BianchiReport> {
        let dim = self.dim();
        let mut first = Vec::new();
        let mut second = Vec::new();
        for p in points {
            let tower = self.tower(p, 3)?;
            let rv = tower.riem.values();
            let mut worst: f64 = 0.0;
            for idx in indices(dim, 4) {
                let (a, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
                let cyc = rv.get(&[a, i, j, k]) + rv.get(&[a, j, k, i]) + rv.get(&[a, k, i, j]);
                worst = worst.max(cyc.abs());
            }
            first.push(worst);

            // div Ric = dr / 2
            let nabla_ric = covariant_derivative_jets(&tower.conn.gamma.truncated(0), &tower.ric);
            let nr = nabla_ric.values();
            let ginv = tower.conn.g_inv.values();
            let mut worst: f64 = 0.0;
            for j in 0..dim {
                let mut div_j = 0.0;
                for i in 0..dim {
                    for k in 0..dim {
                        div_j += ginv.get(&[i, k]) * nr.get(&[k, j, i]);
                    }
                }
                let dr_j = tower.r.partial(j).value();
                worst = worst.max((div_j - 0.5 * dr_j).abs());
            }
            second.push(worst);
        }
        Ok(BianchiReport {
            first: ResidualStats::from_values(&first),
            contracted_second: ResidualStats::from_values(&second),
        })
    }

    /// Rough Laplacian of the scalar curvature with the sign convention
    /// Delta r = -div grad r (so Delta r = 0 on constant-r models). Needs
    /// metric jets one order above the usual tower.
    pub fn laplacian_scalar_curvature(&self, p: &Point) -> Result<f64> {
        let tower = self.tower(p, 4)?;
        let dim = self.dim();
        // grad r as order-1 jets
        let ginv = tower.conn.g_inv.truncated(1);
        let grad = JetTensor::from_fn(dim, 1, 0, |idx| {
            let mut acc = Jet::zero(ginv.get(&[0, 0]).spec());
            for j in 0..dim {
                acc = acc + ginv.get(&[idx[0], j]) * tower.r.partial(j);
            }
            acc
        });
        let mut div = 0.0;
        for i in 0..dim {
            div += grad.get(&[i]).partial(i).value();
            for m in 0..dim {
                div += tower.conn.gamma.get(&[i, i, m]).value() * grad.get(&[m]).value();
            }
        }
        Ok(-div)
    }
}

#[derive(Clone, Debug)]
pub struct CommutationReport {
    /// Residual of the raw identity (valid for arbitrary g, V).
    pub raw: ResidualStats,
    /// Residual of the Ricci form, when requested (valid on solitons).
    pub ricci_form: Option<ResidualStats>,
}

#[derive(Clone, Debug)]
pub struct BianchiReport {
    pub first: ResidualStats,
    pub contracted_second: ResidualStats,
}

/// Covariant derivative of a (p, q) jet tensor: result is (p, q+1) with the
/// derivative index last, at order min(t.order - 1, gamma.order).
pub fn covariant_derivative_jets(gamma: &JetTensor, t: &JetTensor) -> JetTensor {
    assert!(t.order() >= 1, "tensor jets exhausted: raise the base order");
    let dim = t.dim();
    let (p, q) = t.rank();
    let m = (t.order() - 1).min(gamma.order());
    let gam = gamma.truncated(m);
    let t_lo = t.truncated(m);
    JetTensor::from_fn(dim, p, q + 1, |idx| {
        let (head, last) = idx.split_at(p + q);
        let der = last[0];
        let mut acc = t.get(head).partial(der).truncated(m);
        let mut swapped = head.to_vec();
        for s in 0..p {
            let orig = head[s];
            for c in 0..dim {
                swapped[s] = c;
                acc = acc + gam.get(&[orig, der, c]) * t_lo.get(&swapped);
            }
            swapped[s] = orig;
        }
        for s in p..(p + q) {
            let orig = head[s];
            for c in 0..dim {
                swapped[s] = c;
                acc = acc - gam.get(&[c, der, orig]) * t_lo.get(&swapped);
            }
            swapped[s] = orig;
        }
        acc
    })
}

/// Lie derivative of a (p, q) jet tensor along a vector jet tensor, at order
/// min(v.order, t.order) - 1.
pub fn lie_derivative_jets(v: &JetTensor, t: &JetTensor) -> JetTensor {
    assert_eq!(v.rank(), (1, 0), "Lie derivative direction must be a vector");
    assert!(
        v.order() >= 1 && t.order() >= 1,
        "jets exhausted: raise the base order"
    );
    let dim = t.dim();
    let (p, q) = t.rank();
    let m = v.order().min(t.order()) - 1;
    let v_lo = v.truncated(m);
    let t_lo = t.truncated(m);
    JetTensor::from_fn(dim, p, q, |idx| {
        let mut acc = Jet::zero(v_lo.get(&[0]).spec());
        for c in 0..dim {
            acc = acc + v_lo.get(&[c]) * t.get(idx).partial(c).truncated(m);
        }
        let mut swapped = idx.to_vec();
        for s in 0..p {
            let orig = idx[s];
            for c in 0..dim {
                swapped[s] = c;
                acc = acc - v.get(&[orig]).partial(c).truncated(m) * t_lo.get(&swapped);
            }
            swapped[s] = orig;
        }
        for s in p..(p + q) {
            let orig = idx[s];
            for c in 0..dim {
                swapped[s] = c;
                acc = acc + v.get(&[c]).partial(orig).truncated(m) * t_lo.get(&swapped);
            }
            swapped[s] = orig;
        }
        acc
    })
}

/// Field-level Lie derivative: evaluates both fields one order above the
/// request, so any supported rank works without a metric.
pub fn lie_derivative_field_jets(
    v: &TensorField,
    t: &TensorField,
    p: &Point,
    order: usize,
) -> Result<JetTensor> {
    if v.rank() != (1, 0) {
        return Err(Error::InvalidArgument(
            "Lie derivative direction must be a vector field".into(),
        ));
    }
    if v.chart() != t.chart() {
        return Err(Error::InvalidArgument("fields live on different charts".into()));
    }
    let jv = v.evaluate(p, order + 1)?;
    let jt = t.evaluate(p, order + 1)?;
    Ok(lie_derivative_jets(&jv, &jt))
}

pub fn lie_derivative_field(v: &TensorField, t: &TensorField, p: &Point) -> Result<Tensor> {
    Ok(lie_derivative_field_jets(v, t, p, 0)?.values())
}

/// (pounds_V nabla) as jets of order B-2 from a tower and V jets of order B.
pub fn lie_connection_jets(tower: &CurvatureTower, v: &JetTensor) -> JetTensor {
    let dim = v.dim();
    let dv = covariant_derivative_jets(&tower.conn.gamma, v);
    let ddv = covariant_derivative_jets(&tower.conn.gamma, &dv);
    let m = ddv.order();
    let v_lo = v.truncated(m);
    let riem = tower.riem.truncated(m);
    JetTensor::from_fn(dim, 1, 2, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let mut acc = ddv.get(&[k, j, i]).clone();
        for c in 0..dim {
            acc = acc + v_lo.get(&[c]) * riem.get(&[k, c, i, j]);
        }
        acc
    })
}

/// Sectional curvature of the plane spanned by x and y at the tower's point.
pub fn sectional_curvature(tower: &CurvatureTower, x: &[f64], y: &[f64]) -> Result<f64> {
    let dim = tower.conn.g.dim();
    let g = tower.conn.g.values();
    let rv = tower.riem.values();
    let mut rxy = vec![0.0; dim];
    for (a, out) in rxy.iter_mut().enumerate() {
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    *out += rv.get(&[a, i, j, k]) * x[i] * y[j] * y[k];
                }
            }
        }
    }
    let pair = |u: &[f64], w: &[f64]| {
        let mut s = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                s += g.get(&[i, j]) * u[i] * w[j];
            }
        }
        s
    };
    let num = pair(&rxy, x);
    let denom = pair(x, x) * pair(y, y) - pair(x, y).powi(2);
    if denom.abs() < 1e-12 {
        return Err(Error::InvalidArgument(
            "degenerate plane section (x and y nearly parallel)".into(),
        ));
    }
    Ok(num / denom)
}

/// Gauss-Jordan inversion of a symmetric matrix of jets; pivots on the
/// constant terms.
fn invert_matrix_jets(g: &JetTensor) -> Result<JetTensor> {
    let dim = g.dim();
    let spec = g.get(&[0, 0]).spec().clone();
    let mut a: Vec<Vec<Jet>> = (0..dim)
        .map(|i| (0..dim).map(|j| g.get(&[i, j]).clone()).collect())
        .collect();
    let mut inv: Vec<Vec<Jet>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Jet::constant(&spec, if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&r1, &r2| {
                a[r1][col]
                    .value()
                    .abs()
                    .partial_cmp(&a[r2][col].value().abs())
                    .unwrap()
            })
            .unwrap();
        if a[pivot_row][col].value().abs() < 1e-12 {
            return Err(Error::Singular("metric is numerically singular".into()));
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot_inv = a[col][col].recip()?;
        for j in 0..dim {
            a[col][j] = &a[col][j] * &pivot_inv;
            inv[col][j] = &inv[col][j] * &pivot_inv;
        }
        for row in 0..dim {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            if factor.coeffs().iter().all(|&c| c == 0.0) {
                continue;
            }
            for j in 0..dim {
                a[row][j] = &a[row][j] - &(&factor * &a[col][j]);
                inv[row][j] = &inv[row][j] - &(&factor * &inv[col][j]);
            }
        }
    }
    Ok(JetTensor::from_fn(dim, 2, 0, |idx| {
        inv[idx[0]][idx[1]].clone()
    }))
}

/// Cholesky feasibility test for positive definiteness of a value matrix.
pub(crate) fn cholesky_ok(g: &Tensor) -> bool {
    let dim = g.dim();
    let mut l = vec![vec![0.0f64; dim]; dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut s = g.get(&[i, j]);
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}
