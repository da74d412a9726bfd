//! Tensor fields as jet-evaluable component functions.
//!
//! A [`TensorField`] knows how to evaluate its components at any point *at
//! any requested jet order*: base fields seed the chart coordinates and run
//! a closed-form expression, derived fields (exterior derivatives, brackets,
//! Lie derivatives) evaluate their ingredients one order higher and
//! differentiate the resulting jets. Orders therefore propagate exactly; no
//! step ever approximates a derivative.

use std::sync::Arc;

use crate::chart::{Chart, Point};
use crate::error::{Error, Result};
use crate::forms::AltForm;
use crate::jet::Jet;
use crate::report::ResidualStats;
use crate::tensor::{indices, JetTensor, Tensor};

type EvalFn = dyn Fn(&Point, usize) -> Result<JetTensor> + Send + Sync;

/// A (p, q)-tensor field on a chart.
#[derive(Clone)]
pub struct TensorField {
    chart: Chart,
    contra: usize,
    co: usize,
    eval: Arc<EvalFn>,
}

impl TensorField {
    /// Base field: closed-form components built from seeded coordinate jets,
    /// in row-major component order (contravariant slots first).
    pub fn from_jet_components(
        chart: &Chart,
        contra: usize,
        co: usize,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> TensorField {
        let inner_chart = chart.clone();
        let expect = chart.dim().pow((contra + co) as u32);
        TensorField {
            chart: chart.clone(),
            contra,
            co,
            eval: Arc::new(move |p, order| {
                let seeds = inner_chart.seeds(p, order)?;
                let comps = f(&seeds);
                if comps.len() != expect {
                    return Err(Error::InvalidArgument(format!(
                        "component evaluator returned {} entries, expected {expect}",
                        comps.len()
                    )));
                }
                Ok(JetTensor::from_components(
                    inner_chart.dim(),
                    contra,
                    co,
                    comps,
                ))
            }),
        }
    }

    /// Field with constant components.
    pub fn constant(chart: &Chart, contra: usize, co: usize, comps: Vec<f64>) -> TensorField {
        TensorField::from_jet_components(chart, contra, co, move |seeds| {
            let spec = seeds[0].spec().clone();
            comps.iter().map(|&c| Jet::constant(&spec, c)).collect()
        })
    }

    /// Derived field from an arbitrary order-aware evaluator. The evaluator
    /// receives the point and the requested order and is responsible for
    /// evaluating its ingredients at whatever higher order it needs.
    pub fn from_point_fn(
        chart: &Chart,
        contra: usize,
        co: usize,
        f: impl Fn(&Point, usize) -> Result<JetTensor> + Send + Sync + 'static,
    ) -> TensorField {
        TensorField {
            chart: chart.clone(),
            contra,
            co,
            eval: Arc::new(f),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rank(&self) -> (usize, usize) {
        (self.contra, self.co)
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Evaluates every component as a jet of the requested order at `p`.
    pub fn evaluate(&self, p: &Point, order: usize) -> Result<JetTensor> {
        let jets = (self.eval)(p, order)?;
        if !jets.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite component at {p:?}"
            )));
        }
        Ok(jets)
    }

    /// Plain component values at `p`.
    pub fn values(&self, p: &Point) -> Result<Tensor> {
        Ok(self.evaluate(p, 0)?.values())
    }

    fn check_compatible(&self, other: &TensorField) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::InvalidArgument("fields live on different charts".into()));
        }
        if self.rank() != other.rank() {
            return Err(Error::InvalidArgument(format!(
                "rank mismatch: {:?} vs {:?}",
                self.rank(),
                other.rank()
            )));
        }
        Ok(())
    }

    /// Pointwise linear combination `self + c * other`.
    pub fn add_scaled(&self, other: &TensorField, c: f64) -> Result<TensorField> {
        self.check_compatible(other)?;
        let (a, b) = (self.clone(), other.clone());
        Ok(TensorField::from_point_fn(
            &self.chart,
            self.contra,
            self.co,
            move |p, order| {
                let ja = a.evaluate(p, order)?;
                let jb = b.evaluate(p, order)?;
                Ok(JetTensor::from_fn(ja.dim(), a.contra, a.co, |idx| {
                    ja.get(idx) + jb.get(idx).scale(c)
                }))
            },
        ))
    }

    pub fn scale(&self, c: f64) -> TensorField {
        let a = self.clone();
        TensorField::from_point_fn(&self.chart, self.contra, self.co, move |p, order| {
            Ok(a.evaluate(p, order)?.map(|j| j.scale(c)))
        })
    }

    /// Tensor product of two 1-forms: (a ⊗ b)_{ij} = a_i b_j.
    pub fn one_form_product(a: &TensorField, b: &TensorField) -> Result<TensorField> {
        if a.rank() != (0, 1) || b.rank() != (0, 1) {
            return Err(Error::InvalidArgument(
                "one_form_product expects two 1-forms".into(),
            ));
        }
        if a.chart != b.chart {
            return Err(Error::InvalidArgument("fields live on different charts".into()));
        }
        let (fa, fb) = (a.clone(), b.clone());
        Ok(TensorField::from_point_fn(&a.chart, 0, 2, move |p, order| {
            let ja = fa.evaluate(p, order)?;
            let jb = fb.evaluate(p, order)?;
            Ok(JetTensor::from_fn(ja.dim(), 0, 2, |idx| {
                ja.get(&idx[..1]) * jb.get(&idx[1..])
            }))
        }))
    }

    /// Exterior derivative of a 1-form, with the 1/2 convention:
    /// (dw)(X, Y) = (X w(Y) - Y w(X) - w([X, Y])) / 2, which in components is
    /// (dw)_{ij} = (d_i w_j - d_j w_i) / 2.
    pub fn exterior_derivative(&self) -> Result<TensorField> {
        if self.rank() != (0, 1) {
            return Err(Error::InvalidArgument(format!(
                "exterior_derivative expects a 1-form, got rank {:?}",
                self.rank()
            )));
        }
        let omega = self.clone();
        Ok(TensorField::from_point_fn(&self.chart, 0, 2, move |p, order| {
            let w = omega.evaluate(p, order + 1)?;
            Ok(JetTensor::from_fn(w.dim(), 0, 2, |idx| {
                let (i, j) = (idx[0], idx[1]);
                (w.get(&[j]).partial(i) - w.get(&[i]).partial(j)).scale(0.5)
            }))
        }))
    }

    /// Lie bracket of two vector fields:
    /// [X, Y]^k = X^j d_j Y^k - Y^j d_j X^k.
    pub fn lie_bracket(x: &TensorField, y: &TensorField) -> Result<TensorField> {
        if x.rank() != (1, 0) || y.rank() != (1, 0) {
            return Err(Error::InvalidArgument("lie_bracket expects vector fields".into()));
        }
        if x.chart != y.chart {
            return Err(Error::InvalidArgument("fields live on different charts".into()));
        }
        let (fx, fy) = (x.clone(), y.clone());
        Ok(TensorField::from_point_fn(&x.chart, 1, 0, move |p, order| {
            let jx = fx.evaluate(p, order + 1)?;
            let jy = fy.evaluate(p, order + 1)?;
            let dim = jx.dim();
            Ok(JetTensor::from_fn(dim, 1, 0, |idx| {
                let k = idx[0];
                let mut acc = Jet::zero(jx.get(&[0]).partial(0).spec());
                for j in 0..dim {
                    acc = acc
                        + jx.get(&[j]).truncated(order) * jy.get(&[k]).partial(j)
                        - jy.get(&[j]).truncated(order) * jx.get(&[k]).partial(j);
                }
                acc
            }))
        }))
    }
}

/// A scalar field: a rank-(0,0) tensor field with scalar-flavoured accessors.
#[derive(Clone)]
pub struct ScalarField(TensorField);

impl ScalarField {
    pub fn from_jet_fn(
        chart: &Chart,
        f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    ) -> ScalarField {
        ScalarField(TensorField::from_jet_components(chart, 0, 0, move |seeds| {
            vec![f(seeds)]
        }))
    }

    pub fn from_point_fn(
        chart: &Chart,
        f: impl Fn(&Point, usize) -> Result<Jet> + Send + Sync + 'static,
    ) -> ScalarField {
        let dim = chart.dim();
        ScalarField(TensorField::from_point_fn(chart, 0, 0, move |p, order| {
            Ok(JetTensor::from_components(dim, 0, 0, vec![f(p, order)?]))
        }))
    }

    pub fn chart(&self) -> &Chart {
        self.0.chart()
    }

    pub fn evaluate(&self, p: &Point, order: usize) -> Result<Jet> {
        Ok(self.0.evaluate(p, order)?.comps()[0].clone())
    }

    pub fn value(&self, p: &Point) -> Result<f64> {
        Ok(self.evaluate(p, 0)?.value())
    }

    /// The differential df as a 1-form field.
    pub fn differential(&self) -> TensorField {
        let f = self.clone();
        TensorField::from_point_fn(self.0.chart(), 0, 1, move |p, order| {
            let jf = f.evaluate(p, order + 1)?;
            Ok(JetTensor::from_fn(jf.dim(), 0, 1, |idx| jf.partial(idx[0])))
        })
    }
}

/// Report of the contact volume-form check eta ^ (d eta)^n != 0.
#[derive(Clone, Debug)]
pub struct VolumeFormReport {
    /// Top-form coefficient at each sampled point.
    pub coefficients: Vec<f64>,
    pub min_abs: f64,
    pub pass: bool,
}

/// Coefficient of eta ^ (d eta)^n on the ordered coordinate basis at `p`.
pub fn volume_form_coefficient(eta: &TensorField, n: usize, p: &Point) -> Result<f64> {
    if eta.rank() != (0, 1) {
        return Err(Error::InvalidArgument("volume form needs a 1-form".into()));
    }
    let dim = eta.dim();
    if dim != 2 * n + 1 {
        return Err(Error::InvalidArgument(format!(
            "chart dimension {dim} is not 2n+1 for n = {n}"
        )));
    }
    let jets = eta.evaluate(p, 1)?;
    let comps: Vec<f64> = (0..dim).map(|i| jets.get(&[i]).value()).collect();
    let eta_form = AltForm::one_form(&comps);
    let deta = AltForm::two_form(dim, |i, j| {
        0.5 * (jets.get(&[j]).partial(i).value() - jets.get(&[i]).partial(j).value())
    });
    let mut top = eta_form;
    for _ in 0..n {
        top = top.wedge(&deta);
    }
    Ok(top.top_coefficient())
}

/// Checks that eta ^ (d eta)^n stays away from zero over the sample.
pub fn volume_form_check(
    eta: &TensorField,
    n: usize,
    points: &[Point],
    tol: f64,
) -> Result<VolumeFormReport> {
    let coefficients: Vec<f64> = points
        .iter()
        .map(|p| volume_form_coefficient(eta, n, p))
        .collect::<Result<_>>()?;
    let min_abs = coefficients
        .iter()
        .fold(f64::INFINITY, |m, c| m.min(c.abs()));
    Ok(VolumeFormReport {
        coefficients,
        min_abs,
        pass: min_abs > tol,
    })
}

/// Componentwise residual statistics of `a - b` over points, where both
/// sides are produced by closures (used heavily by the check suites).
pub fn residual_over_points(
    points: &[Point],
    mut f: impl FnMut(&Point) -> Result<f64>,
) -> Result<ResidualStats> {
    let mut values = Vec::with_capacity(points.len());
    for p in points {
        values.push(f(p)?);
    }
    Ok(ResidualStats::from_values(&values))
}

/// Max-abs difference of two same-shape value tensors.
pub fn max_abs_diff(a: &Tensor, b: &Tensor) -> f64 {
    let mut m: f64 = 0.0;
    for idx in indices(a.dim(), a.rank().0 + a.rank().1) {
        m = m.max((a.get(&idx) - b.get(&idx)).abs());
    }
    m
}
