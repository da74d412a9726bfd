//! Coordinate charts and points.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpec};

struct ChartInner {
    names: Vec<String>,
    /// Optional per-coordinate box bounds; evaluation outside is a domain
    /// error. `None` means the chart covers all of R^dim.
    domain: Option<Vec<(f64, f64)>>,
}

/// A single global coordinate chart. Every model in the catalog lives on one
/// chart, so there are no transition maps.
#[derive(Clone)]
pub struct Chart {
    inner: Arc<ChartInner>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({})", self.inner.names.join(","))
    }
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.names == other.inner.names
    }
}

impl Chart {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Chart> {
        Self::build(names, None)
    }

    pub fn with_domain<S: Into<String>>(names: Vec<S>, domain: Vec<(f64, f64)>) -> Result<Chart> {
        if domain.len() != names.len() {
            return Err(Error::InvalidArgument(
                "domain bounds must match chart dimension".into(),
            ));
        }
        if domain.iter().any(|&(lo, hi)| lo.is_nan() || hi.is_nan() || lo >= hi) {
            return Err(Error::InvalidArgument("empty domain box".into()));
        }
        Self::build(names, Some(domain))
    }

    fn build<S: Into<String>>(names: Vec<S>, domain: Option<Vec<(f64, f64)>>) -> Result<Chart> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidArgument("chart dimension must be >= 1".into()));
        }
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() || names[..i].contains(a) {
                return Err(Error::InvalidArgument(format!(
                    "chart variable names must be distinct and non-empty (offender: {a:?})"
                )));
            }
        }
        Ok(Chart {
            inner: Arc::new(ChartInner { names, domain }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn contains(&self, p: &Point) -> bool {
        match &self.inner.domain {
            None => true,
            Some(bounds) => bounds
                .iter()
                .zip(p.coords())
                .all(|((lo, hi), c)| lo <= c && c <= hi),
        }
    }

    /// Seeds the chart coordinates as jets of the given order at `p`.
    pub fn seeds(&self, p: &Point, order: usize) -> Result<Vec<Jet>> {
        if p.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, chart has {}",
                p.len(),
                self.dim()
            )));
        }
        if !self.contains(p) {
            return Err(Error::Domain(format!(
                "point {p:?} lies outside the chart domain"
            )));
        }
        let spec = JetSpec::new(self.dim(), order)?;
        (0..self.dim())
            .map(|v| Jet::variable(&spec, v, p.coords()[v]))
            .collect()
    }
}

/// A point of a chart: a finite real coordinate vector.
#[derive(Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point{:?}", self.coords)
    }
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Point> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("point must have coordinates".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("point coordinates must be finite".into()));
        }
        Ok(Point { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl From<&[f64]> for Point {
    fn from(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).expect("finite coordinates")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_names() {
        assert!(Chart::new(vec!["x", "x"]).is_err());
        assert!(Chart::new(Vec::<String>::new()).is_err());
        assert!(Chart::new(vec!["x", "y"]).is_ok());
    }

    #[test]
    fn domain_enforced_on_seeding() {
        let chart = Chart::with_domain(vec!["u"], vec![(-1.0, 1.0)]).unwrap();
        let inside = Point::new(vec![0.5]).unwrap();
        let outside = Point::new(vec![2.0]).unwrap();
        assert!(chart.seeds(&inside, 1).is_ok());
        assert!(matches!(chart.seeds(&outside, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn non_finite_points_rejected() {
        assert!(Point::new(vec![f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY, 0.0]).is_err());
    }
}
