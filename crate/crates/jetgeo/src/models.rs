//! Closed-form model manifolds: the Heisenberg group with its contact
//! structure and soliton field, D-homothetic deformations, random polynomial
//! metrics for universal-identity property tests, and a gated flat
//! contact-metric candidate with h != 0.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chart::{Chart, Point};
use crate::contact::ContactStructure;
use crate::error::{Error, Result};
use crate::field::TensorField;
use crate::jet::Jet;
use crate::report::{CheckRecord, ResidualStats, SuiteReport, Tolerances};
use crate::riemann::{lie_derivative_field, sectional_curvature, MetricGeometry};
use crate::sample::sample_points;
use crate::tensor::JetTensor;

/// The Heisenberg group model on global coordinates
/// (x^1..x^n, y^1..y^n, z):
///
/// - eta  = (dz - sum_i y^i dx^i) / 2
/// - xi   = 2 d/dz
/// - phi(d/dx^i) = -d/dy^i, phi(d/dy^i) = d/dx^i + y^i d/dz, phi(d/dz) = 0
/// - g    = eta (x) eta + (1/4) sum_i ((dx^i)^2 + (dy^i)^2)
/// - V    = -2(n+1) (x^i d/dx^i + y^i d/dy^i + 2z d/dz), lambda = 2n + 4
pub struct HeisenbergModel {
    pub n: usize,
    pub structure: ContactStructure,
    pub soliton_v: TensorField,
    pub lambda: f64,
}

/// Chart with coordinates x1..xn, y1..yn, z.
pub fn heisenberg_chart(n: usize) -> Chart {
    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    names.extend((1..=n).map(|i| format!("y{i}")));
    names.push("z".into());
    Chart::new(names).expect("distinct names")
}

pub fn build_heisenberg(n: usize) -> Result<HeisenbergModel> {
    if n < 1 {
        return Err(Error::InvalidArgument("heisenberg model needs n >= 1".into()));
    }
    let chart = heisenberg_chart(n);
    let dim = 2 * n + 1;

    let eta = TensorField::from_jet_components(&chart, 0, 1, move |s| {
        let mut comps = Vec::with_capacity(dim);
        for i in 0..n {
            comps.push(s[n + i].scale(-0.5)); // -y^i / 2
        }
        for _ in 0..n {
            comps.push(Jet::zero(s[0].spec()));
        }
        comps.push(Jet::constant(s[0].spec(), 0.5));
        comps
    });

    let mut xi_comps = vec![0.0; dim];
    xi_comps[dim - 1] = 2.0;
    let xi = TensorField::constant(&chart, 1, 0, xi_comps);

    let phi = TensorField::from_jet_components(&chart, 1, 1, move |s| {
        let zero = Jet::zero(s[0].spec());
        let mut m = vec![vec![zero; dim]; dim];
        for i in 0..n {
            m[n + i][i] = Jet::constant(s[0].spec(), -1.0); // phi(dx^i) = -dy^i
            m[i][n + i] = Jet::constant(s[0].spec(), 1.0); // phi(dy^i) = dx^i + y^i dz
            m[dim - 1][n + i] = s[n + i].clone();
        }
        m.into_iter().flatten().collect()
    });

    // frozen closed-form expansion of eta (x) eta + (1/4) sum (dx^i)^2 + (dy^i)^2
    let g = TensorField::from_jet_components(&chart, 0, 2, move |s| {
        let zero = Jet::zero(s[0].spec());
        let mut m = vec![vec![zero; dim]; dim];
        for i in 0..n {
            for j in 0..n {
                // g_{x^i x^j} = (delta_ij + y^i y^j) / 4
                let mut e = (&s[n + i] * &s[n + j]).scale(0.25);
                if i == j {
                    e = &e + 0.25;
                }
                m[i][j] = e;
            }
            // g_{x^i z} = -y^i / 4
            m[i][dim - 1] = s[n + i].scale(-0.25);
            m[dim - 1][i] = s[n + i].scale(-0.25);
            // g_{y^i y^i} = 1/4
            m[n + i][n + i] = Jet::constant(s[0].spec(), 0.25);
        }
        m[dim - 1][dim - 1] = Jet::constant(s[0].spec(), 0.25);
        m.into_iter().flatten().collect()
    });

    let c = -2.0 * (n as f64 + 1.0);
    let soliton_v = TensorField::from_jet_components(&chart, 1, 0, move |s| {
        let mut comps = Vec::with_capacity(dim);
        for i in 0..(2 * n) {
            comps.push(s[i].scale(c));
        }
        comps.push(s[dim - 1].scale(2.0 * c));
        comps
    });

    Ok(HeisenbergModel {
        n,
        structure: ContactStructure::new(eta, xi, phi, g)?,
        soliton_v,
        lambda: 2.0 * n as f64 + 4.0,
    })
}

/// The tensor-product form of the Heisenberg metric, used as a regression
/// oracle against the frozen closed-form components.
pub fn heisenberg_metric_from_products(n: usize) -> Result<TensorField> {
    let model = build_heisenberg(n)?;
    let chart = model.structure.chart().clone();
    let dim = 2 * n + 1;
    let eta_sq =
        TensorField::one_form_product(model.structure.eta(), model.structure.eta())?;
    let quarter_flat = TensorField::from_jet_components(&chart, 0, 2, move |s| {
        let zero = Jet::zero(s[0].spec());
        let mut m = vec![vec![zero; dim]; dim];
        for i in 0..(2 * n) {
            m[i][i] = Jet::constant(s[0].spec(), 0.25);
        }
        m.into_iter().flatten().collect()
    });
    eta_sq.add_scaled(&quarter_flat, 1.0)
}

/// D-homothetic deformation of the Heisenberg structure.
pub fn heisenberg_deformed(n: usize, a: f64) -> Result<ContactStructure> {
    build_heisenberg(n)?.structure.d_homothetic_deform(a)
}

/// phi-sectional curvature: the sectional curvature of the plane spanned by
/// a unit X in the contact subbundle and phi X.
pub fn phi_sectional_curvature(s: &ContactStructure, x: &[f64], p: &Point) -> Result<f64> {
    let dim = s.dim();
    if x.len() != dim {
        return Err(Error::InvalidArgument("direction has wrong dimension".into()));
    }
    let tower = s.geometry().tower(p, 2)?;
    let g = tower.conn.g.values();
    let eta = s.eta().values(p)?;
    let eta_x: f64 = (0..dim).map(|i| eta.get(&[i]) * x[i]).sum();
    let mut gxx = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            gxx += g.get(&[i, j]) * x[i] * x[j];
        }
    }
    if eta_x.abs() > 1e-6 || (gxx - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "X must be unit and tangent to D (eta(X) = {eta_x}, g(X,X) = {gxx})"
        )));
    }
    let phi = s.phi().values(p)?;
    let phi_x: Vec<f64> = (0..dim)
        .map(|a| (0..dim).map(|b| phi.get(&[a, b]) * x[b]).sum())
        .collect();
    let norm_sq: f64 = {
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                acc += g.get(&[i, j]) * phi_x[i] * phi_x[j];
            }
        }
        acc
    };
    if norm_sq.sqrt() < 1e-6 {
        return Err(Error::InvalidArgument("degenerate plane: |phi X| ~ 0".into()));
    }
    sectional_curvature(&tower, x, &phi_x)
}

/// A unit direction in the contact subbundle at `p`, built by projecting a
/// raw direction and normalizing.
pub fn unit_direction_in_d(s: &ContactStructure, raw: &[f64], p: &Point) -> Result<Vec<f64>> {
    let g = s.g().values(p)?;
    let eta = s.eta().values(p)?;
    let xi = s.xi().values(p)?;
    crate::contact::project_to_d(raw, &eta, &xi, &g)
        .ok_or_else(|| Error::InvalidArgument("direction projects to ~0 in D".into()))
}

/// Specification for the random polynomial metric / vector-field generators.
#[derive(Clone, Debug)]
pub struct RandomMetricSpec {
    pub dim: usize,
    /// Maximum polynomial degree of the perturbation entries (<= 3).
    pub degree: usize,
    /// Perturbation amplitude eps in g = I + eps * (symmetric part). Each
    /// entry polynomial is L1-normalized, so eps < 1/dim keeps the metric
    /// diagonally dominant (hence positive definite) on the unit box.
    pub amplitude: f64,
    pub seed: u64,
}

impl RandomMetricSpec {
    /// Defaults: degree 3 and the largest amplitude that is safely
    /// diagonally dominant on [-1, 1]^dim.
    pub fn new(dim: usize, seed: u64) -> RandomMetricSpec {
        RandomMetricSpec {
            dim,
            degree: 3,
            amplitude: 0.25 / dim as f64,
            seed,
        }
    }
}

pub fn random_chart(dim: usize) -> Chart {
    Chart::new((0..dim).map(|i| format!("u{i}")).collect::<Vec<_>>()).expect("names")
}

/// A polynomial in the chart variables, evaluable on jets.
#[derive(Clone, Debug)]
struct Polynomial {
    terms: Vec<(Vec<u8>, f64)>,
}

impl Polynomial {
    /// Random polynomial with terms of degree 1..=degree and L1-normalized
    /// coefficients (so |p| <= 1 on [-1, 1]^dim).
    fn random(dim: usize, degree: usize, rng: &mut impl Rng) -> Polynomial {
        let mut terms = Vec::new();
        for deg in 1..=degree {
            for mono in monomials(dim, deg) {
                terms.push((mono, rng.gen_range(-1.0..=1.0)));
            }
        }
        let l1: f64 = terms.iter().map(|(_, c): &(Vec<u8>, f64)| c.abs()).sum();
        if l1 > 0.0 {
            for (_, c) in terms.iter_mut() {
                *c /= l1;
            }
        }
        Polynomial { terms }
    }

    fn eval(&self, seeds: &[Jet]) -> Jet {
        let spec = seeds[0].spec();
        let mut acc = Jet::zero(spec);
        for (mono, c) in &self.terms {
            let mut term = Jet::constant(spec, *c);
            for (v, &e) in mono.iter().enumerate() {
                for _ in 0..e {
                    term = &term * &seeds[v];
                }
            }
            acc = &acc + &term;
        }
        acc
    }
}

fn monomials(dim: usize, deg: usize) -> Vec<Vec<u8>> {
    if dim == 1 {
        return vec![vec![deg as u8]];
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for rest in monomials(dim - 1, deg - first) {
            let mut m = Vec::with_capacity(dim);
            m.push(first as u8);
            m.extend(rest);
            out.push(m);
        }
    }
    out
}

/// Random polynomial metric g = I + eps * (symmetric polynomial part),
/// reproducible from the seed and verified positive definite on the box.
pub fn random_metric(spec: &RandomMetricSpec) -> Result<MetricGeometry> {
    if spec.degree > 3 {
        return Err(Error::InvalidArgument("perturbation degree must be <= 3".into()));
    }
    let chart = random_chart(spec.dim);
    let eps = spec.amplitude;
    for attempt in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_mul(1000).wrapping_add(attempt));
        let dim = spec.dim;
        let mut entries: Vec<Vec<Option<Polynomial>>> = vec![vec![None; dim]; dim];
        for i in 0..dim {
            for j in i..dim {
                let p = Polynomial::random(dim, spec.degree, &mut rng);
                entries[i][j] = Some(p.clone());
                entries[j][i] = Some(p);
            }
        }
        let g = TensorField::from_jet_components(&chart, 0, 2, move |s| {
            let mut comps = Vec::with_capacity(dim * dim);
            for i in 0..dim {
                for j in 0..dim {
                    let mut e = entries[i][j].as_ref().unwrap().eval(s).scale(eps);
                    if i == j {
                        e = &e + 1.0;
                    }
                    comps.push(e);
                }
            }
            comps
        });
        let geom = MetricGeometry::new(g)?;
        // verify positive definiteness across the sampling box
        let probes = sample_points(&chart, 1.0, 32, spec.seed ^ 0x5eed);
        let ok = probes.iter().all(|p| {
            geom.g()
                .values(p)
                .map(|t| crate::riemann::cholesky_ok(&t))
                .unwrap_or(false)
        });
        if ok {
            return Ok(geom);
        }
    }
    Err(Error::Generation(
        "could not generate a positive definite metric in 20 attempts".into(),
    ))
}

/// Random polynomial vector field on the same chart family as
/// [`random_metric`].
pub fn random_vector_field(spec: &RandomMetricSpec) -> Result<TensorField> {
    if spec.degree > 3 {
        return Err(Error::InvalidArgument("degree must be <= 3".into()));
    }
    let chart = random_chart(spec.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_mul(7919).wrapping_add(13));
    let comps: Vec<Polynomial> = (0..spec.dim)
        .map(|_| Polynomial::random(spec.dim, spec.degree, &mut rng))
        .collect();
    let dim = spec.dim;
    Ok(TensorField::from_jet_components(&chart, 1, 0, move |s| {
        (0..dim).map(|k| comps[k].eval(s)).collect()
    }))
}

/// Random polynomial scalar field (for d^2 = 0 style checks), on the same
/// chart family as [`random_metric`].
pub fn random_scalar_field(spec: &RandomMetricSpec) -> Result<crate::field::ScalarField> {
    if spec.degree > 3 {
        return Err(Error::InvalidArgument("degree must be <= 3".into()));
    }
    let chart = random_chart(spec.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_mul(104729).wrapping_add(7));
    let poly = Polynomial::random(spec.dim, spec.degree, &mut rng);
    Ok(crate::field::ScalarField::from_jet_fn(&chart, move |s| {
        poly.eval(s)
    }))
}

/// A flat contact metric structure on R^3 (non-K-contact, so h != 0):
///
/// - g   = (dx^2 + dy^2 + dz^2) / 4
/// - eta = (cos(y) dx - sin(y) dz) / 2, xi = 2 (cos(y) d/dx - sin(y) d/dz)
/// - phi from the compatibility condition.
///
/// The candidate is self-gating: it is returned only if it passes the axiom
/// checker, so nothing downstream depends on the formulas being right.
pub fn build_flat_r3_candidate() -> Result<ContactStructure> {
    let chart = Chart::new(vec!["x", "y", "z"]).unwrap();
    let eta = TensorField::from_jet_components(&chart, 0, 1, |s| {
        vec![
            s[1].cos().scale(0.5),
            Jet::zero(s[0].spec()),
            s[1].sin().scale(-0.5),
        ]
    });
    let xi = TensorField::from_jet_components(&chart, 1, 0, |s| {
        vec![
            s[1].cos().scale(2.0),
            Jet::zero(s[0].spec()),
            s[1].sin().scale(-2.0),
        ]
    });
    let phi = TensorField::from_jet_components(&chart, 1, 1, |s| {
        let zero = Jet::zero(s[0].spec());
        let (sin, cos) = (s[1].sin(), s[1].cos());
        vec![
            zero.clone(), sin.clone(), zero.clone(),
            -&sin, zero.clone(), -&cos,
            zero.clone(), cos, zero,
        ]
    });
    let mut g_comps = vec![0.0; 9];
    for i in 0..3 {
        g_comps[i * 3 + i] = 0.25;
    }
    let g = TensorField::constant(&chart, 0, 2, g_comps);
    let s = ContactStructure::new(eta, xi, phi, g)?;

    let tols = Tolerances::default();
    let points = sample_points(s.chart(), 1.0, 16, 2024);
    let axioms = s.verify_axioms(&points, &tols)?;
    if !axioms.overall_pass {
        let worst = axioms
            .checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| format!("{} (residual {:?})", c.name, c.max_residual))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::ModelRejected(format!(
            "flat candidate failed the axiom gate: {worst}"
        )));
    }
    Ok(s)
}

/// Unit 2-sphere in the stereographic chart (test fixture with known
/// constant curvature).
pub fn sphere2_stereographic() -> MetricGeometry {
    let chart = Chart::new(vec!["x", "y"]).unwrap();
    let g = TensorField::from_jet_components(&chart, 0, 2, |s| {
        let rho = &(&s[0] * &s[0]) + &(&s[1] * &s[1]) + 1.0;
        let f = rho.recip().expect("1 + x^2 + y^2 > 0").scale(2.0);
        let conf = &f * &f;
        let zero = Jet::zero(s[0].spec());
        vec![conf.clone(), zero.clone(), zero, conf]
    });
    MetricGeometry::new(g).unwrap()
}

/// Decomposition of a candidate soliton field on the Heisenberg chart into
/// (V^i, Vbar^i, V^z) jets at a point.
struct VJets {
    v: JetTensor,
}

impl VJets {
    fn x(&self, i: usize) -> &Jet {
        self.v.get(&[i])
    }
    fn y(&self, n: usize, i: usize) -> &Jet {
        self.v.get(&[n + i])
    }
    fn z(&self, n: usize) -> &Jet {
        self.v.get(&[2 * n])
    }
}

/// Verifies the first-order system that characterizes vector fields with
/// pounds_V xi = 4(n+1) xi and pounds_V phi = 0 on the Heisenberg model:
///
///   (1) dV^i/dx^j = dVbar^i/dy^j
///   (2) dV^i/dy^j = -dVbar^i/dx^j
///   (3) sum_i y^i dV^i/dy^j = dV^z/dy^j
///   (4) Vbar^j = dV^z/dx^j + y^j dV^z/dz - sum_i y^i dVbar^i/dy^j
///   (5) dV^z/dz = -4(n+1)
///   plus z-independence of V^i and Vbar^i.
///
/// The dV^z/dx^j term in (4) is required for the advertised cross-check
/// "system satisfied => pounds_V phi = 0" to hold; without it a V^z
/// perturbed by a function of x slips through the system while breaking
/// the phi invariance.
pub fn pde_check(
    model: &HeisenbergModel,
    v: &TensorField,
    points: &[Point],
    tols: &Tolerances,
) -> Result<SuiteReport> {
    let n = model.n;
    let dim = 2 * n + 1;
    if v.rank() != (1, 0) || v.chart() != model.structure.chart() {
        return Err(Error::InvalidArgument(
            "candidate must be a vector field on the model chart".into(),
        ));
    }
    let mut report = SuiteReport::new("pde");
    let mut res = vec![Vec::new(); 6];
    for p in points {
        let vj = VJets {
            v: v.evaluate(p, 1)?,
        };
        let y: Vec<f64> = (0..n).map(|i| p.coords()[n + i]).collect();
        let mut worst = [0.0f64; 6];
        for j in 0..n {
            for i in 0..n {
                let e1 = vj.x(i).partial(j).value() - vj.y(n, i).partial(n + j).value();
                worst[0] = worst[0].max(e1.abs());
                let e2 = vj.x(i).partial(n + j).value() + vj.y(n, i).partial(j).value();
                worst[1] = worst[1].max(e2.abs());
            }
            let sum3: f64 = (0..n).map(|i| y[i] * vj.x(i).partial(n + j).value()).sum();
            let e3 = sum3 - vj.z(n).partial(n + j).value();
            worst[2] = worst[2].max(e3.abs());
            let sum4: f64 = (0..n).map(|i| y[i] * vj.y(n, i).partial(n + j).value()).sum();
            let e4 = vj.y(n, j).value()
                - (vj.z(n).partial(j).value() + y[j] * vj.z(n).partial(dim - 1).value() - sum4);
            worst[3] = worst[3].max(e4.abs());
        }
        let e5 = vj.z(n).partial(dim - 1).value() + 4.0 * (n as f64 + 1.0);
        worst[4] = e5.abs();
        let mut zdep: f64 = 0.0;
        for i in 0..(2 * n) {
            zdep = zdep.max(vj.v.get(&[i]).partial(dim - 1).value().abs());
        }
        worst[5] = zdep;
        for (k, w) in worst.iter().enumerate() {
            res[k].push(*w);
        }
    }
    let thr = tols.at(1e-10);
    let names = [
        ("pde1_cauchy_riemann_x", "pde1"),
        ("pde2_cauchy_riemann_y", "pde2"),
        ("pde3_vz_y_derivatives", "pde3"),
        ("pde4_vbar_relation", "pde4"),
        ("pde5_vz_z_slope", "pde5"),
        ("z_independence", "pdez"),
    ];
    for (k, (name, eq)) in names.iter().enumerate() {
        report.push(CheckRecord::from_stats(
            *name,
            Some(eq),
            ResidualStats::from_values(&res[k]),
            thr,
        ));
    }

    // cross-check: system satisfaction must imply the two Lie-derivative
    // statements it encodes
    if report.overall_pass {
        let mut lvxi = Vec::new();
        let mut lvphi = Vec::new();
        let c = 4.0 * (n as f64 + 1.0);
        for p in points {
            let s = &model.structure;
            let lxi = lie_derivative_field(v, s.xi(), p)?;
            let xi = s.xi().values(p)?;
            let mut worst: f64 = 0.0;
            for a in 0..dim {
                worst = worst.max((lxi.get(&[a]) - c * xi.get(&[a])).abs());
            }
            lvxi.push(worst);
            lvphi.push(lie_derivative_field(v, s.phi(), p)?.max_abs());
        }
        report.push(CheckRecord::from_stats(
            "cross_check_lie_xi",
            Some("lvxi"),
            ResidualStats::from_values(&lvxi),
            tols.at(1e-8),
        ));
        report.push(CheckRecord::from_stats(
            "cross_check_lie_phi",
            Some("lvphi"),
            ResidualStats::from_values(&lvphi),
            tols.at(1e-8),
        ));
    } else {
        report.push(CheckRecord::not_applicable(
            "cross_check_lie_xi",
            Some("lvxi"),
            "system not satisfied",
        ));
        report.push(CheckRecord::not_applicable(
            "cross_check_lie_phi",
            Some("lvphi"),
            "system not satisfied",
        ));
    }
    Ok(report)
}

/// A named mutated candidate plus the check it must break.
pub struct PdeMutation {
    pub name: &'static str,
    pub candidate: TensorField,
    pub targeted_check: &'static str,
}

/// The mutation battery for the system above. Each candidate deviates from
/// the special solution in exactly one structural way, and must make its
/// targeted equation fail with a large residual.
pub fn pde_mutations(model: &HeisenbergModel) -> Vec<PdeMutation> {
    let n = model.n;
    let dim = 2 * n + 1;
    let chart = model.structure.chart().clone();
    let c = -2.0 * (n as f64 + 1.0);

    // V^z perturbed by F = x^1: breaks the Vbar relation (and phi invariance)
    let with_f = TensorField::from_jet_components(&chart, 1, 0, move |s| {
        let mut comps = Vec::with_capacity(dim);
        for i in 0..(2 * n) {
            comps.push(s[i].scale(c));
        }
        comps.push(&s[dim - 1].scale(2.0 * c) + &s[0]);
        comps
    });

    // V = xi: constant field, has dV^z/dz = 0 instead of -4(n+1)
    let mut xi_comps = vec![0.0; dim];
    xi_comps[dim - 1] = 2.0;
    let xi = TensorField::constant(&chart, 1, 0, xi_comps);

    // sign-flipped Vbar: breaks the first Cauchy-Riemann pair
    let flipped = TensorField::from_jet_components(&chart, 1, 0, move |s| {
        let mut comps = Vec::with_capacity(dim);
        for i in 0..n {
            comps.push(s[i].scale(c));
        }
        for i in 0..n {
            comps.push(s[n + i].scale(-c));
        }
        comps.push(s[dim - 1].scale(2.0 * c));
        comps
    });

    vec![
        PdeMutation {
            name: "vz_plus_x1",
            candidate: with_f,
            targeted_check: "pde4_vbar_relation",
        },
        PdeMutation {
            name: "v_equals_xi",
            candidate: xi,
            targeted_check: "pde5_vz_z_slope",
        },
        PdeMutation {
            name: "vbar_sign_flip",
            candidate: flipped,
            targeted_check: "pde1_cauchy_riemann_x",
        },
    ]
}
