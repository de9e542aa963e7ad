//! Named example geometries.

use std::collections::BTreeMap;

use ahgeo_core::catenoid::CatenoidParams;
use ahgeo_core::holographic::*;
use ahgeo_core::linalg::{sym_eigenvalues, Mat};
use ahgeo_core::metrics::{Euclidean, PoincareBall, StereographicSphere, WaveMode, WavyMetric};
use ahgeo_core::submanifold::{embedding_jet, induced_metric, Embedding, PolynomialEmbedding, RoundSphere};
use ahgeo_core::{MetricField, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug)]
pub enum Family {
    HalfSpace(HyperbolicHalfSpace),
    NormalSphere(HyperbolicNormalSphere),
    ProductCollar(ProductCollarSphere),
    LinearTorus(LinearPerturbTorus),
    Quadratic(QuadraticPerturb),
    Generic(GenericCollar),
}

macro_rules! each_family {
    ($self:expr, $f:ident => $body:expr) => {
        match $self {
            Family::HalfSpace($f) => $body,
            Family::NormalSphere($f) => $body,
            Family::ProductCollar($f) => $body,
            Family::LinearTorus($f) => $body,
            Family::Quadratic($f) => $body,
            Family::Generic($f) => $body,
        }
    };
}

impl NormalFormFamily for Family {
    fn boundary_dim(&self) -> usize {
        each_family!(self, f => f.boundary_dim())
    }
    fn g_r<S: Scalar>(&self, r: S, x: &[S]) -> Vec<S> {
        each_family!(self, f => f.g_r(r, x))
    }
    fn r_max(&self) -> f64 {
        each_family!(self, f => f.r_max())
    }
    fn analytic_in_r(&self) -> bool {
        each_family!(self, f => f.analytic_in_r())
    }
    fn boundary_box(&self) -> (f64, f64) {
        each_family!(self, f => f.boundary_box())
    }
    fn boundary_in_domain(&self, x: &[f64]) -> bool {
        each_family!(self, f => f.boundary_in_domain(x))
    }
    fn metadata(&self) -> FamilyMetadata {
        each_family!(self, f => f.metadata())
    }
}

/// What the classification of a family must find.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpectedClassification {
    pub wpe: Option<bool>,
    pub umbilic: Option<bool>,
    pub totally_geodesic: Option<bool>,
    pub scalar_defect: Option<(f64, f64)>,
}

impl Family {
    /// Hand-computed `(g0, g1, g2, g3)` at `x`, when the family has one.
    pub fn closed_form_expansion(&self, x: &[f64]) -> Option<[Mat<f64>; 4]> {
        let n = self.boundary_dim();
        let id = Mat::identity(n);
        let zero = Mat::zeros(n);
        match self {
            Family::HalfSpace(_) => Some([id, zero.clone(), zero.clone(), zero]),
            Family::NormalSphere(_) => {
                let s = Mat::from_vec(n, StereographicSphere::unit(n).components(x));
                Some([s.clone(), zero.clone(), s.scale(-0.5), zero])
            }
            Family::ProductCollar(_) => {
                let s = Mat::from_vec(n, StereographicSphere::unit(n).components(x));
                Some([s, zero.clone(), zero.clone(), zero])
            }
            Family::LinearTorus(_) => Some([id.clone(), id, zero.clone(), zero]),
            Family::Quadratic(q) => Some([id, zero.clone(), q.a.clone(), zero]),
            Family::Generic(_) => None,
        }
    }

    pub fn expected_classification(&self) -> ExpectedClassification {
        let n = self.boundary_dim();
        let nf = n as f64;
        let wpe = |v: bool| if n >= 3 { Some(v) } else { None };
        match self {
            Family::HalfSpace(_) | Family::NormalSphere(_) => {
                ExpectedClassification { wpe: wpe(true), umbilic: Some(true), totally_geodesic: Some(true), scalar_defect: Some((0.0, 0.0)) }
            }
            Family::ProductCollar(_) => ExpectedClassification {
                wpe: wpe(false),
                umbilic: Some(true),
                totally_geodesic: Some(true),
                scalar_defect: Some((0.0, nf * (nf - 1.0))),
            },
            Family::LinearTorus(_) => {
                ExpectedClassification { wpe: wpe(false), umbilic: Some(true), totally_geodesic: Some(false), scalar_defect: None }
            }
            Family::Quadratic(_) => ExpectedClassification {
                wpe: wpe(false),
                umbilic: Some(true),
                totally_geodesic: Some(true),
                scalar_defect: Some((0.0, 0.0)),
            },
            Family::Generic(_) => ExpectedClassification { wpe: wpe(false), ..Default::default() },
        }
    }
}

#[derive(Clone, Debug)]
pub enum Ambient {
    Hyperbolic(PoincareBall),
    Flat(Euclidean),
    Wavy(WavyMetric),
}

impl MetricField for Ambient {
    fn dim(&self) -> usize {
        match self {
            Ambient::Hyperbolic(m) => m.dim(),
            Ambient::Flat(m) => m.dim(),
            Ambient::Wavy(m) => m.dim(),
        }
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        match self {
            Ambient::Hyperbolic(m) => m.components(x),
            Ambient::Flat(m) => m.components(x),
            Ambient::Wavy(m) => m.components(x),
        }
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        match self {
            Ambient::Hyperbolic(m) => m.in_domain(x),
            Ambient::Flat(m) => m.in_domain(x),
            Ambient::Wavy(m) => m.in_domain(x),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Surface {
    Polynomial(PolynomialEmbedding),
    Sphere(RoundSphere),
}

impl Embedding for Surface {
    fn intrinsic_dim(&self) -> usize {
        match self {
            Surface::Polynomial(e) => e.intrinsic_dim(),
            Surface::Sphere(e) => e.intrinsic_dim(),
        }
    }
    fn ambient_dim(&self) -> usize {
        match self {
            Surface::Polynomial(e) => e.ambient_dim(),
            Surface::Sphere(e) => e.ambient_dim(),
        }
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        match self {
            Surface::Polynomial(e) => e.map(u),
            Surface::Sphere(e) => e.map(u),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EmbeddedEntry {
    pub surface: Surface,
    pub ambient: Ambient,
    /// Radius of the intrinsic coordinate ball from which sample points are drawn.
    pub sample_radius: f64,
}

#[derive(Clone, Debug)]
pub enum Geometry {
    Family(Family),
    Chart(Ambient),
    Embedding(EmbeddedEntry),
    Catenoid(CatenoidParams),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    NormalFormFamily,
    ChartMetric,
    Embedding,
    CatenoidParams,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::NormalFormFamily => "normal-form family",
            Kind::ChartMetric => "chart metric",
            Kind::Embedding => "embedding",
            Kind::CatenoidParams => "catenoid",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: Kind,
    pub parameters: BTreeMap<String, Value>,
    pub note: &'static str,
    pub geometry: Geometry,
}

#[derive(Clone, Copy)]
enum Param {
    Dim { min: usize },
    Seed,
    Real,
}

struct Template {
    base: &'static str,
    params: &'static [(&'static str, Param)],
    defaults: &'static [f64],
    note: &'static str,
    build: fn(&[f64]) -> CliResult<Geometry>,
}

const N: (&str, Param) = ("n", Param::Dim { min: 1 });
const N2: (&str, Param) = ("n", Param::Dim { min: 2 });

const TEMPLATES: &[Template] = &[
    Template {
        base: "hyperbolic-ball",
        params: &[N],
        defaults: &[3.0],
        note: "Poincaré ball model of H^{n+1} with boundary S^n",
        build: |a| Ok(Geometry::Chart(Ambient::Hyperbolic(PoincareBall(a[0] as usize + 1)))),
    },
    Template {
        base: "hyperbolic-half-space",
        params: &[N],
        defaults: &[3.0],
        note: "upper half space, g_r = flat metric for all r",
        build: |a| Ok(Geometry::Family(Family::HalfSpace(HyperbolicHalfSpace { n: a[0] as usize }))),
    },
    Template {
        base: "hyperbolic-normal-sphere",
        params: &[N],
        defaults: &[3.0],
        note: "ball model in geodesic normal form, g_r = (1 - r^2/4)^2 g_S",
        build: |a| Ok(Geometry::Family(Family::NormalSphere(HyperbolicNormalSphere { n: a[0] as usize }))),
    },
    Template {
        base: "product-collar-sphere",
        params: &[N],
        defaults: &[3.0],
        note: "product collar over the round sphere, g_r = g_S",
        build: |a| Ok(Geometry::Family(Family::ProductCollar(ProductCollarSphere { n: a[0] as usize }))),
    },
    Template {
        base: "linear-perturb-torus",
        params: &[N],
        defaults: &[3.0],
        note: "flat torus with a first-order term, g_r = (1 + r) flat",
        build: |a| Ok(Geometry::Family(Family::LinearTorus(LinearPerturbTorus { n: a[0] as usize }))),
    },
    Template {
        base: "quadratic-perturb",
        params: &[N2, ("A", Param::Real)],
        defaults: &[3.0, 0.3],
        note: "flat torus with g_r = flat + r^2 A, A = amplitude * diag(1, -1, 0, ...)",
        build: |a| Ok(Geometry::Family(Family::Quadratic(QuadraticPerturb::with_amplitude(a[0] as usize, a[1])?))),
    },
    Template {
        base: "generic-collar",
        params: &[N],
        defaults: &[3.0],
        note: "torus collar with conformal factor and terms at every order in r",
        build: |a| Ok(Geometry::Family(Family::Generic(GenericCollar { n: a[0] as usize }))),
    },
    Template {
        base: "totally-geodesic-slice",
        params: &[N],
        defaults: &[3.0],
        note: "equatorial H^{n+1} in the ball model of H^{n+2}",
        build: |a| {
            let n = a[0] as usize;
            Ok(Geometry::Embedding(EmbeddedEntry {
                surface: Surface::Polynomial(PolynomialEmbedding::slice(n + 1, n + 2)),
                ambient: Ambient::Hyperbolic(PoincareBall(n + 2)),
                sample_radius: 0.7,
            }))
        },
    },
    Template {
        base: "catenoid",
        params: &[N, ("a", Param::Real)],
        defaults: &[2.0, 1.0],
        note: "spherical catenoid in H^{n+2} with neck radius a",
        build: |a| {
            let p = CatenoidParams::spherical(a[0] as usize, a[1], 12.0);
            p.validate()?;
            Ok(Geometry::Catenoid(p))
        },
    },
    Template {
        base: "round-sphere-in-flat",
        params: &[N, ("rho", Param::Real)],
        defaults: &[3.0, 1.0],
        note: "round sphere of radius rho in flat R^{n+1}, stereographic chart",
        build: |a| {
            let (n, rho) = (a[0] as usize, a[1]);
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(CliError::Usage(format!("radius must be positive, got {rho}")));
            }
            Ok(Geometry::Embedding(EmbeddedEntry {
                surface: Surface::Sphere(RoundSphere::centered(n, rho)),
                ambient: Ambient::Flat(Euclidean(n + 1)),
                sample_radius: 1.5,
            }))
        },
    },
    Template {
        base: "random-embedding",
        params: &[("seed", Param::Seed)],
        defaults: &[1.0],
        note: "seeded quadratic perturbation of an affine T^3 chart in a curved 5- or 6-dimensional ambient",
        build: |a| {
            let (surface, ambient) = random_embedding(a[0] as u64);
            Ok(Geometry::Embedding(EmbeddedEntry {
                surface: Surface::Polynomial(surface),
                ambient: Ambient::Wavy(ambient),
                sample_radius: 0.3,
            }))
        },
    },
];

/// Ambient dimension of `random-embedding(seed)`.
pub fn random_ambient_dim(seed: u64) -> usize {
    5 + (seed % 2) as usize
}

fn random_wavy(rng: &mut ChaCha8Rng, dim: usize, amp: f64) -> WavyMetric {
    let modes = (0..3)
        .map(|_| {
            let mut s = Mat::zeros(dim);
            for i in 0..dim {
                for j in i..dim {
                    let v = amp * rng.gen_range(-1.0..1.0) / dim as f64;
                    s.set(i, j, v);
                    s.set(j, i, v);
                }
            }
            WaveMode { k: (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect(), phase: rng.gen_range(0.0..6.0), s }
        })
        .collect();
    WavyMetric { dim, modes }
}

/// Probe points for the rejection tests: the corners and centre of the sample cube.
fn probes(m: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; m]];
    for mask in 0..(1usize << m) {
        out.push((0..m).map(|k| if mask >> k & 1 == 1 { radius } else { -radius }).collect());
    }
    out
}

/// Draws until the embedding has full rank and the ambient metric is
/// comfortably positive on the sampled region.
pub fn random_embedding(seed: u64) -> (PolynomialEmbedding, WavyMetric) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 3;
    let dim = random_ambient_dim(seed);
    loop {
        let ambient = random_wavy(&mut rng, dim, 0.2);
        let mut e = PolynomialEmbedding::slice(m, dim);
        for v in e.linear.iter_mut() {
            *v += 0.3 * rng.gen_range(-1.0..1.0);
        }
        for v in e.quadratic.iter_mut() {
            *v = 0.2 * rng.gen_range(-1.0..1.0);
        }
        for v in e.offset.iter_mut() {
            *v = 0.2 * rng.gen_range(-1.0..1.0);
        }
        let ok = probes(m, 0.3).iter().all(|u| {
            let p: Vec<f64> = e.map(u);
            let g = Mat::from_vec(dim, ambient.components(&p));
            let h = match induced_metric(&e, &ambient, u) {
                Ok(h) => h,
                Err(_) => return false,
            };
            sym_eigenvalues(&g)[0] > 0.2 && sym_eigenvalues(&h)[0] > 0.1
        });
        if ok {
            return (e, ambient);
        }
    }
}

fn format_arg(p: Param, v: f64) -> String {
    match p {
        Param::Real => format!("{v:?}"),
        _ => format!("{}", v as u64),
    }
}

fn parse_name(name: &str) -> CliResult<(&str, Vec<&str>)> {
    let name = name.trim();
    match name.find('(') {
        None => Ok((name, Vec::new())),
        Some(open) => {
            let inner = name[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| CliError::BadArguments { entry: name.into(), reason: "missing `)`".into() })?;
            let args = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(str::trim).collect() };
            Ok((name[..open].trim(), args))
        }
    }
}

fn build(t: &Template, args: &[f64]) -> CliResult<CatalogEntry> {
    let name = format!(
        "{}({})",
        t.base,
        t.params.iter().zip(args).map(|(p, v)| format_arg(p.1, *v)).collect::<Vec<_>>().join(", ")
    );
    let bad = |reason: String| CliError::BadArguments { entry: name.clone(), reason };
    let mut parameters = BTreeMap::new();
    for (&(key, p), &v) in t.params.iter().zip(args) {
        let value = match p {
            Param::Dim { min } => {
                if v.fract() != 0.0 || v < min as f64 || v > 16.0 {
                    return Err(bad(format!("{key} must be an integer in [{min}, 16], got {v}")));
                }
                Value::from(v as u64)
            }
            Param::Seed => {
                if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                    return Err(bad(format!("{key} must be a nonnegative integer, got {v}")));
                }
                Value::from(v as u64)
            }
            Param::Real => {
                if !v.is_finite() {
                    return Err(bad(format!("{key} must be finite")));
                }
                serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
            }
        };
        parameters.insert(key.to_string(), value);
    }
    let geometry = (t.build)(args).map_err(|e| match e {
        CliError::Geometry(g) => bad(g.to_string()),
        CliError::Usage(s) => bad(s),
        other => other,
    })?;
    let kind = match geometry {
        Geometry::Family(_) => Kind::NormalFormFamily,
        Geometry::Chart(_) => Kind::ChartMetric,
        Geometry::Embedding(_) => Kind::Embedding,
        Geometry::Catenoid(_) => Kind::CatenoidParams,
    };
    Ok(CatalogEntry { name, kind, parameters, note: t.note, geometry })
}

/// Looks up `base(arg, …)`; omitted arguments take their defaults.
pub fn catalog_get(name: &str) -> CliResult<CatalogEntry> {
    let (base, raw) = parse_name(name)?;
    let t = TEMPLATES.iter().find(|t| t.base == base).ok_or_else(|| CliError::UnknownEntry(name.trim().into()))?;
    if raw.len() > t.params.len() {
        return Err(CliError::BadArguments {
            entry: name.trim().into(),
            reason: format!("expected at most {} arguments, got {}", t.params.len(), raw.len()),
        });
    }
    let mut args = t.defaults.to_vec();
    for (k, s) in raw.iter().enumerate() {
        args[k] = s.parse().map_err(|_| CliError::BadArguments {
            entry: name.trim().into(),
            reason: format!("`{s}` is not a number"),
        })?;
    }
    build(t, &args)
}

/// Every entry at its default parameters, each passed through [`self_test`].
pub fn catalog_list() -> CliResult<Vec<CatalogEntry>> {
    TEMPLATES
        .iter()
        .map(|t| {
            let e = build(t, t.defaults).map_err(|err| CliError::SelfTest { entry: t.base.into(), reason: err.to_string() })?;
            self_test(&e)?;
            Ok(e)
        })
        .collect()
}

/// Usage patterns `base(param, …)` of all templates.
pub fn catalog_names() -> Vec<String> {
    TEMPLATES
        .iter()
        .map(|t| format!("{}({})", t.base, t.params.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")))
        .collect()
}

/// Cheap structural invariants of an entry.
pub fn self_test(e: &CatalogEntry) -> CliResult<()> {
    let fail = |reason: String| CliError::SelfTest { entry: e.name.clone(), reason };
    match &e.geometry {
        Geometry::Family(f) => validate_family(f, &boundary_points(f, 2, 0)).map_err(|g| fail(g.to_string())),
        Geometry::Chart(m) => {
            let d = m.dim();
            for x in [vec![0.0; d], (0..d).map(|k| 0.5 / (k + 1) as f64).collect()] {
                let g = Mat::from_vec(d, m.components(&x));
                if sym_eigenvalues(&g)[0] <= 0.0 {
                    return Err(fail(format!("metric not positive definite at {x:?}")));
                }
            }
            Ok(())
        }
        Geometry::Embedding(emb) => {
            let s = &emb.surface;
            if s.ambient_dim() != emb.ambient.dim() || s.intrinsic_dim() >= s.ambient_dim() {
                return Err(fail("dimension mismatch".into()));
            }
            let u = vec![0.1; s.intrinsic_dim()];
            embedding_jet(s, &u).map_err(|g| fail(g.to_string()))?;
            let h = induced_metric(s, &emb.ambient, &u).map_err(|g| fail(g.to_string()))?;
            if sym_eigenvalues(&h)[0] <= 0.0 {
                return Err(fail("induced metric not positive definite".into()));
            }
            Ok(())
        }
        Geometry::Catenoid(p) => p.validate().map_err(|g| fail(g.to_string())),
    }
}
