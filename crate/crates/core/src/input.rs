//! JSON input schemas: series, point clouds, contours, D-finite systems and
//! simple rational test functions. Exact integers may be given as JSON
//! integers or decimal strings; rationals as `"p/q"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::{CapacityError, PointCloud};
use crate::contour::{make_gamma, sample_contour, ContourError, GammaContour};
use crate::decimal::{DecInt, DecRat};
use crate::dfinite::{DFiniteError, DFiniteSystem};
use crate::poly::{BiPoly, IntPoly};
use crate::series::{
    biseries_from_product, expand_birational, expand_rational, lacunary_series, BiSeries, ExponentRule,
    IntSeries1D, RationalFn, SeriesError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InputError {
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    DFinite(#[from] DFiniteError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Contour(#[from] ContourError),
}

fn schema(msg: impl Into<String>) -> InputError {
    InputError::Schema(msg.into())
}

/// Integer polynomial: a flat list is a polynomial in the variable at hand,
/// a list of lists gives `rows[a][b]` = coefficient of `z^a w^b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Flat(Vec<DecInt>),
    Nested(Vec<Vec<DecInt>>),
}

fn ints(v: &[DecInt]) -> Vec<BigInt> {
    v.iter().map(|x| x.0.clone()).collect()
}

impl PolySpec {
    pub fn is_nested(&self) -> bool {
        matches!(self, PolySpec::Nested(_))
    }

    pub fn univariate(&self) -> Result<IntPoly, InputError> {
        match self {
            PolySpec::Flat(v) => Ok(IntPoly::new(ints(v))),
            PolySpec::Nested(_) => Err(schema("expected a univariate (flat) coefficient list")),
        }
    }

    /// Flat lists are read as polynomials in `z` (`in_w = false`) or `w`.
    pub fn bivariate(&self, in_w: bool) -> BiPoly {
        match self {
            PolySpec::Flat(v) if in_w => BiPoly::from_w(&IntPoly::new(ints(v))),
            PolySpec::Flat(v) => BiPoly::from_z(&IntPoly::new(ints(v))),
            PolySpec::Nested(rows) => BiPoly::new(rows.iter().map(|r| IntPoly::new(ints(r))).collect()),
        }
    }
}

/// Initial data: a flat list `a_0, a_1, …` or nested rows `a_{jk}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialsSpec {
    Flat(Vec<DecRat>),
    Nested(Vec<Vec<DecRat>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DFiniteSpec {
    pub variables: Vec<String>,
    /// One list `[p_0, …, p_r]` per variable.
    pub equations: Vec<Vec<PolySpec>>,
    pub initials: InitialsSpec,
}

impl DFiniteSpec {
    pub fn build(&self) -> Result<DFiniteSystem, InputError> {
        let eqs = self
            .equations
            .iter()
            .enumerate()
            .map(|(v, eq)| eq.iter().map(|p| p.bivariate(v == 1)).collect())
            .collect();
        let rat = |x: &DecRat| -> BigRational { x.0.clone() };
        let init: Vec<Vec<BigRational>> = match &self.initials {
            InitialsSpec::Flat(v) if self.variables.len() == 1 => v.iter().map(|x| vec![rat(x)]).collect(),
            InitialsSpec::Flat(_) => return Err(schema("bivariate initials must be nested rows a[j][k]")),
            InitialsSpec::Nested(rows) => rows.iter().map(|r| r.iter().map(rat).collect()).collect(),
        };
        Ok(DFiniteSystem::new(self.variables.clone(), eqs, init)?)
    }
}

/// `{"kind": …}` series description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SeriesSpec {
    /// `P/Q`; nested coefficient lists make it bivariate.
    Rational { numerator: PolySpec, denominator: PolySpec },
    /// Explicit coefficients: `coeffs` (univariate) or `rows[j][k]` (bivariate).
    Table {
        #[serde(default)]
        coeffs: Option<Vec<DecInt>>,
        #[serde(default)]
        rows: Option<Vec<Vec<DecInt>>>,
        #[serde(default)]
        note: Option<String>,
    },
    Lacunary { rule: ExponentRule },
    /// `g(z)·h(w)` from two univariate specs.
    Product { g: Box<SeriesSpec>, h: Box<SeriesSpec> },
    Dfinite(DFiniteSpec),
}

impl SeriesSpec {
    pub fn is_bivariate(&self) -> bool {
        match self {
            SeriesSpec::Rational { numerator, denominator } => numerator.is_nested() || denominator.is_nested(),
            SeriesSpec::Table { rows, .. } => rows.is_some(),
            SeriesSpec::Lacunary { .. } => false,
            SeriesSpec::Product { .. } => true,
            SeriesSpec::Dfinite(d) => d.variables.len() == 2,
        }
    }

    pub fn rational_fn(&self) -> Result<Option<RationalFn>, InputError> {
        match self {
            SeriesSpec::Rational { numerator, denominator } if !self.is_bivariate() => {
                Ok(Some(RationalFn::new(numerator.univariate()?, denominator.univariate()?)?))
            }
            _ => Ok(None),
        }
    }

    /// Univariate coefficients through `order` (tables are returned as given).
    pub fn univariate(&self, order: usize) -> Result<IntSeries1D, InputError> {
        if self.is_bivariate() {
            return Err(schema("expected a univariate series"));
        }
        match self {
            SeriesSpec::Rational { .. } => {
                let r = self.rational_fn()?.expect("univariate rational");
                Ok(expand_rational(&r, order)?)
            }
            SeriesSpec::Table { coeffs: Some(c), .. } => Ok(IntSeries1D::new(ints(c))),
            SeriesSpec::Table { .. } => Err(schema("univariate table needs \"coeffs\"")),
            SeriesSpec::Lacunary { rule } => Ok(lacunary_series(rule, order)),
            SeriesSpec::Dfinite(d) => Ok(d.build()?.generate_univariate(order)?.to_int_series()?),
            SeriesSpec::Product { .. } => unreachable!("products are bivariate"),
        }
    }

    /// Bivariate table on `j + k ≤ order` (tables are returned as given).
    pub fn bivariate(&self, order: usize) -> Result<BiSeries, InputError> {
        match self {
            SeriesSpec::Rational { numerator, denominator } => {
                Ok(expand_birational(&numerator.bivariate(false), &denominator.bivariate(false), order)?)
            }
            SeriesSpec::Table { rows: Some(r), note, .. } => {
                let t = BiSeries::from_rows(r.iter().map(|row| ints(row)).collect())
                    .ok_or_else(|| schema("table rows must start with a_00"))?;
                Ok(match note {
                    Some(n) => t.with_note(n.clone()),
                    None => t,
                })
            }
            SeriesSpec::Product { g, h } => {
                Ok(biseries_from_product(&g.univariate(order)?, &h.univariate(order)?, order)?)
            }
            SeriesSpec::Dfinite(d) if d.variables.len() == 2 => Ok(d.build()?.generate_table(order)?.to_biseries()?),
            _ => Err(schema("expected a bivariate series")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub phi: f64,
    pub psi: f64,
    pub s: f64,
    pub delta: f64,
}

impl ContourSpec {
    pub fn build(&self) -> Result<GammaContour<f64>, InputError> {
        Ok(make_gamma(self.phi, self.psi, self.s, self.delta)?)
    }
}

/// Named cloud generators; counts default from the sampling density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CloudGenerator {
    Circle {
        r: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        count: Option<usize>,
    },
    Segment {
        a: [f64; 2],
        b: [f64; 2],
        #[serde(default)]
        count: Option<usize>,
    },
    Gamma {
        #[serde(flatten)]
        contour: ContourSpec,
        /// Map through `z ↦ 1/z` after sampling.
        #[serde(default)]
        invert: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CloudSpec {
    Points(Vec<[f64; 2]>),
    Generator(CloudGenerator),
}

fn c(p: [f64; 2]) -> num_complex::Complex<f64> {
    num_complex::Complex::new(p[0], p[1])
}

impl CloudSpec {
    pub fn build(&self, density: f64) -> Result<PointCloud<f64>, InputError> {
        match self {
            CloudSpec::Points(v) => Ok(PointCloud::new(v.iter().map(|&p| c(p)).collect(), "points")?),
            CloudSpec::Generator(CloudGenerator::Circle { r, center, count }) => {
                let n = count.unwrap_or((density * std::f64::consts::TAU * r.abs()).ceil() as usize);
                Ok(PointCloud::circle(c(*center), *r, n.max(1))?)
            }
            CloudSpec::Generator(CloudGenerator::Segment { a, b, count }) => {
                let n = count.unwrap_or((density * (c(*b) - c(*a)).norm()).ceil() as usize + 1);
                Ok(PointCloud::segment(c(*a), c(*b), n)?)
            }
            CloudSpec::Generator(CloudGenerator::Gamma { contour, invert }) => {
                let cloud = sample_contour(&contour.build()?, density)?;
                Ok(if *invert { cloud.inverted()? } else { cloud })
            }
        }
    }
}

/// Test function `g = num/den` with real or complex (`[re, im]`) coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub numerator: Vec<CoeffSpec>,
    #[serde(default = "one")]
    pub denominator: Vec<CoeffSpec>,
}

fn one() -> Vec<CoeffSpec> {
    vec![CoeffSpec::Real(1.0)]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    Real(f64),
    Complex([f64; 2]),
}

impl CoeffSpec {
    fn value(self) -> num_complex::Complex<f64> {
        match self {
            CoeffSpec::Real(x) => num_complex::Complex::new(x, 0.0),
            CoeffSpec::Complex(p) => c(p),
        }
    }
}

impl FunctionSpec {
    pub fn build(&self) -> Result<crate::dfinite::RationalEntry<f64>, InputError> {
        let v = |s: &[CoeffSpec]| s.iter().map(|x| x.value()).collect();
        Ok(crate::dfinite::RationalEntry::new(v(&self.numerator), v(&self.denominator))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_kinds() {
        let geo: SeriesSpec = serde_json::from_str(r#"{"kind":"rational","numerator":[1],"denominator":["1","-1"]}"#).unwrap();
        assert!(!geo.is_bivariate());
        assert_eq!(geo.univariate(4).unwrap(), IntSeries1D::from_i64s(&[1; 5]));

        let lac: SeriesSpec = serde_json::from_str(r#"{"kind":"lacunary","rule":"squares"}"#).unwrap();
        assert_eq!(lac.univariate(4).unwrap(), IntSeries1D::from_i64s(&[1, 1, 0, 0, 1]));
        let ex: SeriesSpec = serde_json::from_str(r#"{"kind":"lacunary","rule":{"exponents":[0,2]}}"#).unwrap();
        assert_eq!(ex.univariate(3).unwrap(), IntSeries1D::from_i64s(&[1, 0, 1, 0]));

        let tab: SeriesSpec = serde_json::from_str(r#"{"kind":"table","rows":[[1,1],[1]]}"#).unwrap();
        assert_eq!(tab.bivariate(1).unwrap().truncation_order(), 1);

        let prod: SeriesSpec = serde_json::from_str(
            r#"{"kind":"product","g":{"kind":"rational","numerator":[1],"denominator":[1,-1]},"h":{"kind":"lacunary","rule":"factorials"}}"#,
        )
        .unwrap();
        let t = prod.bivariate(6).unwrap();
        assert_eq!(t.coeff(3, 1).unwrap(), &BigInt::from(2));

        let bir: SeriesSpec =
            serde_json::from_str(r#"{"kind":"rational","numerator":[[1]],"denominator":[[1,-1],[-1]]}"#).unwrap();
        assert!(bir.is_bivariate());
        assert_eq!(bir.bivariate(4).unwrap().coeff(2, 2).unwrap(), &BigInt::from(6));
    }

    #[test]
    fn dfinite_specs() {
        let uni: SeriesSpec = serde_json::from_str(
            r#"{"kind":"dfinite","variables":["z"],"equations":[[[-2],[1,-4]]],"initials":[1]}"#,
        )
        .unwrap();
        assert_eq!(uni.univariate(4).unwrap(), IntSeries1D::from_i64s(&[1, 2, 6, 20, 70]));
        let bi: SeriesSpec = serde_json::from_str(
            r#"{"kind":"dfinite","variables":["z","w"],"equations":[[[-1],[1,-1]],[[-1],[1,-1]]],"initials":[[1]]}"#,
        )
        .unwrap();
        let t = bi.bivariate(5).unwrap();
        assert_eq!(t.coeff(2, 3).unwrap(), &BigInt::from(1));
    }

    #[test]
    fn clouds_and_functions() {
        let pts: CloudSpec = serde_json::from_str("[[0,0],[1,0],[1,0]]").unwrap();
        assert_eq!(pts.build(64.0).unwrap().len(), 2);
        let circ: CloudSpec = serde_json::from_str(r#"{"kind":"circle","r":1.0,"count":100}"#).unwrap();
        assert_eq!(circ.build(64.0).unwrap().len(), 100);
        let g: CloudSpec =
            serde_json::from_str(r#"{"kind":"gamma","phi":1.5708,"psi":-1.5708,"s":1.2,"delta":0.05,"invert":true}"#)
                .unwrap();
        assert!(g.build(64.0).unwrap().points().iter().all(|z| z.norm() <= 1.0 / 0.95 + 1e-12));
        let f: FunctionSpec = serde_json::from_str(r#"{"numerator":[1],"denominator":[1,-0.5]}"#).unwrap();
        let e = f.build().unwrap();
        assert!((e.eval(num_complex::Complex::new(1.0, 0.0)).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn schema_errors() {
        let lac: SeriesSpec = serde_json::from_str(r#"{"kind":"lacunary","rule":"squares"}"#).unwrap();
        assert!(matches!(lac.bivariate(3), Err(InputError::Schema(_))));
        assert!(serde_json::from_str::<SeriesSpec>(r#"{"kind":"nope"}"#).is_err());
    }
}
