//! D-finite systems in one or two variables and exact table generation.
//!
//! In two variables the series satisfies one ODE in `z` and one in `w`,
//! each with coefficients in `Z[z, w]`. Expanding the `z`-equation by powers
//! of `w` gives, for every column `k` of the table `a_{jk}`, a recurrence
//! in `j` whose lower-order terms reach into earlier columns. The `w`-equation
//! does the same for rows. Rows below the leading shift of the `z`-recurrence
//! are produced from the `w`-equation, everything else from the
//! `z`-equation, and both equations are then checked on the whole table.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::recurrence::{generate_coeffs, ode_terms, resolve, RationalSeries, Recurrence};
use super::DFiniteError;
use crate::poly::{BiPoly, IntPoly};
use crate::series::BiSeries;

/// `equations[v]` lists `p_0..p_r` for the ODE in variable `v`; `initials[j][k]` is `a_{jk}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DFiniteSystem {
    variables: Vec<String>,
    equations: Vec<Vec<BiPoly>>,
    initials: Vec<Vec<BigRational>>,
}

impl DFiniteSystem {
    /// Trailing zero coefficients are dropped, so `p_r` is the last nonzero one.
    pub fn new(
        variables: Vec<String>,
        mut equations: Vec<Vec<BiPoly>>,
        initials: Vec<Vec<BigRational>>,
    ) -> Result<Self, DFiniteError> {
        if !(1..=2).contains(&variables.len()) {
            return Err(DFiniteError::InvalidSystem(format!(
                "expected one or two variables, got {}",
                variables.len()
            )));
        }
        if equations.len() != variables.len() {
            return Err(DFiniteError::InvalidSystem(format!(
                "{} variables but {} equations",
                variables.len(),
                equations.len()
            )));
        }
        for eq in &mut equations {
            while eq.last().is_some_and(BiPoly::is_zero) {
                eq.pop();
            }
            if eq.is_empty() {
                return Err(DFiniteError::DegenerateEquation);
            }
        }
        if variables.len() == 1 && equations[0].iter().any(|p| p.w_degree().unwrap_or(0) > 0) {
            return Err(DFiniteError::InvalidSystem(
                "univariate equation mentions a second variable".into(),
            ));
        }
        Ok(DFiniteSystem {
            variables,
            equations,
            initials,
        })
    }

    /// Single ODE in `z` with `a_j = initials[j]`.
    pub fn univariate(p: &[IntPoly], initials: Vec<BigRational>) -> Result<Self, DFiniteError> {
        Self::new(
            vec!["z".into()],
            vec![p.iter().map(BiPoly::from_z).collect()],
            initials.into_iter().map(|x| vec![x]).collect(),
        )
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn equations(&self) -> &[Vec<BiPoly>] {
        &self.equations
    }

    pub fn initials(&self) -> &[Vec<BigRational>] {
        &self.initials
    }

    pub fn is_bivariate(&self) -> bool {
        self.variables.len() == 2
    }

    fn initial(&self, j: usize, k: usize) -> Option<&BigRational> {
        self.initials.get(j).and_then(|r| r.get(k))
    }

    /// Coefficients `a_0..=a_order` of a univariate system.
    pub fn generate_univariate(&self, order: usize) -> Result<RationalSeries, DFiniteError> {
        if self.is_bivariate() {
            return Err(DFiniteError::InvalidSystem("system is bivariate".into()));
        }
        let p: Vec<IntPoly> = self.equations[0].iter().map(|b| b.w_layer(0)).collect();
        let rec = super::recurrence::recurrence_from_ode(&p)?;
        let init: Vec<BigRational> = (0..self.initials.len())
            .map_while(|j| self.initial(j, 0).cloned())
            .collect();
        generate_coeffs(&rec, &init, order)
    }

    /// Exact table `a_{jk}`, `j + k ≤ order`.
    pub fn generate_table(&self, order: usize) -> Result<RationalTable, DFiniteError> {
        if !self.is_bivariate() {
            let s = self.generate_univariate(order)?;
            return Ok(RationalTable {
                rows: s.coeffs.into_iter().map(|x| vec![x]).collect(),
                order,
            });
        }
        let z = LayeredEquation::new(&self.equations[0])?;
        let wt: Vec<BiPoly> = self.equations[1].iter().map(BiPoly::transpose).collect();
        let w = LayeredEquation::new(&wt)?;
        let mut g = Generator {
            sys: self,
            d0: z.lead_shift().max(0) as usize,
            e0: w.lead_shift().max(0) as usize,
            z: &z,
            w: &w,
            memo: HashMap::new(),
        };
        let rows: Vec<Vec<BigRational>> = (0..=order)
            .map(|j| (0..=order - j).map(|k| g.get(j, k)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let table = RationalTable { rows, order };
        z.validate(&table, false)?;
        w.validate(&table, true)?;
        Ok(table)
    }
}

/// Exact rational table `rows[j][k] = a_{jk}` over the triangle `j + k ≤ order`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalTable {
    #[serde(skip)]
    pub rows: Vec<Vec<BigRational>>,
    pub order: usize,
}

impl RationalTable {
    pub fn get(&self, j: usize, k: usize) -> Option<&BigRational> {
        self.rows.get(j).and_then(|r| r.get(k))
    }

    /// Integer table, or the first non-integer entry in row-major order.
    pub fn to_biseries(&self) -> Result<BiSeries, DFiniteError> {
        for (j, row) in self.rows.iter().enumerate() {
            if let Some(k) = row.iter().position(|x| !x.is_integer()) {
                return Err(DFiniteError::NonIntegerCoefficient { j, k });
            }
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect();
        BiSeries::from_rows(rows).ok_or(DFiniteError::InvalidSystem("empty table".into()))
    }
}

/// Equation `Σ_i p_i(z, w) ∂_z^i f = 0`, split by powers of `w` into one
/// recurrence in `j` per layer. A common power of `w` is divided out first.
struct LayeredEquation {
    layers: Vec<Option<Recurrence>>,
}

impl LayeredEquation {
    fn new(p: &[BiPoly]) -> Result<Self, DFiniteError> {
        let top = p.iter().filter_map(BiPoly::w_degree).max().ok_or(DFiniteError::DegenerateEquation)?;
        let layer = |b: usize| ode_terms(&p.iter().map(|pi| pi.w_layer(b)).collect::<Vec<_>>());
        let mut layers: Vec<Option<Recurrence>> = (0..=top).map(layer).collect();
        let strip = layers.iter().take_while(|l| l.is_none()).count();
        layers.drain(..strip);
        Ok(LayeredEquation { layers })
    }

    fn lead(&self) -> &Recurrence {
        self.layers[0].as_ref().expect("layer 0 nonzero after stripping")
    }

    fn lead_shift(&self) -> isize {
        self.lead().leading_shift()
    }

    /// `Σ_b Σ_t c^{(b)}_t(n) · a(n+t, k-b)` over every term except the leading one of layer 0.
    fn rest(
        &self,
        n: isize,
        k: usize,
        mut a: impl FnMut(usize, usize) -> Result<BigRational, DFiniteError>,
    ) -> Result<BigRational, DFiniteError> {
        let hi = self.lead_shift();
        let mut acc = BigRational::zero();
        for (b, rec) in self.layers.iter().enumerate() {
            let (Some(rec), Some(col)) = (rec, k.checked_sub(b)) else {
                continue;
            };
            for (t, c) in rec.terms_at(n) {
                if b == 0 && t == hi {
                    continue;
                }
                let j = n + t;
                if j >= 0 {
                    acc += a(j as usize, col)? * BigRational::from_integer(c);
                }
            }
        }
        Ok(acc)
    }

    /// Checks every instance of the equation whose entries lie in the table.
    /// With `transposed`, the roles of rows and columns are swapped.
    fn validate(&self, t: &RationalTable, transposed: bool) -> Result<(), DFiniteError> {
        let span = self
            .layers
            .iter()
            .flatten()
            .map(Recurrence::leading_shift)
            .max()
            .unwrap_or(0)
            .max(0) as usize;
        let look = |j: usize, k: usize| {
            let (r, c) = if transposed { (k, j) } else { (j, k) };
            t.get(r, c).cloned().ok_or(DFiniteError::MissingInitial { j: r, k: c })
        };
        for k in 0..=t.order {
            for n in 0..=(t.order - k) {
                // entries touched: rows up to n + span in column k and earlier columns
                if n + span + k > t.order {
                    break;
                }
                let hi = self.lead_shift();
                let lead_row = n as isize + hi;
                let mut total = self.rest(n as isize, k, look)?;
                if lead_row >= 0 {
                    let c = self.lead().leading().eval_int(&BigInt::from(n));
                    total += look(lead_row as usize, k)? * BigRational::from_integer(c);
                }
                if !total.is_zero() {
                    let (j, kk) = if transposed {
                        (k, lead_row.max(0) as usize)
                    } else {
                        (lead_row.max(0) as usize, k)
                    };
                    return Err(DFiniteError::InconsistentSystem { j, k: kk });
                }
            }
        }
        Ok(())
    }
}

struct Generator<'a> {
    sys: &'a DFiniteSystem,
    z: &'a LayeredEquation,
    w: &'a LayeredEquation,
    d0: usize,
    e0: usize,
    memo: HashMap<(usize, usize), BigRational>,
}

impl Generator<'_> {
    fn get(&mut self, j: usize, k: usize) -> Result<BigRational, DFiniteError> {
        if let Some(v) = self.memo.get(&(j, k)) {
            return Ok(v.clone());
        }
        let given = self.sys.initial(j, k).cloned();
        let v = if j < self.d0 {
            if k < self.e0 {
                given.ok_or(DFiniteError::MissingInitial { j, k })?
            } else {
                // row j from the w-equation, leading entry a_{j, m + e0}
                let m = k as isize - self.w.lead_shift();
                let lead = self.w.lead().leading().eval_int(&BigInt::from(m));
                let w = self.w;
                let rest = w.rest(m, j, |kk, jj| self.get(jj, kk))?;
                resolve(&lead, rest, given.as_ref(), j, k)?
            }
        } else {
            let n = j as isize - self.z.lead_shift();
            let lead = self.z.lead().leading().eval_int(&BigInt::from(n));
            let z = self.z;
            let rest = z.rest(n, k, |jj, kk| self.get(jj, kk))?;
            resolve(&lead, rest, given.as_ref(), j, k)?
        };
        self.memo.insert((j, k), v.clone());
        Ok(v)
    }
}
