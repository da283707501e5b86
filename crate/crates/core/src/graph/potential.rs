use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::tol;

/// A point of the star graph: an edge index (0-based) and the arc length from the vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeCoordinate {
    pub edge: usize,
    pub x: f64,
}

impl EdgeCoordinate {
    pub fn new(edge: usize, x: f64) -> Result<Self> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::InvalidArgument(format!("edge coordinate must be finite and >= 0, got {x}")));
        }
        Ok(Self { edge, x })
    }
}

/// One polynomial piece `sum_k coeffs[k] x^k` on `[start, end]`, degree at most 3.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub coeffs: Vec<f64>,
}

impl Piece {
    pub fn new(start: f64, end: f64, coeffs: impl Into<Vec<f64>>) -> Self {
        Self { start, end, coeffs: coeffs.into() }
    }

    fn poly(&self) -> Poly {
        Poly(self.coeffs.clone())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Piecewise-polynomial edge profile; zero outside its pieces.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub pieces: Vec<Piece>,
}

impl Profile {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { pieces: vec![Piece::new(0.0, 1.0, [c])] }
    }

    pub fn polynomial(coeffs: impl Into<Vec<f64>>) -> Self {
        Self { pieces: vec![Piece::new(0.0, 1.0, coeffs)] }
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.coeffs.iter().all(|&c| c == 0.0))
    }

    /// Value at `x`; pieces are half-open `[start, end)` except the last one.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.pieces.len().saturating_sub(1);
        for (i, p) in self.pieces.iter().enumerate() {
            if x >= p.start && (x < p.end || (i == last && x == p.end)) {
                return p.eval(x);
            }
        }
        0.0
    }

    fn limit(&self, x: f64, from_left: bool) -> f64 {
        for p in &self.pieces {
            let inside = if from_left { x > p.start && x <= p.end } else { x >= p.start && x < p.end };
            if inside {
                return p.eval(x);
            }
        }
        0.0
    }

    /// Mean of the one-sided limits; the natural sample at a jump.
    pub fn eval_midpoint(&self, x: f64) -> f64 {
        0.5 * (self.limit(x, true) + self.limit(x, false))
    }

    pub fn right_limit(&self, x: f64) -> f64 {
        self.limit(x, false)
    }

    /// All piece endpoints, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pieces.iter().flat_map(|p| [p.start, p.end]).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn support_end(&self) -> f64 {
        self.pieces.iter().map(|p| p.end).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.pieces.iter().map(|p| p.poly().integral(p.start, p.end)).sum()
    }

    /// `int x V(x) dx`.
    pub fn first_moment(&self) -> f64 {
        self.pieces.iter().map(|p| p.poly().shift(1).integral(p.start, p.end)).sum()
    }

    /// `int int min(x, y) V(x) V(y) dx dy`, via `min(x,y) = int_0^inf 1[t<x] 1[t<y] dt`,
    /// i.e. the integral of `U(t)^2` with `U(t) = int_t^inf V`.
    pub fn min_kernel_integral(&self) -> f64 {
        let mut total = 0.0;
        let mut tail = 0.0;
        let mut next_start = f64::INFINITY;
        for p in self.pieces.iter().rev() {
            if next_start.is_finite() {
                total += tail * tail * (next_start - p.end);
            }
            // U(t) = tail + P(end) - P(t) on [start, end]
            let anti = p.poly().antiderivative();
            let u = Poly::constant(tail + anti.eval(p.end)).sub(&anti);
            total += u.mul(&u).integral(p.start, p.end);
            tail = u.eval(p.start);
            next_start = p.start;
        }
        if next_start.is_finite() {
            total += tail * tail * next_start;
        }
        total
    }

    fn check_structure(&self, edge: usize) -> Result<()> {
        let mut prev_end = f64::NEG_INFINITY;
        for p in &self.pieces {
            if !(p.start.is_finite() && p.end.is_finite() && p.start < p.end) {
                return Err(Error::InvalidPotential(format!(
                    "edge {edge}: piece [{}, {}] is empty or not finite",
                    p.start, p.end
                )));
            }
            if p.start < prev_end {
                return Err(Error::InvalidPotential(format!("edge {edge}: breakpoints must increase")));
            }
            if p.coeffs.len() > 4 {
                return Err(Error::InvalidPotential(format!("edge {edge}: degree above 3")));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidPotential(format!("edge {edge}: non-finite coefficient")));
            }
            prev_end = p.end;
        }
        Ok(())
    }
}

/// The potential profile `V`: one piecewise polynomial per edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Profile>", into = "Vec<Profile>")]
pub struct StarPotential {
    profiles: Vec<Profile>,
}

impl TryFrom<Vec<Profile>> for StarPotential {
    type Error = Error;
    fn try_from(profiles: Vec<Profile>) -> Result<Self> {
        Self::new(profiles)
    }
}

impl From<StarPotential> for Vec<Profile> {
    fn from(v: StarPotential) -> Self {
        v.profiles
    }
}

impl StarPotential {
    /// Structural checks only; see [`StarPotential::validate`] for support and mean.
    pub fn new(profiles: Vec<Profile>) -> Result<Self> {
        if profiles.len() < 2 {
            return Err(Error::InvalidPotential(format!("need n >= 2 edges, got {}", profiles.len())));
        }
        for (i, p) in profiles.iter().enumerate() {
            p.check_structure(i)?;
        }
        Ok(Self { profiles })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(vec![Profile::zero(); n])
    }

    /// `V_1 = +1`, `V_2 = -1`, `V_3 = 0` on `[0, 1]`.
    pub fn reference() -> Self {
        Self::new(vec![Profile::constant(1.0), Profile::constant(-1.0), Profile::zero()])
            .expect("reference potential is well formed")
    }

    pub fn n(&self) -> usize {
        self.profiles.len()
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn profile(&self, edge: usize) -> &Profile {
        &self.profiles[edge]
    }

    /// Right end of the joint support.
    pub fn support_end(&self) -> f64 {
        self.profiles.iter().map(Profile::support_end).fold(0.0, f64::max)
    }

    /// Per-edge means `int V_i`.
    pub fn masses(&self) -> Vec<f64> {
        self.profiles.iter().map(Profile::mean).collect()
    }

    pub fn total_mean(&self) -> f64 {
        self.masses().iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.profiles.iter().enumerate() {
            for piece in &p.pieces {
                let nonzero = piece.coeffs.iter().any(|&c| c != 0.0);
                if nonzero && (piece.start < 0.0 || piece.end > 1.0) {
                    return Err(Error::SupportViolation {
                        edge: i,
                        detail: format!("piece [{}, {}] not inside [0, 1]", piece.start, piece.end),
                    });
                }
            }
        }
        let residual = self.total_mean();
        if residual.abs() > tol::MEAN {
            return Err(Error::MeanViolation { residual });
        }
        Ok(())
    }
}

pub fn validate_potential(v: &StarPotential) -> Result<()> {
    v.validate()
}

/// `theta_i = int x V_i(x) dx`, exact.
pub fn moments_theta(v: &StarPotential) -> Vec<f64> {
    v.profiles.iter().map(Profile::first_moment).collect()
}

/// `A = -sum_i int int min(x, y) V_i(x) V_i(y)`, exact.
pub fn constant_a(v: &StarPotential) -> f64 {
    -v.profiles.iter().map(Profile::min_kernel_integral).sum::<f64>()
}
