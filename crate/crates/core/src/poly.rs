//! Dense polynomials in the monomial basis, used for closed-form moments.

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![0.0; self.0.len() + 1];
        for (k, &c) in self.0.iter().enumerate() {
            out[k + 1] = c / (k + 1) as f64;
        }
        Poly(out)
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let p = self.antiderivative();
        p.eval(b) - p.eval(a)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::default();
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// `x^shift * self`.
    pub fn shift(&self, shift: usize) -> Poly {
        let mut out = vec![0.0; shift];
        out.extend_from_slice(&self.0);
        Poly(out)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let len = self.0.len().max(other.0.len());
        let mut out = vec![0.0; len];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.0.get(k).copied().unwrap_or(0.0) - other.0.get(k).copied().unwrap_or(0.0);
        }
        Poly(out)
    }
}
