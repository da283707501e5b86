use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `log error = intercept + slope * log eps`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub quantity: String,
    pub pairs: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl RateFit {
    pub fn fit(quantity: impl Into<String>, pairs: Vec<(f64, f64)>) -> Result<Self> {
        let quantity = quantity.into();
        if pairs.len() < 4 {
            return Err(Error::InvalidArgument(format!(
                "rate fit for {quantity} needs >= 4 points, got {}",
                pairs.len()
            )));
        }
        if let Some(&(e, v)) = pairs.iter().find(|(e, v)| !(*e > 0.0 && *v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("rate fit for {quantity} needs positive data, got ({e}, {v})")));
        }
        let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
        let m = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / m;
        let my = ys.iter().sum::<f64>() / m;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(Error::InvalidArgument(format!("rate fit for {quantity} needs distinct eps values")));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
        Ok(Self { quantity, pairs, slope, intercept, r_squared })
    }

    /// The fitted constant `C` in `error ~ C eps^slope`.
    pub fn constant(&self) -> f64 {
        self.intercept.exp()
    }

    /// `error(eps_{k+1}) / error(eps_k)` for consecutive pairs.
    pub fn successive_ratios(&self) -> Vec<f64> {
        self.pairs.windows(2).map(|w| w[1].1 / w[0].1).collect()
    }
}
