//! Bracketed scalar root finding.

/// Brent's method on a sign-changing bracket (scipy `brentq` scheme).
///
/// Returns `None` if `f(a)` and `f(b)` share a sign or the iteration budget runs out.
pub fn brent(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, xtol: f64, rtol: f64, max_iter: usize) -> Option<f64> {
    let mut xpre = a;
    let mut xcur = b;
    let mut fpre = f(xpre);
    let mut fcur = f(xcur);
    let (mut xblk, mut fblk, mut spre, mut scur) = (0.0, 0.0, 0.0, 0.0);

    if fpre * fcur > 0.0 || fpre.is_nan() || fcur.is_nan() {
        return None;
    }
    if fpre == 0.0 {
        return Some(xpre);
    }
    if fcur == 0.0 {
        return Some(xcur);
    }

    for _ in 0..max_iter {
        if fpre * fcur < 0.0 {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }

        let delta = 0.5 * (xtol + rtol * xcur.abs());
        let sbis = 0.5 * (xblk - xcur);
        if fcur == 0.0 || sbis.abs() < delta {
            return Some(xcur);
        }

        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                // secant
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                // inverse quadratic
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        xcur += if scur.abs() > delta {
            scur
        } else if sbis > 0.0 {
            delta
        } else {
            -delta
        };
        fcur = f(xcur);
    }
    None
}

/// Sub-brackets `[x_k, x_{k+1}]` of a sampling grid on which `f` changes sign.
pub fn sign_changes(grid: &[f64], mut f: impl FnMut(f64) -> f64) -> Vec<(f64, f64)> {
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    grid.windows(2)
        .zip(vals.windows(2))
        .filter(|(_, v)| v[0] * v[1] < 0.0 || (v[0] == 0.0 && v[1] != 0.0))
        .map(|(x, _)| (x[0], x[1]))
        .collect()
}

/// `m + 1` points geometrically spaced in `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let r = (hi / lo).ln() / m as f64;
    (0..=m).map(|k| if k == m { hi } else { lo * (r * k as f64).exp() }).collect()
}
