//! Feature extraction from sampled curves.

/// A local maximum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Refined by a parabola through the three samples around the maximum.
    pub position: f64,
    pub height: f64,
    /// Full width at half the peak height, `None` if the curve does not drop
    /// below half height before turning up again on either side.
    pub fwhm: Option<f64>,
}

/// Local maxima higher than `min_height` whose prominence (height above the
/// higher of the two neighbouring minima) is at least `min_prominence`.
pub fn find_peaks(x: &[f64], y: &[f64], min_height: f64, min_prominence: f64) -> Vec<Peak> {
    assert_eq!(x.len(), y.len());
    let n = y.len();
    let mut peaks = Vec::new();
    if n < 3 {
        return peaks;
    }
    for i in 1..n - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) || y[i] < min_height {
            continue;
        }
        let left_min = descend(y, i, -1);
        let right_min = descend(y, i, 1);
        if y[i] - left_min.max(right_min) < min_prominence {
            continue;
        }
        let (position, height) = parabolic(x, y, i);
        peaks.push(Peak {
            position,
            height,
            fwhm: half_width(x, y, i, 0.5 * y[i]),
        });
    }
    peaks
}

/// Lowest value reached walking from `i` in direction `dir` until the curve
/// rises above the starting height.
fn descend(y: &[f64], i: usize, dir: isize) -> f64 {
    let mut lo = y[i];
    let mut k = i as isize + dir;
    while k >= 0 && (k as usize) < y.len() {
        let v = y[k as usize];
        if v > y[i] {
            break;
        }
        lo = lo.min(v);
        k += dir;
    }
    lo
}

fn parabolic(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if denom == 0.0 {
        return (x1, y1);
    }
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if a >= 0.0 {
        return (x1, y1);
    }
    let xv = -b / (2.0 * a);
    if xv < x0 || xv > x2 {
        return (x1, y1);
    }
    let c = y1 - a * x1 * x1 - b * x1;
    (xv, a * xv * xv + b * xv + c)
}

fn half_width(x: &[f64], y: &[f64], i: usize, level: f64) -> Option<f64> {
    let left = crossing(x, y, i, level, -1)?;
    let right = crossing(x, y, i, level, 1)?;
    Some(right - left)
}

/// Linear-interpolated position where the curve first falls to `level`
/// walking away from `i`.
fn crossing(x: &[f64], y: &[f64], i: usize, level: f64, dir: isize) -> Option<f64> {
    let mut k = i;
    loop {
        let next = k as isize + dir;
        if next < 0 || next as usize >= y.len() {
            return None;
        }
        let j = next as usize;
        if y[j] <= level {
            return Some(x[k] + (y[k] - level) / (y[k] - y[j]) * (x[j] - x[k]));
        }
        if y[j] > y[k] {
            // turned up again before reaching the level
            return None;
        }
        k = j;
    }
}

/// Power at which a decreasing reflectivity curve first crosses `level`,
/// interpolated linearly in log(P).
pub fn crossing_power(powers: &[f64], r: &[f64], level: f64) -> Option<f64> {
    assert_eq!(powers.len(), r.len());
    for k in 1..r.len() {
        if r[k - 1] >= level && r[k] < level {
            let (l0, l1) = (powers[k - 1].ln(), powers[k].ln());
            let f = (r[k - 1] - level) / (r[k - 1] - r[k]);
            return Some((l0 + f * (l1 - l0)).exp());
        }
    }
    None
}

/// Half-power point of a saturation curve.
pub fn p50(powers: &[f64], r: &[f64]) -> Option<f64> {
    crossing_power(powers, r, 0.5)
}

/// Full width of the antibunching dip of a g₂ curve sampled from τ = 0:
/// twice the delay at which g₂ first recovers halfway from g₂(0) to 1.
pub fn dip_fwhm(taus: &[f64], g2: &[f64]) -> Option<f64> {
    assert_eq!(taus.len(), g2.len());
    let level = 0.5 * (g2.first()? + 1.0);
    for k in 1..g2.len() {
        if g2[k] >= level {
            let f = (level - g2[k - 1]) / (g2[k] - g2[k - 1]);
            return Some(2.0 * (taus[k - 1] + f * (taus[k] - taus[k - 1])));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentzian(x: f64, x0: f64, w: f64) -> f64 {
        let h = 0.5 * w;
        h * h / ((x - x0).powi(2) + h * h)
    }

    #[test]
    fn lorentzian_width_and_position() {
        let x: Vec<f64> = (0..=400).map(|k| -20.0 + 0.1 * k as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| lorentzian(v, 1.234, 3.0)).collect();
        let p = find_peaks(&x, &y, 0.1, 0.1);
        assert_eq!(p.len(), 1);
        assert!((p[0].position - 1.234).abs() < 0.01);
        assert!((p[0].fwhm.unwrap() - 3.0).abs() < 0.01);
    }

    #[test]
    fn two_peaks_and_noise_floor() {
        let x: Vec<f64> = (0..=600).map(|k| -30.0 + 0.1 * k as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| {
                lorentzian(v, -10.0, 2.0) + 0.5 * lorentzian(v, 12.0, 1.0) + 1e-4 * (v * 7.0).sin()
            })
            .collect();
        let p = find_peaks(&x, &y, 0.05, 0.05);
        assert_eq!(p.len(), 2);
        assert!((p[1].height - 0.5).abs() < 0.01);
    }

    #[test]
    fn half_power_crossing() {
        let p: Vec<f64> = (0..=40)
            .map(|k| 10f64.powf(-13.0 + 0.15 * k as f64))
            .collect();
        let r: Vec<f64> = p.iter().map(|&v| 1.0 / (1.0 + v / 1e-10)).collect();
        let got = p50(&p, &r).unwrap();
        assert!((got / 1e-10 - 1.0).abs() < 0.05, "{got}");
        assert!(p50(&p[..3], &r[..3]).is_none());
    }

    #[test]
    fn dip_width() {
        let t: Vec<f64> = (0..=1000).map(|k| k as f64 * 0.01).collect();
        let g: Vec<f64> = t.iter().map(|&v| 1.0 - (-v / 2.0).exp()).collect();
        // recovers half way at τ = 2 ln 2
        assert!((dip_fwhm(&t, &g).unwrap() - 4.0 * 2f64.ln()).abs() < 1e-3);
    }
}
