//! Correlation and F-tests over the medial window of a sentence length, and
//! the balance test for words trending up versus down.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{chi2_1_sf, f_sf};

pub use crate::special::f_cdf;

/// Which sentence positions enter the medial regression.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MedialMode {
    /// Positions `4..=L-2` (n = L - 5).
    #[default]
    PaperConsistent,
    /// Positions `4..=L-3` (n = L - 6).
    StrictText,
    /// Positions `lo..=hi`.
    Custom { lo: usize, hi: usize },
}

impl fmt::Display for MedialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MedialMode::PaperConsistent => f.write_str("paper_consistent"),
            MedialMode::StrictText => f.write_str("strict_text"),
            MedialMode::Custom { lo, hi } => write!(f, "custom:{lo}:{hi}"),
        }
    }
}

impl FromStr for MedialMode {
    type Err = Error;

    /// Accepts `paper`, `strict` or `custom:LO:HI`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper_consistent" => return Ok(MedialMode::PaperConsistent),
            "strict" | "strict_text" => return Ok(MedialMode::StrictText),
            _ => {}
        }
        let bad = || Error::Config(format!("invalid medial mode `{s}`"));
        let mut parts = s.split(':');
        if parts.next() != Some("custom") {
            return Err(bad());
        }
        let lo = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let hi = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        if parts.next().is_some() || lo < 1 || hi < lo {
            return Err(bad());
        }
        Ok(MedialMode::Custom { lo, hi })
    }
}

/// Ordered 1-based positions of the medial window for sentence length `length`.
pub fn medial_window(length: usize, mode: MedialMode) -> Result<Vec<usize>> {
    let (lo, hi) = match mode {
        MedialMode::PaperConsistent | MedialMode::StrictText if length < 9 => {
            return Err(Error::Config(format!(
                "sentence length {length} is too short for the {mode} medial window (needs 9)"
            )))
        }
        MedialMode::PaperConsistent => (4, length - 2),
        MedialMode::StrictText => (4, length - 3),
        MedialMode::Custom { lo, hi } => {
            if lo < 1 || hi > length {
                return Err(Error::Config(format!(
                    "custom window {lo}..{hi} outside positions 1..{length}"
                )));
            }
            (lo, hi)
        }
    };
    if hi < lo || hi - lo + 1 < 3 {
        return Err(Error::Config(format!(
            "medial window {lo}..{hi} has fewer than 3 positions"
        )));
    }
    Ok((lo..=hi).collect())
}

/// Sample Pearson correlation coefficient.
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Inconsistent(format!(
            "series lengths differ: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateSeries("x has zero variance"));
    }
    if syy == 0.0 {
        return Err(Error::DegenerateSeries("y has zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedialTestResult {
    pub statistic_name: String,
    pub r: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub p: f64,
    /// Window size.
    pub n: usize,
    pub df: (usize, usize),
}

impl MedialTestResult {
    /// Derives `F = r²(n-2)/(1-r²)` and its upper-tail probability on `(1, n-2)` df.
    pub fn from_r(statistic_name: impl Into<String>, r: f64, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::TooFewPoints { needed: 4, got: n });
        }
        let df2 = n - 2;
        let r2 = r * r;
        let f = if 1.0 - r2 <= 4.0 * f64::EPSILON {
            f64::INFINITY
        } else {
            r2 * df2 as f64 / (1.0 - r2)
        };
        Ok(MedialTestResult {
            statistic_name: statistic_name.into(),
            r,
            f,
            p: f_sf(f, 1.0, df2 as f64),
            n,
            df: (1, df2),
        })
    }
}

/// Simple-regression F-test of `ys` against `xs`.
pub fn regression_f_test(
    statistic_name: impl Into<String>,
    xs: &[f64],
    ys: &[f64],
) -> Result<MedialTestResult> {
    if xs.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: xs.len(),
        });
    }
    let r = pearson_r(xs, ys)?;
    MedialTestResult::from_r(statistic_name, r, xs.len())
}

/// Label carried in output metadata for the balance test.
pub const PROPORTION_TEST_LABEL: &str = "F-statistic (one-df chi-square on a 0.5 null)";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionTestResult {
    pub k_increasing: u64,
    pub k_decreasing: u64,
    pub statistic: f64,
    pub p: f64,
}

impl ProportionTestResult {
    pub fn share_increasing(&self) -> f64 {
        self.k_increasing as f64 / (self.k_increasing + self.k_decreasing) as f64
    }
}

/// Tests whether increasing and decreasing words are equally common:
/// statistic `n(2p̂-1)²`, p-value from the one-df chi-square tail.
pub fn proportion_half_test(k_inc: u64, k_dec: u64) -> Result<ProportionTestResult> {
    let n = k_inc + k_dec;
    if n < 10 {
        return Err(Error::TooFewPoints {
            needed: 10,
            got: n as usize,
        });
    }
    let diff = k_inc as f64 - k_dec as f64;
    let statistic = diff * diff / n as f64;
    Ok(ProportionTestResult {
        k_increasing: k_inc,
        k_decreasing: k_dec,
        statistic,
        p: chi2_1_sf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_window_sizes() {
        let w = medial_window(15, MedialMode::PaperConsistent).unwrap();
        assert_eq!(w, (4..=13).collect::<Vec<_>>());
        assert_eq!(
            medial_window(30, MedialMode::PaperConsistent)
                .unwrap()
                .len(),
            25
        );
        assert_eq!(
            medial_window(45, MedialMode::PaperConsistent)
                .unwrap()
                .len(),
            40
        );
        let w = medial_window(15, MedialMode::StrictText).unwrap();
        assert_eq!(w, (4..=12).collect::<Vec<_>>());
    }

    #[test]
    fn window_errors() {
        assert!(medial_window(8, MedialMode::PaperConsistent).is_err());
        assert!(medial_window(10, MedialMode::Custom { lo: 2, hi: 3 }).is_err());
        assert!(medial_window(10, MedialMode::Custom { lo: 2, hi: 11 }).is_err());
        assert_eq!(
            medial_window(10, MedialMode::Custom { lo: 2, hi: 9 }).unwrap(),
            (2..=9).collect::<Vec<_>>()
        );
    }

    #[test]
    fn mode_parsing_round_trips() {
        for mode in [
            MedialMode::PaperConsistent,
            MedialMode::StrictText,
            MedialMode::Custom { lo: 3, hi: 12 },
        ] {
            assert_eq!(mode.to_string().parse::<MedialMode>().unwrap(), mode);
        }
        assert_eq!(
            "paper".parse::<MedialMode>().unwrap(),
            MedialMode::PaperConsistent
        );
        assert!("custom:5".parse::<MedialMode>().is_err());
        assert!("custom:5:2".parse::<MedialMode>().is_err());
        assert!("middle".parse::<MedialMode>().is_err());
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson_r(&[1., 2., 3.], &[2., 4., 6.]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson_r(&[1., 2., 3.], &[6., 4., 2.]).unwrap() + 1.0).abs() < 1e-15);
        // cov = 2.5/3, var = 5/3 each
        assert!((pearson_r(&[1., 2., 3., 4.], &[1., 3., 2., 4.]).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn pearson_degenerate() {
        assert!(matches!(
            pearson_r(&[1., 2., 3.], &[5., 5., 5.]),
            Err(Error::DegenerateSeries(_))
        ));
        assert!(pearson_r(&[1., 2.], &[1., 2.]).is_err());
        assert!(pearson_r(&[1., 2., 3.], &[1., 2.]).is_err());
    }

    #[test]
    fn reference_triples() {
        let t = MedialTestResult::from_r("entropy", 0.4770, 10).unwrap();
        assert!((t.f - 2.3564).abs() < 1e-3, "F = {}", t.f);
        assert!((t.p - 0.1633).abs() < 1e-3, "p = {}", t.p);
        let t = MedialTestResult::from_r("entropy", -0.0607, 25).unwrap();
        assert!((t.f - 0.0851).abs() < 5e-4);
        assert!((t.p - 0.7731).abs() < 1e-3);
        let t = MedialTestResult::from_r("entropy", -0.0606, 40).unwrap();
        assert!((t.f - 0.1401).abs() < 5e-4);
        assert!((t.p - 0.7104).abs() < 1e-3);
    }

    #[test]
    fn perfect_correlation_has_zero_p() {
        let xs = [1., 2., 3., 4., 5.];
        let t = regression_f_test("x", &xs, &xs).unwrap();
        assert!(t.f.is_infinite());
        assert_eq!(t.p, 0.0);
        assert!(regression_f_test("x", &xs[..3], &xs[..3]).is_err());
    }

    #[test]
    fn proportion_examples() {
        let t = proportion_half_test(500, 500).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.p, 1.0);

        // p̂ = 0.5015 with n = 40000
        let t = proportion_half_test(20_060, 19_940).unwrap();
        assert!((t.statistic - 0.36).abs() < 1e-12);
        assert!((t.p - 0.5485).abs() < 5e-3, "p = {}", t.p);
        assert!((t.p - 0.5497).abs() < 5e-3);

        let t = proportion_half_test(75, 25).unwrap();
        assert!((t.statistic - 25.0).abs() < 1e-12);
        assert!(t.p < 1e-6);

        assert!(proportion_half_test(5, 4).is_err());
    }

    proptest! {
        #[test]
        fn pearson_affine_invariance(
            ys in prop::collection::vec(-100.0f64..100.0, 5..20),
            scale in 0.1f64..50.0,
            shift in -100.0f64..100.0,
        ) {
            let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
            let r = match pearson_r(&xs, &ys) { Ok(r) => r, Err(_) => return Ok(()) };
            let scaled: Vec<f64> = ys.iter().map(|y| scale * y + shift).collect();
            let negated: Vec<f64> = ys.iter().map(|y| -y).collect();
            prop_assert!((pearson_r(&xs, &scaled).unwrap() - r).abs() < 1e-9);
            prop_assert!((pearson_r(&xs, &negated).unwrap() + r).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&r));
        }

        #[test]
        fn f_test_is_internally_consistent(r in -0.999f64..0.999, n in 4usize..200) {
            let t = MedialTestResult::from_r("s", r, n).unwrap();
            let expected_f = r * r * (n - 2) as f64 / (1.0 - r * r);
            prop_assert!((t.f - expected_f).abs() <= 1e-9 * expected_f.max(1.0));
            prop_assert!((t.p - (1.0 - f_cdf(t.f, 1.0, (n - 2) as f64))).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&t.p));
        }

        #[test]
        fn default_window_excludes_edges(length in 9usize..200) {
            let w = medial_window(length, MedialMode::PaperConsistent).unwrap();
            prop_assert_eq!(w.len(), length - 5);
            for excluded in [1, 2, 3, length - 1, length] {
                prop_assert!(!w.contains(&excluded));
            }
        }
    }
}
