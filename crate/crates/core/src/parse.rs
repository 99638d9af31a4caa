//! Parsers for the textual inputs accepted by the command line: coordinate
//! vectors, lists of them, and grid specifications.

use crate::error::{Error, Result};

/// Parses `"0.1,-2,3e-4"` into a vector of finite reals.
pub fn parse_point(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty coordinate list".into()));
    }
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let v: f64 = tok.parse().map_err(|_| Error::Parse(format!("not a number: {tok:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("non-finite coordinate: {tok:?}")))
            }
        })
        .collect()
}

/// Parses a `;`-separated list of points, e.g. `"0,0;1,2"`.
pub fn parse_point_list(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').map(parse_point).collect()
}

/// One axis of a grid: `n` evenly spaced values from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

/// Maximum number of points a grid may expand to.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Parses `"lo:hi:n,lo:hi:n,..."`. A single axis spec is replicated over
/// all `dim` axes.
pub fn parse_grid(s: &str, dim: usize) -> Result<Vec<GridAxis>> {
    let axes: Vec<GridAxis> = s.split(',').map(parse_axis).collect::<Result<_>>()?;
    let axes = match axes.len() {
        1 => vec![axes[0]; dim],
        k if k == dim => axes,
        k => return Err(Error::DimensionMismatch { expected: dim, got: k }),
    };
    let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.n));
    match total {
        Some(t) if t <= MAX_GRID_POINTS => Ok(axes),
        _ => Err(Error::Parse(format!("grid exceeds {MAX_GRID_POINTS} points"))),
    }
}

fn parse_axis(s: &str) -> Result<GridAxis> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("grid axis must be lo:hi:n, got {s:?}")));
    }
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t.trim().parse().map_err(|_| Error::Parse(format!("not a number: {t:?}")))?;
        v.is_finite().then_some(v).ok_or_else(|| Error::Parse(format!("non-finite bound: {t:?}")))
    };
    let lo = num(parts[0])?;
    let hi = num(parts[1])?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a count: {:?}", parts[2])))?;
    if n == 0 {
        return Err(Error::Parse("grid axis needs at least one point".into()));
    }
    if hi < lo {
        return Err(Error::Parse(format!("grid axis has hi < lo: {s:?}")));
    }
    Ok(GridAxis { lo, hi, n })
}

/// Cartesian product of the axes, last axis varying fastest.
pub fn grid_points(axes: &[GridAxis]) -> Vec<Vec<f64>> {
    let values: Vec<Vec<f64>> = axes.iter().map(GridAxis::values).collect();
    let mut out = vec![Vec::new()];
    for vals in &values {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn points() {
        assert_eq!(parse_point("0, 1.5,-2e-1").unwrap(), vec![0.0, 1.5, -0.2]);
        assert!(parse_point("").is_err());
        assert!(parse_point("1,,2").is_err());
        assert!(parse_point("nan").is_err());
        assert!(parse_point("inf").is_err());
        assert_eq!(parse_point_list("0,0;3,4").unwrap(), vec![vec![0.0, 0.0], vec![3.0, 4.0]]);
    }

    #[test]
    fn grids() {
        let g = parse_grid("-1:1:21", 2).unwrap();
        assert_eq!(g.len(), 2);
        let pts = grid_points(&g);
        assert_eq!(pts.len(), 441);
        assert_eq!(pts[0], vec![-1.0, -1.0]);
        assert_eq!(pts[1][1], -0.9);
        assert_eq!(pts[440], vec![1.0, 1.0]);
        let g = parse_grid("0:0:1,0:2:3", 2).unwrap();
        assert_eq!(grid_points(&g), vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 2.0]]);
        assert!(parse_grid("0:1:2,0:1:2", 3).is_err());
        assert!(parse_grid("1:0:2", 1).is_err());
        assert!(parse_grid("0:1:0", 1).is_err());
        assert!(parse_grid("0:1", 1).is_err());
        assert!(parse_grid("0:1:1000000", 3).is_err());
    }

    proptest! {
        #[test]
        fn point_display_reparses(v in prop::collection::vec(-1e6f64..1e6, 1..8)) {
            let s = v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
            prop_assert_eq!(parse_point(&s).unwrap(), v);
        }

        #[test]
        fn axis_endpoints_exact(lo in -10f64..10.0, w in 0f64..5.0, n in 1usize..50) {
            let a = GridAxis { lo, hi: lo + w, n };
            let vals = a.values();
            prop_assert_eq!(vals.len(), n);
            prop_assert_eq!(vals[0], lo);
            if n > 1 { prop_assert_eq!(*vals.last().unwrap(), lo + w); }
            prop_assert!(vals.windows(2).all(|p| p[0] <= p[1]));
        }

        #[test]
        fn parsers_never_panic(s in ".{0,40}") {
            let _ = parse_point(&s);
            let _ = parse_grid(&s, 2);
        }
    }
}
