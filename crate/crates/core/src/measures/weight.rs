//! The weight `r` of the constraint functional.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::quadrature::gauss;
use crate::error::{Error, Result};

/// A positive weight on (0, 1).
///
/// Tables are interpolated linearly between nodes and extended by their end
/// values outside `[nodes[0], nodes[last]]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Constant(f64),
    /// `r(x) = x^alpha (1 - x)^beta`.
    Power { alpha: f64, beta: f64 },
    Table { nodes: Vec<f64>, values: Vec<f64> },
}

impl Weight {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidWeight(format!(
                "constant weight must be positive, got {value}"
            )));
        }
        Ok(Weight::Constant(value))
    }

    pub fn power(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0) {
            return Err(Error::InvalidWeight(format!(
                "power weight exponents must be >= 0, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Weight::Power { alpha, beta })
    }

    pub fn table(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::InvalidWeight(
                "table needs matching, nonempty node and value lists".into(),
            ));
        }
        if nodes.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::InvalidWeight("table abscissae must lie in (0, 1)".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidWeight(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
            return Err(Error::InvalidWeight("table values must be positive".into()));
        }
        Ok(Weight::Table { nodes, values })
    }

    /// Reads a CSV table with header `x,r`.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path.as_ref())?;
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "r" {
            return Err(Error::InvalidWeight(format!(
                "table header must be `x,r`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidWeight(format!("not a number in table: `{s}`")))
            };
            nodes.push(parse(&record[0])?);
            values.push(parse(&record[1])?);
        }
        Weight::table(nodes, values)
    }

    /// Evaluates `r(x)` for `0 < x < 1`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!("weight evaluated at x = {x} outside (0, 1)")));
        }
        Ok(self.value(x))
    }

    /// Unchecked evaluation; endpoints are allowed and may give 0.
    pub(crate) fn value(&self, x: f64) -> f64 {
        match self {
            Weight::Constant(c) => *c,
            Weight::Power { alpha, beta } => pow0(x, *alpha) * pow0(1.0 - x, *beta),
            Weight::Table { nodes, values } => {
                let last = nodes.len() - 1;
                if x <= nodes[0] {
                    return values[0];
                }
                if x >= nodes[last] {
                    return values[last];
                }
                let j = nodes.partition_point(|&t| t <= x) - 1;
                let t = (x - nodes[j]) / (nodes[j + 1] - nodes[j]);
                values[j] + t * (values[j + 1] - values[j])
            }
        }
    }

    /// `r'(x)` and `r''(x)` where they exist in closed form.
    pub(crate) fn derivatives(&self, x: f64) -> Option<(f64, f64, f64)> {
        match self {
            Weight::Constant(c) => Some((*c, 0.0, 0.0)),
            Weight::Power { alpha, beta } => {
                let r = self.value(x);
                let l1 = alpha / x - beta / (1.0 - x);
                let l2 = -alpha / (x * x) - beta / ((1.0 - x) * (1.0 - x));
                Some((r, r * l1, r * (l1 * l1 + l2)))
            }
            Weight::Table { .. } => None,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Weight::Constant(_) => true,
            Weight::Power { alpha, beta } => alpha == beta,
            Weight::Table { nodes, values } => {
                let n = nodes.len();
                (0..n).all(|i| {
                    (nodes[i] - (1.0 - nodes[n - 1 - i])).abs() < 1e-12
                        && (values[i] - values[n - 1 - i]).abs() <= 1e-12 * values[i]
                })
            }
        }
    }

    /// The weight `x ↦ r(1 - x)`.
    pub fn reflected(&self) -> Weight {
        match self {
            Weight::Constant(c) => Weight::Constant(*c),
            Weight::Power { alpha, beta } => Weight::Power {
                alpha: *beta,
                beta: *alpha,
            },
            Weight::Table { nodes, values } => Weight::Table {
                nodes: nodes.iter().rev().map(|x| 1.0 - x).collect(),
                values: values.iter().rev().copied().collect(),
            },
        }
    }

    /// `∫_a^b r(x)^p dx` for `0 <= a <= b <= 1`.
    pub fn integral_pow(&self, a: f64, b: f64, p: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Weight::Constant(c) => c.powf(p) * (b - a),
            Weight::Power { alpha, beta } => power_integral(a, b, alpha * p, beta * p),
            Weight::Table { nodes, .. } => {
                let mut total = 0.0;
                let mut lo = a;
                for &node in nodes.iter().filter(|&&t| t > a && t < b) {
                    total += gauss(lo, node, |x| self.value(x).powf(p));
                    lo = node;
                }
                total + gauss(lo, b, |x| self.value(x).powf(p))
            }
        }
    }

    /// `∫_a^b r(x) dx`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.integral_pow(a, b, 1.0)
    }
}

fn pow0(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

/// `∫_a^b x^p (1-x)^s dx` with panels kept at least their own length away
/// from the endpoint singularities; panels touching 0 or 1 use the binomial
/// series.
fn power_integral(a: f64, b: f64, p: f64, s: f64) -> f64 {
    if p == 0.0 && s == 0.0 {
        return b - a;
    }
    let mut total = 0.0;
    let mut stack = vec![(a, b)];
    while let Some((u, v)) = stack.pop() {
        if u == 0.0 && v <= 0.5 {
            total += endpoint_series(v, p, s);
        } else if v == 1.0 && u >= 0.5 {
            total += endpoint_series(1.0 - u, s, p);
        } else if u > 0.0 && v < 1.0 && v - u <= u.min(1.0 - v) {
            total += gauss(u, v, |x| pow0(x, p) * pow0(1.0 - x, s));
        } else {
            let m = 0.5 * (u + v);
            stack.push((u, m));
            stack.push((m, v));
        }
    }
    total
}

/// `∫_0^v x^p (1-x)^s dx` for `v <= 1/2`.
fn endpoint_series(v: f64, p: f64, s: f64) -> f64 {
    if p <= -1.0 {
        return f64::INFINITY;
    }
    let mut sum = 0.0;
    let mut coeff = 1.0;
    let mut vk = 1.0;
    for k in 0..200 {
        let term = coeff * vk / (p + k as f64 + 1.0);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        coeff *= (k as f64 - s) / (k as f64 + 1.0);
        vk *= v;
        if coeff == 0.0 {
            break;
        }
    }
    v.powf(p + 1.0) * sum
}

impl FromStr for Weight {
    type Err = Error;

    /// Parses `const:<v>`, `power:<alpha>,<beta>` or `table:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidWeight(format!("missing `:` in weight literal `{s}`")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidWeight(format!("bad number `{t}` in `{s}`")))
        };
        match kind {
            "const" => Weight::constant(num(rest)?),
            "power" => {
                let (a, b) = rest.split_once(',').ok_or_else(|| {
                    Error::InvalidWeight(format!("power weight needs `<alpha>,<beta>`: `{s}`"))
                })?;
                Weight::power(num(a)?, num(b)?)
            }
            "table" => Weight::from_csv_path(rest),
            other => Err(Error::InvalidWeight(format!("unknown weight kind `{other}`"))),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Constant(c) => write!(f, "const:{c}"),
            Weight::Power { alpha, beta } => write!(f, "power:{alpha},{beta}"),
            Weight::Table { nodes, .. } => write!(f, "table:<{} nodes>", nodes.len()),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_examples() {
        assert_eq!(Weight::constant(1.0).unwrap().eval(0.3).unwrap(), 1.0);
        let w: Weight = "power:1,1".parse().unwrap();
        assert_eq!(w.eval(0.5).unwrap(), 0.25);
        let t = Weight::table(vec![0.25, 0.75], vec![2.0, 4.0]).unwrap();
        assert!((t.eval(0.5).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_points_outside_interval() {
        let w = Weight::constant(1.0).unwrap();
        assert!(matches!(w.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(w.eval(1.2), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Weight::table(vec![0.5, 0.4], vec![1.0, 1.0]).is_err());
        assert!(Weight::table(vec![0.2, 0.4], vec![1.0, 0.0]).is_err());
        assert!(Weight::table(vec![0.0, 0.4], vec![1.0, 1.0]).is_err());
        assert!("spline:1".parse::<Weight>().is_err());
    }

    #[test]
    fn power_integral_matches_beta_function() {
        // B(3/2, 3/2) = pi / 8
        let w = Weight::power(0.5, 0.5).unwrap();
        let v = w.integral(0.0, 1.0);
        assert!((v - std::f64::consts::PI / 8.0).abs() < 1e-13, "{v}");
        let w = Weight::power(1.0, 1.0).unwrap();
        let pieces: f64 = (0..64).map(|i| w.integral(i as f64 / 64.0, (i + 1) as f64 / 64.0)).sum();
        assert!((pieces - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn table_integral_is_exact_for_linear_interpolant() {
        let t = Weight::table(vec![0.25, 0.75], vec![2.0, 4.0]).unwrap();
        // 2 * 0.25 + 3 * 0.5 + 4 * 0.25
        assert!((t.integral(0.0, 1.0) - 3.0).abs() < 1e-14);
    }
}
