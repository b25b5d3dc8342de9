//! Parsers for function names, number lists and interval lists.

use anyhow::{anyhow, bail, Context, Result};
use opmod::ScalarFn;

/// `abs`, `kappa`, `tanh-half`, `phi:S`, `fa:A`, `linear:SLOPE`.
pub fn scalar_fn(s: &str) -> Result<ScalarFn> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let num = |what: &str| -> Result<f64> {
        let a = arg.ok_or_else(|| anyhow!("{name} needs a parameter, as in {name}:{what}"))?;
        a.parse::<f64>().with_context(|| format!("bad {what} in {s:?}"))
    };
    let f = match name {
        "abs" => ScalarFn::Abs,
        "kappa" => ScalarFn::Kappa,
        "tanh-half" => ScalarFn::TanhHalf,
        "phi" => ScalarFn::PhiS { s: num("S")? },
        "fa" => ScalarFn::FaKernel { a: num("A")? },
        "linear" => ScalarFn::linear(num("SLOPE")?, 0.0),
        _ => bail!("unknown function {s:?}; expected abs, kappa, tanh-half, phi:S, fa:A or linear:SLOPE"),
    };
    f.validate()?;
    Ok(f)
}

pub fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number {t:?}")))
        .collect()
}

pub fn interval(s: &str) -> Result<(f64, f64)> {
    match numbers(s)?[..] {
        [a, b] if a <= b => Ok((a, b)),
        [a, b] => bail!("empty interval [{a}, {b}]"),
        _ => bail!("interval must be LO,HI, got {s:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(scalar_fn("phi:2").unwrap(), ScalarFn::PhiS { s: 2.0 });
        assert!(scalar_fn("fa:-1").is_err());
        assert!(scalar_fn("sin").is_err());
        assert_eq!(interval("0, 1").unwrap(), (0.0, 1.0));
        assert!(interval("1,0").is_err());
    }
}
