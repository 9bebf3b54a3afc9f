//! Golden-file text format for exact expansions.
//!
//! ```text
//! # weight -2 index 1 dq 24 dz 2 trunc 50
//! n_num,r_num,coeff_num,coeff_den
//! 0,-2,1,1
//! ```

use super::series::{FourierJacobiSeries, DQ, DZ};
use crate::error::{Result, SjError};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use std::fmt::Write;

const COLUMNS: &str = "n_num,r_num,coeff_num,coeff_den";

fn fmt_rat(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serialize `s` in the golden format.
pub fn dump(s: &FourierJacobiSeries) -> String {
    let mut out = format!(
        "# weight {} index {} dq {DQ} dz {DZ} trunc {}\n{COLUMNS}\n",
        fmt_rat(s.weight()),
        fmt_rat(s.index),
        s.trunc()
    );
    for ((n, r), c) in &s.coeffs {
        writeln!(out, "{n},{r},{},{}", c.numer(), c.denom()).expect("write to string");
    }
    out
}

fn bad(msg: impl Into<String>) -> SjError {
    SjError::Config(format!("golden file: {}", msg.into()))
}

fn parse_rat(s: &str) -> Result<Rational64> {
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let a: i64 = a.parse().map_err(|_| bad(format!("bad number '{s}'")))?;
    let b: i64 = b.parse().map_err(|_| bad(format!("bad number '{s}'")))?;
    if b == 0 {
        return Err(bad("zero denominator"));
    }
    Ok(Rational64::new(a, b))
}

/// Parse a golden file.
pub fn parse(text: &str) -> Result<FourierJacobiSeries> {
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| bad("empty"))?;
    let toks: Vec<&str> = head.trim_start_matches('#').split_whitespace().collect();
    if toks.len() != 10 || toks[0] != "weight" || toks[2] != "index" || toks[4] != "dq" || toks[6] != "dz" || toks[8] != "trunc" {
        return Err(bad(format!("bad header '{head}'")));
    }
    let weight2 = parse_rat(toks[1])? * 2;
    if *weight2.denom() != 1 {
        return Err(bad("weight must be a multiple of 1/2"));
    }
    let index = parse_rat(toks[3])?;
    if toks[5] != DQ.to_string() || toks[7] != DZ.to_string() {
        return Err(bad(format!("denominators dq {} dz {} are not {DQ} and {DZ}", toks[5], toks[7])));
    }
    let trunc: i64 = toks[9].parse().map_err(|_| bad("bad trunc"))?;
    if lines.next() != Some(COLUMNS) {
        return Err(bad("missing column line"));
    }
    let mut s = FourierJacobiSeries::zero(*weight2.numer(), index, trunc * DQ);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad(format!("line {}: expected 4 fields", i + 3)));
        }
        let n: i64 = f[0].parse().map_err(|_| bad(format!("line {}: bad n", i + 3)))?;
        let r: i64 = f[1].parse().map_err(|_| bad(format!("line {}: bad r", i + 3)))?;
        let num: BigInt = f[2].parse().map_err(|_| bad(format!("line {}: bad numerator", i + 3)))?;
        let den: BigInt = f[3].parse().map_err(|_| bad(format!("line {}: bad denominator", i + 3)))?;
        if den == BigInt::from(0) {
            return Err(bad(format!("line {}: zero denominator", i + 3)));
        }
        s.set(n, r, BigRational::new(num, den));
    }
    Ok(s)
}

/// Whether `text` is exactly the dump of `s`.
pub fn check(text: &str, s: &FourierJacobiSeries) -> bool {
    text == dump(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::corpus::{phi_0_1, phi_m2_1, theta1};

    #[test]
    fn round_trip_is_bit_exact() {
        for s in [phi_m2_1(10).unwrap(), phi_0_1(10).unwrap(), theta1(5).unwrap()] {
            let t = dump(&s);
            let p = parse(&t).unwrap();
            assert_eq!(p.coeffs, s.coeffs);
            assert_eq!(dump(&p), t);
        }
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(parse("# weight 0\nn_num,r_num,coeff_num,coeff_den\n").is_err());
    }
}
