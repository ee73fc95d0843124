//! Canonical text form: `coeff h^k x^(a1,..,ad) y^(b1,..,bd) dx{S}`, terms joined by ` + `.

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::hseries::HSeries;
use crate::mono::{Exps, GSet, MAX_DIM};
use crate::profile::Profile;
use crate::weyl::{WMono, WeylElement};

pub fn format_hseries(s: &HSeries) -> String {
    let d = s.profile().dim;
    let terms: Vec<String> = s
        .terms()
        .map(|(k, e, c)| format!("{c} h^{k} x^{}", e.fmt_dim(d)))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn format_weyl(w: &WeylElement) -> String {
    let d = w.profile().dim;
    let terms: Vec<String> = w
        .terms()
        .iter()
        .map(|(m, c)| {
            format!(
                "{c} h^{} x^{} y^{} dx{{{}}}",
                m.k,
                m.x.fmt_dim(d),
                m.y.fmt_dim(d),
                m.dx.fmt_one_based()
            )
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

struct RawTerm {
    coeff: CRational,
    k: u32,
    x: Exps,
    y: Exps,
    dx: GSet,
    dx_negative: bool,
}

fn parse_tuple(tok: &str, dim: usize) -> Result<Exps> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected (..) in `{tok}`")))?;
    let parts: Vec<&str> = if inner.trim().is_empty() {
        vec![]
    } else {
        inner.split(',').collect()
    };
    if parts.len() != dim {
        return Err(Error::Parse(format!(
            "exponent `{tok}` has {} entries, dim is {dim}",
            parts.len()
        )));
    }
    let mut e = [0u8; MAX_DIM];
    for (i, p) in parts.iter().enumerate() {
        e[i] = p
            .trim()
            .parse::<u8>()
            .map_err(|_| Error::Parse(format!("bad exponent `{p}`")))?;
    }
    Ok(Exps(e))
}

/// Parses `{i1,..}` (1-based), returning the set and whether sorting it flips the sign.
fn parse_dx(tok: &str, dim: usize) -> Result<(GSet, bool)> {
    let inner = tok
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Error::Parse(format!("expected {{..}} in `{tok}`")))?;
    let mut set = GSet::EMPTY;
    let mut neg = false;
    if inner.trim().is_empty() {
        return Ok((set, neg));
    }
    for p in inner.split(',') {
        let i: usize = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad dx index `{p}`")))?;
        if i == 0 || i > dim {
            return Err(Error::Parse(format!("dx index {i} out of range 1..={dim}")));
        }
        // append on the right: set ∧ dx^{i}
        let (s, n) = set
            .wedge(&GSet::single(i - 1))
            .ok_or_else(|| Error::Parse(format!("repeated dx index {i}")))?;
        set = s;
        neg ^= n;
    }
    Ok((set, neg))
}

fn parse_term(t: &[&str], dim: usize) -> Result<RawTerm> {
    let mut raw = RawTerm {
        coeff: CRational::one(),
        k: 0,
        x: Exps::ZERO,
        y: Exps::ZERO,
        dx: GSet::EMPTY,
        dx_negative: false,
    };
    let mut rest = t;
    if let Some(first) = t.first() {
        let is_tag = first.starts_with("h^")
            || first.starts_with("x^")
            || first.starts_with("y^")
            || first.starts_with("dx{");
        if !is_tag {
            let s = first
                .strip_prefix('-')
                .map(|r| (true, r))
                .unwrap_or((false, first));
            raw.coeff = match s {
                (true, r) if r.is_empty() => CRational::from_int(-1),
                _ => first.parse()?,
            };
            rest = &t[1..];
        }
    }
    for tok in rest {
        if let Some(v) = tok.strip_prefix("h^") {
            raw.k = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad ℏ power `{tok}`")))?;
        } else if let Some(v) = tok.strip_prefix("x^") {
            raw.x = parse_tuple(v, dim)?;
        } else if let Some(v) = tok.strip_prefix("y^") {
            raw.y = parse_tuple(v, dim)?;
        } else if let Some(v) = tok.strip_prefix("dx") {
            let (s, n) = parse_dx(v, dim)?;
            raw.dx = s;
            raw.dx_negative = n;
        } else {
            return Err(Error::Parse(format!("unexpected token `{tok}`")));
        }
    }
    Ok(raw)
}

fn split_terms(s: &str) -> Vec<Vec<&str>> {
    let mut out = vec![];
    let mut cur = vec![];
    for tok in s.split_whitespace() {
        if tok == "+" {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(tok);
        }
    }
    out.push(cur);
    out
}

fn parse_raw(s: &str, dim: usize) -> Result<Vec<RawTerm>> {
    let s = s.trim();
    if s == "0" || s.is_empty() {
        return Ok(vec![]);
    }
    split_terms(s)
        .iter()
        .map(|t| {
            if t.is_empty() {
                Err(Error::Parse(format!("empty term in `{s}`")))
            } else {
                parse_term(t, dim)
            }
        })
        .collect()
}

pub fn parse_hseries(p: &Profile, s: &str) -> Result<HSeries> {
    let mut r = HSeries::zero(p);
    for t in parse_raw(s, p.dim)? {
        if !t.y.is_zero() || !t.dx.is_empty() {
            return Err(Error::Parse("base series cannot contain y or dx".into()));
        }
        r.add_term(t.k, t.x, &t.coeff);
    }
    Ok(r)
}

pub fn parse_weyl(p: &Profile, s: &str) -> Result<WeylElement> {
    let mut r = WeylElement::zero(p);
    for t in parse_raw(s, p.dim)? {
        let c = if t.dx_negative { -t.coeff } else { t.coeff };
        r.add_term(
            WMono {
                k: t.k,
                x: t.x,
                y: t.y,
                dx: t.dx,
            },
            &c,
        );
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_hseries() {
        let p = Profile::desk();
        let s = parse_hseries(
            &p,
            "1/2+0/1*i h^1 x^(1,0) + -3 h^0 x^(0,2) + 2*i h^2 x^(0,0)",
        )
        .unwrap();
        let t = format_hseries(&s);
        assert_eq!(
            t,
            "-3/1+0/1*i h^0 x^(0,2) + 1/2+0/1*i h^1 x^(1,0) + 0/1+2/1*i h^2 x^(0,0)"
        );
        assert_eq!(parse_hseries(&p, &t).unwrap(), s);
        assert_eq!(format_hseries(&HSeries::zero(&p)), "0");
    }

    #[test]
    fn round_trip_weyl_with_sign() {
        let p = Profile::desk();
        let w = parse_weyl(&p, "1 y^(1,0) dx{2,1}").unwrap();
        let t = format_weyl(&w);
        assert_eq!(t, "-1/1+0/1*i h^0 x^(0,0) y^(1,0) dx{1,2}");
        assert_eq!(parse_weyl(&p, &t).unwrap(), w);
    }

    #[test]
    fn parse_errors() {
        let p = Profile::desk();
        assert!(parse_hseries(&p, "1 x^(1,0,0)").is_err());
        assert!(parse_hseries(&p, "1 y^(1,0)").is_err());
        assert!(parse_weyl(&p, "1 dx{3}").is_err());
        assert!(parse_hseries(&p, "1 + + 2").is_err());
    }
}
