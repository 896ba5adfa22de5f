//! Text syntax for group elements.
//!
//! A factor is `uKl`, `w1`, `w2`, `id`, `diag(e1,e2,e3,e4)` with entries such
//! as `p`, `p^2`, `p^-1` or rationals, or sixteen row-major rational entries.
//! Factors may be joined with `*`.

use super::{make_u_kl, mat_zero, weyl_w1, weyl_w2, GroupElement};
use crate::error::{Error, Result};
use crate::scalar::rational::{parse_rational, ppow, Rational};

fn diag_entry(s: &str, p: u32) -> Result<Rational> {
    let s = s.trim();
    if s == "p" {
        return Ok(ppow(p, 1));
    }
    if let Some(e) = s.strip_prefix("p^") {
        let e: i32 = e.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
        return Ok(ppow(p, e));
    }
    parse_rational(s)
}

fn parse_factor(s: &str, p: u32) -> Result<GroupElement> {
    let s = s.trim();
    match s {
        "uKl" | "u_Kl" => return Ok(make_u_kl()),
        "w1" => return Ok(weyl_w1()),
        "w2" => return Ok(weyl_w2()),
        "id" | "1" | "I" => return Ok(GroupElement::identity()),
        _ => {}
    }
    if let Some(inner) = s.strip_prefix("diag(").and_then(|r| r.strip_suffix(')')) {
        let es: Vec<&str> = inner.split(',').collect();
        if es.len() != 4 {
            return Err(Error::Parse(format!("diag needs four entries: {s:?}")));
        }
        let d: Vec<Rational> = es.iter().map(|e| diag_entry(e, p)).collect::<Result<_>>()?;
        return GroupElement::diag([d[0].clone(), d[1].clone(), d[2].clone(), d[3].clone()]);
    }
    let toks: Vec<&str> = s.split(|c: char| c.is_whitespace() || c == ',' || c == ';').filter(|t| !t.is_empty()).collect();
    if toks.len() != 16 {
        return Err(Error::Parse(format!("expected 16 entries, a diag(...) or a named element: {s:?}")));
    }
    let mut m = mat_zero();
    for (k, t) in toks.iter().enumerate() {
        m[k / 4][k % 4] = parse_rational(t)?;
    }
    GroupElement::new(m)
}

/// Parse a product of factors, with `p` bound to `prime`.
pub fn parse_element(s: &str, prime: u32) -> Result<GroupElement> {
    let mut acc = GroupElement::identity();
    let mut depth = 0usize;
    let mut start = 0usize;
    let bytes: Vec<char> = s.chars().collect();
    let mut parts = Vec::new();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '*' if depth == 0 => {
                parts.push(bytes[start..i].iter().collect::<String>());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(bytes[start..].iter().collect::<String>());
    for part in parts {
        acc = acc.mul(&parse_factor(&part, prime)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::TorusElement;

    #[test]
    fn parses_shorthand() {
        let g = parse_element("diag(p,p,1,1)", 2).unwrap();
        assert_eq!(g, TorusElement::new(1, 1, 1).to_element(2));
        let h = parse_element("diag(p^2, p, p, 1)", 3).unwrap();
        assert_eq!(h, TorusElement::new(2, 1, 2).to_element(3));
        assert_eq!(parse_element("uKl", 2).unwrap(), make_u_kl());
        let prod = parse_element("uKl*diag(p,p,1,1)", 2).unwrap();
        assert_eq!(prod, make_u_kl().mul(&g));
    }

    #[test]
    fn parses_entries() {
        let g = parse_element("1 0 0 0  0 1 0 0  0 0 1 0  0 0 0 1", 5).unwrap();
        assert_eq!(g, GroupElement::identity());
        assert!(parse_element("1 1 0 0  0 1 0 0  0 0 1 0  0 0 0 1", 5).is_err());
        assert!(parse_element("diag(p,1,1,1)", 5).is_err());
    }
}
