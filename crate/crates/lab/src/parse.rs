//! Command-line input formats. Spaces are JSON descriptors such as
//! `{"kind":"lp","dim":3,"p":1.5}` or the shorthand `lp:3:1.5`, `l1:2`,
//! `linf:2`, `euclidean:4`; vectors are JSON arrays or comma lists; matrices
//! are row-major JSON arrays of rows.

use normderiv_core::{Relation, SpaceDescriptor, Vector};

use crate::error::LabError;

fn bad(what: &str, input: &str, why: impl std::fmt::Display) -> LabError {
    LabError::Input(format!("cannot read {what} from {input:?}: {why}"))
}

pub fn space(input: &str) -> Result<SpaceDescriptor, LabError> {
    let s = input.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| bad("space", input, e));
    }
    let parts: Vec<&str> = s.split(':').collect();
    let dim = |i: usize| -> Result<usize, LabError> {
        parts
            .get(i)
            .ok_or_else(|| bad("space", input, "missing dimension"))?
            .parse()
            .map_err(|e| bad("space", input, e))
    };
    let space = match parts[0].to_ascii_lowercase().as_str() {
        "l1" if parts.len() == 2 => SpaceDescriptor::L1(dim(1)?),
        "linf" if parts.len() == 2 => SpaceDescriptor::LInf(dim(1)?),
        "euclidean" | "l2" if parts.len() == 2 => SpaceDescriptor::Euclidean(dim(1)?),
        "lp" if parts.len() == 3 => {
            let p: f64 = parts[2].parse().map_err(|e| bad("space", input, e))?;
            SpaceDescriptor::Lp { dim: dim(1)?, p }
        }
        _ => {
            return Err(bad(
                "space",
                input,
                "expected l1:N, linf:N, euclidean:N, lp:N:P or JSON",
            ))
        }
    };
    space.validate()?;
    Ok(space)
}

pub fn numbers(what: &str, input: &str) -> Result<Vec<f64>, LabError> {
    let s = input.trim();
    let v: Vec<f64> = if s.starts_with('[') {
        serde_json::from_str(s).map_err(|e| bad(what, input, e))?
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(what, input, e))?
    };
    if v.iter().any(|c| !c.is_finite()) {
        return Err(bad(what, input, "coordinates must be finite"));
    }
    Ok(v)
}

pub fn vector(input: &str) -> Result<Vector, LabError> {
    numbers("vector", input).map(Vector::new)
}

pub fn matrix(input: &str) -> Result<Vec<Vec<f64>>, LabError> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(input.trim()).map_err(|e| bad("matrix", input, e))?;
    if rows.iter().flatten().any(|c| !c.is_finite()) {
        return Err(bad("matrix", input, "entries must be finite"));
    }
    Ok(rows)
}

pub fn relation(input: &str) -> Result<Relation, LabError> {
    match input.trim().to_ascii_lowercase().as_str() {
        "bj" | "birkhoff-james" => Ok(Relation::BirkhoffJames),
        "rho" => Ok(Relation::Rho),
        "rho+" | "rho-plus" | "rho_plus" => Ok(Relation::RhoPlus),
        "rho-" | "rho-minus" | "rho_minus" => Ok(Relation::RhoMinus),
        _ => Err(bad("relation", input, "expected bj, rho, rho+ or rho-")),
    }
}

/// `key=value` tolerance overrides.
pub fn tolerance(input: &str) -> Result<(String, f64), LabError> {
    let (k, v) = input
        .split_once('=')
        .ok_or_else(|| bad("tolerance", input, "expected key=value"))?;
    let v: f64 = v.trim().parse().map_err(|e| bad("tolerance", input, e))?;
    Ok((k.trim().to_string(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_and_json_spaces_agree() {
        assert_eq!(
            space("lp:3:1.5").unwrap(),
            space(r#"{"kind":"lp","dim":3,"p":1.5}"#).unwrap()
        );
        assert_eq!(space("LINF:2").unwrap(), SpaceDescriptor::LInf(2));
        assert!(space("lp:3:0.5").is_err());
        assert!(space("l7:2").is_err());
    }

    #[test]
    fn vectors_from_lists() {
        assert_eq!(vector("1, -2.5").unwrap(), Vector::from([1.0, -2.5]));
        assert_eq!(vector("[0,1]").unwrap(), Vector::from([0.0, 1.0]));
        assert!(vector("1,nan").is_err());
    }

    #[test]
    fn relations_and_tolerances() {
        assert_eq!(relation("rho+").unwrap(), Relation::RhoPlus);
        assert!(relation("orthogonal").is_err());
        assert_eq!(
            tolerance("exact=1e-6").unwrap(),
            ("exact".to_string(), 1e-6)
        );
        assert!(tolerance("exact").is_err());
    }
}
