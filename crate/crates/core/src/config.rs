//! Textual parameters: element syntax, form shorthands, modulus lists.
//!
//! Elements: `theta`, `theta^k`, an integer `c` (the constant `c * 1`), or
//! exactly `e` comma-separated coordinates `c0,c1,...` on the basis
//! `1, t, ..., t^(e-1)`. Forms: `tr_x2`, `tr_theta_x2`, or `e` elements
//! separated by `;` giving `a_0; ...; a_(e-1)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::Code;
use crate::field::{Field, Fx};
use crate::qform::FormSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid {field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { field: field.into(), message: message.into() }
    }
}

pub fn parse_modulus(s: &str) -> Result<Vec<u32>, ConfigError> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| ConfigError::new("modulus", format!("`{t}` is not a coefficient"))))
        .collect()
}

pub fn parse_element(field: &Field, what: &str, s: &str) -> Result<Fx, ConfigError> {
    let s = s.trim();
    let err = |m: String| ConfigError::new(what, m);
    if let Some(rest) = s.strip_prefix("theta") {
        let k = match rest.strip_prefix('^') {
            None if rest.is_empty() => 1,
            Some(k) => k.trim().parse::<u64>().map_err(|_| err(format!("bad exponent in `{s}`")))?,
            None => return Err(err(format!("cannot parse `{s}`"))),
        };
        return Ok(field.primitive_pow(k));
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() == 1 {
        let c: i64 = parts[0].parse().map_err(|_| err(format!("cannot parse `{s}`")))?;
        return Ok(field.constant(c));
    }
    if parts.len() != field.e() {
        return Err(err(format!("expected {} coordinates, got {}", field.e(), parts.len())));
    }
    let coords = parts
        .iter()
        .map(|t| t.parse::<u32>().map_err(|_| err(format!("`{t}` is not a coordinate"))))
        .collect::<Result<Vec<_>, _>>()?;
    field.element(&coords).map_err(|e| err(e.to_string()))
}

pub fn parse_form(field: &Arc<Field>, s: &str) -> Result<FormSpec, ConfigError> {
    match s.trim() {
        "tr_x2" => Ok(FormSpec::tr_x2(field.clone())),
        "tr_theta_x2" => Ok(FormSpec::tr_theta_x2(field.clone())),
        other => {
            let coeffs = other
                .split(';')
                .enumerate()
                .map(|(i, t)| parse_element(field, &format!("form coefficient a_{i}"), t))
                .collect::<Result<Vec<_>, _>>()?;
            FormSpec::new(field.clone(), coeffs).map_err(|e| ConfigError::new("form", e.to_string()))
        }
    }
}

/// Everything needed to build one code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p: u32,
    pub e: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    pub form: String,
    pub alpha: String,
}

impl RunConfig {
    pub fn field(&self) -> Result<Arc<Field>, ConfigError> {
        let f = match &self.modulus {
            Some(m) => {
                if m.len() != self.e + 1 {
                    return Err(ConfigError::new("modulus", format!("degree {} does not match e = {}", m.len().saturating_sub(1), self.e)));
                }
                Field::with_modulus(self.p, m)
            }
            None => Field::new(self.p, self.e),
        };
        f.map(Arc::new).map_err(|e| ConfigError::new(if self.modulus.is_some() { "modulus" } else { "p/e" }, e.to_string()))
    }

    pub fn form(&self) -> Result<FormSpec, ConfigError> {
        parse_form(&self.field()?, &self.form)
    }

    pub fn build(&self) -> Result<Code, ConfigError> {
        let form = self.form()?;
        let alpha = parse_element(form.field(), "alpha", &self.alpha)?;
        Code::new(form, alpha).map_err(|e| ConfigError::new(if alpha.is_zero() { "alpha" } else { "form" }, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f81() -> Arc<Field> {
        Arc::new(Field::new(3, 4).unwrap())
    }

    #[test]
    fn element_syntax() {
        let f = f81();
        assert_eq!(parse_element(&f, "alpha", "theta").unwrap(), f.primitive());
        assert_eq!(parse_element(&f, "alpha", "theta^0").unwrap(), f.one());
        assert_eq!(parse_element(&f, "alpha", "theta^3").unwrap(), f.primitive_pow(3));
        assert_eq!(parse_element(&f, "alpha", "2").unwrap(), f.constant(2));
        assert_eq!(parse_element(&f, "alpha", "-1").unwrap(), f.constant(2));
        assert_eq!(parse_element(&f, "alpha", "0,1,0,0").unwrap(), f.basis_element(1));
        assert!(parse_element(&f, "alpha", "0,1").is_err());
        assert!(parse_element(&f, "alpha", "0,1,0,3").is_err());
        assert!(parse_element(&f, "alpha", "thetax").is_err());
    }

    #[test]
    fn form_syntax() {
        let f = f81();
        assert_eq!(parse_form(&f, "tr_theta_x2").unwrap().coeffs()[0], f.primitive());
        let mixed = parse_form(&f, "1; 0; theta^2; 0,0,1,0").unwrap();
        assert_eq!(mixed.coeffs(), &[f.one(), Fx::ZERO, f.primitive_pow(2), f.basis_element(2)]);
        let err = parse_form(&f, "1;0").unwrap_err();
        assert_eq!(err.field, "form");
    }

    #[test]
    fn config_errors_name_the_field() {
        let mut cfg = RunConfig { p: 3, e: 3, modulus: None, form: "tr_x2".into(), alpha: "0".into() };
        assert_eq!(cfg.build().unwrap_err().field, "alpha");
        cfg.alpha = "1".into();
        cfg.form = "0;0;0".into();
        assert_eq!(cfg.build().unwrap_err().field, "form");
        cfg.form = "tr_x2".into();
        cfg.modulus = Some(vec![1, 0, 0, 1]);
        assert_eq!(cfg.build().unwrap_err().field, "modulus");
        cfg.modulus = Some(vec![1, 2, 0, 1]);
        assert!(cfg.build().is_ok());
        cfg.p = 4;
        cfg.modulus = None;
        assert_eq!(cfg.build().unwrap_err().field, "p/e");
    }
}
