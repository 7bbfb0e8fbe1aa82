use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// Sampling domain for a symbol during numeric zero testing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Real,
    Positive,
    Negative,
    Interval { lo: f64, hi: f64 },
}

impl Domain {
    /// Range that random rationals are drawn from.
    pub fn sampling_range(&self) -> (f64, f64, bool) {
        match self {
            // the bool asks for a random sign
            Domain::Real => (0.2, 2.0, true),
            Domain::Positive => (0.2, 2.0, false),
            Domain::Negative => (-2.0, -0.2, false),
            Domain::Interval { lo, hi } => (*lo, *hi, false),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolRole {
    Parameter,
    Variable,
    Function,
}

/// Symbols the parser accepts, their roles, and sampling assumptions.
#[derive(Clone, Debug, Default)]
pub struct Context {
    params: BTreeSet<String>,
    vars: BTreeSet<String>,
    funcs: BTreeSet<String>,
    assumptions: BTreeMap<String, Domain>,
}

/// Jet coordinate names: a dependent or independent base name optionally
/// followed by `_` and a string of `t`s then `a`s.
pub fn is_jet_coordinate(name: &str) -> bool {
    const BASES: [&str; 7] = ["t", "a", "u", "p", "rho", "s", "T"];
    let (base, suffix) = match name.split_once('_') {
        Some((b, s)) => (b, Some(s)),
        None => (name, None),
    };
    if !BASES.contains(&base) {
        return false;
    }
    match suffix {
        None => true,
        Some(s) => {
            if matches!(base, "t" | "a") || s.is_empty() {
                return false;
            }
            let ts = s.chars().take_while(|&c| c == 't').count();
            s[ts..].chars().all(|c| c == 'a')
        }
    }
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn with_param(mut self, name: &str) -> Context {
        self.params.insert(name.to_string());
        self
    }

    pub fn with_var(mut self, name: &str) -> Context {
        self.vars.insert(name.to_string());
        self
    }

    pub fn with_func(mut self, name: &str) -> Context {
        self.funcs.insert(name.to_string());
        self
    }

    pub fn assume(mut self, name: &str, domain: Domain) -> Context {
        self.assumptions.insert(name.to_string(), domain);
        self
    }

    pub fn add_param(&mut self, name: &str) {
        self.params.insert(name.to_string());
    }

    pub fn add_var(&mut self, name: &str) {
        self.vars.insert(name.to_string());
    }

    pub fn add_func(&mut self, name: &str) {
        self.funcs.insert(name.to_string());
    }

    pub fn set_assumption(&mut self, name: &str, domain: Domain) {
        self.assumptions.insert(name.to_string(), domain);
    }

    pub fn role(&self, name: &str) -> Option<SymbolRole> {
        if self.funcs.contains(name) {
            Some(SymbolRole::Function)
        } else if self.params.contains(name) {
            Some(SymbolRole::Parameter)
        } else if self.vars.contains(name) || is_jet_coordinate(name) {
            Some(SymbolRole::Variable)
        } else {
            None
        }
    }

    pub fn is_function(&self, name: &str) -> bool {
        self.funcs.contains(name)
    }

    pub fn domain(&self, name: &str) -> Domain {
        if let Some(d) = self.assumptions.get(name) {
            return d.clone();
        }
        // densities and temperatures are sampled positive unless told otherwise
        let base = name.split('_').next().unwrap_or(name);
        if name == base && matches!(base, "rho" | "T" | "p") {
            Domain::Positive
        } else {
            Domain::Real
        }
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|s| s.as_str())
    }

    pub fn funcs(&self) -> impl Iterator<Item = &str> {
        self.funcs.iter().map(|s| s.as_str())
    }

    /// Union of two contexts. Assumptions in `other` win.
    pub fn merged(&self, other: &Context) -> Context {
        let mut out = self.clone();
        out.params.extend(other.params.iter().cloned());
        out.vars.extend(other.vars.iter().cloned());
        out.funcs.extend(other.funcs.iter().cloned());
        for (k, v) in &other.assumptions {
            out.assumptions.insert(k.clone(), v.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_names() {
        for ok in ["u", "u_t", "u_ta", "rho_aa", "T_ttaa", "t", "s_a"] {
            assert!(is_jet_coordinate(ok), "{ok}");
        }
        for bad in ["u_at", "t_a", "x", "u_", "rho_x", "zeta"] {
            assert!(!is_jet_coordinate(bad), "{bad}");
        }
    }

    #[test]
    fn roles() {
        let ctx = Context::new().with_param("lambda").with_func("F");
        assert_eq!(ctx.role("lambda"), Some(SymbolRole::Parameter));
        assert_eq!(ctx.role("F"), Some(SymbolRole::Function));
        assert_eq!(ctx.role("u_ta"), Some(SymbolRole::Variable));
        assert_eq!(ctx.role("mystery"), None);
        assert_eq!(ctx.domain("rho"), Domain::Positive);
        assert_eq!(ctx.domain("u"), Domain::Real);
    }
}
