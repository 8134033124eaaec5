//! JSON state descriptors and the compact shorthand that compiles to them.
//!
//! ```json
//! {"kind": "cat", "xi0": [2.0, 0.0], "theta": 0.0}
//! {"kind": "product", "left": {"kind": "fock", "n": 0}, "right": {"kind": "thermal", "n_th": 0.5}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs and unknown keys are rejected.
//! Shorthand forms: `vacuum`, `coherent:RE[,IM]`, `cat:XI0[,THETA]`, `fock:N`,
//! `thermal:NTH`, `fockmix:N,P`, `entcat:XI0,+|-`,
//! `decohered:GAMMA_T[,NTH]:<state>`, `product:<state>;<state>`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{cat_state, decohere, entangled_cat, SingleModeState, TwoModeState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDescriptor {
    pub coeff: Complex64,
    pub amp: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairTermDescriptor {
    pub coeff: Complex64,
    pub amp1: Complex64,
    pub amp2: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDescriptor {
    pub weight: f64,
    pub state: StateDescriptor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateDescriptor {
    Cat {
        xi0: Complex64,
        #[serde(default)]
        theta: f64,
    },
    Fock {
        n: u32,
    },
    Thermal {
        n_th: f64,
    },
    CoherentSuperposition {
        terms: Vec<TermDescriptor>,
    },
    Mixture {
        components: Vec<ComponentDescriptor>,
    },
    Decohered {
        state: Box<StateDescriptor>,
        gamma_t: f64,
        #[serde(default)]
        n_th: f64,
    },
    PairSuperposition {
        terms: Vec<PairTermDescriptor>,
    },
    Product {
        left: Box<StateDescriptor>,
        right: Box<StateDescriptor>,
    },
}

/// A built state of either mode count.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyState {
    Single(SingleModeState),
    Two(TwoModeState),
}

impl AnyState {
    pub fn single(self) -> Result<SingleModeState> {
        match self {
            AnyState::Single(s) => Ok(s),
            AnyState::Two(_) => Err(Error::Descriptor("expected a single-mode state, got a two-mode state".into())),
        }
    }

    pub fn two(self) -> Result<TwoModeState> {
        match self {
            AnyState::Two(s) => Ok(s),
            AnyState::Single(_) => Err(Error::Descriptor(
                "expected a two-mode state (pair_superposition, product or mixture of those), got a single-mode state".into(),
            )),
        }
    }
}

impl StateDescriptor {
    pub fn build(&self) -> Result<AnyState> {
        Ok(match self {
            StateDescriptor::Cat { xi0, theta } => AnyState::Single(cat_state(*xi0, *theta)?),
            StateDescriptor::Fock { n } => AnyState::Single(SingleModeState::fock(*n)),
            StateDescriptor::Thermal { n_th } => AnyState::Single(SingleModeState::thermal(*n_th)?),
            StateDescriptor::CoherentSuperposition { terms } => {
                let t: Vec<_> = terms.iter().map(|t| (t.coeff, t.amp)).collect();
                AnyState::Single(SingleModeState::superposition(&t)?)
            }
            StateDescriptor::Decohered { state, gamma_t, n_th } => {
                AnyState::Single(decohere(&state.build()?.single()?, *gamma_t, *n_th)?)
            }
            StateDescriptor::PairSuperposition { terms } => {
                let t: Vec<_> = terms.iter().map(|t| (t.coeff, t.amp1, t.amp2)).collect();
                AnyState::Two(TwoModeState::pair_superposition(&t)?)
            }
            StateDescriptor::Product { left, right } => {
                AnyState::Two(TwoModeState::product(left.build()?.single()?, right.build()?.single()?))
            }
            StateDescriptor::Mixture { components } => {
                let built = components
                    .iter()
                    .map(|c| Ok((c.weight, c.state.build()?)))
                    .collect::<Result<Vec<_>>>()?;
                match built.first() {
                    None => return Err(Error::InvalidWeights("mixture has no components".into())),
                    Some((_, AnyState::Single(_))) => AnyState::Single(SingleModeState::mixture(
                        built.into_iter().map(|(w, s)| Ok((w, s.single()?))).collect::<Result<_>>()?,
                    )?),
                    Some((_, AnyState::Two(_))) => AnyState::Two(TwoModeState::mixture(
                        built.into_iter().map(|(w, s)| Ok((w, s.two()?))).collect::<Result<_>>()?,
                    )?),
                }
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

impl From<&SingleModeState> for StateDescriptor {
    fn from(s: &SingleModeState) -> Self {
        match s {
            SingleModeState::CoherentSuperposition { terms } => StateDescriptor::CoherentSuperposition {
                terms: terms.iter().map(|&(coeff, amp)| TermDescriptor { coeff, amp }).collect(),
            },
            SingleModeState::Fock { n } => StateDescriptor::Fock { n: *n },
            SingleModeState::Thermal { n_th } => StateDescriptor::Thermal { n_th: *n_th },
            SingleModeState::Mixture { components } => StateDescriptor::Mixture {
                components: components
                    .iter()
                    .map(|(w, s)| ComponentDescriptor { weight: *w, state: s.into() })
                    .collect(),
            },
            SingleModeState::Decohered { inner, gamma_t, n_th } => StateDescriptor::Decohered {
                state: Box::new(inner.as_ref().into()),
                gamma_t: *gamma_t,
                n_th: *n_th,
            },
        }
    }
}

impl From<&TwoModeState> for StateDescriptor {
    fn from(s: &TwoModeState) -> Self {
        match s {
            TwoModeState::PairSuperposition { terms } => StateDescriptor::PairSuperposition {
                terms: terms
                    .iter()
                    .map(|&(coeff, amp1, amp2)| PairTermDescriptor { coeff, amp1, amp2 })
                    .collect(),
            },
            TwoModeState::Product { left, right } => StateDescriptor::Product {
                left: Box::new(left.as_ref().into()),
                right: Box::new(right.as_ref().into()),
            },
            TwoModeState::Mixture { components } => StateDescriptor::Mixture {
                components: components
                    .iter()
                    .map(|(w, s)| ComponentDescriptor { weight: *w, state: s.into() })
                    .collect(),
            },
        }
    }
}

fn bad(spec: &str, why: &str) -> Error {
    Error::Descriptor(format!("cannot parse state '{spec}': {why}"))
}

fn numbers(spec: &str, args: &str, min: usize, max: usize) -> Result<Vec<f64>> {
    let vals = args
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad(spec, &format!("'{t}' is not a number"))))
        .collect::<Result<Vec<_>>>()?;
    if vals.len() < min || vals.len() > max {
        return Err(bad(spec, &format!("expected {min} to {max} numbers")));
    }
    Ok(vals)
}

/// Compiles shorthand into a descriptor.
pub fn parse_shorthand(spec: &str) -> Result<StateDescriptor> {
    let spec = spec.trim();
    if spec == "vacuum" {
        return Ok(StateDescriptor::Fock { n: 0 });
    }
    let (head, args) = spec.split_once(':').ok_or_else(|| bad(spec, "missing ':' after the state kind"))?;
    let one = Complex64::new(1.0, 0.0);
    Ok(match head {
        "coherent" => {
            let v = numbers(spec, args, 1, 2)?;
            let amp = Complex64::new(v[0], v.get(1).copied().unwrap_or(0.0));
            StateDescriptor::CoherentSuperposition { terms: vec![TermDescriptor { coeff: one, amp }] }
        }
        "cat" => {
            let v = numbers(spec, args, 1, 2)?;
            StateDescriptor::Cat { xi0: Complex64::new(v[0], 0.0), theta: v.get(1).copied().unwrap_or(0.0) }
        }
        "fock" => StateDescriptor::Fock {
            n: args.trim().parse().map_err(|_| bad(spec, "photon number must be a non-negative integer"))?,
        },
        "thermal" => StateDescriptor::Thermal { n_th: numbers(spec, args, 1, 1)?[0] },
        "fockmix" => {
            let (n, p) = args.split_once(',').ok_or_else(|| bad(spec, "expected N,P"))?;
            let n: u32 = n.trim().parse().map_err(|_| bad(spec, "photon number must be a non-negative integer"))?;
            let p = numbers(spec, p, 1, 1)?[0];
            StateDescriptor::Mixture {
                components: vec![
                    ComponentDescriptor { weight: 1.0 - p, state: StateDescriptor::Fock { n } },
                    ComponentDescriptor { weight: p, state: StateDescriptor::Fock { n: 0 } },
                ],
            }
        }
        "entcat" => {
            let (x, sign) = args.split_once(',').ok_or_else(|| bad(spec, "expected XI0,+ or XI0,-"))?;
            let sign: i8 = match sign.trim() {
                "+" | "+1" | "1" => 1,
                "-" | "-1" => -1,
                other => return Err(bad(spec, &format!("sign '{other}' is not + or -"))),
            };
            let xi0 = Complex64::new(numbers(spec, x, 1, 1)?[0], 0.0);
            (&entangled_cat(xi0, sign)?).into()
        }
        "decohered" => {
            let (params, inner) = args.split_once(':').ok_or_else(|| bad(spec, "expected GAMMA_T[,NTH]:<state>"))?;
            let v = numbers(spec, params, 1, 2)?;
            StateDescriptor::Decohered {
                state: Box::new(parse_shorthand(inner)?),
                gamma_t: v[0],
                n_th: v.get(1).copied().unwrap_or(0.0),
            }
        }
        "product" => {
            let (l, r) = args.split_once(';').ok_or_else(|| bad(spec, "expected <state>;<state>"))?;
            StateDescriptor::Product { left: Box::new(parse_shorthand(l)?), right: Box::new(parse_shorthand(r)?) }
        }
        other => return Err(bad(spec, &format!("unknown kind '{other}'"))),
    })
}

/// JSON when the argument starts with `{`, shorthand otherwise.
pub fn parse_state(arg: &str) -> Result<StateDescriptor> {
    let t = arg.trim();
    if t.starts_with('{') {
        serde_json::from_str(t).map_err(|e| {
            Error::Descriptor(format!(
                "invalid state JSON ({e}); expected {{\"kind\": cat|fock|thermal|coherent_superposition|mixture|decohered|pair_superposition|product, ...}} with complex numbers as [re, im]"
            ))
        })
    } else {
        parse_shorthand(t)
    }
}
