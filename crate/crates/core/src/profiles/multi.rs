use serde::{Deserialize, Serialize};

use super::{CompactonShape, ModelParams};
use crate::error::{Error, Result};

/// One signed, shifted compacton `ε Φ_{B,c}(x − a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub sign: f64,
    pub shift: f64,
    pub params: ModelParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiCompacton {
    pub components: Vec<Component>,
}

/// `Σ ε_i Φ_{B_i,c}(x − a_i)` on `grid`. Supports may touch but not overlap.
pub fn assemble_multi(spec: &MultiCompacton, grid: &[f64]) -> Result<Vec<f64>> {
    let comps = &spec.components;
    if let Some(first) = comps.first() {
        if comps.iter().any(|k| k.params.c != first.params.c) {
            return Err(Error::InvalidParams("all components must share one speed c".into()));
        }
    }
    if comps.iter().any(|k| k.sign != 1.0 && k.sign != -1.0) {
        return Err(Error::InvalidParams("component signs must be +1 or -1".into()));
    }
    let shapes = comps.iter().map(|k| CompactonShape::new(&k.params)).collect::<Result<Vec<_>>>()?;
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            let (ai, wi) = (comps[i].shift, shapes[i].half_width());
            let (aj, wj) = (comps[j].shift, shapes[j].half_width());
            if (ai - aj).abs() < wi + wj {
                return Err(Error::Overlap { first: i, second: j });
            }
        }
    }
    Ok(grid
        .iter()
        .map(|&x| comps.iter().zip(&shapes).map(|(k, s)| k.sign * s.value(x - k.shift)).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(sign: f64, shift: f64) -> Component {
        Component { sign, shift, params: ModelParams::compacton(4.0, 0.0, 1.0) }
    }

    #[test]
    fn overlap_is_rejected_with_the_pair() {
        let spec = MultiCompacton { components: vec![bump(1.0, 0.0), bump(1.0, 20.0), bump(1.0, 1.0)] };
        assert_eq!(assemble_multi(&spec, &[0.0]), Err(Error::Overlap { first: 0, second: 2 }));
    }

    #[test]
    fn negative_sign_flips_the_field() {
        let spec = MultiCompacton { components: vec![bump(-1.0, 0.0)] };
        let grid: Vec<f64> = (0..50).map(|i| -3.0 + 0.12 * i as f64).collect();
        let field = assemble_multi(&spec, &grid).unwrap();
        let shape = CompactonShape::new(&spec.components[0].params).unwrap();
        for (x, f) in grid.iter().zip(&field) {
            assert_eq!(*f, -shape.value(*x));
        }
    }

    #[test]
    fn tangent_supports_are_allowed() {
        let w = std::f64::consts::PI / 2f64.sqrt();
        let spec = MultiCompacton { components: vec![bump(1.0, -w), bump(1.0, w)] };
        assert!(assemble_multi(&spec, &[0.0]).is_ok());
    }
}
