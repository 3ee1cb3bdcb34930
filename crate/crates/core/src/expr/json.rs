//! JSON wire form of [`ExprNode`].
//!
//! ```json
//! {"kind":"cos","child":{"kind":"poly","dim":1,"terms":[{"exp":[1],"re":1.0,"im":0.0}]}}
//! ```

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::scalar::{Cx, Real};

use super::{ExprNode, MultiPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JsonError {
    #[error("expression json: missing or invalid field `{0}`")]
    Field(&'static str),
    #[error("expression json: unknown kind `{0}`")]
    UnknownKind(String),
    #[error("expression json: {0}")]
    Invalid(String),
}

fn num<T: Real>(x: T) -> Value {
    json!(x.to_f64().unwrap_or(f64::NAN))
}

pub(super) fn to_json<T: Real>(e: &ExprNode<T>) -> Value {
    match e {
        ExprNode::Const(c) => json!({"kind": "const", "re": num(c.re), "im": num(c.im)}),
        ExprNode::Poly(p) => {
            let terms: Vec<Value> = p
                .terms()
                .map(|(exp, c)| json!({"exp": exp, "re": num(c.re), "im": num(c.im)}))
                .collect();
            json!({"kind": "poly", "dim": p.dim(), "terms": terms})
        }
        ExprNode::Cos(c) => json!({"kind": "cos", "child": to_json(c)}),
        ExprNode::Sin(c) => json!({"kind": "sin", "child": to_json(c)}),
        ExprNode::Exp(c) => json!({"kind": "exp", "child": to_json(c)}),
        ExprNode::Sum(cs) => {
            json!({"kind": "sum", "children": cs.iter().map(to_json).collect::<Vec<_>>()})
        }
        ExprNode::Product(cs) => {
            json!({"kind": "product", "children": cs.iter().map(to_json).collect::<Vec<_>>()})
        }
        ExprNode::Quotient(n, d) => {
            json!({"kind": "quotient", "num": to_json(n), "den": to_json(d)})
        }
        ExprNode::Scale(s, c) => {
            json!({"kind": "scale", "re": num(s.re), "im": num(s.im), "child": to_json(c)})
        }
    }
}

fn obj(v: &Value) -> Result<&Map<String, Value>, JsonError> {
    v.as_object()
        .ok_or_else(|| JsonError::Invalid("expected an object".into()))
}

fn real<T: Real>(m: &Map<String, Value>, key: &'static str) -> Result<T, JsonError> {
    m.get(key)
        .and_then(Value::as_f64)
        .map(T::lit)
        .ok_or(JsonError::Field(key))
}

fn complex<T: Real>(m: &Map<String, Value>) -> Result<Cx<T>, JsonError> {
    Ok(Cx::new(real(m, "re")?, real(m, "im")?))
}

fn child<T: Real>(m: &Map<String, Value>, key: &'static str) -> Result<ExprNode<T>, JsonError> {
    from_json(m.get(key).ok_or(JsonError::Field(key))?)
}

pub(super) fn from_json<T: Real>(v: &Value) -> Result<ExprNode<T>, JsonError> {
    let m = obj(v)?;
    let kind = m
        .get("kind")
        .and_then(Value::as_str)
        .ok_or(JsonError::Field("kind"))?;
    Ok(match kind {
        "const" => ExprNode::Const(complex(m)?),
        "poly" => {
            let dim = m
                .get("dim")
                .and_then(Value::as_u64)
                .ok_or(JsonError::Field("dim"))? as usize;
            let terms = m
                .get("terms")
                .and_then(Value::as_array)
                .ok_or(JsonError::Field("terms"))?;
            let mut parsed = Vec::with_capacity(terms.len());
            for t in terms {
                let tm = obj(t)?;
                let exp = tm
                    .get("exp")
                    .and_then(Value::as_array)
                    .ok_or(JsonError::Field("exp"))?
                    .iter()
                    .map(|x| x.as_u64().map(|k| k as u32).ok_or(JsonError::Field("exp")))
                    .collect::<Result<Vec<u32>, _>>()?;
                if exp.len() != dim {
                    return Err(JsonError::Invalid(format!(
                        "exponent vector of length {} in a polynomial of dimension {dim}",
                        exp.len()
                    )));
                }
                parsed.push((exp, complex(tm)?));
            }
            ExprNode::Poly(MultiPoly::from_terms(dim, parsed))
        }
        "cos" => ExprNode::cos(child(m, "child")?),
        "sin" => ExprNode::sin(child(m, "child")?),
        "exp" => ExprNode::exp(child(m, "child")?),
        "sum" | "product" => {
            let cs = m
                .get("children")
                .and_then(Value::as_array)
                .ok_or(JsonError::Field("children"))?
                .iter()
                .map(from_json)
                .collect::<Result<Vec<_>, _>>()?;
            if kind == "sum" {
                ExprNode::Sum(cs)
            } else {
                ExprNode::Product(cs)
            }
        }
        "quotient" => ExprNode::quotient(child(m, "num")?, child(m, "den")?),
        "scale" => ExprNode::Scale(complex(m)?, Box::new(child(m, "child")?)),
        other => return Err(JsonError::UnknownKind(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::LinearForm;

    #[test]
    fn wire_names() {
        let e = ExprNode::<f64>::cos(ExprNode::Poly(MultiPoly::var(1, 0)));
        let v = to_json(&e);
        assert_eq!(v["kind"], "cos");
        assert_eq!(v["child"]["kind"], "poly");
        assert_eq!(v["child"]["dim"], 1);
        assert_eq!(v["child"]["terms"][0]["exp"], json!([1]));
        assert_eq!(v["child"]["terms"][0]["re"], 1.0);
    }

    #[test]
    fn round_trip() {
        let form = LinearForm::new(vec![Cx::new(1.0, 0.5), Cx::new(-2.0, 0.0)]);
        let e = ExprNode::<f64>::Sum(vec![
            ExprNode::Scale(
                Cx::new(0.0, 2.0),
                Box::new(ExprNode::sin(ExprNode::Poly(form.to_poly().pow(3)))),
            ),
            ExprNode::quotient(
                ExprNode::Const(Cx::new(1.0, 0.0)),
                ExprNode::exp(ExprNode::Poly(form.to_poly())),
            ),
            ExprNode::Product(vec![ExprNode::cos(ExprNode::Poly(form.to_poly()))]),
        ]);
        let back: ExprNode<f64> = from_json(&to_json(&e)).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn rejects_unknown_kind() {
        let v = json!({"kind": "tan", "child": {"kind": "const", "re": 0.0, "im": 0.0}});
        assert_eq!(
            from_json::<f64>(&v),
            Err(JsonError::UnknownKind("tan".into()))
        );
        let v = json!({"kind": "poly", "dim": 2, "terms": [{"exp": [1], "re": 1.0, "im": 0.0}]});
        assert!(matches!(from_json::<f64>(&v), Err(JsonError::Invalid(_))));
    }
}
