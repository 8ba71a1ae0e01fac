use crate::model::{BinOp, Expr, Message, Ty, Value};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("in-port {0} carries no message")]
    EpsilonRead(usize),
    #[error("ill-typed operands for `{0}`")]
    IllTyped(&'static str),
}

/// Evaluates `e` against the current in-port messages and variable valuation.
pub fn eval(e: &Expr, inputs: &dyn Fn(usize) -> Message, vars: &[Value]) -> Result<Value, EvalError> {
    Ok(match e {
        Expr::Lit(v) => v.clone(),
        Expr::Port(p, _) => inputs(*p).ok_or(EvalError::EpsilonRead(*p))?,
        Expr::Var(v) => vars[*v].clone(),
        Expr::Not(inner) => match eval(inner, inputs, vars)? {
            Value::Bool(b) => Value::Bool(!b),
            _ => return Err(EvalError::IllTyped("not")),
        },
        Expr::Binary(op, l, r) => {
            let l = eval(l, inputs, vars)?;
            let r = eval(r, inputs, vars)?;
            binary(*op, l, r)?
        }
    })
}

fn binary(op: BinOp, l: Value, r: Value) -> Result<Value, EvalError> {
    use Value::*;
    Ok(match (op, l, r) {
        (BinOp::And, Bool(a), Bool(b)) => Bool(a && b),
        (BinOp::Or, Bool(a), Bool(b)) => Bool(a || b),
        (BinOp::Eq, a, b) => Bool(a == b),
        (BinOp::Ne, a, b) => Bool(a != b),
        (BinOp::Lt, Int(a), Int(b)) => Bool(a < b),
        (BinOp::Le, Int(a), Int(b)) => Bool(a <= b),
        (BinOp::Gt, Int(a), Int(b)) => Bool(a > b),
        (BinOp::Ge, Int(a), Int(b)) => Bool(a >= b),
        (BinOp::Add, Int(a), Int(b)) => Int(a.saturating_add(b)),
        (BinOp::Sub, Int(a), Int(b)) => Int(a.saturating_sub(b)),
        (op, _, _) => return Err(EvalError::IllTyped(op.symbol())),
    })
}

/// Saturates integers into a bounded range; other values pass through.
pub fn clamp(v: Value, ty: Ty) -> Value {
    match (v, ty) {
        (Value::Int(i), Ty::Int { lo, hi }) => Value::Int(i.clamp(lo, hi)),
        (v, _) => v,
    }
}
