use std::collections::HashMap;

use num_complex::Complex64;

use super::ast::{BinOp, Expr};
use crate::linalg::{ComplexMatrix, HermitianMatrix, StateVector};
use crate::quantum::{rotate_to, DensityMatrix, ProjectiveInstrument};

/// Result of evaluating an expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(Complex64),
    Ket(StateVector<f64>),
    Operator(ComplexMatrix<f64>),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "a scalar",
            Value::Ket(_) => "a ket",
            Value::Operator(_) => "an operator",
        }
    }

    /// Kets stand for their projectors wherever an operator is expected.
    fn into_operator(self) -> Result<ComplexMatrix<f64>, String> {
        match self {
            Value::Operator(m) => Ok(m),
            Value::Ket(k) => Ok(HermitianMatrix::projector(&k).map_err(|e| e.to_string())?.into_matrix()),
            Value::Scalar(_) => Err("expected a ket or operator, found a scalar".into()),
        }
    }

    pub fn into_density(self) -> Result<DensityMatrix<f64>, String> {
        match self {
            Value::Ket(k) => DensityMatrix::pure(&k).map_err(|e| e.to_string()),
            Value::Operator(m) => {
                let h = HermitianMatrix::from_matrix(m).map_err(|e| e.to_string())?;
                DensityMatrix::new(h).map_err(|e| e.to_string())
            }
            Value::Scalar(_) => Err("expected a state, found a scalar".into()),
        }
    }

    pub fn into_hermitian(self) -> Result<HermitianMatrix<f64>, String> {
        HermitianMatrix::from_matrix(self.into_operator()?).map_err(|e| e.to_string())
    }

    pub fn into_unitary(self) -> Result<ComplexMatrix<f64>, String> {
        let m = self.into_operator()?;
        if !m.is_unitary(1e-10) {
            return Err("operator is not unitary".into());
        }
        Ok(m)
    }
}

/// Named values in scope: states and instruments share one namespace.
#[derive(Default)]
pub struct Env {
    pub values: HashMap<String, Value>,
    pub instruments: HashMap<String, ProjectiveInstrument<f64>>,
}

fn scalar_arg(v: Value, f: &str) -> Result<Complex64, String> {
    match v {
        Value::Scalar(z) => Ok(z),
        other => Err(format!("{f}: expected a scalar, found {}", other.kind())),
    }
}

fn arity(f: &str, args: &[Expr], n: usize) -> Result<(), String> {
    if args.len() == n {
        Ok(())
    } else {
        Err(format!("{f} takes {n} argument(s), got {}", args.len()))
    }
}

fn dims_match(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>, op: &str) -> Result<(), String> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(format!(
            "cannot {op} operators of dimension {} and {}",
            a.dim(),
            b.dim()
        ))
    }
}

pub fn eval(e: &Expr, env: &Env) -> Result<Value, String> {
    match e {
        Expr::Number(x) => Ok(Value::Scalar(Complex64::new(*x, 0.0))),
        Expr::Imaginary(x) => Ok(Value::Scalar(Complex64::new(0.0, *x))),
        Expr::Name(n) => env.values.get(n).cloned().ok_or_else(|| {
            if env.instruments.contains_key(n) {
                format!("`{n}` is an instrument, not a value")
            } else {
                format!("undefined name `{n}`")
            }
        }),
        Expr::Neg(inner) => match eval(inner, env)? {
            Value::Scalar(z) => Ok(Value::Scalar(-z)),
            v => Ok(Value::Operator(v.into_operator()?.scale(Complex64::new(-1.0, 0.0)))),
        },
        Expr::Binary(op, a, b) => binary(*op, eval(a, env)?, eval(b, env)?),
        Expr::Call(f, args) => call(f, args, env),
    }
}

fn binary(op: BinOp, a: Value, b: Value) -> Result<Value, String> {
    use Value::Scalar;
    match (op, a, b) {
        (BinOp::Add, Scalar(x), Scalar(y)) => Ok(Scalar(x + y)),
        (BinOp::Sub, Scalar(x), Scalar(y)) => Ok(Scalar(x - y)),
        (BinOp::Mul, Scalar(x), Scalar(y)) => Ok(Scalar(x * y)),
        (BinOp::Div, Scalar(x), Scalar(y)) => {
            if y.norm() == 0.0 {
                Err("division by zero".into())
            } else {
                Ok(Scalar(x / y))
            }
        }
        (BinOp::Mul, Scalar(x), v) | (BinOp::Mul, v, Scalar(x)) => Ok(Value::Operator(v.into_operator()?.scale(x))),
        (BinOp::Div, v, Scalar(x)) => {
            if x.norm() == 0.0 {
                return Err("division by zero".into());
            }
            Ok(Value::Operator(v.into_operator()?.scale(x.inv())))
        }
        (BinOp::Add | BinOp::Sub, Scalar(_), v) | (BinOp::Add | BinOp::Sub, v, Scalar(_)) => {
            Err(format!("cannot add a scalar and {}", v.kind()))
        }
        (BinOp::Div, _, v) => Err(format!("cannot divide by {}", v.kind())),
        (op, a, b) => {
            let (a, b) = (a.into_operator()?, b.into_operator()?);
            match op {
                BinOp::Add => {
                    dims_match(&a, &b, "add")?;
                    Ok(Value::Operator(&a + &b))
                }
                BinOp::Sub => {
                    dims_match(&a, &b, "subtract")?;
                    Ok(Value::Operator(&a - &b))
                }
                _ => {
                    dims_match(&a, &b, "multiply")?;
                    Ok(Value::Operator(&a * &b))
                }
            }
        }
    }
}

fn ket_arg(v: Value, f: &str) -> Result<StateVector<f64>, String> {
    match v {
        Value::Ket(k) => Ok(k),
        other => Err(format!("{f}: expected a ket, found {}", other.kind())),
    }
}

fn call(f: &str, args: &[Expr], env: &Env) -> Result<Value, String> {
    let values = || args.iter().map(|a| eval(a, env)).collect::<Result<Vec<_>, _>>();
    match f {
        "ket" => {
            if args.is_empty() {
                return Err("ket needs at least one amplitude".into());
            }
            let amps = values()?
                .into_iter()
                .map(|v| scalar_arg(v, "ket"))
                .collect::<Result<Vec<_>, _>>()?;
            StateVector::normalized(amps).map(Value::Ket).map_err(|e| e.to_string())
        }
        "proj" => {
            arity(f, args, 1)?;
            let k = ket_arg(eval(&args[0], env)?, f)?;
            Ok(Value::Operator(
                HermitianMatrix::projector(&k).map_err(|e| e.to_string())?.into_matrix(),
            ))
        }
        "mix" => {
            arity(f, args, 1)?;
            let rho = eval(&args[0], env)?.into_density().map_err(|e| format!("mix: {e}"))?;
            Ok(Value::Operator(rho.into_matrix().into_matrix()))
        }
        "tensor" => {
            if args.len() < 2 {
                return Err("tensor needs at least two factors".into());
            }
            let mut it = values()?.into_iter();
            let mut acc = it.next().expect("two factors");
            for v in it {
                acc = match (acc, v) {
                    (Value::Ket(a), Value::Ket(b)) => Value::Ket(a.tensor(&b)),
                    (a, b) => Value::Operator(a.into_operator()?.kron(&b.into_operator()?)),
                };
            }
            Ok(acc)
        }
        "identity" => {
            arity(f, args, 1)?;
            let n = scalar_arg(eval(&args[0], env)?, f)?;
            if n.im != 0.0 || n.re < 1.0 || n.re.fract() != 0.0 || n.re > 4096.0 {
                return Err(format!("identity: bad dimension {n}"));
            }
            Ok(Value::Operator(ComplexMatrix::identity(n.re as usize)))
        }
        "rotate_to" => {
            arity(f, args, 2)?;
            let from = ket_arg(eval(&args[0], env)?, f)?;
            let to = ket_arg(eval(&args[1], env)?, f)?;
            rotate_to(&from, &to).map(Value::Operator).map_err(|e| e.to_string())
        }
        "hadamard" => {
            arity(f, args, 0)?;
            Ok(Value::Operator(crate::quantum::hadamard()))
        }
        "sqrt" => {
            arity(f, args, 1)?;
            let z = scalar_arg(eval(&args[0], env)?, f)?;
            Ok(Value::Scalar(if z.im == 0.0 && z.re >= 0.0 {
                Complex64::new(z.re.sqrt(), 0.0)
            } else {
                z.sqrt()
            }))
        }
        _ => Err(format!("unknown function `{f}`")),
    }
}
