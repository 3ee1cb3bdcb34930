//! Log-magnitude evaluation.
//!
//! Values are carried as `(ln|v|, v/|v|)`. Exponentials contribute their real
//! exponent directly and sums factor out the largest magnitude, so `cos` and
//! `sin` of arguments with `|Im w|` far beyond the floating range stay finite:
//! `ln|cos w| = |Im w| − ln 2 + ln|1 + e^{2i(±w)}|`.

use crate::scalar::{Cx, Real};

use super::{ExprError, ExprNode, Point};

#[derive(Debug, Clone, Copy)]
struct LogVal<T: Real> {
    ln: T,
    phase: Cx<T>,
}

impl<T: Real> LogVal<T> {
    fn zero() -> Self {
        Self {
            ln: T::neg_infinity(),
            phase: Cx::new(T::one(), T::zero()),
        }
    }

    fn from_complex(v: Cx<T>) -> Self {
        let m = v.norm();
        if m == T::zero() {
            return Self::zero();
        }
        Self {
            ln: m.ln(),
            phase: v / m,
        }
    }

    /// `e^{w}` without forming it.
    fn exp_of(w: Cx<T>) -> Self {
        Self {
            ln: w.re,
            phase: Cx::new(w.im.cos(), w.im.sin()),
        }
    }

    fn to_complex(self) -> Result<Cx<T>, ExprError> {
        if self.ln == T::neg_infinity() {
            return Ok(Cx::new(T::zero(), T::zero()));
        }
        if self.ln > T::ln_max() {
            return Err(ExprError::Overflow);
        }
        Ok(self.phase * self.ln.exp())
    }

    fn mul(self, other: Self) -> Self {
        if self.ln == T::neg_infinity() || other.ln == T::neg_infinity() {
            return Self::zero();
        }
        Self {
            ln: self.ln + other.ln,
            phase: self.phase * other.phase,
        }
    }

    fn scale(self, s: Cx<T>) -> Self {
        self.mul(Self::from_complex(s))
    }
}

fn log_sum<T: Real>(vals: &[LogVal<T>]) -> LogVal<T> {
    let m = vals.iter().map(|v| v.ln).fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() {
        return LogVal::zero();
    }
    let acc = vals
        .iter()
        .filter(|v| v.ln != T::neg_infinity())
        .fold(Cx::new(T::zero(), T::zero()), |acc, v| {
            acc + v.phase * (v.ln - m).exp()
        });
    let r = LogVal::from_complex(acc);
    if r.ln == T::neg_infinity() {
        return r;
    }
    LogVal {
        ln: r.ln + m,
        phase: r.phase,
    }
}

pub(super) fn log_magnitude<T: Real>(
    e: &ExprNode<T>,
    z: &Point<T>,
    pole_tol: T,
) -> Result<T, ExprError> {
    Ok(eval(e, z, pole_tol)?.ln)
}

fn eval<T: Real>(e: &ExprNode<T>, z: &Point<T>, pole_tol: T) -> Result<LogVal<T>, ExprError> {
    let ln2 = T::LN_2();
    Ok(match e {
        ExprNode::Const(c) => LogVal::from_complex(*c),
        ExprNode::Poly(p) => LogVal::from_complex(p.eval(z)),
        ExprNode::Exp(h) => LogVal::exp_of(eval(h, z, pole_tol)?.to_complex()?),
        ExprNode::Cos(h) => {
            let w = eval(h, z, pole_tol)?.to_complex()?;
            let iw = Cx::new(-w.im, w.re);
            let s = log_sum(&[LogVal::exp_of(iw), LogVal::exp_of(-iw)]);
            LogVal {
                ln: s.ln - ln2,
                phase: s.phase,
            }
        }
        ExprNode::Sin(h) => {
            let w = eval(h, z, pole_tol)?.to_complex()?;
            let iw = Cx::new(-w.im, w.re);
            let neg = LogVal::exp_of(-iw);
            let s = log_sum(&[
                LogVal::exp_of(iw),
                LogVal {
                    ln: neg.ln,
                    phase: -neg.phase,
                },
            ]);
            // divide by 2i
            LogVal {
                ln: s.ln - ln2,
                phase: s.phase * Cx::new(T::zero(), -T::one()),
            }
        }
        ExprNode::Sum(cs) => {
            let vals = cs
                .iter()
                .map(|c| eval(c, z, pole_tol))
                .collect::<Result<Vec<_>, _>>()?;
            log_sum(&vals)
        }
        ExprNode::Product(cs) => {
            let mut acc = LogVal {
                ln: T::zero(),
                phase: Cx::new(T::one(), T::zero()),
            };
            for c in cs {
                acc = acc.mul(eval(c, z, pole_tol)?);
            }
            acc
        }
        ExprNode::Quotient(n, d) => {
            let den = eval(d, z, pole_tol)?;
            if den.ln < pole_tol.ln() {
                return Err(ExprError::PoleEncountered(
                    den.ln.exp().to_f64().unwrap_or(0.0),
                ));
            }
            let num = eval(n, z, pole_tol)?;
            if num.ln == T::neg_infinity() {
                LogVal::zero()
            } else {
                LogVal {
                    ln: num.ln - den.ln,
                    phase: num.phase * den.phase.conj(),
                }
            }
        }
        ExprNode::Scale(s, c) => eval(c, z, pole_tol)?.scale(*s),
    })
}
