//! Validated analysis of univariate functions: interval and Taylor-model
//! enclosures, limit certification and adaptive plotting.

mod enclose;
mod expr;
mod limit;
mod plot;
mod taylor;

pub use enclose::{enclose, eval_interval, EncloseError, Enclosure};
pub use expr::{parse_expr, Expr, ExprError};
pub use limit::{certify_limit, probe_values, LimitPoint, LimitValue, LimitVerdict, Side, Witness};
pub use plot::{adaptive_plot, PlotCell, PlotData, PlotSettings};
pub use taylor::{taylor_model, TaylorError, TaylorModel};

/// Point evaluation; `None` where `e` is undefined at `x`.
pub fn eval_point(e: &Expr, x: f64) -> Option<f64> {
    e.eval(x)
}
