//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use primavoid::gf::{build_field, BuildOptions, FieldCtx, FieldParams};

pub fn field(p: u32, m: u32, n: u32) -> Arc<FieldCtx> {
    Arc::new(build_field(FieldParams::new(p, m, n).unwrap(), &BuildOptions::default()).unwrap())
}
