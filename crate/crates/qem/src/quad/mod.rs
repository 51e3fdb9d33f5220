//! Numerical quadrature: adaptive Gauss-Kronrod on intervals, fixed symmetric
//! rules on tetrahedra and triangles, and recursive simplex subdivision for
//! near-singular integrands.

mod gk;
mod simplex;

pub use gk::{adaptive_gk, AdaptiveOptions, QuadError, QuadValue};
pub use simplex::{
    split_tet, split_tri, tet_rule, tri_rule, TetRule, TriRule, TET_RULE_1, TET_RULE_11,
    TET_RULE_4, TRI_RULE_1, TRI_RULE_3, TRI_RULE_6, TRI_RULE_7,
};
