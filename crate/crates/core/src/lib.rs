//! Classification of pencils of matrices over fields under congruence.

pub mod construct;
pub mod error;
pub mod factor;
pub mod field;
pub mod form;
pub mod matrix;
pub mod modstruct;
pub mod nonsym;
pub mod oracle;
pub mod par;
pub mod pencil;
pub mod poly;
pub mod slorbit;
pub mod symclass;

pub use error::{Error, Result};
pub use field::{Elem, Field};
pub use form::{form_split, scheme_of, BinaryForm, PointOnP1, SchemeS};
pub use matrix::{Mat, PolyMat};
pub use modstruct::{module_type, segre_symbol, smith, ModuleType, SegreSymbol, SmithForm};
pub use nonsym::{nonsym_equivalent, nonsym_equivalent_free, nonsym_module_type, PsiData};
pub use oracle::{
    brute_equivalent, brute_stabilizer, enumerate_orbits, Constraint, Group, Mode, OracleConfig,
    OrbitTable,
};
pub use par::Exec;
pub use pencil::{Pencil, Reparam};
pub use poly::Poly;
pub use slorbit::{
    algebra_of, existence_search, gs_act, gs_equal, gs_order, sl_orbit_count, stabilizer,
    FiniteAlgebra, GsClass,
};
pub use symclass::{
    local_diagonalize, sym_equivalent, sym_invariant, SymOrbitInvariant, UnitClass,
};
