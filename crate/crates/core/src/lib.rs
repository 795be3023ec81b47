pub mod degree;
pub mod notation;
pub mod poly;
pub mod tree;
pub mod treepoly;

pub use degree::{Degree, MultiIndex, ParseDegreeError};
pub use notation::{cubic_symbol, ParseTreeError};
pub use poly::{Monomial, ParsePolyError, Poly};
pub use tree::{plant, plant_with, tree_product, tree_product_all, Branch, DecoratedTree, Forest, Grading, NodeLabel, TreeError};
pub use treepoly::TreePolynomial;
pub mod structgen;
pub use structgen::{
    check_subcriticality, critical_noise_degree, generate_symbols, CriticalNoiseDegree, EquationSpec, NoiseDegree,
    Shape, StructgenError, Subcriticality, SymbolTable,
};
pub mod renorm;
pub use renorm::{Character, CoproductTerm, Flavour, RenormEngine, RenormError};
pub mod powercount;
pub use powercount::{kernel_conv_order, two_connectivity, weinberg_check, EdgeKind, FeynmanGraph, PowerCountError, WeinbergReport};
pub mod counterterm;
pub use counterterm::{
    eval_at_basepoint_reduce, renormalised_rhs, scaling_action, truncated_power, Ansatz, Counterterm, CountertermConfig,
    CountertermError, ScalingFamily, SimpleModelAction,
};
pub mod numerics;
pub use numerics::NumericsError;
