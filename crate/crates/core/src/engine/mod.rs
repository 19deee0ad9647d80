//! Surplus/threat types over rooted 2-trees: certification of ratios
//! `x_{2,c} >= p/q`, concrete execution of a certificate, and refutation by
//! exhaustive search for 2-trees below a ratio.

pub mod certify;
pub mod execute;
pub mod ratio;
pub mod refute;
pub mod types;

pub use certify::{certify, Certificate, CertifyOutcome, CombineKind, Derivation, Failure, FailureSeed, StrategyEntry};
pub use execute::{execute, execute_graph, execute_traced, CombineStep, ExecuteOutcome};
pub use ratio::{find_ratio, stern_brocot_max, RatioSearch};
pub use refute::{profile_search, refute, refute_with_cap, RefuteOutcome, Witness, WitnessMethod, PROFILE_CAP};
pub use types::{combine_child, combine_sibling, passes_root_check, root_bonus, ChildChoice, Params, Ratio, TypeRecord};
