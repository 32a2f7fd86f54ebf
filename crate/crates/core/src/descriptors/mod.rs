//! Component assembly and user goal descriptions.

mod collocation;
mod format;
mod model;
mod validate;

pub use collocation::{normalize_collocation, CollocationError, CollocationPartition, GroupIds};
pub use format::{
    canonical_assembly, canonical_goal, parse_assembly, parse_assembly_document,
    parse_assembly_unchecked, parse_goal, serialize_assembly, DescriptorError, FORMAT_VERSION,
};
pub use model::{
    platform_token_eq, CollocationGroup, CollocationKind, ComponentAssembly, ComponentDecl,
    Connection, Endpoint, ImplementationAlternative, Objective, UserGoal,
};
pub use validate::validate_assembly;
