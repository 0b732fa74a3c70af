//! Two earlier cooperative codes that are not stable, with the attacks that
//! break their secrecy.

pub mod code_a;
pub mod code_b;

pub use code_a::{CodeA, CodeAAttack};
pub use code_b::{CodeB, CodeBAttack};
