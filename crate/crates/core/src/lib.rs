pub mod entropy;
pub mod error;
pub mod ext;
pub mod field;
pub mod matrix;
pub mod params;
pub mod scheme;
pub mod stable;
pub mod legacy;
pub mod eavesdropper;
pub mod lemmas;
pub mod secure;
