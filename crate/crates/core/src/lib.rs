pub mod cert;
pub mod counterexamples;
pub mod error;
pub mod field;
pub mod linalg;
pub mod oracle;
pub mod perm;
pub mod poly;
pub mod witness;
